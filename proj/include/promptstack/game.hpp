// Copyright 2026 The PromptStack Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PROMPTSTACK_GAME_HPP_
#define PROMPTSTACK_GAME_HPP_

#include <memory>
#include <string>
#include <vector>

#include "promptstack/core.hpp"
#include "promptstack/policy.hpp"

namespace promptstack {

// The full sequential game: prompt/message/decision spaces, fixed
// information contexts, both utility tables, and the two generative
// policies. Immutable during solving; construction validates everything,
// including that each policy answers every in-range query with a valid
// distribution of the right support.
class GameSpec {
 public:
  struct Init {
    std::vector<std::string> sender_prompts;
    std::vector<std::string> receiver_prompts;
    std::vector<std::string> messages;
    std::vector<std::string> decisions;
    std::vector<std::string> sender_info = {"default"};
    std::vector<std::string> receiver_info = {"default"};
    int active_sender_info = 0;
    int active_receiver_info = 0;
    UtilityTable sender_utility;
    UtilityTable receiver_utility;
    std::shared_ptr<const GenerativePolicy> sender_policy;
    std::shared_ptr<const GenerativePolicy> receiver_policy;
  };

  explicit GameSpec(Init init);

  const LabeledSpace& sender_prompts() const { return sender_prompts_; }
  const LabeledSpace& receiver_prompts() const { return receiver_prompts_; }
  const LabeledSpace& messages() const { return messages_; }
  const LabeledSpace& decisions() const { return decisions_; }
  const LabeledSpace& sender_info() const { return sender_info_; }
  const LabeledSpace& receiver_info() const { return receiver_info_; }
  int active_sender_info() const { return active_sender_info_; }
  int active_receiver_info() const { return active_receiver_info_; }
  const UtilityTable& sender_utility() const { return sender_utility_; }
  const UtilityTable& receiver_utility() const { return receiver_utility_; }
  const GenerativePolicy& sender_policy() const { return *sender_policy_; }
  const GenerativePolicy& receiver_policy() const { return *receiver_policy_; }
  std::shared_ptr<const GenerativePolicy> sender_policy_ptr() const {
    return sender_policy_;
  }
  std::shared_ptr<const GenerativePolicy> receiver_policy_ptr() const {
    return receiver_policy_;
  }

  // Message distribution for a sender prompt at the active info context.
  Distribution SenderDistribution(int prompt) const;
  // Decision distribution for (message, receiver prompt) at the active
  // info context.
  Distribution ReceiverDistribution(int message, int prompt) const;

  // Returns a GameSpec that reuses this one except for a replaced policy.
  GameSpec WithSenderPolicy(std::shared_ptr<const GenerativePolicy>) const;
  GameSpec WithReceiverPolicy(std::shared_ptr<const GenerativePolicy>) const;

 private:
  void Validate() const;

  LabeledSpace sender_prompts_;
  LabeledSpace receiver_prompts_;
  LabeledSpace messages_;
  LabeledSpace decisions_;
  LabeledSpace sender_info_;
  LabeledSpace receiver_info_;
  int active_sender_info_;
  int active_receiver_info_;
  UtilityTable sender_utility_;
  UtilityTable receiver_utility_;
  std::shared_ptr<const GenerativePolicy> sender_policy_;
  std::shared_ptr<const GenerativePolicy> receiver_policy_;
};

}  // namespace promptstack

#endif  // PROMPTSTACK_GAME_HPP_
