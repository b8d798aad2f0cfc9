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

#include "promptstack/game.hpp"

namespace promptstack {

GameSpec::GameSpec(Init init)
    : sender_prompts_(SpaceKind::kSenderPrompt, std::move(init.sender_prompts)),
      receiver_prompts_(SpaceKind::kReceiverPrompt,
                        std::move(init.receiver_prompts)),
      messages_(SpaceKind::kMessage, std::move(init.messages)),
      decisions_(SpaceKind::kDecision, std::move(init.decisions)),
      sender_info_(SpaceKind::kSenderInfo, std::move(init.sender_info)),
      receiver_info_(SpaceKind::kReceiverInfo, std::move(init.receiver_info)),
      active_sender_info_(init.active_sender_info),
      active_receiver_info_(init.active_receiver_info),
      sender_utility_(std::move(init.sender_utility)),
      receiver_utility_(std::move(init.receiver_utility)),
      sender_policy_(std::move(init.sender_policy)),
      receiver_policy_(std::move(init.receiver_policy)) {
  Validate();
}

void GameSpec::Validate() const {
  if (!sender_policy_ || !receiver_policy_) {
    throw Error(ErrorCode::kValidation, "both generative policies are required");
  }
  if (sender_policy_->role() != PolicyRole::kSender) {
    throw Error(ErrorCode::kValidation, "sender policy has the wrong role");
  }
  if (receiver_policy_->role() != PolicyRole::kReceiver) {
    throw Error(ErrorCode::kValidation, "receiver policy has the wrong role");
  }
  if (!sender_info_.Contains(active_sender_info_) ||
      !receiver_info_.Contains(active_receiver_info_)) {
    throw Error(ErrorCode::kValidation, "active info context out of range");
  }
  if (sender_utility_.num_messages() != messages_.size() ||
      sender_utility_.num_decisions() != decisions_.size() ||
      receiver_utility_.num_messages() != messages_.size() ||
      receiver_utility_.num_decisions() != decisions_.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "utility table dimensions do not match the message/decision "
                "spaces");
  }
  if (sender_policy_->output_size() != messages_.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "sender policy output size does not match the message space");
  }
  if (receiver_policy_->output_size() != decisions_.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "receiver policy output size does not match the decision space");
  }
  // Every in-range query must answer with a valid distribution. Spaces are
  // finite, so check exhaustively at the active contexts.
  for (int x = 0; x < sender_prompts_.size(); ++x) {
    (void)sender_policy_->SenderDistribution(active_sender_info_, x);
  }
  for (int m = 0; m < messages_.size(); ++m) {
    for (int y = 0; y < receiver_prompts_.size(); ++y) {
      (void)receiver_policy_->ReceiverDistribution(m, active_receiver_info_, y);
    }
  }
}

Distribution GameSpec::SenderDistribution(int prompt) const {
  if (!sender_prompts_.Contains(prompt)) {
    throw Error(ErrorCode::kUnknownContext,
                "sender prompt id " + std::to_string(prompt) + " out of range");
  }
  return sender_policy_->SenderDistribution(active_sender_info_, prompt);
}

Distribution GameSpec::ReceiverDistribution(int message, int prompt) const {
  if (!messages_.Contains(message)) {
    throw Error(ErrorCode::kUnknownContext,
                "message id " + std::to_string(message) + " out of range");
  }
  if (!receiver_prompts_.Contains(prompt)) {
    throw Error(ErrorCode::kUnknownContext,
                "receiver prompt id " + std::to_string(prompt) + " out of range");
  }
  return receiver_policy_->ReceiverDistribution(message, active_receiver_info_,
                                                prompt);
}

namespace {

std::vector<std::string> CopyLabels(const LabeledSpace& space) {
  std::vector<std::string> labels;
  labels.reserve(static_cast<size_t>(space.size()));
  for (int i = 0; i < space.size(); ++i) labels.push_back(space.label(i));
  return labels;
}

}  // namespace

GameSpec GameSpec::WithSenderPolicy(
    std::shared_ptr<const GenerativePolicy> policy) const {
  Init init{CopyLabels(sender_prompts_), CopyLabels(receiver_prompts_),
            CopyLabels(messages_),       CopyLabels(decisions_),
            CopyLabels(sender_info_),    CopyLabels(receiver_info_),
            active_sender_info_,         active_receiver_info_,
            sender_utility_,             receiver_utility_,
            std::move(policy),           receiver_policy_};
  return GameSpec(std::move(init));
}

GameSpec GameSpec::WithReceiverPolicy(
    std::shared_ptr<const GenerativePolicy> policy) const {
  Init init{CopyLabels(sender_prompts_), CopyLabels(receiver_prompts_),
            CopyLabels(messages_),       CopyLabels(decisions_),
            CopyLabels(sender_info_),    CopyLabels(receiver_info_),
            active_sender_info_,         active_receiver_info_,
            sender_utility_,             receiver_utility_,
            sender_policy_,              std::move(policy)};
  return GameSpec(std::move(init));
}

}  // namespace promptstack
