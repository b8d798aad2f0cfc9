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

#ifndef PROMPTSTACK_POLICY_HPP_
#define PROMPTSTACK_POLICY_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "promptstack/core.hpp"

// Generative response models: the maps from (information context, reasoning
// prompt) to output distributions, in three interchangeable backends —
// explicit tables, grammar-structured rules, and frozen empirical estimates
// of opaque samplers.

namespace promptstack {

enum class PolicyRole { kSender, kReceiver };
enum class PolicyBackend { kTabular, kGrammar, kEstimated };

const char* PolicyRoleName(PolicyRole role);
const char* PolicyBackendName(PolicyBackend backend);

// Query context for a generative policy. Sender queries leave `message`
// at -1; receiver queries condition on the observed message as well.
struct PolicyKey {
  int info = 0;
  int prompt = 0;
  int message = -1;

  bool operator==(const PolicyKey& other) const = default;
  bool operator<(const PolicyKey& other) const {
    return std::tie(info, prompt, message) <
           std::tie(other.info, other.prompt, other.message);
  }
  std::string ToString() const;
};

// Abstract response model: maps a context to a distribution over the
// role's output space (messages for senders, decisions for receivers).
// Implementations are immutable once handed to a GameSpec and must be
// deterministic: equal keys always yield equal distributions.
class GenerativePolicy {
 public:
  GenerativePolicy(PolicyRole role, PolicyBackend backend,
                   int output_size, std::string worldview_tag);
  virtual ~GenerativePolicy() = default;

  PolicyRole role() const { return role_; }
  PolicyBackend backend() const { return backend_; }
  int output_size() const { return output_size_; }
  const std::string& worldview_tag() const { return worldview_tag_; }

  // Message distribution given (info, prompt). Sender role only.
  Distribution SenderDistribution(int info, int prompt) const;

  // Decision distribution given (message, info, prompt). Receiver role only.
  Distribution ReceiverDistribution(int message, int info, int prompt) const;

 protected:
  virtual Distribution Query(const PolicyKey& key) const = 0;

 private:
  Distribution CheckedQuery(const PolicyKey& key) const;

  PolicyRole role_;
  PolicyBackend backend_;
  int output_size_;
  std::string worldview_tag_;
};

// Explicit finite realization of a generative policy: one stored
// distribution per context. Also the carrier for frozen empirical
// estimates, which record their sampling provenance.
class TabularPolicy : public GenerativePolicy {
 public:
  struct Provenance {
    long long n_samples = 0;
    double alpha = 0.0;
    std::uint64_t seed = 0;
    std::string source;
  };

  TabularPolicy(PolicyRole role, int output_size,
                std::string worldview_tag = "tabular",
                PolicyBackend backend = PolicyBackend::kTabular);

  // Build-phase mutation; GameSpec holds the policy as const thereafter.
  void Set(const PolicyKey& key, Distribution dist);
  bool Contains(const PolicyKey& key) const;
  const std::map<PolicyKey, Distribution>& table() const { return table_; }

  void set_provenance(Provenance provenance) { provenance_ = std::move(provenance); }
  const std::optional<Provenance>& provenance() const { return provenance_; }

 protected:
  Distribution Query(const PolicyKey& key) const override;

 private:
  std::map<PolicyKey, Distribution> table_;
  std::optional<Provenance> provenance_;
};

// Placeholder for an estimated backend that has not been estimated yet;
// every query reports BackendUnavailable.
class UnestimatedPolicy : public GenerativePolicy {
 public:
  UnestimatedPolicy(PolicyRole role, int output_size);

 protected:
  Distribution Query(const PolicyKey& key) const override;
};

// One template slot: a name plus its controlled vocabulary.
struct GrammarSlot {
  std::string name;
  std::vector<std::string> values;
};

// A structured prompt space: a template with one [SlotName] placeholder per
// slot, instantiated over the Cartesian product of the slot vocabularies.
// Prompt identity is the slot-value tuple; ids order the product
// lexicographically with the last slot varying fastest.
class PromptGrammar {
 public:
  PromptGrammar(std::string template_text, std::vector<GrammarSlot> slots);

  int size() const { return size_; }
  const std::string& template_text() const { return template_text_; }
  const std::vector<GrammarSlot>& slots() const { return slots_; }

  std::vector<int> Decode(int id) const;
  int Encode(std::span<const int> choice) const;
  std::string Render(int id) const;

  // Full enumeration as (id, instantiated string), deterministic.
  std::vector<std::pair<int, std::string>> Enumerate() const;

  // All rendered strings in id order (convenient as space labels).
  std::vector<std::string> Labels() const;

 private:
  std::string template_text_;
  std::vector<GrammarSlot> slots_;
  int size_;
};

// Grammar-structured backend: the output distribution is computed from the
// context and the decoded slot-value tuple of the prompt by a fixed rule.
class GrammarPolicy : public GenerativePolicy {
 public:
  using ResponseFn = std::function<Distribution(
      const PolicyKey& key, std::span<const int> slot_choice)>;

  GrammarPolicy(PolicyRole role, int output_size, PromptGrammar grammar,
                ResponseFn response, std::string worldview_tag = "grammar");

  const PromptGrammar& grammar() const { return grammar_; }

 protected:
  Distribution Query(const PolicyKey& key) const override;

 private:
  PromptGrammar grammar_;
  ResponseFn response_;
};

// A deterministic prompt-generation map: sender variant takes an info id,
// receiver variant takes (message, info). Equilibrium solvers emit these
// as the chosen reasoning prompts.
class PromptPolicy {
 public:
  static PromptPolicy ForSender(std::vector<int> prompt_by_info);
  static PromptPolicy ForReceiver(int num_messages, int num_infos,
                                  std::vector<int> prompt_by_message_info);

  PolicyRole role() const { return role_; }
  int SenderPrompt(int info) const;
  int ReceiverPrompt(int message, int info) const;
  int num_messages() const { return num_messages_; }
  int num_infos() const { return num_infos_; }

 private:
  PromptPolicy(PolicyRole role, int num_messages, int num_infos,
               std::vector<int> prompts);

  PolicyRole role_;
  int num_messages_;
  int num_infos_;
  std::vector<int> prompts_;  // receiver: row-major by (message, info)
};

// Opaque sampling function: one output id per call. The engine owns the
// random stream so that estimates are reproducible; samplers that wrap
// remote services may ignore the generator.
using Sampler = std::function<int(const PolicyKey& key, std::mt19937_64& rng)>;

// Deterministic 64-bit stream-splitting mix, used to derive per-context
// sub-seeds so estimation is independent of evaluation order.
std::uint64_t MixSeed(std::uint64_t seed, std::uint64_t stream);

// Draws an index from `dist` with a single uniform variate via inverse CDF;
// portable across platforms for a fixed generator state.
int SampleIndex(const Distribution& dist, std::mt19937_64& rng);

// Monte-Carlo estimation of an opaque sampler as a frozen table.
// For each context, probs[i] = (count_i + alpha) / (n_samples + alpha * K)
// where K is the output-space size. Reproducible given `seed`; each
// context's stream derives from a context-indexed sub-seed.
TabularPolicy EstimatePolicy(const Sampler& sampler, PolicyRole role,
                             int output_size,
                             std::span<const PolicyKey> contexts,
                             int n_samples, double alpha, std::uint64_t seed,
                             std::string source_tag = "estimated");

}  // namespace promptstack

#endif  // PROMPTSTACK_POLICY_HPP_
