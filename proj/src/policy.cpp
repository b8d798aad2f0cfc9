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

#include "promptstack/policy.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace promptstack {

const char* PolicyRoleName(PolicyRole role) {
  return role == PolicyRole::kSender ? "sender" : "receiver";
}

const char* PolicyBackendName(PolicyBackend backend) {
  switch (backend) {
    case PolicyBackend::kTabular: return "tabular";
    case PolicyBackend::kGrammar: return "grammar";
    case PolicyBackend::kEstimated: return "estimated";
  }
  return "unknown";
}

std::string PolicyKey::ToString() const {
  std::string out = "(info=" + std::to_string(info) +
                    ", prompt=" + std::to_string(prompt);
  if (message >= 0) out += ", message=" + std::to_string(message);
  return out + ")";
}

GenerativePolicy::GenerativePolicy(PolicyRole role, PolicyBackend backend,
                                   int output_size, std::string worldview_tag)
    : role_(role),
      backend_(backend),
      output_size_(output_size),
      worldview_tag_(std::move(worldview_tag)) {
  if (output_size < 1) {
    throw Error(ErrorCode::kValidation, "policy output size must be >= 1");
  }
}

Distribution GenerativePolicy::SenderDistribution(int info, int prompt) const {
  if (role_ != PolicyRole::kSender) {
    throw Error(ErrorCode::kUnknownContext,
                "sender query issued against a receiver policy");
  }
  return CheckedQuery({info, prompt, -1});
}

Distribution GenerativePolicy::ReceiverDistribution(int message, int info,
                                                    int prompt) const {
  if (role_ != PolicyRole::kReceiver) {
    throw Error(ErrorCode::kUnknownContext,
                "receiver query issued against a sender policy");
  }
  if (message < 0) {
    throw Error(ErrorCode::kUnknownContext, "receiver query needs a message id");
  }
  return CheckedQuery({info, prompt, message});
}

Distribution GenerativePolicy::CheckedQuery(const PolicyKey& key) const {
  Distribution dist = Query(key);
  if (dist.support_size() != output_size_) {
    throw Error(ErrorCode::kInvalidDistribution,
                "backend returned support " + std::to_string(dist.support_size()) +
                    " for declared output size " + std::to_string(output_size_) +
                    " at " + key.ToString());
  }
  return dist;
}

TabularPolicy::TabularPolicy(PolicyRole role, int output_size,
                             std::string worldview_tag, PolicyBackend backend)
    : GenerativePolicy(role, backend, output_size, std::move(worldview_tag)) {}

void TabularPolicy::Set(const PolicyKey& key, Distribution dist) {
  if (dist.support_size() != output_size()) {
    throw Error(ErrorCode::kInvalidDistribution,
                "table entry support " + std::to_string(dist.support_size()) +
                    " does not match output size " + std::to_string(output_size()));
  }
  table_.insert_or_assign(key, std::move(dist));
}

bool TabularPolicy::Contains(const PolicyKey& key) const {
  return table_.find(key) != table_.end();
}

Distribution TabularPolicy::Query(const PolicyKey& key) const {
  auto it = table_.find(key);
  if (it == table_.end()) {
    throw Error(ErrorCode::kUnknownContext,
                "no table entry for " + key.ToString());
  }
  return it->second;
}

UnestimatedPolicy::UnestimatedPolicy(PolicyRole role, int output_size)
    : GenerativePolicy(role, PolicyBackend::kEstimated, output_size,
                       "unestimated") {}

Distribution UnestimatedPolicy::Query(const PolicyKey& key) const {
  throw Error(ErrorCode::kBackendUnavailable,
              "estimated backend queried before estimation at " + key.ToString());
}

namespace {

int CountOccurrences(const std::string& text, const std::string& needle) {
  if (needle.empty()) return 0;
  int count = 0;
  size_t pos = 0;
  while ((pos = text.find(needle, pos)) != std::string::npos) {
    ++count;
    pos += needle.size();
  }
  return count;
}

}  // namespace

PromptGrammar::PromptGrammar(std::string template_text,
                             std::vector<GrammarSlot> slots)
    : template_text_(std::move(template_text)), slots_(std::move(slots)) {
  if (slots_.empty()) {
    throw Error(ErrorCode::kValidation, "grammar needs at least one slot");
  }
  long long product = 1;
  for (const auto& slot : slots_) {
    if (slot.values.empty()) {
      throw Error(ErrorCode::kValidation,
                  "slot '" + slot.name + "' has an empty vocabulary");
    }
    std::unordered_set<std::string_view> seen;
    for (const auto& value : slot.values) {
      if (!seen.insert(value).second) {
        throw Error(ErrorCode::kValidation,
                    "slot '" + slot.name + "' repeats value '" + value + "'");
      }
    }
    const std::string placeholder = "[" + slot.name + "]";
    if (CountOccurrences(template_text_, placeholder) != 1) {
      throw Error(ErrorCode::kValidation,
                  "template must contain exactly one placeholder " + placeholder);
    }
    product *= static_cast<long long>(slot.values.size());
    if (product > (1LL << 30)) {
      throw Error(ErrorCode::kValidation, "grammar enumeration too large");
    }
  }
  size_ = static_cast<int>(product);
}

std::vector<int> PromptGrammar::Decode(int id) const {
  if (id < 0 || id >= size_) {
    throw Error(ErrorCode::kUnknownContext,
                "prompt id " + std::to_string(id) + " out of range [0, " +
                    std::to_string(size_) + ")");
  }
  std::vector<int> choice(slots_.size(), 0);
  int rest = id;
  for (size_t s = slots_.size(); s-- > 0;) {
    const int radix = static_cast<int>(slots_[s].values.size());
    choice[s] = rest % radix;
    rest /= radix;
  }
  return choice;
}

int PromptGrammar::Encode(std::span<const int> choice) const {
  if (choice.size() != slots_.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "choice tuple has " + std::to_string(choice.size()) +
                    " entries, grammar has " + std::to_string(slots_.size()) +
                    " slots");
  }
  int id = 0;
  for (size_t s = 0; s < slots_.size(); ++s) {
    const int radix = static_cast<int>(slots_[s].values.size());
    if (choice[s] < 0 || choice[s] >= radix) {
      throw Error(ErrorCode::kUnknownContext,
                  "slot '" + slots_[s].name + "' value index " +
                      std::to_string(choice[s]) + " out of range");
    }
    id = id * radix + choice[s];
  }
  return id;
}

std::string PromptGrammar::Render(int id) const {
  const std::vector<int> choice = Decode(id);
  std::string out = template_text_;
  for (size_t s = 0; s < slots_.size(); ++s) {
    const std::string placeholder = "[" + slots_[s].name + "]";
    const size_t pos = out.find(placeholder);
    out.replace(pos, placeholder.size(),
                slots_[s].values[static_cast<size_t>(choice[s])]);
  }
  return out;
}

std::vector<std::pair<int, std::string>> PromptGrammar::Enumerate() const {
  std::vector<std::pair<int, std::string>> out;
  out.reserve(static_cast<size_t>(size_));
  for (int id = 0; id < size_; ++id) out.emplace_back(id, Render(id));
  return out;
}

std::vector<std::string> PromptGrammar::Labels() const {
  std::vector<std::string> out;
  out.reserve(static_cast<size_t>(size_));
  for (int id = 0; id < size_; ++id) out.push_back(Render(id));
  return out;
}

GrammarPolicy::GrammarPolicy(PolicyRole role, int output_size,
                             PromptGrammar grammar, ResponseFn response,
                             std::string worldview_tag)
    : GenerativePolicy(role, PolicyBackend::kGrammar, output_size,
                       std::move(worldview_tag)),
      grammar_(std::move(grammar)),
      response_(std::move(response)) {
  if (!response_) {
    throw Error(ErrorCode::kValidation, "grammar policy needs a response rule");
  }
}

Distribution GrammarPolicy::Query(const PolicyKey& key) const {
  if (key.prompt < 0 || key.prompt >= grammar_.size()) {
    throw Error(ErrorCode::kUnknownContext,
                "prompt id out of grammar range at " + key.ToString());
  }
  const std::vector<int> choice = grammar_.Decode(key.prompt);
  return response_(key, choice);
}

PromptPolicy::PromptPolicy(PolicyRole role, int num_messages, int num_infos,
                           std::vector<int> prompts)
    : role_(role),
      num_messages_(num_messages),
      num_infos_(num_infos),
      prompts_(std::move(prompts)) {}

PromptPolicy PromptPolicy::ForSender(std::vector<int> prompt_by_info) {
  if (prompt_by_info.empty()) {
    throw Error(ErrorCode::kValidation, "sender prompt policy must be total");
  }
  const int infos = static_cast<int>(prompt_by_info.size());
  return PromptPolicy(PolicyRole::kSender, 0, infos, std::move(prompt_by_info));
}

PromptPolicy PromptPolicy::ForReceiver(int num_messages, int num_infos,
                                       std::vector<int> prompt_by_message_info) {
  if (num_messages < 1 || num_infos < 1 ||
      prompt_by_message_info.size() !=
          static_cast<size_t>(num_messages) * static_cast<size_t>(num_infos)) {
    throw Error(ErrorCode::kValidation, "receiver prompt policy must be total");
  }
  return PromptPolicy(PolicyRole::kReceiver, num_messages, num_infos,
                      std::move(prompt_by_message_info));
}

int PromptPolicy::SenderPrompt(int info) const {
  if (role_ != PolicyRole::kSender || info < 0 || info >= num_infos_) {
    throw Error(ErrorCode::kUnknownContext,
                "invalid sender prompt-policy query for info " +
                    std::to_string(info));
  }
  return prompts_[static_cast<size_t>(info)];
}

int PromptPolicy::ReceiverPrompt(int message, int info) const {
  if (role_ != PolicyRole::kReceiver || message < 0 || message >= num_messages_ ||
      info < 0 || info >= num_infos_) {
    throw Error(ErrorCode::kUnknownContext,
                "invalid receiver prompt-policy query for (message=" +
                    std::to_string(message) + ", info=" + std::to_string(info) +
                    ")");
  }
  return prompts_[static_cast<size_t>(message) * num_infos_ + info];
}

std::uint64_t MixSeed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 over the combined word.
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

int SampleIndex(const Distribution& dist, std::mt19937_64& rng) {
  const double u =
      static_cast<double>(rng() >> 11) * 0x1.0p-53;  // uniform in [0, 1)
  double cumulative = 0.0;
  for (int i = 0; i < dist.support_size(); ++i) {
    cumulative += dist[i];
    if (u < cumulative) return i;
  }
  return dist.support_size() - 1;
}

TabularPolicy EstimatePolicy(const Sampler& sampler, PolicyRole role,
                             int output_size,
                             std::span<const PolicyKey> contexts,
                             int n_samples, double alpha, std::uint64_t seed,
                             std::string source_tag) {
  if (n_samples < 1) {
    throw Error(ErrorCode::kValidation, "n_samples must be >= 1");
  }
  if (alpha < 0.0) {
    throw Error(ErrorCode::kValidation, "smoothing alpha must be >= 0");
  }
  if (contexts.empty()) {
    throw Error(ErrorCode::kValidation, "estimation needs at least one context");
  }
  TabularPolicy policy(role, output_size, source_tag, PolicyBackend::kEstimated);
  for (size_t c = 0; c < contexts.size(); ++c) {
    const PolicyKey& key = contexts[c];
    std::mt19937_64 rng(MixSeed(seed, static_cast<std::uint64_t>(c)));
    std::vector<long long> counts(static_cast<size_t>(output_size), 0);
    for (int s = 0; s < n_samples; ++s) {
      int outcome;
      try {
        outcome = sampler(key, rng);
      } catch (const Error&) {
        throw;
      } catch (const std::exception& e) {
        throw Error(ErrorCode::kSamplerFailure,
                    "sampler failed at " + key.ToString() + ": " + e.what());
      }
      if (outcome < 0 || outcome >= output_size) {
        throw Error(ErrorCode::kSamplerFailure,
                    "sampler returned out-of-range id " +
                        std::to_string(outcome) + " at " + key.ToString());
      }
      ++counts[static_cast<size_t>(outcome)];
    }
    const double denominator =
        static_cast<double>(n_samples) + alpha * output_size;
    std::vector<double> probs(static_cast<size_t>(output_size));
    for (int i = 0; i < output_size; ++i) {
      probs[static_cast<size_t>(i)] =
          (static_cast<double>(counts[static_cast<size_t>(i)]) + alpha) /
          denominator;
    }
    policy.Set(key, Distribution::FromWeights(probs));
  }
  policy.set_provenance(TabularPolicy::Provenance{
      n_samples, alpha, seed, std::move(source_tag)});
  return policy;
}

}  // namespace promptstack
