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

#ifndef PROMPTSTACK_CORE_HPP_
#define PROMPTSTACK_CORE_HPP_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "promptstack/errors.hpp"

// Foundational value types shared by every other component: finite-support
// probability vectors, labeled index spaces, payoff tables, and the
// expectation / divergence primitives the solvers are built from. All types
// are immutable after construction and all operations are pure.

namespace promptstack {

// Tolerance for accepting a probability vector at construction time.
inline constexpr double kProbabilitySumTolerance = 1e-9;
// Tolerance for treating two distributions as logically identical.
inline constexpr double kProbabilityEqualityTolerance = 1e-12;

// A probability distribution over an indexed finite space.
class Distribution {
 public:
  // Validates non-negativity and unit sum (within kProbabilitySumTolerance).
  explicit Distribution(std::vector<double> probs);

  // Normalizes arbitrary non-negative weights into a distribution.
  static Distribution FromWeights(std::span<const double> weights);

  static Distribution PointMass(int support_size, int index);
  static Distribution Uniform(int support_size);

  int support_size() const { return static_cast<int>(probs_.size()); }
  double operator[](int i) const { return probs_[static_cast<size_t>(i)]; }
  const std::vector<double>& probs() const { return probs_; }

  // Entrywise comparison within tolerance.
  bool ApproxEquals(const Distribution& other,
                    double tolerance = kProbabilityEqualityTolerance) const;

 private:
  std::vector<double> probs_;
};

// KL(p || q) in nats. Terms with p_i = 0 contribute nothing; any i with
// p_i > 0 and q_i = 0 makes the divergence +infinity.
double KlDivergence(const Distribution& p, const Distribution& q);

// (1/2) * sum_i |p_i - q_i|, in [0, 1].
double TotalVariation(const Distribution& p, const Distribution& q);

enum class SpaceKind {
  kSenderPrompt,
  kReceiverPrompt,
  kMessage,
  kDecision,
  kSenderInfo,
  kReceiverInfo,
};

const char* SpaceKindName(SpaceKind kind);

// A single element of a labeled space.
struct SpaceIndex {
  SpaceKind kind;
  int id = 0;
  std::string label;
};

// A finite space whose elements carry unique human-readable labels.
class LabeledSpace {
 public:
  LabeledSpace(SpaceKind kind, std::vector<std::string> labels);

  SpaceKind kind() const { return kind_; }
  int size() const { return static_cast<int>(labels_.size()); }
  const std::string& label(int id) const;
  SpaceIndex at(int id) const;
  std::optional<int> Find(std::string_view label) const;
  bool Contains(int id) const { return id >= 0 && id < size(); }

 private:
  SpaceKind kind_;
  std::vector<std::string> labels_;
};

// Payoffs indexed by (message id, decision id); one table per agent role.
class UtilityTable {
 public:
  UtilityTable(int num_messages, int num_decisions, double fill = 0.0);
  static UtilityTable FromRows(const std::vector<std::vector<double>>& rows);

  int num_messages() const { return num_messages_; }
  int num_decisions() const { return num_decisions_; }
  double operator()(int message, int decision) const;
  void Set(int message, int decision, double value);

 private:
  int num_messages_;
  int num_decisions_;
  std::vector<double> values_;  // row-major by message
};

// sum_m dist_m(m) * sum_d response[m](d) * utility(m, d): the nested
// expectation of a payoff under a message distribution and a per-message
// response profile.
double ExpectedUtility(const Distribution& message_dist,
                       std::span<const Distribution> response,
                       const UtilityTable& utility);

}  // namespace promptstack

#endif  // PROMPTSTACK_CORE_HPP_
