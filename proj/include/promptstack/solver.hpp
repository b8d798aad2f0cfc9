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

#ifndef PROMPTSTACK_SOLVER_HPP_
#define PROMPTSTACK_SOLVER_HPP_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "promptstack/game.hpp"

// Equilibrium computation over finite prompt spaces by exact enumeration:
// the classical leader-commitment solution, the prompt-level equilibrium
// with its induced behavioral profile, and the conjectural fixed point
// where the sender optimizes against a calibrated belief family. All
// argmax/argmin ties break toward the smallest id and every tied
// alternative is reported.

namespace promptstack {

enum class TieMode { kOptimistic, kPessimistic };
enum class ReportKind { kClassical, kReasoning, kConjectural };

const char* TieModeName(TieMode mode);
const char* ReportKindName(ReportKind kind);

// A finite indexed family of conjectured receiver behaviors: for each
// parameter id, one decision distribution per message.
class ConjectureFamily {
 public:
  ConjectureFamily(std::string label, std::vector<std::string> param_labels,
                   std::vector<std::vector<Distribution>> responses);

  const std::string& label() const { return label_; }
  int size() const { return static_cast<int>(param_labels_.size()); }
  int num_messages() const;
  const std::string& param_label(int xi) const;
  const Distribution& Response(int xi, int message) const;
  std::optional<int> FindParam(std::string_view label) const;

  // Concatenates several families into one, preserving order.
  static ConjectureFamily Merge(std::string label,
                                std::span<const ConjectureFamily> families);

 private:
  std::string label_;
  std::vector<std::string> param_labels_;
  std::vector<std::vector<Distribution>> responses_;  // [xi][message]
};

// One alternation step of the conjectural solver: the prompt chosen under
// the previous conjecture, the recalibrated conjecture, the value the
// sender anticipated, the realized value, and the recalibrated divergence.
struct TraceRecord {
  int iteration = 0;
  int sender_prompt = 0;
  int conjecture = 0;
  double conjectured_value = 0.0;
  double true_value = 0.0;
  double divergence = 0.0;
};

// A set of co-optimal alternatives left behind by a tie-break, with enough
// identification to audit the decision.
struct TieNote {
  std::string context;
  std::vector<std::vector<int>> ids;  // one tuple per tied alternative
  std::vector<std::string> labels;
};

struct EquilibriumReport {
  ReportKind kind = ReportKind::kReasoning;
  // Chosen sender prompt; for the classical solver this is the committed
  // message id instead.
  int sender_prompt = 0;
  // y*(m) per message at the active receiver info (absent for classical).
  std::optional<PromptPolicy> receiver_prompts;
  // Calibrated conjecture id (conjectural only).
  std::optional<int> conjecture;
  Distribution sender_behavioral = Distribution::PointMass(1, 0);
  std::vector<Distribution> receiver_behavioral;  // per message
  double value_A = 0.0;
  std::vector<double> value_D;  // per message
  std::vector<TraceRecord> trace;
  bool converged = true;
  std::vector<TieNote> tie_notes;
};

// The follower's optimal pure responses to one observed message, plus the
// common optimal value. Mixed best responses are exactly the distributions
// supported on this set.
struct RationalResponse {
  std::vector<int> decisions;
  double value = 0.0;
};

RationalResponse RationalResponseSet(const GameSpec& game, int message);

// Leader commits to a pure message; follower best-responds from the
// rational set, with follower indifference resolved for (optimistic) or
// against (pessimistic) the leader.
EquilibriumReport ClassicalStackelberg(const GameSpec& game, TieMode tie_mode);

// The receiver's optimal reasoning prompt for one observed message, the
// behavioral response it induces, and its expected utility.
struct ReceiverBest {
  int prompt = 0;
  Distribution behavioral;
  double value = 0.0;
  std::vector<int> tied_prompts;  // every optimal prompt id
};

ReceiverBest ReceiverBestPrompt(const GameSpec& game, int message);

// Prompt-level equilibrium: y*(m) for every message, then the sender
// prompt maximizing expected utility against the induced responses.
// `num_threads` parallelizes the sender-prompt scan without affecting
// the result.
EquilibriumReport ReasoningEquilibrium(const GameSpec& game,
                                       int num_threads = 1);

struct ConjecturalBest {
  int prompt = 0;
  double conjectured_value = 0.0;
  std::vector<int> tied_prompts;
};

// Sender optimum against a fixed conjectured response model.
ConjecturalBest ConjecturalBestPrompt(const GameSpec& game,
                                      const ConjectureFamily& family, int xi);

struct Calibration {
  int xi = 0;
  double divergence = 0.0;
  std::vector<int> tied_params;
};

// Belief-alignment step: the family member minimizing expected KL
// divergence from the true induced receiver behavior, averaged over the
// message distribution of `sender_prompt`. Candidates with infinite
// divergence rank last; if every candidate is infinite the family cannot
// represent the truth and AllInfiniteDivergence is raised.
Calibration CalibrateConjecture(const GameSpec& game, int sender_prompt,
                                const ConjectureFamily& family);

// Alternates prompt optimization and conjecture calibration from `init_xi`
// until the (prompt, conjecture) pair repeats or `max_iters` rounds elapse.
// A pair that maps to itself is a fixed point (converged = true); a longer
// cycle returns the on-cycle pair with the highest realized value and
// converged = false. The report's behavioral profile and value always use
// the true induced receiver behavior, not the conjecture.
EquilibriumReport ConjecturalEquilibrium(const GameSpec& game,
                                         const ConjectureFamily& family,
                                         int init_xi, int max_iters);

struct ConjecturalFixedPoint {
  int sender_prompt = 0;
  int conjecture = 0;
  double conjectured_value = 0.0;
  double true_value = 0.0;
  double divergence = 0.0;
};

// Exhaustive verification oracle: every (prompt, conjecture) pair that
// satisfies both fixed-point conditions exactly, sorted by (prompt,
// conjecture). Intended for small spaces.
std::vector<ConjecturalFixedPoint> BruteForceConjectural(
    const GameSpec& game, const ConjectureFamily& family);

// The true induced receiver profile: y*(m), sigma_D*(.|m) and U*_D(m) for
// every message. Shared by the reasoning and conjectural solvers.
struct ResponseProfile {
  std::vector<int> prompts;
  std::vector<Distribution> behavioral;
  std::vector<double> values;
  std::vector<std::vector<int>> tied_prompts;  // per message
};

ResponseProfile TrueResponseProfile(const GameSpec& game);

}  // namespace promptstack

#endif  // PROMPTSTACK_SOLVER_HPP_
