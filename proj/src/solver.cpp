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

#include "promptstack/solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <thread>
#include <utility>

namespace promptstack {

const char* TieModeName(TieMode mode) {
  return mode == TieMode::kOptimistic ? "optimistic" : "pessimistic";
}

const char* ReportKindName(ReportKind kind) {
  switch (kind) {
    case ReportKind::kClassical: return "classical";
    case ReportKind::kReasoning: return "reasoning";
    case ReportKind::kConjectural: return "conjectural";
  }
  return "unknown";
}

ConjectureFamily::ConjectureFamily(
    std::string label, std::vector<std::string> param_labels,
    std::vector<std::vector<Distribution>> responses)
    : label_(std::move(label)),
      param_labels_(std::move(param_labels)),
      responses_(std::move(responses)) {
  if (param_labels_.empty() || responses_.size() != param_labels_.size()) {
    throw Error(ErrorCode::kValidation,
                "conjecture family needs one response row per parameter");
  }
  const size_t num_messages = responses_[0].size();
  if (num_messages == 0) {
    throw Error(ErrorCode::kValidation,
                "conjecture family needs at least one message");
  }
  for (const auto& row : responses_) {
    if (row.size() != num_messages) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "ragged conjecture family response table");
    }
    for (const auto& dist : row) {
      if (dist.support_size() != row[0].support_size()) {
        throw Error(ErrorCode::kDimensionMismatch,
                    "conjecture responses must share one decision space");
      }
    }
  }
}

int ConjectureFamily::num_messages() const {
  return static_cast<int>(responses_[0].size());
}

const std::string& ConjectureFamily::param_label(int xi) const {
  if (xi < 0 || xi >= size()) {
    throw Error(ErrorCode::kUnknownContext,
                "conjecture id " + std::to_string(xi) + " out of range");
  }
  return param_labels_[static_cast<size_t>(xi)];
}

const Distribution& ConjectureFamily::Response(int xi, int message) const {
  if (xi < 0 || xi >= size()) {
    throw Error(ErrorCode::kUnknownContext,
                "conjecture id " + std::to_string(xi) + " out of range");
  }
  if (message < 0 || message >= num_messages()) {
    throw Error(ErrorCode::kUnknownContext,
                "message id " + std::to_string(message) + " out of range");
  }
  return responses_[static_cast<size_t>(xi)][static_cast<size_t>(message)];
}

std::optional<int> ConjectureFamily::FindParam(std::string_view label) const {
  for (int i = 0; i < size(); ++i) {
    if (param_labels_[static_cast<size_t>(i)] == label) return i;
  }
  return std::nullopt;
}

ConjectureFamily ConjectureFamily::Merge(
    std::string label, std::span<const ConjectureFamily> families) {
  if (families.empty()) {
    throw Error(ErrorCode::kValidation, "cannot merge zero families");
  }
  std::vector<std::string> param_labels;
  std::vector<std::vector<Distribution>> responses;
  for (const auto& family : families) {
    for (int xi = 0; xi < family.size(); ++xi) {
      param_labels.push_back(family.param_label(xi));
      std::vector<Distribution> row;
      row.reserve(static_cast<size_t>(family.num_messages()));
      for (int m = 0; m < family.num_messages(); ++m) {
        row.push_back(family.Response(xi, m));
      }
      responses.push_back(std::move(row));
    }
  }
  return ConjectureFamily(std::move(label), std::move(param_labels),
                          std::move(responses));
}

namespace {

void CheckFamilyFitsGame(const GameSpec& game, const ConjectureFamily& family) {
  if (family.num_messages() != game.messages().size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "conjecture family covers " +
                    std::to_string(family.num_messages()) +
                    " messages, game has " +
                    std::to_string(game.messages().size()));
  }
  if (family.Response(0, 0).support_size() != game.decisions().size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "conjecture family decision space does not match the game");
  }
}

// Smallest-id argmax over a dense value vector, with the exact tie set.
struct ArgmaxResult {
  int index = 0;
  double value = 0.0;
  std::vector<int> ties;
};

ArgmaxResult Argmax(std::span<const double> values) {
  ArgmaxResult result;
  result.value = values[0];
  for (size_t i = 1; i < values.size(); ++i) {
    if (values[i] > result.value) {
      result.value = values[i];
      result.index = static_cast<int>(i);
    }
  }
  for (size_t i = 0; i < values.size(); ++i) {
    if (values[i] == result.value) result.ties.push_back(static_cast<int>(i));
  }
  return result;
}

double TrueSenderValue(const GameSpec& game, int sender_prompt,
                       const ResponseProfile& profile) {
  return ExpectedUtility(game.SenderDistribution(sender_prompt),
                         profile.behavioral, game.sender_utility());
}

Calibration CalibrateWithProfile(const GameSpec& game, int sender_prompt,
                                 const ConjectureFamily& family,
                                 const ResponseProfile& profile) {
  const Distribution message_dist = game.SenderDistribution(sender_prompt);
  std::vector<double> divergences(static_cast<size_t>(family.size()), 0.0);
  for (int xi = 0; xi < family.size(); ++xi) {
    double total = 0.0;
    for (int m = 0; m < game.messages().size(); ++m) {
      // Messages outside the prompt's support impose no constraint.
      if (message_dist[m] <= 0.0) continue;
      const double kl = KlDivergence(family.Response(xi, m),
                                     profile.behavioral[static_cast<size_t>(m)]);
      if (std::isinf(kl)) {
        total = std::numeric_limits<double>::infinity();
        break;
      }
      total += message_dist[m] * kl;
    }
    divergences[static_cast<size_t>(xi)] = total;
  }
  Calibration result;
  double best = std::numeric_limits<double>::infinity();
  bool found = false;
  for (int xi = 0; xi < family.size(); ++xi) {
    const double d = divergences[static_cast<size_t>(xi)];
    if (std::isinf(d)) continue;
    if (!found || d < best) {
      best = d;
      result.xi = xi;
      found = true;
    }
  }
  if (!found) {
    throw Error(ErrorCode::kAllInfiniteDivergence,
                "every conjecture in family '" + family.label() +
                    "' violates absolute continuity on the message support of "
                    "prompt " +
                    std::to_string(sender_prompt));
  }
  result.divergence = best;
  for (int xi = 0; xi < family.size(); ++xi) {
    if (divergences[static_cast<size_t>(xi)] == best) {
      result.tied_params.push_back(xi);
    }
  }
  return result;
}

TieNote MakeSpaceTieNote(std::string context, const LabeledSpace& space,
                         const std::vector<int>& ids) {
  TieNote note;
  note.context = std::move(context);
  for (int id : ids) {
    note.ids.push_back({id});
    note.labels.push_back(space.label(id));
  }
  return note;
}

}  // namespace

RationalResponse RationalResponseSet(const GameSpec& game, int message) {
  if (!game.messages().Contains(message)) {
    throw Error(ErrorCode::kUnknownContext,
                "message id " + std::to_string(message) + " out of range");
  }
  std::vector<double> values(static_cast<size_t>(game.decisions().size()));
  for (int d = 0; d < game.decisions().size(); ++d) {
    values[static_cast<size_t>(d)] = game.receiver_utility()(message, d);
  }
  const ArgmaxResult best = Argmax(values);
  return RationalResponse{best.ties, best.value};
}

EquilibriumReport ClassicalStackelberg(const GameSpec& game, TieMode tie_mode) {
  const int num_messages = game.messages().size();
  std::vector<double> leader_values(static_cast<size_t>(num_messages));
  std::vector<int> selected_decision(static_cast<size_t>(num_messages));
  std::vector<double> follower_values(static_cast<size_t>(num_messages));
  for (int m = 0; m < num_messages; ++m) {
    const RationalResponse rational = RationalResponseSet(game, m);
    follower_values[static_cast<size_t>(m)] = rational.value;
    // Tie-mode resolution of follower indifference within the rational set;
    // among equal leader payoffs the smallest decision id wins.
    int chosen = rational.decisions[0];
    double chosen_value = game.sender_utility()(m, chosen);
    for (int d : rational.decisions) {
      const double v = game.sender_utility()(m, d);
      const bool better =
          tie_mode == TieMode::kOptimistic ? v > chosen_value : v < chosen_value;
      if (better) {
        chosen = d;
        chosen_value = v;
      }
    }
    selected_decision[static_cast<size_t>(m)] = chosen;
    leader_values[static_cast<size_t>(m)] = chosen_value;
  }
  const ArgmaxResult best = Argmax(leader_values);

  EquilibriumReport report;
  report.kind = ReportKind::kClassical;
  report.sender_prompt = best.index;
  report.sender_behavioral = Distribution::PointMass(num_messages, best.index);
  for (int m = 0; m < num_messages; ++m) {
    report.receiver_behavioral.push_back(Distribution::PointMass(
        game.decisions().size(), selected_decision[static_cast<size_t>(m)]));
  }
  report.value_A = best.value;
  report.value_D = follower_values;
  report.converged = true;

  TieNote note;
  note.context = "co-optimal (message, decision) pairs under " +
                 std::string(TieModeName(tie_mode)) + " tie-breaking";
  for (int m = 0; m < num_messages; ++m) {
    if (leader_values[static_cast<size_t>(m)] != best.value) continue;
    const RationalResponse rational = RationalResponseSet(game, m);
    for (int d : rational.decisions) {
      if (game.sender_utility()(m, d) == best.value) {
        note.ids.push_back({m, d});
        note.labels.push_back(game.messages().label(m) + " / " +
                              game.decisions().label(d));
      }
    }
  }
  report.tie_notes.push_back(std::move(note));
  return report;
}

ReceiverBest ReceiverBestPrompt(const GameSpec& game, int message) {
  if (!game.messages().Contains(message)) {
    throw Error(ErrorCode::kUnknownContext,
                "message id " + std::to_string(message) + " out of range");
  }
  const int num_prompts = game.receiver_prompts().size();
  std::vector<double> values(static_cast<size_t>(num_prompts));
  for (int y = 0; y < num_prompts; ++y) {
    const Distribution dist = game.ReceiverDistribution(message, y);
    double expected = 0.0;
    for (int d = 0; d < game.decisions().size(); ++d) {
      expected += dist[d] * game.receiver_utility()(message, d);
    }
    values[static_cast<size_t>(y)] = expected;
  }
  const ArgmaxResult best = Argmax(values);
  return ReceiverBest{best.index, game.ReceiverDistribution(message, best.index),
                      best.value, best.ties};
}

ResponseProfile TrueResponseProfile(const GameSpec& game) {
  ResponseProfile profile;
  for (int m = 0; m < game.messages().size(); ++m) {
    ReceiverBest best = ReceiverBestPrompt(game, m);
    profile.prompts.push_back(best.prompt);
    profile.behavioral.push_back(std::move(best.behavioral));
    profile.values.push_back(best.value);
    profile.tied_prompts.push_back(std::move(best.tied_prompts));
  }
  return profile;
}

namespace {

// Fills `values[x]` for every sender prompt, optionally in parallel; the
// final reduction stays sequential so the outcome is order-independent.
void ScanSenderPrompts(const GameSpec& game,
                       const std::function<double(int)>& evaluate,
                       std::vector<double>& values, int num_threads) {
  const int n = static_cast<int>(values.size());
  if (num_threads <= 1 || n < 2) {
    for (int x = 0; x < n; ++x) values[static_cast<size_t>(x)] = evaluate(x);
    return;
  }
  const int workers = std::min(num_threads, n);
  std::vector<std::thread> threads;
  threads.reserve(static_cast<size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    threads.emplace_back([&, w]() {
      for (int x = w; x < n; x += workers) {
        values[static_cast<size_t>(x)] = evaluate(x);
      }
    });
  }
  for (auto& thread : threads) thread.join();
}

}  // namespace

EquilibriumReport ReasoningEquilibrium(const GameSpec& game, int num_threads) {
  const ResponseProfile profile = TrueResponseProfile(game);
  std::vector<double> values(static_cast<size_t>(game.sender_prompts().size()));
  ScanSenderPrompts(
      game,
      [&](int x) { return TrueSenderValue(game, x, profile); },
      values, num_threads);
  const ArgmaxResult best = Argmax(values);

  EquilibriumReport report;
  report.kind = ReportKind::kReasoning;
  report.sender_prompt = best.index;
  report.receiver_prompts =
      PromptPolicy::ForReceiver(game.messages().size(), 1, profile.prompts);
  report.sender_behavioral = game.SenderDistribution(best.index);
  report.receiver_behavioral = profile.behavioral;
  report.value_A = best.value;
  report.value_D = profile.values;
  report.converged = true;
  if (best.ties.size() > 1) {
    report.tie_notes.push_back(MakeSpaceTieNote(
        "co-optimal sender prompts", game.sender_prompts(), best.ties));
  }
  for (int m = 0; m < game.messages().size(); ++m) {
    const auto& tied = profile.tied_prompts[static_cast<size_t>(m)];
    if (tied.size() > 1) {
      report.tie_notes.push_back(MakeSpaceTieNote(
          "co-optimal receiver prompts for message '" +
              game.messages().label(m) + "'",
          game.receiver_prompts(), tied));
    }
  }
  return report;
}

ConjecturalBest ConjecturalBestPrompt(const GameSpec& game,
                                      const ConjectureFamily& family, int xi) {
  CheckFamilyFitsGame(game, family);
  if (xi < 0 || xi >= family.size()) {
    throw Error(ErrorCode::kUnknownContext,
                "conjecture id " + std::to_string(xi) + " out of range");
  }
  std::vector<Distribution> conjectured;
  conjectured.reserve(static_cast<size_t>(game.messages().size()));
  for (int m = 0; m < game.messages().size(); ++m) {
    conjectured.push_back(family.Response(xi, m));
  }
  std::vector<double> values(static_cast<size_t>(game.sender_prompts().size()));
  for (int x = 0; x < game.sender_prompts().size(); ++x) {
    values[static_cast<size_t>(x)] = ExpectedUtility(
        game.SenderDistribution(x), conjectured, game.sender_utility());
  }
  const ArgmaxResult best = Argmax(values);
  return ConjecturalBest{best.index, best.value, best.ties};
}

Calibration CalibrateConjecture(const GameSpec& game, int sender_prompt,
                                const ConjectureFamily& family) {
  CheckFamilyFitsGame(game, family);
  if (!game.sender_prompts().Contains(sender_prompt)) {
    throw Error(ErrorCode::kUnknownContext,
                "sender prompt id " + std::to_string(sender_prompt) +
                    " out of range");
  }
  const ResponseProfile profile = TrueResponseProfile(game);
  return CalibrateWithProfile(game, sender_prompt, family, profile);
}

EquilibriumReport ConjecturalEquilibrium(const GameSpec& game,
                                         const ConjectureFamily& family,
                                         int init_xi, int max_iters) {
  CheckFamilyFitsGame(game, family);
  if (init_xi < 0 || init_xi >= family.size()) {
    throw Error(ErrorCode::kUnknownContext,
                "initial conjecture id " + std::to_string(init_xi) +
                    " out of range");
  }
  if (max_iters < 1) {
    throw Error(ErrorCode::kValidation, "max_iters must be >= 1");
  }
  const ResponseProfile profile = TrueResponseProfile(game);

  EquilibriumReport report;
  report.kind = ReportKind::kConjectural;
  report.converged = false;

  std::map<std::pair<int, int>, int> seen;  // (prompt, conjecture) -> round
  int xi_prev = init_xi;
  int final_prompt = -1;
  int final_xi = -1;
  for (int round = 1; round <= max_iters; ++round) {
    const ConjecturalBest best = ConjecturalBestPrompt(game, family, xi_prev);
    const Calibration calibrated =
        CalibrateWithProfile(game, best.prompt, family, profile);
    const double true_value = TrueSenderValue(game, best.prompt, profile);
    report.trace.push_back(TraceRecord{round - 1, best.prompt, calibrated.xi,
                                       best.conjectured_value, true_value,
                                       calibrated.divergence});
    final_prompt = best.prompt;
    final_xi = calibrated.xi;
    if (calibrated.xi == xi_prev) {
      // The pair maps to itself: re-optimizing under calibrated.xi gives
      // best.prompt again and recalibration returns calibrated.xi.
      report.converged = true;
      break;
    }
    const auto pair = std::make_pair(best.prompt, calibrated.xi);
    const auto found = seen.find(pair);
    if (found != seen.end()) {
      // Limit cycle: rounds found->second .. round-1 repeat forever. Report
      // the on-cycle pair with the highest realized value (smallest prompt
      // then conjecture id on ties).
      const size_t cycle_begin = static_cast<size_t>(found->second - 1);
      const size_t cycle_end = static_cast<size_t>(round - 1);  // exclusive
      size_t pick = cycle_begin;
      for (size_t i = cycle_begin; i < cycle_end; ++i) {
        const TraceRecord& candidate = report.trace[i];
        const TraceRecord& current = report.trace[pick];
        if (candidate.true_value > current.true_value ||
            (candidate.true_value == current.true_value &&
             std::make_pair(candidate.sender_prompt, candidate.conjecture) <
                 std::make_pair(current.sender_prompt, current.conjecture))) {
          pick = i;
        }
      }
      final_prompt = report.trace[pick].sender_prompt;
      final_xi = report.trace[pick].conjecture;
      break;
    }
    seen.emplace(pair, round);
    xi_prev = calibrated.xi;
  }

  report.sender_prompt = final_prompt;
  report.conjecture = final_xi;
  report.receiver_prompts =
      PromptPolicy::ForReceiver(game.messages().size(), 1, profile.prompts);
  report.sender_behavioral = game.SenderDistribution(final_prompt);
  report.receiver_behavioral = profile.behavioral;
  report.value_A = TrueSenderValue(game, final_prompt, profile);
  report.value_D = profile.values;

  const ConjecturalBest final_best =
      ConjecturalBestPrompt(game, family, final_xi);
  if (final_best.tied_prompts.size() > 1) {
    report.tie_notes.push_back(MakeSpaceTieNote(
        "co-optimal sender prompts under conjecture '" +
            family.param_label(final_xi) + "'",
        game.sender_prompts(), final_best.tied_prompts));
  }
  const Calibration final_cal =
      CalibrateWithProfile(game, final_prompt, family, profile);
  if (final_cal.tied_params.size() > 1) {
    TieNote note;
    note.context = "co-minimal conjectures for prompt '" +
                   game.sender_prompts().label(final_prompt) + "'";
    for (int xi : final_cal.tied_params) {
      note.ids.push_back({xi});
      note.labels.push_back(family.param_label(xi));
    }
    report.tie_notes.push_back(std::move(note));
  }
  return report;
}

std::vector<ConjecturalFixedPoint> BruteForceConjectural(
    const GameSpec& game, const ConjectureFamily& family) {
  CheckFamilyFitsGame(game, family);
  const ResponseProfile profile = TrueResponseProfile(game);
  const int num_prompts = game.sender_prompts().size();
  const int num_params = family.size();

  // Dense tables of the two fixed-point functionals.
  std::vector<std::vector<double>> conjectured(
      static_cast<size_t>(num_prompts),
      std::vector<double>(static_cast<size_t>(num_params), 0.0));
  std::vector<std::vector<double>> divergence(
      static_cast<size_t>(num_prompts),
      std::vector<double>(static_cast<size_t>(num_params), 0.0));
  for (int x = 0; x < num_prompts; ++x) {
    const Distribution message_dist = game.SenderDistribution(x);
    for (int xi = 0; xi < num_params; ++xi) {
      double value = 0.0;
      double div = 0.0;
      for (int m = 0; m < game.messages().size(); ++m) {
        const Distribution& belief = family.Response(xi, m);
        double inner = 0.0;
        for (int d = 0; d < game.decisions().size(); ++d) {
          inner += belief[d] * game.sender_utility()(m, d);
        }
        value += message_dist[m] * inner;
        if (message_dist[m] > 0.0 && !std::isinf(div)) {
          const double kl = KlDivergence(
              belief, profile.behavioral[static_cast<size_t>(m)]);
          div = std::isinf(kl) ? kl : div + message_dist[m] * kl;
        }
      }
      conjectured[static_cast<size_t>(x)][static_cast<size_t>(xi)] = value;
      divergence[static_cast<size_t>(x)][static_cast<size_t>(xi)] = div;
    }
  }

  std::vector<double> max_conjectured(static_cast<size_t>(num_params),
                                      -std::numeric_limits<double>::infinity());
  for (int xi = 0; xi < num_params; ++xi) {
    for (int x = 0; x < num_prompts; ++x) {
      max_conjectured[static_cast<size_t>(xi)] =
          std::max(max_conjectured[static_cast<size_t>(xi)],
                   conjectured[static_cast<size_t>(x)][static_cast<size_t>(xi)]);
    }
  }
  std::vector<double> min_divergence(static_cast<size_t>(num_prompts),
                                     std::numeric_limits<double>::infinity());
  for (int x = 0; x < num_prompts; ++x) {
    for (int xi = 0; xi < num_params; ++xi) {
      min_divergence[static_cast<size_t>(x)] =
          std::min(min_divergence[static_cast<size_t>(x)],
                   divergence[static_cast<size_t>(x)][static_cast<size_t>(xi)]);
    }
  }

  std::vector<ConjecturalFixedPoint> fixed_points;
  for (int x = 0; x < num_prompts; ++x) {
    for (int xi = 0; xi < num_params; ++xi) {
      const double value =
          conjectured[static_cast<size_t>(x)][static_cast<size_t>(xi)];
      const double div =
          divergence[static_cast<size_t>(x)][static_cast<size_t>(xi)];
      // Both optimality conditions as exact set membership; a conjecture at
      // infinite divergence is never consistent.
      if (value != max_conjectured[static_cast<size_t>(xi)]) continue;
      if (std::isinf(div) || div != min_divergence[static_cast<size_t>(x)]) {
        continue;
      }
      fixed_points.push_back(ConjecturalFixedPoint{
          x, xi, value, TrueSenderValue(game, x, profile), div});
    }
  }
  return fixed_points;
}

}  // namespace promptstack
