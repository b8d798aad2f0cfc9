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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "promptstack/solver.hpp"
#include "test_util.hpp"

using namespace promptstack;
using namespace promptstack::testing;

namespace {

// Two point-mass prompts onto two messages, one receiver prompt whose click
// probabilities are `clicks`, sender paid 1 per click. The single receiver
// prompt makes the induced behavior exactly `clicks`.
GameSpec PointMassGame(const std::vector<double>& clicks) {
  std::vector<std::vector<std::vector<double>>> receiver_rows;
  for (double c : clicks) receiver_rows.push_back({{c, 1.0 - c}});
  std::vector<std::vector<double>> sender_rows;
  for (size_t m = 0; m < clicks.size(); ++m) {
    std::vector<double> row(clicks.size(), 0.0);
    row[m] = 1.0;
    sender_rows.push_back(row);
  }
  const std::vector<std::vector<double>> zeros(clicks.size(), {0.0, 0.0});
  std::vector<std::vector<double>> paid(clicks.size(), {1.0, 0.0});
  return MakeGame(sender_rows, receiver_rows, paid, zeros);
}

void CheckReportConsistency(const GameSpec& game,
                            const EquilibriumReport& report) {
  const double recomputed = ExpectedUtility(
      report.sender_behavioral, report.receiver_behavioral,
      game.sender_utility());
  CHECK(std::abs(recomputed - report.value_A) <= 1e-9);
  if (report.kind != ReportKind::kClassical) {
    const Distribution expected = game.SenderDistribution(report.sender_prompt);
    for (int m = 0; m < expected.support_size(); ++m) {
      CHECK(report.sender_behavioral[m] == expected[m]);
    }
  }
}

}  // namespace

TEST_CASE("rational response sets are exact argmax sets") {
  const GameSpec game = MakeGame(
      {{1.0, 0.0}, {0.0, 1.0}},
      {{{0.5, 0.5}}, {{0.5, 0.5}}},
      {{1, 0}, {1, 0}},
      /*receiver_utility=*/{{1.0, 0.0}, {-1.0, 0.0}});
  const RationalResponse dominant = RationalResponseSet(game, 0);
  CHECK(dominant.decisions == std::vector<int>{0});
  CHECK(dominant.value == doctest::Approx(1.0));

  // Hand evaluation of the 2-case max: -1 vs 0.
  const RationalResponse averse = RationalResponseSet(game, 1);
  CHECK(averse.decisions == std::vector<int>{1});
  CHECK(averse.value == doctest::Approx(0.0));
}

TEST_CASE("a fully indifferent follower keeps every decision") {
  const GameSpec game = MakeGame({{1.0}}, {{{0.5, 0.5}}}, {{1, 0}},
                                 {{0.0, 0.0}});
  const RationalResponse tie = RationalResponseSet(game, 0);
  CHECK(tie.decisions == std::vector<int>{0, 1});
  CHECK(tie.value == doctest::Approx(0.0));
}

TEST_CASE("classical tie modes diverge on the hand-built game") {
  // Under m0 the follower is indifferent (leader gets 5 or 0); under m1 the
  // response is unique and pays the leader 3.
  const GameSpec game = MakeGame(
      {{1.0, 0.0}, {0.0, 1.0}},
      {{{0.5, 0.5}}, {{0.5, 0.5}}},
      /*sender_utility=*/{{5.0, 0.0}, {3.0, 3.0}},
      /*receiver_utility=*/{{0.0, 0.0}, {1.0, 0.0}});
  const EquilibriumReport optimistic =
      ClassicalStackelberg(game, TieMode::kOptimistic);
  CHECK(optimistic.sender_prompt == 0);
  CHECK(optimistic.value_A == doctest::Approx(5.0));
  CheckReportConsistency(game, optimistic);

  const EquilibriumReport pessimistic =
      ClassicalStackelberg(game, TieMode::kPessimistic);
  CHECK(pessimistic.sender_prompt == 1);
  CHECK(pessimistic.value_A == doctest::Approx(3.0));
  CheckReportConsistency(game, pessimistic);
}

TEST_CASE("classical on a 1x1 game returns the only pair") {
  const GameSpec game = MakeGame({{1.0}}, {{{1.0}}}, {{4.5}}, {{0.0}});
  const EquilibriumReport report =
      ClassicalStackelberg(game, TieMode::kPessimistic);
  CHECK(report.sender_prompt == 0);
  CHECK(report.value_A == doctest::Approx(4.5));
}

TEST_CASE("classical total indifference breaks to the smallest ids") {
  const GameSpec game = MakeGame(
      {{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}},
      {{{0.5, 0.5}}, {{0.5, 0.5}}, {{0.5, 0.5}}},
      {{0, 0}, {0, 0}, {0, 0}},
      {{0, 0}, {0, 0}, {0, 0}});
  const EquilibriumReport report =
      ClassicalStackelberg(game, TieMode::kOptimistic);
  CHECK(report.sender_prompt == 0);
  CHECK(report.value_A == doctest::Approx(0.0));
  REQUIRE(report.tie_notes.size() == 1);
  // Every (message, decision) pair is co-optimal.
  CHECK(report.tie_notes[0].ids.size() == 6);
}

TEST_CASE("optimistic dominates pessimistic on random games") {
  std::mt19937_64 rng(2101);
  for (int trial = 0; trial < 200; ++trial) {
    const GameSpec game = RandomGame(rng);
    const double optimistic =
        ClassicalStackelberg(game, TieMode::kOptimistic).value_A;
    const double pessimistic =
        ClassicalStackelberg(game, TieMode::kPessimistic).value_A;
    CHECK(optimistic >= pessimistic - 1e-9);
  }
}

TEST_CASE("receiver best prompt on the canonical game") {
  const GameSpec game = G1();
  const ReceiverBest first = ReceiverBestPrompt(game, 0);
  CHECK(first.prompt == 0);
  CHECK(first.value == doctest::Approx(0.9));
  CHECK(first.behavioral[0] == doctest::Approx(0.9));
  CHECK(first.behavioral[1] == doctest::Approx(0.1));

  // Hand evaluation: clicking hurts, 0.3 * -1 beats 0.8 * -1.
  const ReceiverBest second = ReceiverBestPrompt(game, 1);
  CHECK(second.prompt == 0);
  CHECK(second.value == doctest::Approx(-0.3));
  CHECK(second.behavioral[0] == doctest::Approx(0.3));
}

TEST_CASE("a prompt-invariant receiver ties across the whole space") {
  const GameSpec game = MakeGame(
      {{1.0}},
      {{{0.4, 0.6}, {0.4, 0.6}, {0.4, 0.6}}},
      {{1, 0}},
      {{1.0, 0.0}});
  const ReceiverBest best = ReceiverBestPrompt(game, 0);
  CHECK(best.prompt == 0);
  CHECK(best.tied_prompts == std::vector<int>{0, 1, 2});
}

TEST_CASE("tied receiver prompts all attain the optimal value") {
  std::mt19937_64 rng(4242);
  for (int trial = 0; trial < 100; ++trial) {
    const GameSpec game = RandomGame(rng);
    for (int m = 0; m < game.messages().size(); ++m) {
      const ReceiverBest best = ReceiverBestPrompt(game, m);
      for (int y : best.tied_prompts) {
        const Distribution dist = game.ReceiverDistribution(m, y);
        double value = 0.0;
        for (int d = 0; d < game.decisions().size(); ++d) {
          value += dist[d] * game.receiver_utility()(m, d);
        }
        CHECK(std::abs(value - best.value) <= 1e-9);
      }
    }
  }
}

TEST_CASE("reasoning equilibrium on the canonical game") {
  const GameSpec game = G1();
  const EquilibriumReport report = ReasoningEquilibrium(game);
  CHECK(report.sender_prompt == 0);
  CHECK(report.value_A == doctest::Approx(0.9));
  REQUIRE(report.receiver_prompts.has_value());
  CHECK(report.receiver_prompts->ReceiverPrompt(0, 0) == 0);
  CHECK(report.receiver_prompts->ReceiverPrompt(1, 0) == 0);
  CHECK(report.value_D[0] == doctest::Approx(0.9));
  CHECK(report.value_D[1] == doctest::Approx(-0.3));
  CHECK(report.converged);
  CheckReportConsistency(game, report);
}

TEST_CASE("reasoning equilibrium on singleton spaces echoes the raw policies") {
  const GameSpec game = MakeGame({{1.0}}, {{{0.35, 0.65}}}, {{1, 0}},
                                 {{-1.0, 0.0}});
  const EquilibriumReport report = ReasoningEquilibrium(game);
  CHECK(report.sender_prompt == 0);
  CHECK(report.receiver_behavioral[0][0] == doctest::Approx(0.35));
  CHECK(report.value_A == doctest::Approx(0.35));
}

TEST_CASE("constant sender utility ties every prompt") {
  const GameSpec game = MakeGame(
      {{1.0, 0.0}, {0.0, 1.0}, {0.5, 0.5}},
      {{{0.3, 0.7}}, {{0.6, 0.4}}},
      {{2.5, 2.5}, {2.5, 2.5}},
      {{1.0, 0.0}, {1.0, 0.0}});
  const EquilibriumReport report = ReasoningEquilibrium(game);
  CHECK(report.sender_prompt == 0);
  CHECK(report.value_A == doctest::Approx(2.5));
  REQUIRE_FALSE(report.tie_notes.empty());
  CHECK(report.tie_notes[0].ids.size() == 3);
}

TEST_CASE("reasoning equilibrium matches the enumeration oracle") {
  std::mt19937_64 rng(90210);
  for (int trial = 0; trial < 300; ++trial) {
    const GameSpec game = RandomGame(rng);
    const EquilibriumReport report = ReasoningEquilibrium(game);
    const ReasoningOracle oracle = EnumerateReasoningEquilibrium(game);
    CHECK(report.sender_prompt == oracle.sender_prompt);
    CHECK(std::abs(report.value_A - oracle.value) <= 1e-9);
    for (int m = 0; m < game.messages().size(); ++m) {
      CHECK(report.receiver_prompts->ReceiverPrompt(m, 0) ==
            oracle.receiver_prompts[static_cast<size_t>(m)]);
    }
    CheckReportConsistency(game, report);
  }
}

TEST_CASE("positive scaling of the sender utility never moves the argmax") {
  std::mt19937_64 rng(5150);
  for (int trial = 0; trial < 50; ++trial) {
    const GameSpec game = RandomGame(rng);
    const double scale = 3.75;
    std::vector<std::vector<double>> scaled_utility;
    for (int m = 0; m < game.messages().size(); ++m) {
      std::vector<double> row;
      for (int d = 0; d < game.decisions().size(); ++d) {
        row.push_back(scale * game.sender_utility()(m, d));
      }
      scaled_utility.push_back(row);
    }
    std::vector<std::vector<double>> receiver_utility;
    std::vector<std::vector<double>> sender_rows;
    std::vector<std::vector<std::vector<double>>> receiver_rows(
        static_cast<size_t>(game.messages().size()));
    for (int x = 0; x < game.sender_prompts().size(); ++x) {
      sender_rows.push_back(game.SenderDistribution(x).probs());
    }
    for (int m = 0; m < game.messages().size(); ++m) {
      std::vector<double> row;
      for (int d = 0; d < game.decisions().size(); ++d) {
        row.push_back(game.receiver_utility()(m, d));
      }
      receiver_utility.push_back(row);
      for (int y = 0; y < game.receiver_prompts().size(); ++y) {
        receiver_rows[static_cast<size_t>(m)].push_back(
            game.ReceiverDistribution(m, y).probs());
      }
    }
    const GameSpec scaled =
        MakeGame(sender_rows, receiver_rows, scaled_utility, receiver_utility);
    const EquilibriumReport base = ReasoningEquilibrium(game);
    const EquilibriumReport rescaled = ReasoningEquilibrium(scaled);
    CHECK(base.sender_prompt == rescaled.sender_prompt);
    CHECK(rescaled.value_A ==
          doctest::Approx(scale * base.value_A).epsilon(1e-9));
    for (int m = 0; m < game.messages().size(); ++m) {
      CHECK(base.receiver_prompts->ReceiverPrompt(m, 0) ==
            rescaled.receiver_prompts->ReceiverPrompt(m, 0));
    }
  }
}

TEST_CASE("the sender-prompt scan is thread-invariant") {
  std::mt19937_64 rng(777);
  for (int trial = 0; trial < 20; ++trial) {
    const GameSpec game = RandomGame(rng);
    const EquilibriumReport serial = ReasoningEquilibrium(game, 1);
    const EquilibriumReport parallel = ReasoningEquilibrium(game, 8);
    CHECK(serial.sender_prompt == parallel.sender_prompt);
    CHECK(serial.value_A == parallel.value_A);  // bitwise
  }
}

TEST_CASE("conjectural best prompt optimizes the believed response") {
  const GameSpec game = PointMassGame({0.27, 0.10});
  const ConjectureFamily family =
      ClickFamily("pair", {"DS", "RA"}, {{0.3, 0.1}, {0.05, 0.05}});
  const ConjecturalBest best = ConjecturalBestPrompt(game, family, 0);
  CHECK(best.prompt == 0);
  CHECK(best.conjectured_value == doctest::Approx(0.3));

  // An indifferent conjecture ties every prompt and picks id 0.
  const ConjecturalBest indifferent = ConjecturalBestPrompt(game, family, 1);
  CHECK(indifferent.prompt == 0);
  CHECK(indifferent.tied_prompts == std::vector<int>{0, 1});
}

TEST_CASE("conjectured value equals belief-weighted click mass under unit pay") {
  const GameSpec game = PointMassGame({0.5, 0.5});
  const ConjectureFamily family = ClickFamily("one", {"only"}, {{0.42, 0.17}});
  const ConjecturalBest best = ConjecturalBestPrompt(game, family, 0);
  CHECK(best.conjectured_value == doctest::Approx(0.42));
}

TEST_CASE("calibration picks the closest conjecture in divergence") {
  const GameSpec game = PointMassGame({0.27, 0.10});
  const ConjectureFamily family =
      ClickFamily("pair", {"near", "far"}, {{0.3, 0.1}, {0.8, 0.8}});
  const Calibration calibration = CalibrateConjecture(game, 0, family);
  CHECK(calibration.xi == 0);
  // Frozen from direct evaluation of 0.3 ln(0.3/0.27) + 0.7 ln(0.7/0.73).
  CHECK(calibration.divergence == doctest::Approx(0.00221557).epsilon(1e-4));
}

TEST_CASE("a realizable conjecture calibrates to zero divergence") {
  const GameSpec game = PointMassGame({0.27, 0.10});
  const ConjectureFamily family =
      ClickFamily("with-truth", {"truth", "DS"}, {{0.27, 0.10}, {0.3, 0.1}});
  const Calibration calibration = CalibrateConjecture(game, 0, family);
  CHECK(calibration.xi == 0);
  CHECK(calibration.divergence == doctest::Approx(0.0));
}

TEST_CASE("an unsupportable family raises AllInfiniteDivergence") {
  // Truth clicks with probability 1; the only conjecture says never-click,
  // putting conjectured mass on an outcome of true probability zero.
  const GameSpec game = PointMassGame({1.0, 1.0});
  const ConjectureFamily family = ClickFamily("bad", {"never"}, {{0.0, 0.0}});
  try {
    CalibrateConjecture(game, 0, family);
    FAIL("expected AllInfiniteDivergence");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kAllInfiniteDivergence);
  }
}

TEST_CASE("conjectural alternation reaches the self-confirming pair") {
  const GameSpec game = PointMassGame({0.27, 0.10});
  const ConjectureFamily family =
      ClickFamily("pair", {"DS", "RA"}, {{0.3, 0.1}, {0.05, 0.05}});
  const EquilibriumReport report = ConjecturalEquilibrium(game, family, 0, 32);
  CHECK(report.converged);
  CHECK(report.sender_prompt == 0);
  REQUIRE(report.conjecture.has_value());
  CHECK(*report.conjecture == 0);
  CHECK(report.value_A == doctest::Approx(0.27));
  CHECK(report.trace.size() == 1);
  CheckReportConsistency(game, report);
}

TEST_CASE("an exactly-true conjecture reproduces the reasoning optimum") {
  const GameSpec game = PointMassGame({0.27, 0.10});
  const ConjectureFamily family =
      ClickFamily("with-truth", {"truth", "DS"}, {{0.27, 0.10}, {0.3, 0.1}});
  const EquilibriumReport conjectural =
      ConjecturalEquilibrium(game, family, 1, 32);
  const EquilibriumReport reasoning = ReasoningEquilibrium(game);
  CHECK(conjectural.converged);
  CHECK(conjectural.sender_prompt == reasoning.sender_prompt);
  CHECK(conjectural.value_A == doctest::Approx(reasoning.value_A));
  CHECK(*conjectural.conjecture == 0);
}

TEST_CASE("an iteration cap stops the alternation unconverged") {
  const GameSpec game = PointMassGame({0.27, 0.10});
  const ConjectureFamily family =
      ClickFamily("pair", {"DS", "RA"}, {{0.3, 0.1}, {0.05, 0.05}});
  // From RA the first round recalibrates to DS, so one round cannot fix.
  const EquilibriumReport report = ConjecturalEquilibrium(game, family, 1, 1);
  CHECK_FALSE(report.converged);
  CHECK(report.trace.size() == 1);
}

// Constructed so the alternation oscillates: each conjecture matches the
// truth exactly on the message the *other* conjecture's optimal prompt
// sends. Calibration then flips the belief every round.
namespace {
GameSpec CycleGame() { return PointMassGame({0.1, 0.8}); }
ConjectureFamily CycleFamily() {
  return ClickFamily("cycle", {"bullish-m0", "bullish-m1"},
                     {{0.9, 0.8}, {0.1, 0.95}});
}
}  // namespace

TEST_CASE("a limit cycle is surfaced, not hidden") {
  const EquilibriumReport report =
      ConjecturalEquilibrium(CycleGame(), CycleFamily(), 0, 64);
  CHECK_FALSE(report.converged);
  // The on-cycle pair with the higher realized value is (x1, xi0).
  CHECK(report.sender_prompt == 1);
  REQUIRE(report.conjecture.has_value());
  CHECK(*report.conjecture == 0);
  CHECK(report.value_A == doctest::Approx(0.8));
  CHECK(report.trace.size() == 3);
}

TEST_CASE("the brute-force oracle finds no fixed point on the cycle game") {
  const auto fixed_points = BruteForceConjectural(CycleGame(), CycleFamily());
  CHECK(fixed_points.empty());
}

TEST_CASE("the brute-force oracle lists exactly the self-confirming pair") {
  const GameSpec game = PointMassGame({0.27, 0.10});
  const ConjectureFamily family =
      ClickFamily("pair", {"DS", "RA"}, {{0.3, 0.1}, {0.05, 0.05}});
  const auto fixed_points = BruteForceConjectural(game, family);
  REQUIRE(fixed_points.size() == 1);
  CHECK(fixed_points[0].sender_prompt == 0);
  CHECK(fixed_points[0].conjecture == 0);
  CHECK(fixed_points[0].true_value == doctest::Approx(0.27));
}

TEST_CASE("a singleton family with finite divergence is its own fixed point") {
  const GameSpec game = PointMassGame({0.6});
  const ConjectureFamily family = ClickFamily("solo", {"only"}, {{0.5}});
  const auto fixed_points = BruteForceConjectural(game, family);
  REQUIRE(fixed_points.size() == 1);
  CHECK(fixed_points[0].sender_prompt == 0);
  CHECK(fixed_points[0].conjecture == 0);
}

TEST_CASE("every converged alternation result is an oracle fixed point") {
  std::mt19937_64 rng(31337);
  int converged_count = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const GameSpec game = RandomGame(rng);
    const ConjectureFamily family = RandomFamily(rng, game);
    const EquilibriumReport report =
        ConjecturalEquilibrium(game, family, 0, 64);
    if (!report.converged) continue;
    ++converged_count;
    const auto fixed_points = BruteForceConjectural(game, family);
    bool found = false;
    for (const auto& fp : fixed_points) {
      if (fp.sender_prompt == report.sender_prompt &&
          fp.conjecture == *report.conjecture) {
        found = true;
        CHECK(std::abs(fp.true_value - report.value_A) <= 1e-9);
      }
    }
    CHECK(found);

    // Fixed-point verification: one more round maps the pair to itself.
    const ConjecturalBest rebest =
        ConjecturalBestPrompt(game, family, *report.conjecture);
    CHECK(rebest.prompt == report.sender_prompt);
    const Calibration recal =
        CalibrateConjecture(game, report.sender_prompt, family);
    CHECK(recal.xi == *report.conjecture);
  }
  CHECK(converged_count > 50);  // the alternation should usually settle
}

TEST_CASE("conjectural reports use the true behavior, not the belief") {
  const GameSpec game = PointMassGame({0.27, 0.10});
  const ConjectureFamily family = ClickFamily("pair", {"DS"}, {{0.9, 0.9}});
  const EquilibriumReport report = ConjecturalEquilibrium(game, family, 0, 8);
  CHECK(report.receiver_behavioral[0][0] == doctest::Approx(0.27));
  CHECK(report.receiver_behavioral[1][0] == doctest::Approx(0.10));
  CHECK(report.value_A == doctest::Approx(0.27));  // not the believed 0.9
}

TEST_CASE("solver inputs are validated") {
  const GameSpec game = PointMassGame({0.5, 0.5});
  const ConjectureFamily family = ClickFamily("pair", {"a"}, {{0.5, 0.5}});
  CHECK_THROWS_AS(ConjecturalBestPrompt(game, family, 3), Error);
  CHECK_THROWS_AS(ConjecturalEquilibrium(game, family, 0, 0), Error);
  CHECK_THROWS_AS(RationalResponseSet(game, 9), Error);
  const ConjectureFamily wrong = ClickFamily("w", {"a"}, {{0.5, 0.5, 0.5}});
  CHECK_THROWS_AS(CalibrateConjecture(game, 0, wrong), Error);
}
