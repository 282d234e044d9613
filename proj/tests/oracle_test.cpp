#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "pots/engine.hpp"
#include "pots/oracle.hpp"

namespace pots {
namespace {

using oracle::TinyScenario;

// P(u1 < 1.1 u0) for u0, u1 ~ U[0.8, 1.2], integrated exactly over the unit square.
constexpr double kPairWinProbability = 39.0 / 55.0;

TEST(Dominance, Examples) {
  EXPECT_EQ(oracle::dominance_check({{{100.0}, {1.0}}}), std::optional<std::size_t>(0));
  EXPECT_EQ(oracle::dominance_check({{{2.0}, {1.0}}}), std::optional<std::size_t>(0));
  EXPECT_EQ(oracle::dominance_check({{{1.0}, {1.1}}}), std::nullopt);
  EXPECT_EQ(oracle::dominance_check({{{1.0}, {1.0}, {3.0}}}), std::optional<std::size_t>(2));
}

TEST(Dominance, Intervals) {
  const TinyScenario s{{{100.0}, {1.0}}};
  EXPECT_NEAR(oracle::time_interval(s, 0).lo, 4.8, 1e-12);
  EXPECT_NEAR(oracle::time_interval(s, 0).hi, 7.2, 1e-12);
  EXPECT_NEAR(oracle::time_interval(s, 1).lo, 480.0, 1e-12);
  EXPECT_NEAR(oracle::time_interval(s, 1).hi, 720.0, 1e-12);
}

TEST(Bruteforce, SymmetricPair) {
  const auto p = oracle::win_probability_bruteforce({{{1.0}, {1.0}}}, 1'000'000, 1);
  EXPECT_NEAR(p[0], 0.5, 0.002);
  EXPECT_NEAR(p[1], 0.5, 0.002);
}

TEST(Bruteforce, SymmetricTeams) {
  for (std::size_t k = 2; k <= 4; ++k) {
    TinyScenario s;
    s.teams.assign(k, {1.0, 2.0});
    const auto p = oracle::win_probability_bruteforce(s, 1'000'000, k);
    for (double x : p) EXPECT_NEAR(x, 1.0 / static_cast<double>(k), 0.002);
    EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-12);
  }
}

TEST(Bruteforce, MatchesNumericalIntegration) {
  const double integrated = oracle::singleton_pair_win_probability(1.0, 1.1, 0.8, 1.2, 4000);
  EXPECT_NEAR(integrated, kPairWinProbability, 1e-3);
  const auto p = oracle::win_probability_bruteforce({{{1.0}, {1.1}}}, 1'000'000, 2);
  EXPECT_NEAR(p[1], kPairWinProbability, 0.002);
}

TEST(Bruteforce, RejectsOversizedScenario) {
  EXPECT_THROW(oracle::dominance_check({{{1, 1, 1, 1, 1}}}), std::invalid_argument);
  EXPECT_THROW(oracle::dominance_check({{{1}, {1}, {1}, {1}, {1}}}), std::invalid_argument);
  EXPECT_THROW(oracle::dominance_check({{{1}, {0}}}), std::invalid_argument);
}

// Engine win frequencies for a fixed team layout over `rounds` independent rounds.
std::vector<double> engine_win_frequencies(const TinyScenario& s, std::uint32_t rounds, std::uint64_t seed) {
  std::vector<Participant> population;
  TeamAssignment assignment;
  assignment.team_size = static_cast<std::uint32_t>(s.teams.front().size());
  for (const auto& team : s.teams) {
    for (double p : team) {
      const auto id = static_cast<ParticipantId>(population.size());
      population.push_back({id, p});
      assignment.order.push_back(id);
    }
  }
  SimulationConfig cfg;
  cfg.team_size = assignment.team_size;
  cfg.base_work = s.base_work;
  cfg.workload_factor_low = s.low;
  cfg.workload_factor_high = s.high;

  RngStream rng(seed);
  std::vector<std::uint64_t> wins(s.teams.size(), 0);
  for (std::uint32_t r = 0; r < rounds; ++r) ++wins[run_round(rng, r, assignment, population, cfg).winner];
  std::vector<double> out;
  for (auto w : wins) out.push_back(static_cast<double>(w) / rounds);
  return out;
}

std::vector<TinyScenario> agreement_scenarios() {
  return {
      {{{1.0}, {1.0}}},
      {{{1.0}, {1.1}}},
      {{{1.0}, {1.0}, {1.0}}},
      {{{1.0, 2.0}, {1.5, 1.5}}},
      {{{1.0, 3.0}, {2.0, 2.0}, {1.2, 2.5}}},
      {{{1.0, 1.0, 1.0, 1.0}, {0.9, 1.1, 1.0, 1.05}, {1.0, 1.0, 1.0, 1.2}, {0.8, 1.3, 1.0, 1.0}}},
      {{{1.0, 1.0, 1.0}, {1.0, 1.0, 2.0}}},
      {{{2.0}, {1.0}}},
  };
}

TEST(EngineAgreement, WithinThreeStandardErrors) {
  constexpr std::uint32_t kEngineRounds = 200'000;
  constexpr std::uint64_t kOracleSamples = 1'000'000;
  std::uint64_t seed = 100;
  for (const auto& s : agreement_scenarios()) {
    const auto engine = engine_win_frequencies(s, kEngineRounds, ++seed);
    const auto ref = oracle::win_probability_bruteforce(s, kOracleSamples, ++seed);
    for (std::size_t t = 0; t < ref.size(); ++t) {
      const double p = ref[t];
      const double se = std::sqrt(p * (1 - p) / kEngineRounds + p * (1 - p) / kOracleSamples);
      EXPECT_LE(std::abs(engine[t] - p), 3.0 * se + 1e-12) << "scenario " << seed << " team " << t;
    }
  }
}

TEST(EngineAgreement, DominantTeamAlwaysWins) {
  for (const auto& s : agreement_scenarios()) {
    if (const auto w = oracle::dominance_check(s)) {
      const auto engine = engine_win_frequencies(s, 100'000, 7);
      EXPECT_EQ(engine[*w], 1.0);
    }
  }
  const TinyScenario lone{{{100.0}, {1.0}, {1.0}, {1.0}}};
  ASSERT_EQ(oracle::dominance_check(lone), std::optional<std::size_t>(0));
  EXPECT_EQ(engine_win_frequencies(lone, 100'000, 8)[0], 1.0);
}

}  // namespace
}  // namespace pots
