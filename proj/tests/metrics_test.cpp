#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "pots/metrics.hpp"

namespace pots {
namespace {

// Mean absolute difference over all ordered pairs, divided by twice the mean.
double gini_bruteforce(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double diff = 0.0;
  for (double a : x) {
    for (double b : x) diff += std::abs(a - b);
  }
  return diff / (2.0 * n * n * mean);
}

TEST(Gini, Examples) {
  EXPECT_DOUBLE_EQ(gini_coefficient(std::vector<double>{3, 3, 3, 3}), 0.0);
  EXPECT_DOUBLE_EQ(gini_coefficient(std::vector<double>{0, 10}), 0.5);
  std::vector<double> monopoly(1600, 0.0);
  monopoly[42] = 10000.0;
  EXPECT_NEAR(gini_coefficient(monopoly), 1599.0 / 1600.0, 1e-12);
  EXPECT_NEAR(gini_coefficient(monopoly), 0.99938, 1e-5);
}

TEST(Gini, Errors) {
  EXPECT_THROW(gini_coefficient(std::vector<double>{}), DomainError);
  EXPECT_THROW(gini_coefficient(std::vector<double>{0, 0, 0}), DomainError);
  EXPECT_THROW(gini_coefficient(std::vector<double>{1, -1, 3}), DomainError);
}

TEST(Gini, MatchesBruteForceAndIsScaleInvariant) {
  std::mt19937_64 gen(1);
  std::exponential_distribution<double> expo(0.3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> x(1 + gen() % 60);
    for (auto& v : x) v = (gen() % 4 == 0) ? 0.0 : expo(gen);
    x[0] += 1.0;
    const double g = gini_coefficient(x);
    ASSERT_NEAR(g, gini_bruteforce(x), 1e-12);
    ASSERT_GE(g, 0.0);
    ASSERT_LE(g, 1.0);
    auto y = x;
    for (auto& v : y) v *= 17.25;
    ASSERT_NEAR(gini_coefficient(y), g, 1e-12);
  }
}

TEST(Gini, ZeroOnlyForEqualValues) {
  EXPECT_EQ(gini_coefficient(std::vector<double>{7.5}), 0.0);
  EXPECT_GT(gini_coefficient(std::vector<double>{1, 1, 1, 1.001}), 0.0);
}

TEST(Efficiency, Examples) {
  EXPECT_DOUBLE_EQ(efficiency(6.24, 1.0), 6.24);
  EXPECT_DOUBLE_EQ(efficiency(16.50, 2.0), 8.25);
  EXPECT_NEAR(efficiency(1343.5, 100.0), 13.435, 1e-12);
}

TEST(Efficiency, Homogeneous) {
  const std::vector<LevelAverage> a{{1.0, 10, 6.0, 0.0}, {4.0, 5, 3.0, 0.0}, {0.5, 1, 9.0, 0.0}};
  auto b = a;
  for (auto& x : b) x.avg *= 2.5;
  const auto ea = efficiency_by_level(a);
  const auto eb = efficiency_by_level(b);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_NEAR(ea[i], a[i].avg / a[i].level, 1e-12 * ea[i]);
    EXPECT_NEAR(eb[i], 2.5 * ea[i], 1e-12 * eb[i]);
  }
}

TEST(AverageRewardByLevel, SingleParticipantPerLevel) {
  const auto dist = parse_distribution("1:1,2:1,5:1");
  const auto pop = expand_population(dist);
  const std::vector<RunResult> runs{{{1.5, 0.0, 8.5}, {1, 0, 3}}};
  const auto avg = average_reward_by_level(runs, pop, dist);
  ASSERT_EQ(avg.size(), 3u);
  EXPECT_EQ(avg[0].avg, 1.5);
  EXPECT_EQ(avg[1].avg, 0.0);
  EXPECT_EQ(avg[2].avg, 8.5);
  EXPECT_EQ(avg[0].sd, 0.0);
}

TEST(AverageRewardByLevel, MeanOfRunMeansAndSampleSd) {
  const auto dist = parse_distribution("1:2,3:1");
  const auto pop = expand_population(dist);
  const std::vector<RunResult> runs{{{1.0, 3.0, 6.0}, {}}, {{2.0, 2.0, 6.0}, {}}, {{0.0, 0.0, 10.0}, {}}};
  const auto avg = average_reward_by_level(runs, pop, dist);
  // level-1 run means: 2, 2, 0
  EXPECT_NEAR(avg[0].avg, 4.0 / 3.0, 1e-12);
  EXPECT_NEAR(avg[0].sd, std::sqrt(((2 - 4.0 / 3) * (2 - 4.0 / 3) * 2 + (4.0 / 3) * (4.0 / 3)) / 2.0), 1e-12);
  EXPECT_NEAR(avg[1].avg, 22.0 / 3.0, 1e-12);
  EXPECT_EQ(avg[1].population, 1u);
}

TEST(AverageRewardByLevel, Errors) {
  const auto dist = parse_distribution("1:2");
  const auto pop = expand_population(dist);
  EXPECT_THROW(average_reward_by_level(std::vector<RunResult>{}, pop, dist), ConsistencyError);
  const std::vector<RunResult> short_run{{{1.0}, {}}};
  EXPECT_THROW(average_reward_by_level(short_run, pop, dist), ConsistencyError);
}

SimulationConfig quick_config(const char* spec, std::uint32_t n, AllocationScheme s, std::uint32_t runs) {
  SimulationConfig cfg;
  cfg.distribution = parse_distribution(spec);
  cfg.team_size = n;
  cfg.scheme = s;
  cfg.rounds = 1000;
  cfg.runs = runs;
  cfg.master_seed = 2718;
  return cfg;
}

TEST(BuildReport, UniformPopulation) {
  for (const auto s : {AllocationScheme::kEqualShare, AllocationScheme::kProportional}) {
    for (std::uint32_t n : {1u, 16u}) {
      const auto cfg = quick_config("1:1600", n, s, 4);
      const auto results = run_experiment(cfg);
      const auto report = build_report(cfg, results, "uniform");
      ASSERT_EQ(report.levels.size(), 1u);
      EXPECT_NEAR(report.levels[0].avg_reward, 6.25, 1e-9);
      EXPECT_NEAR(report.levels[0].efficiency, 6.25, 1e-9);
      EXPECT_EQ(report.levels[0].population_at_level, 1600u);
      EXPECT_GT(report.gini, 0.0);

      double gini = 0.0;
      for (const auto& r : results) gini += gini_bruteforce(r.cumulative_reward);
      EXPECT_NEAR(report.gini, gini / results.size(), 1e-9);

      EXPECT_EQ(report.scenario, "uniform");
      EXPECT_EQ(report.distribution, "1:1600");
      EXPECT_EQ(report.team_size, n);
      EXPECT_EQ(report.runs, 4u);
    }
  }
}

TEST(BuildReport, LevelTotalsConserveReward) {
  const auto cfg = quick_config("1:800,2:400,3:200,4:100,5:50,6:30,7:10,8:5,9:3,10:2", 8,
                                AllocationScheme::kProportional, 3);
  const auto report = build_report(cfg, run_experiment(cfg));
  double total = 0.0;
  for (const auto& l : report.levels) {
    total += l.avg_reward * static_cast<double>(l.population_at_level);
    EXPECT_GE(l.avg_reward, 0.0);
    EXPECT_NEAR(l.efficiency, l.avg_reward / l.level, 1e-12 * std::max(1.0, l.efficiency));
  }
  EXPECT_NEAR(total, 10000.0, 1e-6 * 10000.0);
}

TEST(BuildReport, ConsistencyErrors) {
  const auto cfg = quick_config("1:4", 2, AllocationScheme::kEqualShare, 2);
  auto results = run_experiment(cfg);
  EXPECT_THROW(build_report(cfg, std::vector<RunResult>{}), ConsistencyError);
  EXPECT_THROW(build_report(cfg, std::span<const RunResult>(results).first(1)), ConsistencyError);

  auto broken = results;
  broken[1].cumulative_reward[0] += 1.0;
  EXPECT_THROW(build_report(cfg, broken), ConsistencyError);

  auto wrong_size = results;
  wrong_size[0].cumulative_reward.push_back(0.0);
  EXPECT_THROW(build_report(cfg, wrong_size), ConsistencyError);
}

}  // namespace
}  // namespace pots
