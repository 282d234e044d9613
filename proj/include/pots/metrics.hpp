#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "pots/engine.hpp"
#include "pots/error.hpp"
#include "pots/model.hpp"

namespace pots {

struct LevelAverage {
  double level = 0.0;
  std::uint64_t population = 0;
  double avg = 0.0;  // mean cumulative reward per participant, over participants then runs
  double sd = 0.0;   // sample sd of the per-run level means
};

/// Mean per-run cumulative reward for each level, averaged over runs.
inline std::vector<LevelAverage> average_reward_by_level(std::span<const RunResult> results,
                                                         std::span<const Participant> population,
                                                         const PerformanceDistribution& dist) {
  if (results.empty()) throw ConsistencyError("no run results to aggregate");

  const auto levels = dist.levels();
  std::vector<std::size_t> level_of(population.size());
  for (std::size_t i = 0; i < population.size(); ++i) {
    const auto it = std::lower_bound(levels.begin(), levels.end(), population[i].performance);
    if (it == levels.end() || *it != population[i].performance) {
      throw ConsistencyError("participant " + std::to_string(i) + " has a level outside the distribution");
    }
    level_of[i] = static_cast<std::size_t>(it - levels.begin());
  }

  const auto k = levels.size();
  std::vector<std::vector<double>> per_run(k, std::vector<double>(results.size(), 0.0));
  for (std::size_t r = 0; r < results.size(); ++r) {
    const auto& rewards = results[r].cumulative_reward;
    if (rewards.size() != population.size()) {
      throw ConsistencyError("run " + std::to_string(r) + " has " + std::to_string(rewards.size()) +
                             " participants, expected " + std::to_string(population.size()));
    }
    for (std::size_t i = 0; i < rewards.size(); ++i) per_run[level_of[i]][r] += rewards[i];
  }

  std::vector<LevelAverage> out(k);
  for (std::size_t l = 0; l < k; ++l) {
    const auto count = dist.entries()[l].count;
    auto& runs = per_run[l];
    for (auto& v : runs) v /= static_cast<double>(count);
    const double mean = std::accumulate(runs.begin(), runs.end(), 0.0) / static_cast<double>(runs.size());
    double ss = 0.0;
    for (const auto v : runs) ss += (v - mean) * (v - mean);
    out[l] = {levels[l], count, mean, runs.size() > 1 ? std::sqrt(ss / static_cast<double>(runs.size() - 1)) : 0.0};
  }
  return out;
}

// Reward per unit of performance.
constexpr double efficiency(double avg_reward, double level) noexcept { return avg_reward / level; }

inline std::vector<double> efficiency_by_level(std::span<const LevelAverage> averages) {
  std::vector<double> out;
  out.reserve(averages.size());
  for (const auto& a : averages) out.push_back(efficiency(a.avg, a.level));
  return out;
}

/// Gini coefficient of non-negative values with a positive sum.
///
/// Uses the sorted form G = 2*sum(i*x_(i)) / (n*sum(x)) - (n+1)/n with 1-based ranks,
/// which equals sum_ij |x_i - x_j| / (2 n^2 mean).
inline double gini_coefficient(std::span<const double> values) {
  if (values.empty()) throw DomainError("gini of an empty sample");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() < 0.0) throw DomainError("gini requires non-negative values");

  double total = 0.0, weighted = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    total += sorted[i];
    weighted += static_cast<double>(i + 1) * sorted[i];
  }
  if (!(total > 0.0)) throw DomainError("gini requires at least one positive value");

  const auto n = static_cast<double>(sorted.size());
  const double g = 2.0 * weighted / (n * total) - (n + 1.0) / n;
  return std::clamp(g, 0.0, 1.0);
}

struct LevelStats {
  double level = 0.0;
  std::uint64_t population_at_level = 0;
  double avg_reward = 0.0;
  double sd_reward = 0.0;
  double efficiency = 0.0;
};

struct MetricsReport {
  std::string scenario;
  std::string distribution;
  std::uint32_t team_size = 0;
  AllocationScheme scheme = AllocationScheme::kEqualShare;
  std::uint32_t rounds = 0;
  std::uint32_t runs = 0;
  std::uint64_t master_seed = 0;
  std::vector<LevelStats> levels;
  double gini = 0.0;  // per-run gini of cumulative rewards, averaged over runs
};

inline constexpr double kRunConservationTolerance = 1e-6;

/// Aggregates the runs of one configuration.
///
/// Throws ConsistencyError when the results do not match cfg (run count,
/// population size) or any run fails reward conservation.
inline MetricsReport build_report(const SimulationConfig& cfg, std::span<const RunResult> results,
                                  std::string scenario = {}) {
  if (results.empty()) throw ConsistencyError("no run results to report");
  if (results.size() != cfg.runs) {
    throw ConsistencyError("got " + std::to_string(results.size()) + " runs, config expects " +
                           std::to_string(cfg.runs));
  }

  const double expected_total = static_cast<double>(cfg.rounds) * cfg.round_reward;
  for (std::size_t r = 0; r < results.size(); ++r) {
    const auto& rewards = results[r].cumulative_reward;
    const double total = std::accumulate(rewards.begin(), rewards.end(), 0.0);
    if (std::abs(total - expected_total) > kRunConservationTolerance * expected_total) {
      throw ConsistencyError("run " + std::to_string(r) + " pays " + std::to_string(total) + " coins, expected " +
                             std::to_string(expected_total));
    }
  }

  const auto population = expand_population(cfg.distribution);
  const auto averages = average_reward_by_level(results, population, cfg.distribution);

  MetricsReport report;
  report.scenario = std::move(scenario);
  report.distribution = cfg.distribution.to_string();
  report.team_size = cfg.team_size;
  report.scheme = cfg.scheme;
  report.rounds = cfg.rounds;
  report.runs = cfg.runs;
  report.master_seed = cfg.master_seed;

  double reported_total = 0.0;
  for (const auto& a : averages) {
    report.levels.push_back({a.level, a.population, a.avg, a.sd, efficiency(a.avg, a.level)});
    reported_total += a.avg * static_cast<double>(a.population);
  }
  if (std::abs(reported_total - expected_total) > kRunConservationTolerance * expected_total) {
    throw ConsistencyError("report total " + std::to_string(reported_total) + " does not match " +
                           std::to_string(expected_total));
  }

  double gini_sum = 0.0;
  for (const auto& r : results) gini_sum += gini_coefficient(r.cumulative_reward);
  report.gini = gini_sum / static_cast<double>(results.size());
  return report;
}

}  // namespace pots
