#pragma once

#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pots/error.hpp"
#include "pots/model.hpp"
#include "pots/parallel.hpp"
#include "pots/rng.hpp"

namespace pots {

/// Partition of 0..n-1 into consecutive blocks of team_size.
struct TeamAssignment {
  std::uint32_t team_size = 1;
  std::vector<ParticipantId> order;

  std::size_t team_count() const noexcept { return team_size == 0 ? 0 : order.size() / team_size; }

  std::span<const ParticipantId> team(std::size_t index) const noexcept {
    return std::span<const ParticipantId>(order).subspan(index * team_size, team_size);
  }

  friend bool operator==(const TeamAssignment&, const TeamAssignment&) = default;
};

/// Reshuffles `out` in place: identity permutation, Fisher-Yates, sliced into teams.
inline void assign_teams(RngStream& rng, std::size_t n, std::uint32_t team_size, TeamAssignment& out) {
  if (team_size == 0 || n % team_size != 0) {
    throw DivisibilityError("population " + std::to_string(n) + " is not divisible by team_size " +
                            std::to_string(team_size));
  }
  out.team_size = team_size;
  out.order.resize(n);
  std::iota(out.order.begin(), out.order.end(), ParticipantId{0});
  shuffle(rng, std::span<ParticipantId>(out.order));
}

inline TeamAssignment assign_teams(RngStream& rng, std::size_t n, std::uint32_t team_size) {
  TeamAssignment out;
  assign_teams(rng, n, team_size, out);
  return out;
}

/// Time for one member to finish its block given a drawn workload factor.
constexpr double assigned_time(double performance, double base_work, std::uint32_t team_size,
                               double workload_factor) noexcept {
  return base_work / team_size * workload_factor / performance;
}

/// Draws one workload factor from [low, high) and returns the member's block time.
inline double member_time(RngStream& rng, double performance, double base_work, std::uint32_t team_size,
                          double low, double high) noexcept {
  return assigned_time(performance, base_work, team_size, rng.uniform(low, high));
}

/// Members relay the sprint one block each, so the team time is the sum of member times.
inline double team_time(RngStream& rng, std::span<const ParticipantId> team,
                        std::span<const Participant> population, const SimulationConfig& cfg) noexcept {
  const auto team_size = static_cast<std::uint32_t>(team.size());
  double total = 0.0;
  for (const auto id : team) {
    total += member_time(rng, population[id].performance, cfg.base_work, team_size, cfg.workload_factor_low,
                         cfg.workload_factor_high);
  }
  return total;
}

/// Splits `reward` over a team; element i belongs to the member with performances[i].
inline std::vector<double> allocate_rewards(std::span<const double> performances, AllocationScheme scheme,
                                            double reward) {
  std::vector<double> out(performances.size());
  if (performances.empty()) return out;
  if (scheme == AllocationScheme::kEqualShare) {
    const double share = reward / static_cast<double>(performances.size());
    std::fill(out.begin(), out.end(), share);
  } else {
    const double total = std::accumulate(performances.begin(), performances.end(), 0.0);
    for (std::size_t i = 0; i < performances.size(); ++i) out[i] = reward * performances[i] / total;
  }
  return out;
}

struct Payout {
  ParticipantId id;
  double coins;

  friend bool operator==(const Payout&, const Payout&) = default;
};

struct RoundResult {
  std::uint32_t round_index = 0;
  std::vector<double> team_times;
  std::uint32_t winner = 0;
  std::vector<Payout> payouts;  // winning team only, in team order

  friend bool operator==(const RoundResult&, const RoundResult&) = default;
};

// First index of the minimum; exact ties go to the lower team index.
inline std::uint32_t select_winner(std::span<const double> team_times) noexcept {
  std::uint32_t best = 0;
  for (std::uint32_t t = 1; t < team_times.size(); ++t) {
    if (team_times[t] < team_times[best]) best = t;
  }
  return best;
}

/// Picks the winner from precomputed team times and pays its members.
inline RoundResult settle_round(std::uint32_t round_index, const TeamAssignment& assignment,
                                std::vector<double> team_times, std::span<const Participant> population,
                                const SimulationConfig& cfg) {
  RoundResult result;
  result.round_index = round_index;
  result.winner = select_winner(team_times);
  result.team_times = std::move(team_times);

  const auto members = assignment.team(result.winner);
  std::vector<double> performances;
  performances.reserve(members.size());
  for (const auto id : members) performances.push_back(population[id].performance);
  const auto shares = allocate_rewards(performances, cfg.scheme, cfg.round_reward);

  result.payouts.reserve(members.size());
  for (std::size_t i = 0; i < members.size(); ++i) result.payouts.push_back({members[i], shares[i]});
  return result;
}

/// Samples every team's time (teams in index order, members in team order) and settles the round.
inline RoundResult run_round(RngStream& rng, std::uint32_t round_index, const TeamAssignment& assignment,
                             std::span<const Participant> population, const SimulationConfig& cfg) {
  std::vector<double> times(assignment.team_count());
  for (std::size_t t = 0; t < times.size(); ++t) times[t] = team_time(rng, assignment.team(t), population, cfg);
  return settle_round(round_index, assignment, std::move(times), population, cfg);
}

struct RunResult {
  std::vector<double> cumulative_reward;  // indexed by participant id
  std::vector<std::uint32_t> win_counts;

  friend bool operator==(const RunResult&, const RunResult&) = default;
};

/// One run: cfg.rounds rounds, each reshuffling teams and redrawing every workload factor.
inline RunResult run_simulation(const SimulationConfig& cfg, std::uint64_t run_seed) {
  validate_config(cfg);
  const auto population = expand_population(cfg.distribution);
  const auto n = population.size();

  RunResult result;
  result.cumulative_reward.assign(n, 0.0);
  result.win_counts.assign(n, 0);

  RngStream rng(run_seed);
  TeamAssignment assignment;
  for (std::uint32_t r = 0; r < cfg.rounds; ++r) {
    assign_teams(rng, n, cfg.team_size, assignment);
    const auto round = run_round(rng, r, assignment, population, cfg);
    for (const auto& p : round.payouts) {
      result.cumulative_reward[p.id] += p.coins;
      ++result.win_counts[p.id];
    }
  }
  return result;
}

inline std::uint64_t run_seed(std::uint64_t master_seed, std::uint32_t run_index) noexcept {
  return mix_seed(master_seed, run_index);
}

/// cfg.runs independent runs; run i is seeded with mix_seed(master_seed, i).
/// Output is identical for every worker count.
inline std::vector<RunResult> run_experiment(const SimulationConfig& cfg, unsigned threads = 1) {
  validate_config(cfg);
  std::vector<RunResult> results(cfg.runs);
  parallel_for(cfg.runs, threads, [&](std::size_t i) {
    results[i] = run_simulation(cfg, run_seed(cfg.master_seed, static_cast<std::uint32_t>(i)));
  });
  return results;
}

}  // namespace pots
