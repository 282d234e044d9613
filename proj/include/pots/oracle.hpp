#pragma once

// Reference calculations for the test suite. Deliberately shares nothing with
// the engine: its own generator, its own timing arithmetic.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

namespace pots::oracle {

struct TinyScenario {
  std::vector<std::vector<double>> teams;  // performances per team, at most 4x4
  double base_work = 600.0;
  double low = 0.8;
  double high = 1.2;
};

inline void check(const TinyScenario& s) {
  if (s.teams.empty() || s.teams.size() > 4) throw std::invalid_argument("tiny scenario needs 1..4 teams");
  for (const auto& team : s.teams) {
    if (team.empty() || team.size() > 4) throw std::invalid_argument("tiny scenario teams need 1..4 members");
    for (double p : team) {
      if (!(p > 0.0)) throw std::invalid_argument("performances must be positive");
    }
  }
  if (!(s.low > 0.0) || s.low > s.high) throw std::invalid_argument("bad workload factor range");
}

struct TimeInterval {
  double lo;
  double hi;
};

inline TimeInterval time_interval(const TinyScenario& s, std::size_t team) {
  const auto& members = s.teams[team];
  TimeInterval out{0.0, 0.0};
  for (double p : members) {
    const double block = s.base_work / static_cast<double>(members.size());
    out.lo += block * s.low / p;
    out.hi += block * s.high / p;
  }
  return out;
}

/// Team whose slowest possible time beats every rival's fastest possible time.
inline std::optional<std::size_t> dominance_check(const TinyScenario& s) {
  check(s);
  for (std::size_t t = 0; t < s.teams.size(); ++t) {
    const double worst = time_interval(s, t).hi;
    bool dominates = true;
    for (std::size_t o = 0; o < s.teams.size() && dominates; ++o) {
      if (o != t && !(worst < time_interval(s, o).lo)) dominates = false;
    }
    if (dominates) return t;
  }
  return std::nullopt;
}

/// Empirical win frequency of each team over `samples` independent races.
inline std::vector<double> win_probability_bruteforce(const TinyScenario& s, std::uint64_t samples,
                                                      std::uint64_t seed) {
  check(s);
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> factor(s.low, s.high);
  std::vector<std::uint64_t> wins(s.teams.size(), 0);

  for (std::uint64_t k = 0; k < samples; ++k) {
    std::size_t best = 0;
    double best_time = 0.0;
    for (std::size_t t = 0; t < s.teams.size(); ++t) {
      double time = 0.0;
      for (double p : s.teams[t]) time += s.base_work * factor(gen) / (static_cast<double>(s.teams[t].size()) * p);
      if (t == 0 || time < best_time) {
        best = t;
        best_time = time;
      }
    }
    ++wins[best];
  }

  std::vector<double> out;
  for (auto w : wins) out.push_back(static_cast<double>(w) / static_cast<double>(samples));
  return out;
}

/// P(second singleton beats the first), by the midpoint rule on a grid x grid
/// lattice over the factor square. Each singleton takes base_work * u / p.
inline double singleton_pair_win_probability(double p0, double p1, double low, double high, std::size_t grid) {
  const double h = (high - low) / static_cast<double>(grid);
  std::uint64_t hits = 0;
  for (std::size_t i = 0; i < grid; ++i) {
    const double u0 = low + (static_cast<double>(i) + 0.5) * h;
    for (std::size_t j = 0; j < grid; ++j) {
      const double u1 = low + (static_cast<double>(j) + 0.5) * h;
      if (u1 / p1 < u0 / p0) ++hits;
    }
  }
  return static_cast<double>(hits) / (static_cast<double>(grid) * static_cast<double>(grid));
}

}  // namespace pots::oracle
