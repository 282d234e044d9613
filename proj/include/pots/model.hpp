#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "pots/error.hpp"

namespace pots {

using ParticipantId = std::uint32_t;

struct LevelCount {
  double level;
  std::uint64_t count;

  friend bool operator==(const LevelCount&, const LevelCount&) = default;
};

/// Population described as {level : count, ...}.
///
/// Always held in canonical form: levels strictly increasing, every level and
/// count positive. The population size is the sum of the counts.
class PerformanceDistribution {
 public:
  PerformanceDistribution() = default;

  /// Accepts entries in any order; throws DomainError on a non-positive or
  /// non-finite level, a zero count, or a repeated level.
  explicit PerformanceDistribution(std::vector<LevelCount> entries) : entries_(std::move(entries)) {
    for (const auto& e : entries_) {
      if (!std::isfinite(e.level) || e.level <= 0.0) {
        throw DomainError("performance level must be positive and finite");
      }
      if (e.count == 0) throw DomainError("participant count must be positive");
    }
    std::stable_sort(entries_.begin(), entries_.end(),
                     [](const LevelCount& a, const LevelCount& b) { return a.level < b.level; });
    for (std::size_t i = 1; i < entries_.size(); ++i) {
      if (entries_[i].level == entries_[i - 1].level) {
        throw DomainError("duplicate performance level " + format_level(entries_[i].level));
      }
    }
    for (const auto& e : entries_) population_ += e.count;
  }

  PerformanceDistribution(std::initializer_list<LevelCount> entries)
      : PerformanceDistribution(std::vector<LevelCount>(entries)) {}

  const std::vector<LevelCount>& entries() const noexcept { return entries_; }
  std::size_t level_count() const noexcept { return entries_.size(); }
  std::uint64_t population() const noexcept { return population_; }
  bool empty() const noexcept { return entries_.empty(); }

  std::vector<double> levels() const {
    std::vector<double> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.level);
    return out;
  }

  /// Canonical text form, e.g. "1:800,100:800". Parses back to an equal value.
  std::string to_string() const {
    std::string out;
    for (const auto& e : entries_) {
      if (!out.empty()) out += ',';
      out += format_level(e.level);
      out += ':';
      out += std::to_string(e.count);
    }
    return out;
  }

  // Shortest text that round-trips to the same double.
  static std::string format_level(double level) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, level);
    return std::string(buf, end);
  }

  friend bool operator==(const PerformanceDistribution& a, const PerformanceDistribution& b) {
    return a.entries_ == b.entries_;
  }

 private:
  std::vector<LevelCount> entries_;
  std::uint64_t population_ = 0;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n";
  const auto first = s.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  return s.substr(first, s.find_last_not_of(ws) - first + 1);
}

inline bool is_digit(char c) { return c >= '0' && c <= '9'; }

// [+-]? (digits ('.' digits*)? | '.' digits)
inline bool is_decimal(std::string_view s) {
  if (!s.empty() && (s.front() == '+' || s.front() == '-')) s.remove_prefix(1);
  std::size_t i = 0, int_digits = 0, frac_digits = 0;
  while (i < s.size() && is_digit(s[i])) ++i, ++int_digits;
  if (i < s.size() && s[i] == '.') {
    ++i;
    while (i < s.size() && is_digit(s[i])) ++i, ++frac_digits;
  }
  return i == s.size() && int_digits + frac_digits > 0;
}

// [+-]? digits
inline bool is_integer(std::string_view s) {
  if (!s.empty() && (s.front() == '+' || s.front() == '-')) s.remove_prefix(1);
  return !s.empty() && std::all_of(s.begin(), s.end(), is_digit);
}

}  // namespace detail

/// Parses `level ":" count ("," level ":" count)*`.
///
/// Whitespace around tokens is ignored. Throws SyntaxError for malformed text
/// and DomainError for non-positive values or repeated levels. Entry order
/// does not matter; the result is canonical.
inline PerformanceDistribution parse_distribution(std::string_view text) {
  std::vector<LevelCount> entries;
  if (detail::trim(text).empty()) throw SyntaxError("empty distribution");

  std::size_t pos = 0;
  while (true) {
    const auto comma = text.find(',', pos);
    const auto entry = text.substr(pos, comma == std::string_view::npos ? text.npos : comma - pos);
    const auto colon = entry.find(':');
    if (colon == std::string_view::npos) {
      throw SyntaxError("expected 'level:count', got '" + std::string(detail::trim(entry)) + "'");
    }
    const auto level_tok = detail::trim(entry.substr(0, colon));
    const auto count_tok = detail::trim(entry.substr(colon + 1));
    if (!detail::is_decimal(level_tok)) {
      throw SyntaxError("malformed performance level '" + std::string(level_tok) + "'");
    }
    if (!detail::is_integer(count_tok)) {
      throw SyntaxError("malformed participant count '" + std::string(count_tok) + "'");
    }

    const auto skip_plus = [](std::string_view s) { return s.front() == '+' ? s.substr(1) : s; };
    const auto level_str = skip_plus(level_tok);
    const auto count_str = skip_plus(count_tok);

    double level = 0.0;
    std::from_chars(level_str.data(), level_str.data() + level_str.size(), level);
    if (!(level > 0.0) || !std::isfinite(level)) {
      throw DomainError("performance level must be positive, got '" + std::string(level_tok) + "'");
    }
    if (count_str.front() == '-') {
      throw DomainError("participant count must be positive, got '" + std::string(count_tok) + "'");
    }
    std::uint64_t count = 0;
    auto [ptr, ec] = std::from_chars(count_str.data(), count_str.data() + count_str.size(), count);
    if (ec == std::errc::result_out_of_range) {
      throw DomainError("participant count too large: '" + std::string(count_tok) + "'");
    }
    if (count == 0) throw DomainError("participant count must be positive, got '" + std::string(count_tok) + "'");

    entries.push_back({level, count});
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return PerformanceDistribution(std::move(entries));
}

struct Participant {
  ParticipantId id;
  double performance;

  friend bool operator==(const Participant&, const Participant&) = default;
};

/// One participant per unit of count, ascending level, ids 0..n-1.
inline std::vector<Participant> expand_population(const PerformanceDistribution& dist) {
  std::vector<Participant> out;
  out.reserve(dist.population());
  ParticipantId id = 0;
  for (const auto& e : dist.entries()) {
    for (std::uint64_t k = 0; k < e.count; ++k) out.push_back({id++, e.level});
  }
  return out;
}

enum class AllocationScheme { kEqualShare, kProportional };

inline std::string_view to_string(AllocationScheme s) {
  return s == AllocationScheme::kEqualShare ? "equal" : "proportional";
}

inline AllocationScheme parse_scheme(std::string_view s) {
  s = detail::trim(s);
  if (s == "equal" || s == "equal-share") return AllocationScheme::kEqualShare;
  if (s == "proportional") return AllocationScheme::kProportional;
  throw SyntaxError("unknown allocation scheme '" + std::string(s) + "'");
}

struct SimulationConfig {
  PerformanceDistribution distribution;
  std::uint32_t team_size = 1;
  double base_work = 600.0;     // seconds for the whole sprint
  double round_reward = 10.0;   // coins paid per round
  std::uint32_t rounds = 1000;
  std::uint32_t runs = 100;
  AllocationScheme scheme = AllocationScheme::kEqualShare;
  double workload_factor_low = 0.8;
  double workload_factor_high = 1.2;
  std::uint64_t master_seed = 0;
};

/// Throws on the first violated invariant.
inline void validate_config(const SimulationConfig& cfg) {
  const auto n = cfg.distribution.population();
  if (n == 0) throw DomainError("distribution is empty");
  if (n > std::numeric_limits<ParticipantId>::max()) throw RangeError("population too large");
  if (cfg.team_size == 0) throw RangeError("team_size must be positive");
  if (n % cfg.team_size != 0) {
    throw DivisibilityError("population " + std::to_string(n) + " is not divisible by team_size " +
                            std::to_string(cfg.team_size));
  }
  if (!(cfg.base_work > 0.0) || !std::isfinite(cfg.base_work)) throw RangeError("base_work must be positive");
  if (!(cfg.round_reward > 0.0) || !std::isfinite(cfg.round_reward)) {
    throw RangeError("round_reward must be positive");
  }
  if (!(cfg.workload_factor_low > 0.0) || !(cfg.workload_factor_low <= cfg.workload_factor_high) ||
      !std::isfinite(cfg.workload_factor_high)) {
    throw RangeError("workload factors must satisfy 0 < low <= high");
  }
  if (cfg.rounds == 0) throw RangeError("rounds must be at least 1");
  if (cfg.runs == 0) throw RangeError("runs must be at least 1");
}

}  // namespace pots
