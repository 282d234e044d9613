#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <type_traits>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pots/engine.hpp"
#include "pots/error.hpp"
#include "pots/metrics.hpp"
#include "pots/model.hpp"
#include "pots/rng.hpp"

namespace pots {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A grid cell failed while running; the message names the cell.
class CellError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline const std::vector<std::uint32_t>& default_team_sizes() {
  static const std::vector<std::uint32_t> sizes{1, 2, 4, 8, 16, 32, 64};
  return sizes;
}

struct NamedDistribution {
  std::string name;
  PerformanceDistribution distribution;
};

struct GridCell {
  std::size_t index = 0;
  std::size_t distribution_index = 0;
  std::uint32_t team_size = 0;
  AllocationScheme scheme = AllocationScheme::kEqualShare;
  std::uint64_t seed = 0;
};

/// Distributions x team sizes x schemes, sharing every other scalar.
struct ExperimentGrid {
  std::vector<NamedDistribution> distributions;
  std::vector<std::uint32_t> team_sizes = default_team_sizes();
  std::vector<AllocationScheme> schemes{AllocationScheme::kEqualShare, AllocationScheme::kProportional};
  std::uint32_t rounds = 1000;
  std::uint32_t runs = 100;
  double base_work = 600.0;
  double round_reward = 10.0;
  double workload_factor_low = 0.8;
  double workload_factor_high = 1.2;
  std::uint64_t master_seed = 0;

  /// Cells in distribution-major, then team size, then scheme order.
  /// Cell i is seeded with mix_seed(master_seed, i).
  std::vector<GridCell> cells() const {
    std::vector<GridCell> out;
    out.reserve(distributions.size() * team_sizes.size() * schemes.size());
    for (std::size_t d = 0; d < distributions.size(); ++d) {
      for (const auto n : team_sizes) {
        for (const auto s : schemes) {
          const auto index = out.size();
          out.push_back({index, d, n, s, mix_seed(master_seed, index)});
        }
      }
    }
    return out;
  }

  SimulationConfig cell_config(const GridCell& cell) const {
    SimulationConfig cfg;
    cfg.distribution = distributions.at(cell.distribution_index).distribution;
    cfg.team_size = cell.team_size;
    cfg.base_work = base_work;
    cfg.round_reward = round_reward;
    cfg.rounds = rounds;
    cfg.runs = runs;
    cfg.scheme = cell.scheme;
    cfg.workload_factor_low = workload_factor_low;
    cfg.workload_factor_high = workload_factor_high;
    cfg.master_seed = cell.seed;
    return cfg;
  }

  std::string describe(const GridCell& cell) const {
    return "cell " + std::to_string(cell.index) + " (" + distributions.at(cell.distribution_index).name +
           ", team_size " + std::to_string(cell.team_size) + ", " + std::string(to_string(cell.scheme)) + ")";
  }

  /// Throws ValidationError naming the first offending cell or field.
  void validate() const {
    if (distributions.empty()) throw ValidationError("grid has no distributions");
    if (team_sizes.empty()) throw ValidationError("grid has no team sizes");
    if (schemes.empty()) throw ValidationError("grid has no allocation schemes");

    std::set<std::string> names;
    for (const auto& d : distributions) {
      if (d.name.empty()) throw ValidationError("distribution name must not be empty");
      for (const char c : d.name) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' ||
                        c == '_' || c == '.';
        if (!ok) throw ValidationError("distribution name '" + d.name + "' may only use [A-Za-z0-9._-]");
      }
      if (!names.insert(d.name).second) throw ValidationError("duplicate distribution name '" + d.name + "'");
    }
    if (std::set<std::uint32_t>(team_sizes.begin(), team_sizes.end()).size() != team_sizes.size()) {
      throw ValidationError("duplicate team size in grid");
    }
    if (std::set<AllocationScheme>(schemes.begin(), schemes.end()).size() != schemes.size()) {
      throw ValidationError("duplicate allocation scheme in grid");
    }

    for (const auto& cell : cells()) {
      try {
        validate_config(cell_config(cell));
      } catch (const DivisibilityError& e) {
        throw DivisibilityError(describe(cell) + ": " + e.what());
      } catch (const RangeError& e) {
        throw RangeError(describe(cell) + ": " + e.what());
      } catch (const ValidationError& e) {
        throw ValidationError(describe(cell) + ": " + e.what());
      }
    }
  }
};

namespace detail {

inline AllocationScheme scheme_from_json(const nlohmann::json& j) {
  if (!j.is_string()) throw SyntaxError("schemes entries must be strings");
  return parse_scheme(j.get<std::string>());
}

template <typename T>
T number_from_json(const nlohmann::json& j, const char* field) {
  if constexpr (std::is_integral_v<T>) {
    if (!j.is_number_integer()) throw SyntaxError(std::string(field) + " must be an integer");
    if (j.is_number_unsigned()) {
      const auto v = j.get<std::uint64_t>();
      if (v > std::numeric_limits<T>::max()) throw RangeError(std::string(field) + " is out of range");
      return static_cast<T>(v);
    }
    const auto v = j.get<std::int64_t>();
    if (v < 0 || static_cast<std::uint64_t>(v) > std::numeric_limits<T>::max()) {
      throw RangeError(std::string(field) + " is out of range");
    }
    return static_cast<T>(v);
  } else {
    if (!j.is_number()) throw SyntaxError(std::string(field) + " must be a number");
    return j.get<T>();
  }
}

}  // namespace detail

/// Builds a grid from JSON text. Omitted fields keep their defaults
/// (all seven team sizes, both schemes, 600 s, 10 coins, 1000 rounds, 100 runs,
/// factors [0.8, 1.2], seed 0). Does not validate cell divisibility; call validate().
inline ExperimentGrid parse_config(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw SyntaxError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw SyntaxError("config must be a JSON object");

  static const std::set<std::string> known{"distributions", "team_sizes", "schemes",      "rounds",
                                           "runs",          "base_work",  "round_reward", "workload_factor",
                                           "master_seed"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!known.contains(it.key())) throw SyntaxError("unknown config field '" + it.key() + "'");
  }

  ExperimentGrid grid;
  if (!j.contains("distributions") || !j["distributions"].is_array() || j["distributions"].empty()) {
    throw SyntaxError("config needs a non-empty 'distributions' array");
  }
  for (const auto& d : j["distributions"]) {
    if (!d.is_object() || !d.contains("spec") || !d["spec"].is_string()) {
      throw SyntaxError("each distribution needs a string 'spec'");
    }
    const auto spec = d["spec"].get<std::string>();
    auto dist = parse_distribution(spec);
    std::string name;
    if (d.contains("name")) {
      if (!d["name"].is_string()) throw SyntaxError("distribution 'name' must be a string");
      name = d["name"].get<std::string>();
    } else {
      name = "dist" + std::to_string(grid.distributions.size());
    }
    grid.distributions.push_back({std::move(name), std::move(dist)});
  }

  if (j.contains("team_sizes")) {
    if (!j["team_sizes"].is_array()) throw SyntaxError("team_sizes must be an array");
    grid.team_sizes.clear();
    for (const auto& n : j["team_sizes"]) grid.team_sizes.push_back(detail::number_from_json<std::uint32_t>(n, "team_sizes"));
  }
  if (j.contains("schemes")) {
    if (!j["schemes"].is_array()) throw SyntaxError("schemes must be an array");
    grid.schemes.clear();
    for (const auto& s : j["schemes"]) grid.schemes.push_back(detail::scheme_from_json(s));
  }
  if (j.contains("rounds")) grid.rounds = detail::number_from_json<std::uint32_t>(j["rounds"], "rounds");
  if (j.contains("runs")) grid.runs = detail::number_from_json<std::uint32_t>(j["runs"], "runs");
  if (j.contains("base_work")) grid.base_work = detail::number_from_json<double>(j["base_work"], "base_work");
  if (j.contains("round_reward")) {
    grid.round_reward = detail::number_from_json<double>(j["round_reward"], "round_reward");
  }
  if (j.contains("workload_factor")) {
    const auto& wf = j["workload_factor"];
    if (!wf.is_array() || wf.size() != 2) throw SyntaxError("workload_factor must be [low, high]");
    grid.workload_factor_low = detail::number_from_json<double>(wf[0], "workload_factor");
    grid.workload_factor_high = detail::number_from_json<double>(wf[1], "workload_factor");
  }
  if (j.contains("master_seed")) {
    grid.master_seed = detail::number_from_json<std::uint64_t>(j["master_seed"], "master_seed");
  }
  return grid;
}

/// Reads, parses and validates a JSON config file.
inline ExperimentGrid load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  auto grid = parse_config(buf.str());
  grid.validate();
  return grid;
}

inline std::string preset_spec(std::string_view family, const std::string& r) {
  if (family == "two-class") return "1:800," + r + ":800";
  if (family == "lone-low") return "1:1," + r + ":1599";
  return "1:1599," + r + ":1";
}

inline const std::vector<std::string>& paper_preset_names() {
  static const std::vector<std::string> names{"two-class-r2", "two-class-r100", "lone-low-r2", "lone-low-r100",
                                              "lone-high-r2", "lone-high-r100", "ten-layer"};
  return names;
}

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{
      "two-class-r2",  "two-class-r5",   "two-class-r10", "two-class-r100", "lone-low-r2",  "lone-low-r5",
      "lone-low-r10",  "lone-low-r100",  "lone-high-r2",  "lone-high-r5",   "lone-high-r10", "lone-high-r100",
      "ten-layer",     "uniform",        "paper"};
  return names;
}

/// Distribution of one named scenario ("paper" is a grid, not a single distribution).
inline PerformanceDistribution preset_distribution(std::string_view name) {
  if (name == "ten-layer") return parse_distribution("1:800,2:400,3:200,4:100,5:50,6:30,7:10,8:5,9:3,10:2");
  if (name == "uniform") return parse_distribution("1:1600");
  for (const std::string_view family : {"two-class", "lone-low", "lone-high"}) {
    const std::string prefix = std::string(family) + "-r";
    if (name.starts_with(prefix)) {
      const std::string r(name.substr(prefix.size()));
      if (!r.empty() && detail::is_decimal(r) && r.front() != '-' && r.front() != '+') {
        const double value = std::stod(r);
        if (value > 1.0) return parse_distribution(preset_spec(family, r));
      }
    }
  }
  throw ValidationError("unknown preset '" + std::string(name) + "'");
}

/// Default grid over a named scenario. "paper" bundles the seven distributions
/// shown in the published figures.
inline ExperimentGrid preset(std::string_view name) {
  ExperimentGrid grid;
  if (name == "paper") {
    for (const auto& n : paper_preset_names()) grid.distributions.push_back({n, preset_distribution(n)});
  } else {
    grid.distributions.push_back({std::string(name), preset_distribution(name)});
  }
  return grid;
}

struct GridOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::uint32_t> rounds;
  std::optional<std::uint32_t> runs;
  std::optional<std::vector<std::uint32_t>> team_sizes;
  std::optional<std::vector<AllocationScheme>> schemes;
};

inline void apply_overrides(ExperimentGrid& grid, const GridOverrides& o) {
  if (o.seed) grid.master_seed = *o.seed;
  if (o.rounds) grid.rounds = *o.rounds;
  if (o.runs) grid.runs = *o.runs;
  if (o.team_sizes) grid.team_sizes = *o.team_sizes;
  if (o.schemes) grid.schemes = *o.schemes;
}

using CellCallback = std::function<void(const GridCell&, const MetricsReport&)>;

/// One report per cell, in cell order. Runs within a cell use up to `threads` workers;
/// output does not depend on the worker count.
inline std::vector<MetricsReport> run_grid(const ExperimentGrid& grid, unsigned threads = 1,
                                           const CellCallback& on_cell = {}) {
  grid.validate();
  std::vector<MetricsReport> reports;
  for (const auto& cell : grid.cells()) {
    try {
      const auto cfg = grid.cell_config(cell);
      const auto results = run_experiment(cfg, threads);
      reports.push_back(build_report(cfg, results, grid.distributions[cell.distribution_index].name));
    } catch (const std::exception& e) {
      throw CellError(grid.describe(cell) + ": " + e.what());
    }
    if (on_cell) on_cell(cell, reports.back());
  }
  return reports;
}

inline std::string format_fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

inline constexpr std::string_view kCsvHeader = "scenario,scheme,team_size,level,population,avg_reward,sd_reward,efficiency,gini";

/// CSV text: one row per (cell, level), sorted by (scenario, scheme, team_size, level).
inline std::string format_csv(const std::vector<MetricsReport>& reports) {
  if (reports.empty()) throw std::invalid_argument("no reports to write");

  struct Row {
    const MetricsReport* report;
    const LevelStats* stats;
  };
  std::vector<Row> rows;
  for (const auto& r : reports) {
    for (const auto& l : r.levels) rows.push_back({&r, &l});
  }
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return std::make_tuple(std::string_view(a.report->scenario), to_string(a.report->scheme), a.report->team_size,
                           a.stats->level) < std::make_tuple(std::string_view(b.report->scenario),
                                                              to_string(b.report->scheme), b.report->team_size,
                                                              b.stats->level);
  });

  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& row : rows) {
    const auto& r = *row.report;
    const auto& l = *row.stats;
    out += r.scenario;
    out += ',';
    out += to_string(r.scheme);
    out += ',' + std::to_string(r.team_size);
    out += ',' + format_fixed6(l.level);
    out += ',' + std::to_string(l.population_at_level);
    out += ',' + format_fixed6(l.avg_reward);
    out += ',' + format_fixed6(l.sd_reward);
    out += ',' + format_fixed6(l.efficiency);
    out += ',' + format_fixed6(r.gini);
    out += '\n';
  }
  return out;
}

inline void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

inline void emit_csv(const std::vector<MetricsReport>& reports, const std::filesystem::path& path) {
  write_text(path, format_csv(reports));
}

enum class PlotMetric { kAvgReward, kEfficiency };

inline std::string_view to_string(PlotMetric m) { return m == PlotMetric::kAvgReward ? "avg_reward" : "efficiency"; }

/// Plot-ready table for one scenario: rows are team sizes, columns `<level>_<scheme>`.
/// Cells absent from `reports` leave their field empty.
inline std::string format_plotdata(const std::vector<MetricsReport>& reports, std::string_view scenario,
                                   PlotMetric metric) {
  std::set<std::uint32_t> team_sizes;
  std::set<std::pair<double, AllocationScheme>> series;
  std::map<std::tuple<std::uint32_t, double, AllocationScheme>, double> values;
  for (const auto& r : reports) {
    if (r.scenario != scenario) continue;
    team_sizes.insert(r.team_size);
    for (const auto& l : r.levels) {
      series.insert({l.level, r.scheme});
      values[{r.team_size, l.level, r.scheme}] = metric == PlotMetric::kAvgReward ? l.avg_reward : l.efficiency;
    }
  }
  if (team_sizes.empty()) throw std::invalid_argument("no reports for scenario '" + std::string(scenario) + "'");

  std::string out = "team_size";
  for (const auto& [level, scheme] : series) {
    out += ',' + PerformanceDistribution::format_level(level) + '_' + std::string(to_string(scheme));
  }
  out += '\n';
  for (const auto n : team_sizes) {
    out += std::to_string(n);
    for (const auto& [level, scheme] : series) {
      out += ',';
      if (const auto it = values.find({n, level, scheme}); it != values.end()) out += format_fixed6(it->second);
    }
    out += '\n';
  }
  return out;
}

/// Writes `<scenario>_avg_reward.csv` and `<scenario>_efficiency.csv` per scenario into `dir`.
/// Returns the written paths in scenario order.
inline std::vector<std::filesystem::path> emit_plotdata(const std::vector<MetricsReport>& reports,
                                                        const std::filesystem::path& dir) {
  if (reports.empty()) throw std::invalid_argument("no reports to write");
  std::set<std::string> scenarios;
  for (const auto& r : reports) scenarios.insert(r.scenario);

  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());

  std::vector<std::filesystem::path> written;
  for (const auto& s : scenarios) {
    for (const auto metric : {PlotMetric::kAvgReward, PlotMetric::kEfficiency}) {
      auto path = dir / (s + "_" + std::string(to_string(metric)) + ".csv");
      write_text(path, format_plotdata(reports, s, metric));
      written.push_back(std::move(path));
    }
  }
  return written;
}

}  // namespace pots
