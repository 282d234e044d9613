// pots_sim: batch runner for team-sprint reward experiments.
//
//   pots_sim run --preset lone-high-r100 --out results/
//   pots_sim run --config grid.json --seed 7 --runs 10 --format csv
//   pots_sim presets

#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pots/error.hpp"
#include "pots/experiment.hpp"
#include "pots/parallel.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

std::vector<std::uint32_t> parse_team_sizes(const std::string& text) {
  std::vector<std::uint32_t> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    const auto trimmed = std::string(pots::detail::trim(tok));
    if (!pots::detail::is_integer(trimmed) || trimmed.front() == '-' || trimmed.front() == '+') {
      throw pots::SyntaxError("bad team size '" + tok + "'");
    }
    const auto v = std::stoull(trimmed);
    if (v == 0 || v > UINT32_MAX) throw pots::RangeError("team size out of range: " + trimmed);
    out.push_back(static_cast<std::uint32_t>(v));
  }
  if (out.empty()) throw pots::SyntaxError("--team-sizes is empty");
  return out;
}

std::vector<pots::AllocationScheme> parse_schemes(const std::string& text) {
  if (text == "both") return {pots::AllocationScheme::kEqualShare, pots::AllocationScheme::kProportional};
  return {pots::parse_scheme(text)};
}

struct RunOptions {
  std::string config;
  std::string preset;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint32_t> rounds;
  std::optional<std::uint32_t> runs;
  std::string team_sizes;
  std::string scheme;
  std::string format = "both";
  std::string out = "results";
  unsigned threads = 0;
  bool quiet = false;
};

int run_command(const RunOptions& opt) {
  pots::ExperimentGrid grid;
  try {
    grid = opt.config.empty() ? pots::preset(opt.preset) : pots::load_config(opt.config);

    pots::GridOverrides overrides;
    overrides.seed = opt.seed;
    overrides.rounds = opt.rounds;
    overrides.runs = opt.runs;
    if (!opt.team_sizes.empty()) overrides.team_sizes = parse_team_sizes(opt.team_sizes);
    if (!opt.scheme.empty()) overrides.schemes = parse_schemes(opt.scheme);
    pots::apply_overrides(grid, overrides);
    grid.validate();
  } catch (const pots::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const pots::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }

  const unsigned threads = opt.threads > 0 ? opt.threads : pots::default_thread_count();
  try {
    const auto cells = grid.cells().size();
    const auto reports = pots::run_grid(grid, threads, [&](const pots::GridCell& cell, const pots::MetricsReport& r) {
      if (opt.quiet) return;
      std::cerr << '[' << cell.index + 1 << '/' << cells << "] " << r.scenario << ' ' << pots::to_string(r.scheme)
                << " N=" << r.team_size << " gini=" << pots::format_fixed6(r.gini) << '\n';
    });

    const std::filesystem::path out_dir(opt.out);
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw pots::IoError("cannot create '" + out_dir.string() + "': " + ec.message());

    if (opt.format == "csv" || opt.format == "both") {
      const auto path = out_dir / "results.csv";
      pots::emit_csv(reports, path);
      std::cout << path.string() << '\n';
    }
    if (opt.format == "plotdata" || opt.format == "both") {
      for (const auto& path : pots::emit_plotdata(reports, out_dir / "plotdata")) std::cout << path.string() << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte-Carlo simulator for team-sprint block rewards"};
  app.require_subcommand(1);

  RunOptions opt;
  auto* run = app.add_subcommand("run", "Run an experiment grid and write CSV / plot data");
  auto* config = run->add_option("--config", opt.config, "JSON grid config")->check(CLI::ExistingFile);
  auto* preset = run->add_option("--preset", opt.preset, "Named scenario (see `presets`)");
  config->excludes(preset);
  preset->excludes(config);
  run->add_option("--seed", opt.seed, "Master seed (u64)");
  run->add_option("--rounds", opt.rounds, "Rounds per run")->check(CLI::PositiveNumber);
  run->add_option("--runs", opt.runs, "Independent runs per cell")->check(CLI::PositiveNumber);
  run->add_option("--team-sizes", opt.team_sizes, "Comma-separated team sizes, e.g. 1,2,4");
  run->add_option("--scheme", opt.scheme, "equal | proportional | both")
      ->check(CLI::IsMember({"equal", "proportional", "both"}));
  run->add_option("--format", opt.format, "csv | plotdata | both")
      ->check(CLI::IsMember({"csv", "plotdata", "both"}))
      ->capture_default_str();
  run->add_option("--out", opt.out, "Output directory")->capture_default_str();
  run->add_option("--threads", opt.threads, "Worker threads (default: POTS_SIM_THREADS or hardware)");
  run->add_flag("-q,--quiet", opt.quiet, "No per-cell progress on stderr");

  auto* presets = app.add_subcommand("presets", "List named scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  if (presets->parsed()) {
    for (const auto& name : pots::preset_names()) {
      if (name == "paper") {
        std::cout << "paper\t(all seven published distributions)\n";
      } else {
        std::cout << name << '\t' << pots::preset_distribution(name).to_string() << '\n';
      }
    }
    return kExitOk;
  }

  if (opt.config.empty() && opt.preset.empty()) {
    std::cerr << "error: run needs --config or --preset\n";
    return kExitValidation;
  }
  return run_command(opt);
}
