// ufslam: run | sweep | plot

#include "ufslam/cli/commands.hpp"

#include "CLI11.hpp"

#include <iostream>

using namespace ufslam::cli;

namespace {

struct CommonFlags {
  std::string config;
  std::string scenario, algo;
  int particles{0};
  long long seed{-1};
  int threads{0};
  std::vector<std::string> sets;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool with_algo_and_seed) {
  cmd->add_option("--config", f.config, "key = value configuration file");
  cmd->add_option("--scenario", f.scenario, "preset: sim100, circle2m or corridor");
  if (with_algo_and_seed) {
    cmd->add_option("--algo", f.algo, "ufastslam or fastslam2");
    cmd->add_option("--seed", f.seed, "run seed (simulation and filter)");
  }
  cmd->add_option("--particles", f.particles, "particle count M");
  cmd->add_option("--threads", f.threads, "worker threads per filter step");
  cmd->add_option("--set", f.sets, "override a configuration key (key=value); repeatable");
}

// Flags become assignments after the file so they take precedence; --set
// pairs come last.
std::vector<Assignment> flag_assignments(const CommonFlags& f) {
  std::vector<Assignment> out;
  if (!f.scenario.empty()) out.push_back({"scenario", f.scenario, "--scenario"});
  if (!f.algo.empty()) out.push_back({"algo", f.algo, "--algo"});
  if (f.particles != 0) out.push_back({"particles", std::to_string(f.particles), "--particles"});
  if (f.seed != -1) out.push_back({"seed", std::to_string(f.seed), "--seed"});
  if (f.threads != 0) out.push_back({"threads", std::to_string(f.threads), "--threads"});
  for (const std::string& s : f.sets) out.push_back(parse_override(s));
  return out;
}

std::optional<std::filesystem::path> optional_path(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return std::filesystem::path(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unscented FastSLAM / FastSLAM 2.0 simulation and benchmark tool"};
  app.require_subcommand(1);

  CommonFlags run_flags;
  std::string run_out;
  bool run_plot = false;
  CLI::App* run = app.add_subcommand("run", "one (scenario, algorithm, seed) run");
  add_common(run, run_flags, true);
  run->add_option("--out", run_out, "output directory");
  run->add_flag("--plot", run_plot, "also write trajectory.svg and errors.svg");

  CommonFlags sweep_flags;
  SweepOptions sweep_options;
  std::string sweep_out;
  CLI::App* sweep = app.add_subcommand("sweep", "sensor-noise sweep of both algorithms");
  add_common(sweep, sweep_flags, false);
  sweep->add_option("--seeds", sweep_options.seeds, "seeds per (noise row, algorithm)")->capture_default_str();
  sweep->add_option("--jobs", sweep_options.jobs, "runs executed in parallel")->capture_default_str();
  sweep->add_option("--out", sweep_out, "output directory (default runs/sweep)");

  std::string plot_in, plot_out;
  CLI::App* plot = app.add_subcommand("plot", "SVG plots from run or sweep output");
  plot->add_option("in,--in", plot_in, "run or sweep directory")->required();
  plot->add_option("--out", plot_out, "where to write the SVG files (default: the input directory)");

  try {
    app.parse(argc, argv);
    if (run->parsed()) {
      RunOptions options;
      options.config_file = optional_path(run_flags.config);
      options.assignments = flag_assignments(run_flags);
      options.out = optional_path(run_out);
      options.plot = run_plot;
      return run_command(options, std::cout, std::cerr);
    }
    if (sweep->parsed()) {
      sweep_options.config_file = optional_path(sweep_flags.config);
      sweep_options.assignments = flag_assignments(sweep_flags);
      if (!sweep_out.empty()) sweep_options.out = sweep_out;
      return sweep_command(sweep_options, std::cout, std::cerr);
    }
    PlotOptions options;
    options.in = plot_in;
    options.out = optional_path(plot_out);
    return plot_command(options, std::cout, std::cerr);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
