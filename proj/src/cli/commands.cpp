#include "ufslam/cli/commands.hpp"

#include <fmt/format.h>
#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace ufslam::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kTruthColor = "#d62728";
constexpr const char* kEstimateColor = "#000000";
constexpr const char* kDeadReckoningColor = "#1f77b4";

std::vector<Assignment> gather(const std::optional<fs::path>& file, const std::vector<Assignment>& flags) {
  std::vector<Assignment> all;
  if (file) all = load_config_file(*file);
  all.insert(all.end(), flags.begin(), flags.end());
  return all;
}

std::string algo_color(const std::string& algo) { return algo == "ufastslam" ? "#d62728" : "#1f77b4"; }

// Mean of per-seed series, truncated to the shortest run.
std::pair<std::vector<double>, std::vector<double>> mean_error_series(const std::vector<std::vector<StepRow>>& runs) {
  std::size_t n = std::numeric_limits<std::size_t>::max();
  for (const auto& r : runs) n = std::min(n, r.size());
  if (runs.empty() || n == 0) return {};
  std::vector<double> t(n), e(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    t[k] = runs.front()[k].t;
    for (const auto& r : runs) e[k] += r[k].pos_err;
    e[k] /= static_cast<double>(runs.size());
  }
  return {t, e};
}

struct SweepTask {
  std::size_t row;
  Algorithm algo;
  std::uint64_t seed;
};

}  // namespace

fs::path resolve_output(const fs::path& out) {
  const char* root = std::getenv(kOutputRootEnv);
  if (root && *root && out.is_relative()) return fs::path(root) / out;
  return out;
}

const std::vector<NoiseRow>& sweep_rows() {
  static const std::vector<NoiseRow> rows{{0.1, 1.0}, {0.3, 3.0}, {0.6, 6.0}};
  return rows;
}

std::string sweep_run_name(std::size_t row, Algorithm algo, std::uint64_t seed) {
  return fmt::format("row{}_{}_seed{}", row, to_string(algo), seed);
}

Chart trajectory_chart(const std::vector<StepRow>& steps, const std::vector<LandmarkRow>& landmarks,
                       const std::vector<TrackRow>& dead_reckoning, const std::string& title) {
  Chart chart;
  chart.title = title;
  chart.x_label = "x (m)";
  chart.y_label = "y (m)";
  chart.equal_aspect = true;
  Series truth{"true trajectory", kTruthColor, {}, {}, true};
  Series est{"estimate", kEstimateColor, {}, {}, true};
  for (const StepRow& r : steps) {
    truth.x.push_back(r.true_x);
    truth.y.push_back(r.true_y);
    est.x.push_back(r.est_x);
    est.y.push_back(r.est_y);
  }
  chart.series.push_back(std::move(truth));
  chart.series.push_back(std::move(est));
  if (!dead_reckoning.empty()) {
    Series dr{"dead reckoning", kDeadReckoningColor, {}, {}};
    for (const TrackRow& r : dead_reckoning) {
      dr.x.push_back(r.x);
      dr.y.push_back(r.y);
    }
    chart.series.push_back(std::move(dr));
  }
  Series lm_true{"true landmarks", kTruthColor, {}, {}, false, false, Marker::circle};
  Series lm_est{"estimated landmarks", kEstimateColor, {}, {}, false, false, Marker::cross};
  for (const LandmarkRow& r : landmarks) {
    if (r.has_true) {
      lm_true.x.push_back(r.true_x);
      lm_true.y.push_back(r.true_y);
    }
    if (r.has_est) {
      lm_est.x.push_back(r.est_x);
      lm_est.y.push_back(r.est_y);
    }
  }
  if (!lm_true.x.empty()) chart.series.push_back(std::move(lm_true));
  if (!lm_est.x.empty()) chart.series.push_back(std::move(lm_est));
  return chart;
}

Chart errors_chart(const std::vector<StepRow>& steps, const std::string& title) {
  Chart chart;
  chart.title = title;
  chart.x_label = "time (s)";
  chart.y_label = "error";
  chart.y_from_zero = true;
  Series pos{"position error (m)", kEstimateColor, {}, {}};
  Series heading{"heading error (rad)", kTruthColor, {}, {}, true};
  for (const StepRow& r : steps) {
    pos.x.push_back(r.t);
    pos.y.push_back(r.pos_err);
    heading.x.push_back(r.t);
    heading.y.push_back(r.heading_err);
  }
  chart.series.push_back(std::move(pos));
  chart.series.push_back(std::move(heading));
  return chart;
}

Chart sweep_row_chart(const NoiseRow& row, std::size_t row_number,
                      const std::vector<std::pair<std::string, std::vector<std::vector<StepRow>>>>& runs) {
  Chart chart;
  chart.title = fmt::format("Row {}: sigma_r = {} m, sigma_phi = {} deg (mean over seeds)", row_number, row.sigma_r,
                            row.sigma_phi_deg);
  chart.x_label = "time (s)";
  chart.y_label = "position error (m)";
  chart.y_from_zero = true;
  for (const auto& [algo, seeds] : runs) {
    auto [t, e] = mean_error_series(seeds);
    chart.series.push_back(Series{algo, algo_color(algo), std::move(t), std::move(e), algo != "ufastslam"});
  }
  return chart;
}

int run_command(const RunOptions& options, std::ostream& out, std::ostream& err) {
  try {
    const RunSpec spec = build_spec(gather(options.config_file, options.assignments));
    const fs::path dir = resolve_output(options.out.value_or(
        fs::path("runs") / fmt::format("{}_{}_seed{}", spec.scenario.name, to_string(spec.algorithm), spec.filter_seed)));
    const RunRecord record = execute(spec);
    write_run_artifacts(dir, spec, record);
    if (options.plot) {
      PlotOptions p{dir, dir};
      std::ostringstream quiet;
      if (plot_command(p, quiet, err) != 0) return 1;
    }
    out << fmt::format("{} {} seed {}: {} steps, max position error {:.4f} m, mean {:.4f} m -> {}\n",
                       spec.scenario.name, to_string(spec.algorithm), spec.filter_seed, record.log.steps.size(),
                       record.stats.max_position_error, record.stats.mean_position_error, dir.string());
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int sweep_command(const SweepOptions& options, std::ostream& out, std::ostream& err) {
  try {
    if (options.seeds < 1) throw ConfigError("seeds: must be >= 1");
    if (options.jobs < 1) throw ConfigError("jobs: must be >= 1");
    const std::vector<Assignment> base = gather(options.config_file, options.assignments);
    const RunSpec prototype = build_spec(base);
    const fs::path dir = resolve_output(options.out);

    std::vector<SweepTask> tasks;
    for (std::size_t row = 0; row < sweep_rows().size(); ++row) {
      for (Algorithm algo : {Algorithm::ufastslam, Algorithm::fastslam2}) {
        for (int s = 1; s <= options.seeds; ++s) tasks.push_back({row, algo, static_cast<std::uint64_t>(s)});
      }
    }

    std::vector<std::vector<StepRow>> steps(tasks.size());
    std::vector<double> max_errors(tasks.size());
    std::vector<std::exception_ptr> failures(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i = next++; i < tasks.size(); i = next++) {
        try {
          const SweepTask& task = tasks[i];
          RunSpec spec = prototype;
          spec.algorithm = task.algo;
          spec.scenario.seed = spec.filter_seed = task.seed;
          const NoiseRow& row = sweep_rows()[task.row];
          spec.scenario.sensor_noise = spec.filter.sensor = {row.sigma_r, row.sigma_phi_deg * kPi / 180.0};
          const RunRecord record = execute(spec);
          const fs::path run_dir = dir / "runs" / sweep_run_name(task.row + 1, task.algo, task.seed);
          steps[i] = step_rows(record);
          write_file(run_dir / "steps.csv", steps_csv(steps[i]));
          write_file(run_dir / "summary.json", summary_json(spec, record));
          max_errors[i] = record.stats.max_position_error;
        } catch (...) {
          failures[i] = std::current_exception();
        }
      }
    };
    {
      std::vector<std::jthread> pool;
      for (int j = 1; j < std::min<int>(options.jobs, static_cast<int>(tasks.size())); ++j) pool.emplace_back(worker);
      worker();
    }
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      if (!failures[i]) continue;
      try {
        std::rethrow_exception(failures[i]);
      } catch (const std::exception& e) {
        throw std::runtime_error(sweep_run_name(tasks[i].row + 1, tasks[i].algo, tasks[i].seed) + ": " + e.what());
      }
    }

    std::vector<TableRow> table;
    for (std::size_t row = 0; row < sweep_rows().size(); ++row) {
      std::vector<std::pair<std::string, std::vector<std::vector<StepRow>>>> per_algo;
      for (Algorithm algo : {Algorithm::ufastslam, Algorithm::fastslam2}) {
        std::vector<double> values;
        std::vector<std::vector<StepRow>> runs;
        for (std::size_t i = 0; i < tasks.size(); ++i) {
          if (tasks[i].row != row || tasks[i].algo != algo) continue;
          values.push_back(max_errors[i]);
          runs.push_back(steps[i]);
        }
        const metrics::Aggregate agg = metrics::aggregate(values);
        table.push_back({sweep_rows()[row].sigma_r, sweep_rows()[row].sigma_phi_deg, std::string(to_string(algo)),
                         agg.mean, agg.stddev});
        per_algo.emplace_back(std::string(to_string(algo)), std::move(runs));
      }
      write_file(dir / fmt::format("errors_row{}.svg", row + 1),
                 render_svg(sweep_row_chart(sweep_rows()[row], row + 1, per_algo)));
    }
    write_file(dir / "table.csv", table_csv(table));
    for (const TableRow& r : table) {
      out << fmt::format("sigma_r {:>4} m  sigma_phi {:>2} deg  {:<10} mean max error {:.4f} m (std {:.4f})\n",
                         r.sigma_r, r.sigma_phi_deg, r.algo, r.mean_max_pose_error, r.std);
    }
    out << "wrote " << (dir / "table.csv").string() << "\n";
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int plot_command(const PlotOptions& options, std::ostream& out, std::ostream& err) {
  try {
    const fs::path in = options.in;
    const fs::path dest = resolve_output(options.out.value_or(in));
    if (fs::exists(in / "table.csv")) {
      const std::vector<TableRow> table = parse_table_csv(read_file(in / "table.csv"));
      // rows in file order, algorithms in first-appearance order
      std::vector<NoiseRow> rows;
      std::vector<std::string> algos;
      for (const TableRow& r : table) {
        if (std::none_of(rows.begin(), rows.end(), [&](const NoiseRow& n) {
              return n.sigma_r == r.sigma_r && n.sigma_phi_deg == r.sigma_phi_deg;
            })) {
          rows.push_back({r.sigma_r, r.sigma_phi_deg});
        }
        if (std::find(algos.begin(), algos.end(), r.algo) == algos.end()) algos.push_back(r.algo);
      }
      for (std::size_t row = 0; row < rows.size(); ++row) {
        std::vector<std::pair<std::string, std::vector<std::vector<StepRow>>>> per_algo;
        for (const std::string& algo : algos) {
          const std::string prefix = fmt::format("row{}_{}_seed", row + 1, algo);
          std::map<std::uint64_t, fs::path> seeds;
          if (fs::is_directory(in / "runs")) {
            for (const auto& entry : fs::directory_iterator(in / "runs")) {
              const std::string name = entry.path().filename().string();
              if (name.rfind(prefix, 0) != 0) continue;
              seeds.emplace(std::stoull(name.substr(prefix.size())), entry.path() / "steps.csv");
            }
          }
          if (seeds.empty()) throw ArtifactError((in / "runs").string() + ": no runs for " + prefix + "*");
          std::vector<std::vector<StepRow>> runs;
          for (const auto& [seed, path] : seeds) runs.push_back(parse_steps_csv(read_file(path)));
          per_algo.emplace_back(algo, std::move(runs));
        }
        const fs::path file = dest / fmt::format("errors_row{}.svg", row + 1);
        write_file(file, render_svg(sweep_row_chart(rows[row], row + 1, per_algo)));
        out << "wrote " << file.string() << "\n";
      }
      return 0;
    }

    if (!fs::exists(in / "steps.csv")) {
      throw ArtifactError(in.string() + ": neither steps.csv nor table.csv found");
    }
    const std::vector<StepRow> steps = parse_steps_csv(read_file(in / "steps.csv"));
    std::vector<LandmarkRow> landmarks;
    if (fs::exists(in / "landmarks.csv")) landmarks = parse_landmarks_csv(read_file(in / "landmarks.csv"));
    std::vector<TrackRow> dead_reckoning;
    if (fs::exists(in / "deadreckoning.csv")) dead_reckoning = parse_track_csv(read_file(in / "deadreckoning.csv"));
    // Titles come from the run's own summary so that plots do not depend on
    // where the run was written.
    std::string name = in.filename().empty() ? in.parent_path().filename().string() : in.filename().string();
    if (fs::exists(in / "summary.json")) {
      const auto summary = nlohmann::json::parse(read_file(in / "summary.json"), nullptr, false);
      if (summary.is_object() && summary.contains("scenario") && summary.contains("algo") &&
          summary.contains("seed")) {
        name = fmt::format("{} / {} / seed {}", summary["scenario"].get<std::string>(),
                           summary["algo"].get<std::string>(), summary["seed"].dump());
      }
    }
    write_file(dest / "trajectory.svg", render_svg(trajectory_chart(steps, landmarks, dead_reckoning, "Trajectory: " + name)));
    write_file(dest / "errors.svg", render_svg(errors_chart(steps, "Pose error: " + name)));
    out << "wrote " << (dest / "trajectory.svg").string() << " and " << (dest / "errors.svg").string() << "\n";
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace ufslam::cli
