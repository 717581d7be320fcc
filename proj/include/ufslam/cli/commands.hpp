#pragma once

// The three user-facing commands. Each returns a process exit code and
// reports to the given streams, so tests can drive them in-process.

#include "ufslam/cli/config.hpp"
#include "ufslam/cli/io.hpp"
#include "ufslam/cli/svg.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ufslam::cli {

/// Environment variable that, when set, prefixes relative output paths.
inline constexpr const char* kOutputRootEnv = "UFSLAM_OUTPUT_ROOT";

std::filesystem::path resolve_output(const std::filesystem::path& out);

struct RunOptions {
  std::optional<std::filesystem::path> config_file;
  std::vector<Assignment> assignments;  // flags and --set, applied after the file
  std::optional<std::filesystem::path> out;
  bool plot{false};
};

struct SweepOptions {
  std::optional<std::filesystem::path> config_file;
  std::vector<Assignment> assignments;
  int seeds{10};
  int jobs{1};
  std::filesystem::path out{"runs/sweep"};
};

struct PlotOptions {
  std::filesystem::path in;
  std::optional<std::filesystem::path> out;  // defaults to `in`
};

/// Sensor noise settings swept by `sweep`: (sigma_r m, sigma_phi degrees).
struct NoiseRow {
  double sigma_r;
  double sigma_phi_deg;
};
const std::vector<NoiseRow>& sweep_rows();

/// Directory name of one sweep run, e.g. "row2_fastslam2_seed7".
std::string sweep_run_name(std::size_t row, Algorithm algo, std::uint64_t seed);

int run_command(const RunOptions& options, std::ostream& out, std::ostream& err);
int sweep_command(const SweepOptions& options, std::ostream& out, std::ostream& err);
int plot_command(const PlotOptions& options, std::ostream& out, std::ostream& err);

Chart trajectory_chart(const std::vector<StepRow>& steps, const std::vector<LandmarkRow>& landmarks,
                       const std::vector<TrackRow>& dead_reckoning, const std::string& title);
Chart errors_chart(const std::vector<StepRow>& steps, const std::string& title);

/// Mean position error against time for each algorithm of one sweep row.
/// `runs` holds per-algorithm lists of step tables (one per seed).
Chart sweep_row_chart(const NoiseRow& row, std::size_t row_number,
                      const std::vector<std::pair<std::string, std::vector<std::vector<StepRow>>>>& runs);

}  // namespace ufslam::cli
