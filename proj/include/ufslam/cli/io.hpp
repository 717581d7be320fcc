#pragma once

// Artifact formats: steps.csv, landmarks.csv, deadreckoning.csv,
// simlog.jsonl, summary.json and the sweep table. Numbers are written in
// shortest round-trip form, so parsing a file reproduces the records exactly.

#include "ufslam/cli/experiment.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace ufslam::cli {

/// Raised for unreadable, empty or malformed artifact files.
class ArtifactError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kStepsHeader =
    "step,t,true_x,true_y,true_theta,est_x,est_y,est_theta,pos_err,heading_err,n_eff,resampled,n_landmarks";

struct StepRow {
  std::int64_t step{0};
  double t{0.0};
  double true_x{0.0}, true_y{0.0}, true_theta{0.0};
  double est_x{0.0}, est_y{0.0}, est_theta{0.0};
  double pos_err{0.0};
  double heading_err{0.0};
  double n_eff{0.0};
  bool resampled{false};
  std::size_t n_landmarks{0};

  bool operator==(const StepRow&) const = default;
};

/// Landmark row: truth, estimate, or both (has_* flags).
struct LandmarkRow {
  std::int32_t id{0};
  bool has_true{false};
  double true_x{0.0}, true_y{0.0};
  bool has_est{false};
  double est_x{0.0}, est_y{0.0};

  bool operator==(const LandmarkRow&) const = default;
};

struct TrackRow {
  std::int64_t step{0};
  double x{0.0}, y{0.0}, theta{0.0};

  bool operator==(const TrackRow&) const = default;
};

struct TableRow {
  double sigma_r{0.0};
  double sigma_phi_deg{0.0};
  std::string algo;
  double mean_max_pose_error{0.0};
  double std{0.0};

  bool operator==(const TableRow&) const = default;
};

/// Shortest decimal form that parses back to the same double.
std::string format_number(double v);

std::vector<StepRow> step_rows(const RunRecord& record);
std::vector<LandmarkRow> landmark_rows(const RunRecord& record, const sim::Scenario& scenario);
/// Step 0 is the initial pose; step k the pose after k controls.
std::vector<TrackRow> dead_reckoning_rows(const RunRecord& record);

std::string steps_csv(const std::vector<StepRow>& rows);
std::string landmarks_csv(const std::vector<LandmarkRow>& rows);
std::string track_csv(const std::vector<TrackRow>& rows);
std::string table_csv(const std::vector<TableRow>& rows);
std::string simlog_jsonl(const sim::SimLog& log);
std::string summary_json(const RunSpec& spec, const RunRecord& record);

std::vector<StepRow> parse_steps_csv(const std::string& text);
std::vector<LandmarkRow> parse_landmarks_csv(const std::string& text);
std::vector<TrackRow> parse_track_csv(const std::string& text);
std::vector<TableRow> parse_table_csv(const std::string& text);

std::string read_file(const std::filesystem::path& path);
/// Writes atomically enough for our purposes: whole buffer, binary mode.
void write_file(const std::filesystem::path& path, const std::string& contents);

/// Writes steps.csv, landmarks.csv, deadreckoning.csv, simlog.jsonl and
/// summary.json into `dir` (created if needed).
void write_run_artifacts(const std::filesystem::path& dir, const RunSpec& spec, const RunRecord& record);

}  // namespace ufslam::cli
