#include "ufslam/cli/io.hpp"

#include <fmt/format.h>
#include "json.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace ufslam::cli {

namespace {

using Json = nlohmann::ordered_json;

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

// Splits into lines, checks the header and the column count of each row.
std::vector<std::vector<std::string>> csv_records(const std::string& text, const std::string& header,
                                                  const std::string& what) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ArtifactError(what + ": file is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header) throw ArtifactError(what + ": unexpected header '" + line + "'");
  const std::size_t columns = split(header).size();
  std::vector<std::vector<std::string>> records;
  int number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split(line);
    if (fields.size() != columns) {
      throw ArtifactError(what + ": line " + std::to_string(number) + " has " + std::to_string(fields.size()) +
                          " fields, expected " + std::to_string(columns));
    }
    records.push_back(std::move(fields));
  }
  if (records.empty()) throw ArtifactError(what + ": no data rows");
  return records;
}

template <typename T>
T parse_field(const std::string& field, const std::string& what) {
  T out{};
  const char* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, out);
  if (ec != std::errc{} || ptr != end) throw ArtifactError(what + ": cannot parse '" + field + "'");
  return out;
}

double number(const std::string& field, const std::string& what) { return parse_field<double>(field, what); }

Json pose_json(const Pose2D& p) { return Json{{"x", p.x}, {"y", p.y}, {"theta", p.theta}}; }

}  // namespace

std::string format_number(double v) { return fmt::format("{}", v); }

std::vector<StepRow> step_rows(const RunRecord& record) {
  std::vector<StepRow> rows;
  rows.reserve(record.estimates.size());
  for (std::size_t k = 0; k < record.estimates.size(); ++k) {
    const Pose2D& truth = record.log.steps[k].true_pose;
    const metrics::StepEstimate& est = record.estimates[k];
    StepRow r;
    r.step = static_cast<std::int64_t>(k + 1);
    r.t = static_cast<double>(k + 1) * record.log.dt;
    r.true_x = truth.x;
    r.true_y = truth.y;
    r.true_theta = truth.theta;
    r.est_x = est.pose.x;
    r.est_y = est.pose.y;
    r.est_theta = est.pose.theta;
    r.pos_err = record.stats.position_errors[k];
    r.heading_err = record.stats.heading_errors[k];
    r.n_eff = est.n_eff;
    r.resampled = est.resampled;
    r.n_landmarks = est.landmark_count;
    rows.push_back(r);
  }
  return rows;
}

std::vector<LandmarkRow> landmark_rows(const RunRecord& record, const sim::Scenario& scenario) {
  std::map<std::int32_t, LandmarkRow> rows;
  for (const LandmarkTruth& lm : scenario.landmarks) {
    LandmarkRow& r = rows[lm.id.value];
    r.id = lm.id.value;
    r.has_true = true;
    r.true_x = lm.position.x();
    r.true_y = lm.position.y();
  }
  for (const auto& [id, mean] : record.final_estimate.landmarks) {
    LandmarkRow& r = rows[id.value];
    r.id = id.value;
    r.has_est = true;
    r.est_x = mean.x();
    r.est_y = mean.y();
  }
  std::vector<LandmarkRow> out;
  for (const auto& entry : rows) out.push_back(entry.second);
  return out;
}

std::vector<TrackRow> dead_reckoning_rows(const RunRecord& record) {
  std::vector<TrackRow> rows;
  rows.push_back({0, record.log.initial_pose.x, record.log.initial_pose.y, record.log.initial_pose.theta});
  for (std::size_t k = 0; k < record.dead_reckoning.size(); ++k) {
    const Pose2D& p = record.dead_reckoning[k];
    rows.push_back({static_cast<std::int64_t>(k + 1), p.x, p.y, p.theta});
  }
  return rows;
}

std::string steps_csv(const std::vector<StepRow>& rows) {
  fmt::memory_buffer out;
  fmt::format_to(std::back_inserter(out), "{}\n", kStepsHeader);
  for (const StepRow& r : rows) {
    fmt::format_to(std::back_inserter(out), "{},{},{},{},{},{},{},{},{},{},{},{},{}\n", r.step, r.t, r.true_x,
                   r.true_y, r.true_theta, r.est_x, r.est_y, r.est_theta, r.pos_err, r.heading_err, r.n_eff,
                   r.resampled ? 1 : 0, r.n_landmarks);
  }
  return fmt::to_string(out);
}

std::string landmarks_csv(const std::vector<LandmarkRow>& rows) {
  fmt::memory_buffer out;
  fmt::format_to(std::back_inserter(out), "id,true_x,true_y,est_x,est_y\n");
  auto opt = [](bool has, double v) { return has ? format_number(v) : std::string(); };
  for (const LandmarkRow& r : rows) {
    fmt::format_to(std::back_inserter(out), "{},{},{},{},{}\n", r.id, opt(r.has_true, r.true_x),
                   opt(r.has_true, r.true_y), opt(r.has_est, r.est_x), opt(r.has_est, r.est_y));
  }
  return fmt::to_string(out);
}

std::string track_csv(const std::vector<TrackRow>& rows) {
  fmt::memory_buffer out;
  fmt::format_to(std::back_inserter(out), "step,x,y,theta\n");
  for (const TrackRow& r : rows) fmt::format_to(std::back_inserter(out), "{},{},{},{}\n", r.step, r.x, r.y, r.theta);
  return fmt::to_string(out);
}

std::string table_csv(const std::vector<TableRow>& rows) {
  fmt::memory_buffer out;
  fmt::format_to(std::back_inserter(out), "sigma_r,sigma_phi,algo,mean_max_pose_error,std\n");
  for (const TableRow& r : rows) {
    fmt::format_to(std::back_inserter(out), "{},{},{},{},{}\n", r.sigma_r, r.sigma_phi_deg, r.algo,
                   r.mean_max_pose_error, r.std);
  }
  return fmt::to_string(out);
}

std::string simlog_jsonl(const sim::SimLog& log) {
  std::string out;
  Json head{{"initial_pose", pose_json(log.initial_pose)}, {"dt", log.dt}, {"steps", log.steps.size()}};
  out += head.dump() + "\n";
  for (std::size_t k = 0; k < log.steps.size(); ++k) {
    const sim::SimStep& s = log.steps[k];
    Json obs = Json::array();
    for (const RangeBearing& z : s.observations) obs.push_back(Json{{"id", z.landmark_id.value}, {"r", z.r}, {"phi", z.phi}});
    Json line{{"step", k + 1},
              {"true_pose", pose_json(s.true_pose)},
              {"issued", Json{{"v", s.issued.v}, {"w", s.issued.w}}},
              {"applied", Json{{"v", s.applied.v}, {"w", s.applied.w}}},
              {"observations", std::move(obs)}};
    out += line.dump() + "\n";
  }
  return out;
}

std::string summary_json(const RunSpec& spec, const RunRecord& record) {
  const FilterConfig& f = spec.filter;
  const metrics::RunStats& s = record.stats;
  Json j;
  j["scenario"] = spec.scenario.name;
  j["algo"] = std::string(to_string(spec.algorithm));
  j["seed"] = spec.filter_seed;
  j["particles"] = f.particle_count;
  j["steps"] = record.log.steps.size();
  j["path_length"] = record.log.path_length();
  j["inject_noise"] = spec.inject_noise;
  j["filter"] = Json{{"sigma_r", f.sensor.sigma_r},
                     {"sigma_phi", f.sensor.sigma_phi},
                     {"motion", Json{f.motion.a1, f.motion.a2, f.motion.a3, f.motion.a4}},
                     {"resample_fraction", f.resample_fraction},
                     {"weight_form", spec.algorithm == Algorithm::fastslam2 ? std::string("jacobian") : std::string(to_string(f.weight_form))},
                     {"weight_includes_pose_innovation", f.weight_includes_pose_innovation},
                     {"pose_covariance", std::string(to_string(f.pose_covariance))},
                     {"refine_with_landmark_cov", f.refine_with_landmark_cov},
                     {"ut", Json{{"alpha", f.ut.alpha}, {"kappa", f.ut.kappa}, {"beta", f.ut.beta}}}};
  j["truth"] = Json{{"sigma_r", spec.scenario.sensor_noise.sigma_r},
                    {"sigma_phi", spec.scenario.sensor_noise.sigma_phi},
                    {"motion",
                     Json{spec.scenario.motion_noise.a1, spec.scenario.motion_noise.a2, spec.scenario.motion_noise.a3,
                          spec.scenario.motion_noise.a4}},
                    {"max_range", spec.scenario.max_range},
                    {"fov", spec.scenario.fov},
                    {"dt", spec.scenario.dt}};
  j["max_position_error"] = s.max_position_error;
  j["mean_position_error"] = s.mean_position_error;
  j["final_position_error"] = s.final_position_error;
  j["max_heading_error"] = s.max_heading_error;
  j["landmark_rmse"] = s.landmark_rmse;
  j["matched_landmarks"] = s.matched_landmarks;
  j["resample_count"] = s.resample_count;
  return j.dump(2) + "\n";
}

std::vector<StepRow> parse_steps_csv(const std::string& text) {
  const std::string what = "steps.csv";
  std::vector<StepRow> rows;
  for (const auto& f : csv_records(text, kStepsHeader, what)) {
    StepRow r;
    r.step = parse_field<std::int64_t>(f[0], what);
    r.t = number(f[1], what);
    r.true_x = number(f[2], what);
    r.true_y = number(f[3], what);
    r.true_theta = number(f[4], what);
    r.est_x = number(f[5], what);
    r.est_y = number(f[6], what);
    r.est_theta = number(f[7], what);
    r.pos_err = number(f[8], what);
    r.heading_err = number(f[9], what);
    r.n_eff = number(f[10], what);
    const int resampled = parse_field<int>(f[11], what);
    if (resampled != 0 && resampled != 1) throw ArtifactError(what + ": resampled must be 0 or 1");
    r.resampled = resampled == 1;
    r.n_landmarks = parse_field<std::size_t>(f[12], what);
    rows.push_back(r);
  }
  return rows;
}

std::vector<LandmarkRow> parse_landmarks_csv(const std::string& text) {
  const std::string what = "landmarks.csv";
  std::vector<LandmarkRow> rows;
  for (const auto& f : csv_records(text, "id,true_x,true_y,est_x,est_y", what)) {
    LandmarkRow r;
    r.id = parse_field<std::int32_t>(f[0], what);
    r.has_true = !f[1].empty();
    if (r.has_true) {
      r.true_x = number(f[1], what);
      r.true_y = number(f[2], what);
    }
    r.has_est = !f[3].empty();
    if (r.has_est) {
      r.est_x = number(f[3], what);
      r.est_y = number(f[4], what);
    }
    rows.push_back(r);
  }
  return rows;
}

std::vector<TrackRow> parse_track_csv(const std::string& text) {
  const std::string what = "deadreckoning.csv";
  std::vector<TrackRow> rows;
  for (const auto& f : csv_records(text, "step,x,y,theta", what)) {
    rows.push_back({parse_field<std::int64_t>(f[0], what), number(f[1], what), number(f[2], what), number(f[3], what)});
  }
  return rows;
}

std::vector<TableRow> parse_table_csv(const std::string& text) {
  const std::string what = "table.csv";
  std::vector<TableRow> rows;
  for (const auto& f : csv_records(text, "sigma_r,sigma_phi,algo,mean_max_pose_error,std", what)) {
    rows.push_back({number(f[0], what), number(f[1], what), f[2], number(f[3], what), number(f[4], what)});
  }
  return rows;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArtifactError(path.string() + ": cannot open");
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ArtifactError(path.string() + ": cannot write");
  out << contents;
  if (!out) throw ArtifactError(path.string() + ": write failed");
}

void write_run_artifacts(const std::filesystem::path& dir, const RunSpec& spec, const RunRecord& record) {
  std::filesystem::create_directories(dir);
  write_file(dir / "steps.csv", steps_csv(step_rows(record)));
  write_file(dir / "landmarks.csv", landmarks_csv(landmark_rows(record, spec.scenario)));
  write_file(dir / "deadreckoning.csv", track_csv(dead_reckoning_rows(record)));
  write_file(dir / "simlog.jsonl", simlog_jsonl(record.log));
  write_file(dir / "summary.json", summary_json(spec, record));
}

}  // namespace ufslam::cli
