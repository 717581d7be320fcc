#include "ufslam/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

namespace ufslam::metrics {

PoseError pose_error(const Pose2D& truth, const Pose2D& estimate) {
  return {std::hypot(truth.x - estimate.x, truth.y - estimate.y), std::abs(wrap_angle(truth.theta - estimate.theta))};
}

EstimatedState estimated_state(const FilterState& state) {
  EstimatedState out;
  double total = 0.0;
  double x = 0.0, y = 0.0, s = 0.0, c = 0.0;
  struct Accumulator {
    Eigen::Vector2d sum{Eigen::Vector2d::Zero()};
    double weight{0.0};
  };
  std::map<LandmarkId, Accumulator> acc;
  for (const Particle& p : state.particles) {
    const double w = p.weight;
    total += w;
    x += w * p.pose.mean(0);
    y += w * p.pose.mean(1);
    s += w * std::sin(p.pose.mean(2));
    c += w * std::cos(p.pose.mean(2));
    for (const auto& [id, lm] : p.landmarks) {
      auto& a = acc[id];
      a.sum += w * lm.mean;
      a.weight += w;
    }
  }
  if (!(total > 0.0)) return out;
  out.pose = Pose2D(x / total, y / total, std::atan2(s, c));
  for (const auto& [id, a] : acc) {
    if (a.weight > 0.0) out.landmarks.emplace(id, a.sum / a.weight);
  }
  return out;
}

Pose2D estimated_pose(const FilterState& state) {
  double total = 0.0;
  double x = 0.0, y = 0.0, s = 0.0, c = 0.0;
  for (const Particle& p : state.particles) {
    const double w = p.weight;
    total += w;
    x += w * p.pose.mean(0);
    y += w * p.pose.mean(1);
    s += w * std::sin(p.pose.mean(2));
    c += w * std::cos(p.pose.mean(2));
  }
  if (!(total > 0.0)) return {};
  return Pose2D(x / total, y / total, std::atan2(s, c));
}

std::size_t landmark_count(const FilterState& state) {
  // Every particle sees the same observations, so the id sets normally
  // coincide; the union is only built when they do not.
  if (state.particles.empty()) return 0;
  const auto& first = state.particles.front().landmarks;
  bool same = true;
  for (const Particle& p : state.particles) {
    if (p.landmarks.size() != first.size() ||
        (!first.empty() && (p.landmarks.begin()->first != first.begin()->first ||
                            p.landmarks.rbegin()->first != first.rbegin()->first))) {
      same = false;
      break;
    }
  }
  if (same) return first.size();
  std::set<LandmarkId> ids;
  for (const Particle& p : state.particles) {
    for (const auto& entry : p.landmarks) ids.insert(entry.first);
  }
  return ids.size();
}

double landmark_rmse(std::span<const LandmarkTruth> truth, const std::map<LandmarkId, Eigen::Vector2d>& estimate,
                     std::size_t* matched) {
  double sum_sq = 0.0;
  std::size_t n = 0;
  for (const LandmarkTruth& lm : truth) {
    const auto it = estimate.find(lm.id);
    if (it == estimate.end()) continue;
    sum_sq += (it->second - lm.position).squaredNorm();
    ++n;
  }
  if (matched) *matched = n;
  return n == 0 ? 0.0 : std::sqrt(sum_sq / static_cast<double>(n));
}

RunStats run_summary(const sim::SimLog& truth, std::span<const StepEstimate> estimates,
                     std::span<const LandmarkTruth> true_landmarks,
                     const std::map<LandmarkId, Eigen::Vector2d>& final_map) {
  if (truth.steps.size() != estimates.size()) {
    throw std::invalid_argument("run_summary: " + std::to_string(truth.steps.size()) + " truth steps but " +
                                std::to_string(estimates.size()) + " estimates");
  }
  RunStats stats;
  stats.position_errors.reserve(estimates.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < estimates.size(); ++k) {
    const PoseError e = pose_error(truth.steps[k].true_pose, estimates[k].pose);
    stats.position_errors.push_back(e.position);
    stats.heading_errors.push_back(e.heading);
    stats.n_eff.push_back(estimates[k].n_eff);
    stats.max_position_error = std::max(stats.max_position_error, e.position);
    stats.max_heading_error = std::max(stats.max_heading_error, e.heading);
    if (estimates[k].resampled) ++stats.resample_count;
    sum += e.position;
  }
  if (!estimates.empty()) {
    stats.mean_position_error = sum / static_cast<double>(estimates.size());
    stats.final_position_error = stats.position_errors.back();
  }
  stats.landmark_rmse = landmark_rmse(true_landmarks, final_map, &stats.matched_landmarks);
  return stats;
}

Aggregate aggregate(std::span<const double> values) {
  Aggregate a;
  a.count = values.size();
  if (values.empty()) return a;
  double sum = 0.0;
  for (double v : values) sum += v;
  a.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - a.mean) * (v - a.mean);
    a.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return a;
}

}  // namespace ufslam::metrics
