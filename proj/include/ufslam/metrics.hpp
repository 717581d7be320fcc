#pragma once

#include "ufslam/particle_filter.hpp"
#include "ufslam/simulator.hpp"

#include <map>
#include <span>
#include <vector>

namespace ufslam::metrics {

struct PoseError {
  double position{0.0};  // m
  double heading{0.0};   // rad, in [0, pi]
};

PoseError pose_error(const Pose2D& truth, const Pose2D& estimate);

struct EstimatedState {
  Pose2D pose;
  std::map<LandmarkId, Eigen::Vector2d> landmarks;
};

/// Weighted mean over particles: circular mean for the heading; each landmark
/// is averaged over the particles that contain it.
EstimatedState estimated_state(const FilterState& state);

/// Pose part of estimated_state only.
Pose2D estimated_pose(const FilterState& state);

/// Number of distinct landmark ids held by any particle.
std::size_t landmark_count(const FilterState& state);

/// Filter output recorded after each step.
struct StepEstimate {
  Pose2D pose;
  double n_eff{0.0};
  bool resampled{false};
  std::size_t landmark_count{0};
};

struct RunStats {
  double max_position_error{0.0};
  double mean_position_error{0.0};
  double max_heading_error{0.0};
  double final_position_error{0.0};
  double landmark_rmse{0.0};  // over estimated ids present in the truth
  std::size_t matched_landmarks{0};
  std::size_t resample_count{0};
  std::vector<double> position_errors;
  std::vector<double> heading_errors;
  std::vector<double> n_eff;
};

/// Throws std::invalid_argument when step counts differ.
RunStats run_summary(const sim::SimLog& truth, std::span<const StepEstimate> estimates,
                     std::span<const LandmarkTruth> true_landmarks,
                     const std::map<LandmarkId, Eigen::Vector2d>& final_map);

double landmark_rmse(std::span<const LandmarkTruth> truth, const std::map<LandmarkId, Eigen::Vector2d>& estimate,
                     std::size_t* matched = nullptr);

struct Aggregate {
  double mean{0.0};
  double stddev{0.0};  // sample standard deviation (n - 1); 0 for n < 2
  std::size_t count{0};
};

Aggregate aggregate(std::span<const double> values);

}  // namespace ufslam::metrics
