#pragma once

// Ground-truth world, waypoint-following driver and gated range-bearing
// sensor. Presets reproduce the geometry of the three evaluation settings.

#include "ufslam/core_types.hpp"
#include "ufslam/models.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace ufslam::sim {

struct Scenario {
  std::string name;
  std::vector<LandmarkTruth> landmarks;  // sorted by id
  std::vector<Eigen::Vector2d> waypoints;
  Pose2D initial_pose;
  double dt{0.1};
  MotionNoiseParams motion_noise;
  SensorNoiseParams sensor_noise;
  double max_range{30.0};
  double fov{2.0 * kPi};
  double speed{1.0};
  double turn_gain{1.0};
  double max_turn_rate{kPi / 4.0};
  double waypoint_radius{0.3};
  std::uint64_t seed{0};

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

struct SimStep {
  Pose2D true_pose;  // after applying the control
  ControlInput issued;
  ControlInput applied;
  std::vector<RangeBearing> observations;  // ascending id
};

struct SimLog {
  Pose2D initial_pose;
  double dt{0.0};
  std::vector<SimStep> steps;

  /// Integrated |applied v| * dt.
  double path_length() const;
};

/// Names accepted by preset().
const std::vector<std::string>& preset_names();

/// Throws std::invalid_argument for an unknown name.
Scenario preset(std::string_view name);

/// Motion gains mapping constant velocity noise (sigma_v, sigma_w) at the
/// nominal speed onto the velocity-proportional noise model.
MotionNoiseParams constant_motion_noise(double sigma_v, double sigma_w, double nominal_speed);

/// Issued control for the current waypoint.
ControlInput steer(const Pose2D& pose, const Eigen::Vector2d& waypoint, const Scenario& scenario);

std::vector<RangeBearing> sense(const Pose2D& true_pose, const Scenario& scenario, std::mt19937_64& rng);

/// Drives the waypoint course once. Throws std::runtime_error when a
/// waypoint is not reached within 10x the expected number of steps.
SimLog drive(const Scenario& scenario, std::mt19937_64& rng);

inline SimLog drive(const Scenario& scenario) {
  std::mt19937_64 rng(scenario.seed);
  return drive(scenario, rng);
}

}  // namespace ufslam::sim
