#pragma once

#include "ufslam/core_types.hpp"

#include <random>

namespace ufslam {

/// Gains of the velocity-dependent control noise; the standard deviations of
/// the velocity errors are (a1|v| + a2|w|) and (a3|v| + a4|w|).
struct MotionNoiseParams {
  double a1{0.0};
  double a2{0.0};
  double a3{0.0};
  double a4{0.0};
};

struct SensorNoiseParams {
  double sigma_r{0.1};    // m
  double sigma_phi{0.0174532925199432957};  // rad

  Eigen::Matrix2d covariance() const {
    return Eigen::Vector2d(sigma_r * sigma_r, sigma_phi * sigma_phi).asDiagonal();
  }
};

/// Below this turn rate the motion model uses its straight-line limit.
inline constexpr double kStraightLineTurnRate = 1e-6;

Pose2D motion_mean(const Pose2D& pose, const ControlInput& u, double dt);

/// Covariance of (v_actual - v, w_actual - w).
Eigen::Matrix2d control_noise_cov(const ControlInput& u, const MotionNoiseParams& p);

/// Control actually executed: u plus zero-mean Gaussian noise with
/// control_noise_cov(u, p). Always consumes two normal variates.
ControlInput sample_control(const ControlInput& u, const MotionNoiseParams& p, std::mt19937_64& rng);

Pose2D sample_motion(const Pose2D& pose, const ControlInput& u, double dt, const MotionNoiseParams& p,
                     std::mt19937_64& rng);

/// Noise-free range and bearing of a landmark. Throws GeometryError when the
/// landmark coincides with the robot.
RangeBearing measure(const Pose2D& pose, LandmarkId id, const Eigen::Vector2d& landmark);

inline RangeBearing measure(const Pose2D& pose, const LandmarkTruth& lm) {
  return measure(pose, lm.id, lm.position);
}

/// Landmark position implied by a measurement taken from `pose`.
Eigen::Vector2d inverse_measure(const Pose2D& pose, const RangeBearing& z);

struct MeasurementJacobians {
  Eigen::Matrix<double, 2, 3> pose;
  Eigen::Matrix2d landmark;
};

MeasurementJacobians measurement_jacobians(const Pose2D& pose, const Eigen::Vector2d& landmark);

struct MotionJacobians {
  Eigen::Matrix3d pose;
  Eigen::Matrix<double, 3, 2> control;
};

MotionJacobians motion_jacobians(const Pose2D& pose, const ControlInput& u, double dt);

struct InverseMeasurementJacobians {
  Eigen::Matrix<double, 2, 3> pose;
  Eigen::Matrix2d measurement;  // with respect to (r, phi)
};

InverseMeasurementJacobians inverse_measurement_jacobians(const Pose2D& pose, const RangeBearing& z);

}  // namespace ufslam
