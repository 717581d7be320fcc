#pragma once

// Unscented FastSLAM: every particle carries a Gaussian pose belief that is
// predicted and then refined feature by feature with sigma points drawn from
// the augmented [pose; control noise; measurement noise] state. Landmark
// posteriors are 2-D Gaussians updated with their own sigma points.

#include "ufslam/particle_filter.hpp"

#include <span>

namespace ufslam::ufastslam {

inline constexpr int kAugmentedDim = 7;

using AugmentedGaussian = Gaussian<kAugmentedDim>;
using AugmentedSigmaPoints = SigmaPointSet<kAugmentedDim>;

/// Layout [pose(3); control noise(2); measurement noise(2)], block-diagonal
/// covariance diag(pose.cov, q, r).
AugmentedGaussian augment(const PoseGaussian& pose, const Eigen::Matrix2d& q, const Eigen::Matrix2d& r);

struct PosePrediction {
  PoseGaussian pose;
  AugmentedSigmaPoints sigma;  // pose rows hold propagated points
};

PosePrediction predict_pose(const PoseGaussian& pose, const ControlInput& u, double dt, const FilterConfig& config);

/// Result of one feature-conditioned pose update.
struct PoseRefinement {
  PoseGaussian pose;
  RangeBearing predicted;       // n-hat
  Eigen::Matrix2d innovation;   // S
};

/// Sigma-point Kalman update of the pose with one identified feature. The
/// sigma set must carry the measurement noise in rows 5-6.
PoseRefinement refine_pose_with_feature(const PoseGaussian& pose, const AugmentedSigmaPoints& sigma,
                                        const LandmarkEstimate& landmark, const RangeBearing& z,
                                        bool with_landmark_cov = false);

/// Sigma points of augment(pose, q, r); used to regenerate the set after a refinement.
AugmentedSigmaPoints regenerate_sigma(const PoseGaussian& pose, const Eigen::Matrix2d& q, const Eigen::Matrix2d& r,
                                      const UtWeights& weights);

/// New landmark from an observation; covariance is the first-order
/// propagation of the measurement and pose uncertainty.
LandmarkEstimate init_landmark(const PoseGaussian& pose, const RangeBearing& z, const Eigen::Matrix2d& r);

struct LandmarkUpdate {
  LandmarkEstimate landmark;
  RangeBearing predicted;      // z-hat
  Eigen::Matrix2d innovation;  // S-bar, including r
};

LandmarkUpdate update_landmark(const LandmarkEstimate& landmark, const Pose2D& pose_sample, const RangeBearing& z,
                               const Eigen::Matrix2d& r, const UtParams& ut);

/// Per-particle body of one step (prediction, refinement, sampling, landmark
/// updates). Returns the log-weight increment.
double update_particle(Particle& particle, const FilterConfig& config, const ControlInput& u, double dt,
                       std::span<const RangeBearing> observations, std::mt19937_64& rng);

FilterState step(const FilterConfig& config, const FilterState& state, const ControlInput& u, double dt,
                 std::span<const RangeBearing> observations);

}  // namespace ufslam::ufastslam
