#pragma once

// FastSLAM 2.0 baseline: the same particle bookkeeping as ufastslam with every
// sigma-point transform replaced by a first-order (Jacobian) linearization.

#include "ufslam/particle_filter.hpp"

#include <span>

namespace ufslam::fastslam2 {

struct Proposal {
  PoseGaussian predicted;  // after the motion model, before any feature
  PoseGaussian refined;    // after all known features
};

/// Linearized prediction followed by sequential EKF refinement with each
/// known feature (observations must already be in canonical order).
Proposal ekf_proposal(const Particle& particle, const FilterConfig& config, const ControlInput& u, double dt,
                      std::span<const RangeBearing> observations);

LandmarkEstimate ekf_landmark_update(const LandmarkEstimate& landmark, const Pose2D& pose_sample,
                                     const RangeBearing& z, const Eigen::Matrix2d& r);

double update_particle(Particle& particle, const FilterConfig& config, const ControlInput& u, double dt,
                       std::span<const RangeBearing> observations, std::mt19937_64& rng);

FilterState step(const FilterConfig& config, const FilterState& state, const ControlInput& u, double dt,
                 std::span<const RangeBearing> observations);

}  // namespace ufslam::fastslam2
