#include "ufslam/fastslam2.hpp"

#include "ufslam/ufastslam.hpp"

#include <string>

namespace ufslam::fastslam2 {

namespace {

Eigen::Matrix2d invert_innovation(const Eigen::Matrix2d& s, LandmarkId id) {
  Eigen::LLT<Eigen::Matrix2d> llt(s);
  if (!s.allFinite() || llt.info() != Eigen::Success) {
    throw NumericalError("landmark " + std::to_string(id.value) + ": innovation covariance is singular");
  }
  return llt.solve(Eigen::Matrix2d::Identity());
}

Eigen::Vector2d innovation(const RangeBearing& z, const RangeBearing& z_hat) {
  return {z.r - z_hat.r, wrap_angle(z.phi - z_hat.phi)};
}

}  // namespace

Proposal ekf_proposal(const Particle& particle, const FilterConfig& config, const ControlInput& u, double dt,
                      std::span<const RangeBearing> observations) {
  const Eigen::Matrix2d q = control_noise_cov(u, config.motion);
  const Eigen::Matrix2d r = config.sensor.covariance();
  const Pose2D prior = particle.pose_mean();

  const MotionJacobians f = motion_jacobians(prior, u, dt);
  Proposal out;
  out.predicted.mean = motion_mean(prior, u, dt).vector();
  out.predicted.cov = symmetrize_psd(Eigen::Matrix3d(f.pose * particle.pose.cov * f.pose.transpose() +
                                                     f.control * q * f.control.transpose()));

  PoseGaussian pose = out.predicted;
  for (const RangeBearing& z : observations) {
    const auto it = particle.landmarks.find(z.landmark_id);
    if (it == particle.landmarks.end()) continue;
    const LandmarkEstimate& lm = it->second;
    const Pose2D at = Pose2D::from_vector(pose.mean);
    const MeasurementJacobians h = measurement_jacobians(at, lm.mean);
    const Eigen::Matrix2d s = h.pose * pose.cov * h.pose.transpose() +
                              h.landmark * lm.cov * h.landmark.transpose() + r;
    const Eigen::Matrix<double, 3, 2> gain = pose.cov * h.pose.transpose() * invert_innovation(s, lm.id);
    pose.mean += gain * innovation(z, measure(at, lm.id, lm.mean));
    pose.mean(2) = wrap_angle(pose.mean(2));
    pose.cov = symmetrize_psd(Eigen::Matrix3d(pose.cov - gain * s * gain.transpose()));
  }
  out.refined = pose;
  return out;
}

LandmarkEstimate ekf_landmark_update(const LandmarkEstimate& landmark, const Pose2D& pose_sample,
                                     const RangeBearing& z, const Eigen::Matrix2d& r) {
  if (landmark.id != z.landmark_id) {
    throw std::invalid_argument("ekf_landmark_update: landmark id does not match observation");
  }
  const MeasurementJacobians h = measurement_jacobians(pose_sample, landmark.mean);
  const Eigen::Matrix2d s = h.landmark * landmark.cov * h.landmark.transpose() + r;
  const Eigen::Matrix2d gain = landmark.cov * h.landmark.transpose() * invert_innovation(s, landmark.id);
  LandmarkEstimate out = landmark;
  out.mean += gain * innovation(z, measure(pose_sample, landmark.id, landmark.mean));
  out.cov = symmetrize_psd(Eigen::Matrix2d(landmark.cov - gain * s * gain.transpose()));
  return out;
}

double update_particle(Particle& particle, const FilterConfig& config, const ControlInput& u, double dt,
                       std::span<const RangeBearing> observations, std::mt19937_64& rng) {
  const Eigen::Matrix2d r = config.sensor.covariance();
  const Proposal proposal = ekf_proposal(particle, config, u, dt, observations);

  const Eigen::Vector3d sample = sample_pose(proposal.refined, rng);
  const Pose2D at = Pose2D::from_vector(sample);
  particle.pose.mean = sample;
  if (config.pose_covariance == PoseCovariance::retain) {
    particle.pose.cov = proposal.refined.cov;
  } else {
    particle.pose.cov.setZero();
  }

  double log_weight = 0.0;
  for (const RangeBearing& z : observations) {
    auto it = particle.landmarks.find(z.landmark_id);
    try {
      if (it == particle.landmarks.end()) {
        particle.landmarks.emplace(z.landmark_id,
                                   ufastslam::init_landmark(PoseGaussian{sample, Eigen::Matrix3d::Zero()}, z, r));
        continue;
      }
      LandmarkEstimate& lm = it->second;
      const MeasurementJacobians h = measurement_jacobians(at, lm.mean);
      const Eigen::Matrix2d l = h.pose * proposal.predicted.cov * h.pose.transpose() +
                                h.landmark * lm.cov * h.landmark.transpose() + r;
      log_weight += log_importance_weight(z, measure(at, lm.id, lm.mean), l);
      lm = ekf_landmark_update(lm, at, z, r);
    } catch (const NumericalError& e) {
      throw NumericalError("landmark " + std::to_string(z.landmark_id.value) + ": " + e.what());
    } catch (const GeometryError& e) {
      throw GeometryError("landmark " + std::to_string(z.landmark_id.value) + ": " + e.what());
    }
  }
  return log_weight;
}

FilterState step(const FilterConfig& config, const FilterState& state, const ControlInput& u, double dt,
                 std::span<const RangeBearing> observations) {
  const std::vector<RangeBearing> ordered = canonical_order(observations);
  return run_particle_step(config, state, [&](Particle& particle, std::size_t, std::mt19937_64& rng) {
    return update_particle(particle, config, u, dt, ordered, rng);
  });
}

}  // namespace ufslam::fastslam2
