#include "ufslam/ufastslam.hpp"

#include <string>

namespace ufslam::ufastslam {

namespace {

constexpr int kPoseRows = 3;
constexpr int kControlNoiseRow = 3;
constexpr int kMeasurementNoiseRow = 5;

const AngleDims kPoseAngles{2};
const AngleDims kMeasurementAngles{1};

RangeBearing to_range_bearing(LandmarkId id, const Eigen::Vector2d& v) { return {id, v(0), wrap_angle(v(1))}; }

Eigen::Matrix2d invert_innovation(const Eigen::Matrix2d& s, LandmarkId id) {
  Eigen::LLT<Eigen::Matrix2d> llt(s);
  if (!s.allFinite() || llt.info() != Eigen::Success) {
    throw NumericalError("landmark " + std::to_string(id.value) + ": innovation covariance is singular");
  }
  return llt.solve(Eigen::Matrix2d::Identity());
}

std::string landmark_context(LandmarkId id) { return "landmark " + std::to_string(id.value) + ": "; }

}  // namespace

AugmentedGaussian augment(const PoseGaussian& pose, const Eigen::Matrix2d& q, const Eigen::Matrix2d& r) {
  AugmentedGaussian g;
  g.mean.setZero();
  g.mean.head<kPoseRows>() = pose.mean;
  g.cov.setZero();
  g.cov.topLeftCorner<3, 3>() = pose.cov;
  g.cov.block<2, 2>(kControlNoiseRow, kControlNoiseRow) = q;
  g.cov.block<2, 2>(kMeasurementNoiseRow, kMeasurementNoiseRow) = r;
  return g;
}

AugmentedSigmaPoints regenerate_sigma(const PoseGaussian& pose, const Eigen::Matrix2d& q, const Eigen::Matrix2d& r,
                                      const UtWeights& weights) {
  return sigma_points<kAugmentedDim>(augment(pose, q, r), weights);
}

PosePrediction predict_pose(const PoseGaussian& pose, const ControlInput& u, double dt, const FilterConfig& config) {
  const Eigen::Matrix2d q = control_noise_cov(u, config.motion);
  const Eigen::Matrix2d r = config.sensor.covariance();
  const UtWeights weights = ut_weights(kAugmentedDim, config.ut);

  PosePrediction out;
  out.sigma = regenerate_sigma(pose, q, r, weights);
  auto& points = out.sigma.points;
  for (Eigen::Index i = 0; i < points.cols(); ++i) {
    const Pose2D from = Pose2D::from_vector(points.col(i).head<kPoseRows>());
    const ControlInput noisy{u.v + points(kControlNoiseRow, i), u.w + points(kControlNoiseRow + 1, i)};
    points.col(i).head<kPoseRows>() = motion_mean(from, noisy, dt).vector();
  }
  const Points<3> pose_points = points.topRows<kPoseRows>();
  out.pose = reconstruct_gaussian<3>(pose_points, out.sigma.w_m, out.sigma.w_c, kPoseAngles);
  return out;
}

PoseRefinement refine_pose_with_feature(const PoseGaussian& pose, const AugmentedSigmaPoints& sigma,
                                        const LandmarkEstimate& landmark, const RangeBearing& z,
                                        bool with_landmark_cov) {
  if (landmark.id != z.landmark_id) {
    throw std::invalid_argument("refine_pose_with_feature: landmark id does not match observation");
  }
  const Eigen::Index count = sigma.points.cols();
  const Points<3> pose_points = sigma.points.topRows<kPoseRows>();
  Points<2> predicted(2, count);
  for (Eigen::Index i = 0; i < count; ++i) {
    const Pose2D at = Pose2D::from_vector(pose_points.col(i));
    const RangeBearing n = measure(at, landmark.id, landmark.mean);
    predicted(0, i) = n.r + sigma.points(kMeasurementNoiseRow, i);
    predicted(1, i) = wrap_angle(n.phi + sigma.points(kMeasurementNoiseRow + 1, i));
  }

  const Eigen::Vector2d n_hat = weighted_mean<2>(predicted, sigma.w_m, kMeasurementAngles);
  Eigen::Matrix2d s =
      cross_covariance<2, 2>(predicted, n_hat, predicted, n_hat, sigma.w_c, kMeasurementAngles, kMeasurementAngles);
  if (with_landmark_cov) {
    const MeasurementJacobians h = measurement_jacobians(Pose2D::from_vector(pose.mean), landmark.mean);
    s += h.landmark * landmark.cov * h.landmark.transpose();
  }
  const Eigen::Matrix<double, 3, 2> cross =
      cross_covariance<3, 2>(pose_points, pose.mean, predicted, n_hat, sigma.w_c, kPoseAngles, kMeasurementAngles);
  const Eigen::Matrix<double, 3, 2> gain = cross * invert_innovation(s, landmark.id);

  const Eigen::Vector2d innovation(z.r - n_hat(0), wrap_angle(z.phi - n_hat(1)));
  PoseRefinement out;
  out.pose.mean = pose.mean + gain * innovation;
  out.pose.mean(2) = wrap_angle(out.pose.mean(2));
  const Eigen::Matrix3d posterior = pose.cov - gain * s * gain.transpose();
  out.pose.cov = symmetrize_psd(posterior);
  out.predicted = to_range_bearing(landmark.id, n_hat);
  out.innovation = s;
  return out;
}

LandmarkEstimate init_landmark(const PoseGaussian& pose, const RangeBearing& z, const Eigen::Matrix2d& r) {
  const Pose2D at = Pose2D::from_vector(pose.mean);
  LandmarkEstimate lm;
  lm.id = z.landmark_id;
  lm.mean = inverse_measure(at, z);
  const InverseMeasurementJacobians j = inverse_measurement_jacobians(at, z);
  const Eigen::Matrix2d cov =
      j.measurement * r * j.measurement.transpose() + j.pose * pose.cov * j.pose.transpose();
  lm.cov = symmetrize_psd(cov);
  return lm;
}

LandmarkUpdate update_landmark(const LandmarkEstimate& landmark, const Pose2D& pose_sample, const RangeBearing& z,
                               const Eigen::Matrix2d& r, const UtParams& ut) {
  if (landmark.id != z.landmark_id) {
    throw std::invalid_argument("update_landmark: landmark id does not match observation");
  }
  const SigmaPointSet<2> sigma = sigma_points<2>(Gaussian<2>{landmark.mean, landmark.cov}, ut);
  const Eigen::Index count = sigma.points.cols();
  Points<2> predicted(2, count);
  for (Eigen::Index i = 0; i < count; ++i) {
    predicted.col(i) = measure(pose_sample, landmark.id, sigma.points.col(i)).vector();
  }

  const Eigen::Vector2d z_hat = weighted_mean<2>(predicted, sigma.w_m, kMeasurementAngles);
  const Eigen::Matrix2d s =
      cross_covariance<2, 2>(predicted, z_hat, predicted, z_hat, sigma.w_c, kMeasurementAngles, kMeasurementAngles) + r;
  const Eigen::Matrix2d cross =
      cross_covariance<2, 2>(sigma.points, landmark.mean, predicted, z_hat, sigma.w_c, {}, kMeasurementAngles);
  const Eigen::Matrix2d gain = cross * invert_innovation(s, landmark.id);

  const Eigen::Vector2d innovation(z.r - z_hat(0), wrap_angle(z.phi - z_hat(1)));
  LandmarkUpdate out;
  out.landmark.id = landmark.id;
  out.landmark.mean = landmark.mean + gain * innovation;
  const Eigen::Matrix2d posterior = landmark.cov - gain * s * gain.transpose();
  out.landmark.cov = symmetrize_psd(posterior);
  out.predicted = to_range_bearing(landmark.id, z_hat);
  out.innovation = s;
  return out;
}

double update_particle(Particle& particle, const FilterConfig& config, const ControlInput& u, double dt,
                       std::span<const RangeBearing> observations, std::mt19937_64& rng) {
  const Eigen::Matrix2d q = control_noise_cov(u, config.motion);
  const Eigen::Matrix2d r = config.sensor.covariance();
  const UtWeights weights = ut_weights(kAugmentedDim, config.ut);

  PosePrediction prediction = predict_pose(particle.pose, u, dt, config);
  const Eigen::Matrix3d predicted_cov = prediction.pose.cov;
  PoseGaussian pose = prediction.pose;
  AugmentedSigmaPoints sigma = std::move(prediction.sigma);

  std::map<LandmarkId, Eigen::Matrix2d> pose_innovations;
  bool fresh_sigma = true;
  for (const RangeBearing& z : observations) {
    const auto it = particle.landmarks.find(z.landmark_id);
    if (it == particle.landmarks.end()) continue;
    try {
      if (!fresh_sigma) sigma = regenerate_sigma(pose, q, r, weights);
      const PoseRefinement refined = refine_pose_with_feature(pose, sigma, it->second, z, config.refine_with_landmark_cov);
      pose = refined.pose;
      pose_innovations[z.landmark_id] = refined.innovation;
      fresh_sigma = false;
    } catch (const NumericalError& e) {
      throw NumericalError(landmark_context(z.landmark_id) + e.what());
    }
  }

  const Eigen::Vector3d sample = sample_pose(pose, rng);
  const Pose2D at = Pose2D::from_vector(sample);
  particle.pose.mean = sample;
  if (config.pose_covariance == PoseCovariance::retain) {
    particle.pose.cov = pose.cov;
  } else {
    particle.pose.cov.setZero();
  }

  double log_weight = 0.0;
  for (const RangeBearing& z : observations) {
    auto it = particle.landmarks.find(z.landmark_id);
    try {
      if (it == particle.landmarks.end()) {
        particle.landmarks.emplace(z.landmark_id, init_landmark(PoseGaussian{sample, Eigen::Matrix3d::Zero()}, z, r));
        continue;
      }
      LandmarkEstimate& lm = it->second;
      if (config.weight_form == WeightForm::jacobian) {
        const MeasurementJacobians h = measurement_jacobians(at, lm.mean);
        const Eigen::Matrix2d l = h.pose * predicted_cov * h.pose.transpose() +
                                  h.landmark * lm.cov * h.landmark.transpose() + r;
        log_weight += log_importance_weight(z, measure(at, lm.id, lm.mean), l);
        lm = update_landmark(lm, at, z, r, config.ut).landmark;
      } else {
        const LandmarkUpdate updated = update_landmark(lm, at, z, r, config.ut);
        Eigen::Matrix2d s = updated.innovation;
        if (config.weight_includes_pose_innovation) {
          if (auto p = pose_innovations.find(z.landmark_id); p != pose_innovations.end()) s += p->second;
        }
        log_weight += log_importance_weight(z, updated.predicted, s);
        lm = updated.landmark;
      }
    } catch (const NumericalError& e) {
      throw NumericalError(landmark_context(z.landmark_id) + e.what());
    } catch (const GeometryError& e) {
      throw GeometryError(landmark_context(z.landmark_id) + e.what());
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

}  // namespace ufslam::ufastslam
