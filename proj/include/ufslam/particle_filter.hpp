#pragma once

// Particle containers and the filter-independent parts of a Rao-Blackwellized
// SLAM step: importance weights, effective sample size, systematic
// resampling and the per-particle random streams.

#include "ufslam/core_types.hpp"
#include "ufslam/models.hpp"
#include "ufslam/unscented.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace ufslam {

struct LandmarkEstimate {
  LandmarkId id{};
  Eigen::Vector2d mean{Eigen::Vector2d::Zero()};
  Eigen::Matrix2d cov{Eigen::Matrix2d::Zero()};
};

struct Particle {
  PoseGaussian pose{Eigen::Vector3d::Zero(), Eigen::Matrix3d::Zero()};
  std::map<LandmarkId, LandmarkEstimate> landmarks;
  double weight{1.0};
  double log_weight{0.0};

  Pose2D pose_mean() const { return Pose2D::from_vector(pose.mean); }
};

enum class WeightForm {
  unscented,  // Gaussian likelihood with the sigma-point innovation covariance
  jacobian,   // linearized L = Hp P Hp^T + Hm Sigma Hm^T + R
};

std::string_view to_string(WeightForm form);
WeightForm weight_form_from_string(std::string_view name);

/// What a particle keeps as its pose covariance after the pose is sampled.
enum class PoseCovariance {
  retain,  // the refined proposal covariance feeds the next prediction
  reset,   // zero: the sample is treated as exact
};

std::string_view to_string(PoseCovariance mode);
PoseCovariance pose_covariance_from_string(std::string_view name);

struct FilterConfig {
  int particle_count{100};
  UtParams ut{};
  MotionNoiseParams motion{};
  SensorNoiseParams sensor{};
  double resample_fraction{0.5};
  WeightForm weight_form{WeightForm::unscented};
  // Unscented form only: add the last pose-refinement innovation covariance
  // of the same feature to the landmark innovation covariance.
  bool weight_includes_pose_innovation{false};
  PoseCovariance pose_covariance{PoseCovariance::retain};
  // Unscented proposal only: add Hm Sigma Hm^T of the known landmark to the
  // innovation covariance used for pose refinement.
  bool refine_with_landmark_cov{false};
  // Worker threads for the per-particle phase; results do not depend on it.
  int threads{1};

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

struct FilterState {
  std::vector<Particle> particles;
  std::int64_t step_index{0};
  std::uint64_t seed{0};
  double n_eff{0.0};      // after the last normalization
  bool resampled{false};  // whether the last step resampled
};

/// All particles at `start` with zero pose covariance and uniform weights.
FilterState initial_state(const FilterConfig& config, const Pose2D& start, std::uint64_t seed);

/// Independent random stream for (run seed, step, particle); the index
/// `particle_count` is reserved for the resampling draw.
std::mt19937_64 particle_stream(std::uint64_t seed, std::int64_t step, std::int64_t particle);

/// Log of the bivariate Gaussian density N(z; zhat, s) with wrapped bearing.
/// Throws NumericalError when s is not positive definite.
double log_importance_weight(const RangeBearing& z, const RangeBearing& zhat, const Eigen::Matrix2d& s);

inline double importance_weight(const RangeBearing& z, const RangeBearing& zhat, const Eigen::Matrix2d& s) {
  return std::exp(log_importance_weight(z, zhat, s));
}

/// 1 / sum(w^2) for normalized weights. Throws on an all-zero vector.
double effective_particles(std::span<const double> weights);

/// Normalizes weights from log-weights (log-sum-exp); returns N_eff.
double normalize_weights(std::vector<Particle>& particles);

/// Systematic resampling indices for normalized weights and a single draw
/// u0 in [0, 1).
std::vector<std::size_t> systematic_indices(std::span<const double> weights, double u0);

/// Resamples when N_eff < resample_fraction * M; otherwise returns the state
/// unchanged. Sets `resampled` and `n_eff` on the result.
FilterState resample(const FilterState& state, double resample_fraction, std::mt19937_64& rng);

/// Draws mean + L * n with L the lower Cholesky root of cov.
Eigen::Vector3d sample_pose(const PoseGaussian& pose, std::mt19937_64& rng);

/// Observations sorted by ascending landmark id; throws on duplicate ids.
std::vector<RangeBearing> canonical_order(std::span<const RangeBearing> observations);

/// Per-particle work of one step: mutates the particle and returns the
/// log-weight increment.
using ParticleUpdate = std::function<double(Particle&, std::size_t index, std::mt19937_64& rng)>;

/// Runs `update` over all particles (possibly across threads), then
/// normalizes and resamples. Errors are rethrown tagged with the particle index.
FilterState run_particle_step(const FilterConfig& config, const FilterState& state, const ParticleUpdate& update);

}  // namespace ufslam
