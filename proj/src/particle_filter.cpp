#include "ufslam/particle_filter.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <string>
#include <thread>

namespace ufslam {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace

std::string_view to_string(WeightForm form) {
  switch (form) {
    case WeightForm::unscented:
      return "unscented";
    case WeightForm::jacobian:
      return "jacobian";
  }
  return "unknown";
}

WeightForm weight_form_from_string(std::string_view name) {
  if (name == "unscented") return WeightForm::unscented;
  if (name == "jacobian") return WeightForm::jacobian;
  throw std::invalid_argument("unknown weight form '" + std::string(name) + "'");
}

std::string_view to_string(PoseCovariance mode) {
  return mode == PoseCovariance::retain ? "retain" : "reset";
}

PoseCovariance pose_covariance_from_string(std::string_view name) {
  if (name == "retain") return PoseCovariance::retain;
  if (name == "reset") return PoseCovariance::reset;
  throw std::invalid_argument("unknown pose covariance mode '" + std::string(name) + "'");
}

void FilterConfig::validate() const {
  if (particle_count < 1) throw std::invalid_argument("particles: must be >= 1");
  if (!(resample_fraction > 0.0 && resample_fraction <= 1.0)) {
    throw std::invalid_argument("filter.resample_fraction: must lie in (0, 1]");
  }
  if (!(ut.alpha > 0.0)) throw std::invalid_argument("ut.alpha: must be > 0");
  if (!(ut.kappa >= 0.0)) throw std::invalid_argument("ut.kappa: must be >= 0");
  if (!(motion.a1 >= 0.0 && motion.a2 >= 0.0 && motion.a3 >= 0.0 && motion.a4 >= 0.0)) {
    throw std::invalid_argument("motion.a1..a4: must be >= 0");
  }
  if (!(sensor.sigma_r > 0.0)) throw std::invalid_argument("sensor.sigma_r: must be > 0");
  if (!(sensor.sigma_phi > 0.0)) throw std::invalid_argument("sensor.sigma_phi: must be > 0");
  if (threads < 1) throw std::invalid_argument("threads: must be >= 1");
  for (int n : {2, 7}) {
    if (!(n + ut.lambda(n) > 0.0)) throw std::invalid_argument("ut.alpha/ut.kappa: n + lambda must be positive");
  }
}

FilterState initial_state(const FilterConfig& config, const Pose2D& start, std::uint64_t seed) {
  config.validate();
  FilterState state;
  state.seed = seed;
  const double m = static_cast<double>(config.particle_count);
  Particle p;
  p.pose.mean = start.vector();
  p.weight = 1.0 / m;
  p.log_weight = -std::log(m);
  state.particles.assign(static_cast<std::size_t>(config.particle_count), p);
  state.n_eff = m;
  return state;
}

std::mt19937_64 particle_stream(std::uint64_t seed, std::int64_t step, std::int64_t particle) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(step));
  h = splitmix64(h ^ (static_cast<std::uint64_t>(particle) * 0xD1B54A32D192ED03ull));
  return std::mt19937_64(h);
}

double log_importance_weight(const RangeBearing& z, const RangeBearing& zhat, const Eigen::Matrix2d& s) {
  const Eigen::Vector2d nu(z.r - zhat.r, wrap_angle(z.phi - zhat.phi));
  Eigen::LLT<Eigen::Matrix2d> llt(0.5 * (s + s.transpose()));
  if (llt.info() != Eigen::Success || !s.allFinite()) {
    throw NumericalError("importance weight: innovation covariance not positive definite");
  }
  const Eigen::Matrix2d l = llt.matrixL();
  const double log_det = 2.0 * (std::log(l(0, 0)) + std::log(l(1, 1)));
  const Eigen::Vector2d white = llt.matrixL().solve(nu);
  return -0.5 * white.squaredNorm() - 0.5 * log_det - std::log(2.0 * kPi);
}

double effective_particles(std::span<const double> weights) {
  double sum_sq = 0.0;
  for (double w : weights) sum_sq += w * w;
  if (!(sum_sq > 0.0)) throw std::invalid_argument("effective_particles: all weights are zero");
  return 1.0 / sum_sq;
}

double normalize_weights(std::vector<Particle>& particles) {
  double max_log = -std::numeric_limits<double>::infinity();
  for (const auto& p : particles) max_log = std::max(max_log, p.log_weight);
  if (!std::isfinite(max_log)) throw NumericalError("normalize_weights: no particle has a finite weight");
  double total = 0.0;
  for (const auto& p : particles) total += std::exp(p.log_weight - max_log);
  const double log_total = max_log + std::log(total);
  double sum_sq = 0.0;
  for (auto& p : particles) {
    p.log_weight -= log_total;
    p.weight = std::exp(p.log_weight);
    sum_sq += p.weight * p.weight;
  }
  return 1.0 / sum_sq;
}

std::vector<std::size_t> systematic_indices(std::span<const double> weights, double u0) {
  const std::size_t m = weights.size();
  std::vector<std::size_t> out;
  out.reserve(m);
  if (m == 0) return out;
  const double step = 1.0 / static_cast<double>(m);
  double cumulative = weights[0];
  std::size_t j = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double pointer = (u0 + static_cast<double>(i)) * step;
    while (pointer >= cumulative && j + 1 < m) {
      ++j;
      cumulative += weights[j];
    }
    out.push_back(j);
  }
  return out;
}

FilterState resample(const FilterState& state, double resample_fraction, std::mt19937_64& rng) {
  std::vector<double> weights;
  weights.reserve(state.particles.size());
  for (const auto& p : state.particles) weights.push_back(p.weight);
  const double m = static_cast<double>(weights.size());
  const double n_eff = effective_particles(weights);

  if (!(n_eff < resample_fraction * m)) {
    FilterState same = state;
    same.n_eff = n_eff;
    same.resampled = false;
    return same;
  }

  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const auto indices = systematic_indices(weights, uniform(rng));
  FilterState out;
  out.step_index = state.step_index;
  out.seed = state.seed;
  out.particles.reserve(indices.size());
  for (std::size_t idx : indices) {
    Particle copy = state.particles[idx];
    copy.weight = 1.0 / m;
    copy.log_weight = -std::log(m);
    out.particles.push_back(std::move(copy));
  }
  out.n_eff = n_eff;
  out.resampled = true;
  return out;
}

Eigen::Vector3d sample_pose(const PoseGaussian& pose, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::Vector3d n;
  for (int i = 0; i < 3; ++i) n(i) = normal(rng);
  const Eigen::Matrix3d root = cholesky_root<3>(pose.cov);
  Eigen::Vector3d x = pose.mean + root * n;
  x(2) = wrap_angle(x(2));
  return x;
}

std::vector<RangeBearing> canonical_order(std::span<const RangeBearing> observations) {
  std::vector<RangeBearing> sorted(observations.begin(), observations.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const RangeBearing& a, const RangeBearing& b) { return a.landmark_id < b.landmark_id; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].landmark_id == sorted[i - 1].landmark_id) {
      throw std::invalid_argument("observations: duplicate landmark id " +
                                  std::to_string(sorted[i].landmark_id.value));
    }
  }
  return sorted;
}

FilterState run_particle_step(const FilterConfig& config, const FilterState& state, const ParticleUpdate& update) {
  FilterState next = state;
  next.step_index = state.step_index + 1;
  const std::size_t m = next.particles.size();
  std::vector<std::exception_ptr> errors(m);

  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      try {
        auto rng = particle_stream(state.seed, next.step_index, static_cast<std::int64_t>(k));
        next.particles[k].log_weight += update(next.particles[k], k, rng);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };

  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(config.threads), m);
  if (workers <= 1) {
    work(0, m);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (m + workers - 1) / workers;
    for (std::size_t begin = 0; begin < m; begin += chunk) {
      pool.emplace_back(work, begin, std::min(m, begin + chunk));
    }
  }

  for (std::size_t k = 0; k < m; ++k) {
    if (!errors[k]) continue;
    try {
      std::rethrow_exception(errors[k]);
    } catch (const NumericalError& e) {
      throw NumericalError("particle " + std::to_string(k) + ": " + e.what());
    } catch (const GeometryError& e) {
      throw GeometryError("particle " + std::to_string(k) + ": " + e.what());
    }
  }

  next.n_eff = normalize_weights(next.particles);
  auto rng = particle_stream(state.seed, next.step_index, static_cast<std::int64_t>(m));
  return resample(next, config.resample_fraction, rng);
}

}  // namespace ufslam
