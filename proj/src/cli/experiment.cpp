#include "ufslam/cli/experiment.hpp"

#include "ufslam/fastslam2.hpp"
#include "ufslam/ufastslam.hpp"

#include <string>

namespace ufslam::cli {

std::string_view to_string(Algorithm algo) {
  return algo == Algorithm::ufastslam ? "ufastslam" : "fastslam2";
}

Algorithm algorithm_from_string(std::string_view name) {
  if (name == "ufastslam") return Algorithm::ufastslam;
  if (name == "fastslam2") return Algorithm::fastslam2;
  throw std::invalid_argument("algo: unknown algorithm '" + std::string(name) + "'");
}

RunSpec default_spec(std::string_view scenario, Algorithm algo, int particles, std::uint64_t seed) {
  RunSpec spec;
  spec.scenario = sim::preset(scenario);
  spec.scenario.seed = seed;
  spec.algorithm = algo;
  spec.filter.particle_count = particles;
  spec.filter.motion = spec.scenario.motion_noise;
  spec.filter.sensor = spec.scenario.sensor_noise;
  spec.filter_seed = seed;
  return spec;
}

FilterState filter_step(Algorithm algo, const FilterConfig& config, const FilterState& state, const ControlInput& u,
                        double dt, std::span<const RangeBearing> observations) {
  return algo == Algorithm::ufastslam ? ufastslam::step(config, state, u, dt, observations)
                                      : fastslam2::step(config, state, u, dt, observations);
}

RunRecord execute(const RunSpec& spec) {
  sim::Scenario truth = spec.scenario;
  if (!spec.inject_noise) {
    truth.motion_noise = {};
    truth.sensor_noise = {0.0, 0.0};
  }
  RunRecord record;
  record.log = sim::drive(truth);

  FilterState state = initial_state(spec.filter, truth.initial_pose, spec.filter_seed);
  Pose2D dead = truth.initial_pose;
  record.estimates.reserve(record.log.steps.size());
  record.dead_reckoning.reserve(record.log.steps.size());
  for (const sim::SimStep& s : record.log.steps) {
    state = filter_step(spec.algorithm, spec.filter, state, s.issued, truth.dt, s.observations);
    record.estimates.push_back(
        {metrics::estimated_pose(state), state.n_eff, state.resampled, metrics::landmark_count(state)});
    dead = motion_mean(dead, s.issued, truth.dt);
    record.dead_reckoning.push_back(dead);
  }
  record.final_estimate = metrics::estimated_state(state);
  record.stats = metrics::run_summary(record.log, record.estimates, truth.landmarks, record.final_estimate.landmarks);
  return record;
}

}  // namespace ufslam::cli
