#pragma once

// One (scenario, algorithm, seed) run: simulate, filter, score.

#include "ufslam/metrics.hpp"
#include "ufslam/simulator.hpp"

#include <cstdint>
#include <string_view>
#include <vector>

namespace ufslam::cli {

enum class Algorithm { ufastslam, fastslam2 };

std::string_view to_string(Algorithm algo);
/// Throws std::invalid_argument mentioning "algo".
Algorithm algorithm_from_string(std::string_view name);

struct RunSpec {
  sim::Scenario scenario;  // truth; scenario.seed drives the simulation
  FilterConfig filter;     // assumed noise lives here
  Algorithm algorithm{Algorithm::ufastslam};
  std::uint64_t filter_seed{0};
  bool inject_noise{true};  // false: noise-free truth and sensing
};

/// Scenario preset plus a filter whose assumed noise matches the truth.
RunSpec default_spec(std::string_view scenario, Algorithm algo, int particles, std::uint64_t seed);

struct RunRecord {
  sim::SimLog log;
  std::vector<metrics::StepEstimate> estimates;
  std::vector<Pose2D> dead_reckoning;  // issued controls integrated without correction
  metrics::EstimatedState final_estimate;
  metrics::RunStats stats;
};

RunRecord execute(const RunSpec& spec);

/// Filter one step with the chosen algorithm.
FilterState filter_step(Algorithm algo, const FilterConfig& config, const FilterState& state, const ControlInput& u,
                        double dt, std::span<const RangeBearing> observations);

}  // namespace ufslam::cli
