#pragma once

// Shared harness for the linear-limit comparison: both filters consume the
// same simulated log with all noise scales multiplied by `scale`.

#include "ufslam/fastslam2.hpp"
#include "ufslam/metrics.hpp"
#include "ufslam/simulator.hpp"
#include "ufslam/ufastslam.hpp"

#include <algorithm>

namespace ufslam::test {

inline double linear_limit_discrepancy(double scale, int steps = 50, int particles = 10,
                                       const std::string& scenario = "sim100") {
  sim::Scenario world = sim::preset(scenario);
  world.seed = 5;
  world.motion_noise = {scale * world.motion_noise.a1, scale * world.motion_noise.a2,
                        scale * world.motion_noise.a3, scale * world.motion_noise.a4};
  world.sensor_noise = {scale * world.sensor_noise.sigma_r, scale * world.sensor_noise.sigma_phi};
  const sim::SimLog log = sim::drive(world);

  FilterConfig c;
  c.particle_count = particles;
  c.motion = world.motion_noise;
  c.sensor = world.sensor_noise;
  FilterState uf = initial_state(c, world.initial_pose, 17);
  FilterState fs = uf;
  FilterConfig jc = c;
  jc.weight_form = WeightForm::jacobian;
  double total = 0.0;
  const int n = std::min<int>(steps, static_cast<int>(log.steps.size()));
  for (int k = 0; k < n; ++k) {
    const sim::SimStep& st = log.steps[static_cast<std::size_t>(k)];
    uf = ufastslam::step(c, uf, st.issued, log.dt, st.observations);
    fs = fastslam2::step(jc, fs, st.issued, log.dt, st.observations);
    total += metrics::pose_error(metrics::estimated_pose(uf), metrics::estimated_pose(fs)).position;
  }
  return total / n;
}

}  // namespace ufslam::test
