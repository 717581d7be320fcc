#include "ufslam/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ufslam::sim {

namespace {

constexpr double kDeg = kPi / 180.0;

// Deterministic jitter in [-1, 1) from the raw mt19937 sequence, which the
// standard fixes bit-for-bit (unlike the distribution adaptors).
class LayoutJitter {
 public:
  explicit LayoutJitter(std::uint32_t seed) : engine_(seed) {}
  double next() { return static_cast<double>(engine_()) / 2147483648.0 - 1.0; }

 private:
  std::mt19937 engine_;
};

double polyline_length(const std::vector<Eigen::Vector2d>& pts) {
  double total = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) total += (pts[i] - pts[i - 1]).norm();
  return total;
}

Pose2D facing(const Eigen::Vector2d& from, const Eigen::Vector2d& to) {
  const Eigen::Vector2d d = to - from;
  return {from.x(), from.y(), std::atan2(d.y(), d.x())};
}

Scenario make_sim100() {
  Scenario s;
  s.name = "sim100";
  // Irregular closed loop scaled to a 156 m course.
  std::vector<Eigen::Vector2d> loop{{-25.0, -25.0}, {25.0, -25.0}, {25.0, 5.0},
                                    {0.0, 25.0},    {-25.0, 15.0}, {-25.0, -25.0}};
  const double scale = 156.0 / polyline_length(loop);
  for (auto& p : loop) p *= scale;
  s.initial_pose = facing(loop[0], loop[1]);
  s.waypoints.assign(loop.begin() + 1, loop.end());

  // Sparse 4x4 grid, jittered by up to 5 m, inside the 100 m x 100 m area:
  // 30 m apart, so only a handful are in range at once.
  LayoutJitter jitter(156);
  std::int32_t id = 0;
  for (int row = 0; row < 4; ++row) {
    for (int col = 0; col < 4; ++col) {
      const double x = -45.0 + 30.0 * col + 5.0 * jitter.next();
      const double y = -45.0 + 30.0 * row + 5.0 * jitter.next();
      s.landmarks.push_back({LandmarkId{id++}, {x, y}});
    }
  }
  s.dt = 0.1;
  s.speed = 1.0;
  s.turn_gain = 1.0;
  s.motion_noise = constant_motion_noise(0.02, 0.2 * kDeg, s.speed);
  s.sensor_noise = {0.3, 3.0 * kDeg};
  s.max_range = 30.0;
  s.fov = 2.0 * kPi;
  s.seed = 0;
  return s;
}

Scenario make_circle2m() {
  Scenario s;
  s.name = "circle2m";
  s.dt = 2.0;
  s.speed = kPi / 36.0;
  s.turn_gain = 0.35;
  // Two laps of a 1 m ring (speed / turn rate = 1 m), 12 waypoints per lap.
  constexpr int kPerLap = 12;
  constexpr int kLaps = 2;
  for (int k = 1; k <= kPerLap * kLaps; ++k) {
    const double a = 2.0 * kPi * k / kPerLap;
    s.waypoints.emplace_back(std::cos(a), std::sin(a));
  }
  s.initial_pose = {1.0, 0.0, kPi / 2.0};
  // Eighteen coloured balls: twelve outside the ring, six inside it at a
  // radius the forward-looking camera can still see.
  std::int32_t id = 0;
  for (int k = 0; k < 12; ++k) {
    const double a = 2.0 * kPi * (k + 0.5) / 12.0;
    s.landmarks.push_back({LandmarkId{id++}, {1.5 * std::cos(a), 1.5 * std::sin(a)}});
  }
  for (int k = 0; k < 6; ++k) {
    const double a = 2.0 * kPi * k / 6.0;
    s.landmarks.push_back({LandmarkId{id++}, {0.75 * std::cos(a), 0.75 * std::sin(a)}});
  }
  s.motion_noise = constant_motion_noise(0.005, 0.5 * kDeg, s.speed);
  s.sensor_noise = {0.05, 2.0 * kDeg};
  s.max_range = 3.0;
  s.fov = kPi / 2.0;
  s.seed = 0;
  return s;
}

Scenario make_corridor() {
  Scenario s;
  s.name = "corridor";
  s.dt = 2.0;
  s.speed = 0.25;
  s.turn_gain = 0.4;
  // Loop along the centre line of a 2 m wide corridor ring; the outer walls
  // span 26.7 m x 48 m.
  constexpr double kWidth = 26.7;
  constexpr double kHeight = 48.0;
  const std::vector<Eigen::Vector2d> centre{{1.0, 1.0}, {kWidth - 1.0, 1.0}, {kWidth - 1.0, kHeight - 1.0},
                                            {1.0, kHeight - 1.0}, {1.0, 1.0}};
  s.initial_pose = facing(centre[0], centre[1]);
  s.waypoints.assign(centre.begin() + 1, centre.end());

  std::int32_t id = 0;
  auto wall = [&](double x0, double y0, double x1, double y1) {
    const std::vector<Eigen::Vector2d> corners{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}, {x0, y0}};
    for (std::size_t c = 0; c + 1 < corners.size(); ++c) {
      const Eigen::Vector2d a = corners[c];
      const Eigen::Vector2d b = corners[c + 1];
      const int n = static_cast<int>(std::floor((b - a).norm() / 2.0));
      for (int k = 0; k < n; ++k) {
        s.landmarks.push_back({LandmarkId{id++}, a + (b - a) * (static_cast<double>(k) / n)});
      }
    }
  };
  wall(0.0, 0.0, kWidth, kHeight);
  wall(2.0, 2.0, kWidth - 2.0, kHeight - 2.0);

  s.motion_noise = constant_motion_noise(0.01, 0.5 * kDeg, s.speed);
  s.sensor_noise = {0.05, 2.0 * kDeg};
  s.max_range = 3.0;
  s.fov = kPi / 2.0;
  s.seed = 0;
  return s;
}

}  // namespace

void Scenario::validate() const {
  if (landmarks.empty()) throw std::invalid_argument("landmarks: scenario needs at least one landmark");
  if (waypoints.empty()) throw std::invalid_argument("waypoints: scenario needs at least one waypoint");
  if (!(dt > 0.0)) throw std::invalid_argument("sim.dt: must be > 0");
  if (!(max_range > 0.0)) throw std::invalid_argument("sensor.max_range: must be > 0");
  if (!(fov > 0.0)) throw std::invalid_argument("sensor.fov: must be > 0");
  if (!(speed > 0.0)) throw std::invalid_argument("sim.speed: must be > 0");
  if (!(turn_gain > 0.0)) throw std::invalid_argument("sim.turn_gain: must be > 0");
  if (!(sensor_noise.sigma_r >= 0.0) || !(sensor_noise.sigma_phi >= 0.0)) {
    throw std::invalid_argument("sensor.sigma_r: sensor noise must be >= 0");
  }
  for (std::size_t i = 1; i < landmarks.size(); ++i) {
    if (!(landmarks[i - 1].id < landmarks[i].id)) {
      throw std::invalid_argument("landmarks: ids must be unique and ascending");
    }
  }
}

double SimLog::path_length() const {
  double total = 0.0;
  for (const auto& s : steps) total += std::abs(s.applied.v) * dt;
  return total;
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"sim100", "circle2m", "corridor"};
  return names;
}

Scenario preset(std::string_view name) {
  if (name == "sim100") return make_sim100();
  if (name == "circle2m") return make_circle2m();
  if (name == "corridor") return make_corridor();
  throw std::invalid_argument("scenario: unknown preset '" + std::string(name) + "'");
}

MotionNoiseParams constant_motion_noise(double sigma_v, double sigma_w, double nominal_speed) {
  if (!(nominal_speed > 0.0)) throw std::invalid_argument("nominal speed must be positive");
  return {sigma_v / nominal_speed, 0.0, sigma_w / nominal_speed, 0.0};
}

ControlInput steer(const Pose2D& pose, const Eigen::Vector2d& waypoint, const Scenario& scenario) {
  const double bearing = std::atan2(waypoint.y() - pose.y, waypoint.x() - pose.x);
  const double w = scenario.turn_gain * wrap_angle(bearing - pose.theta);
  return {scenario.speed, std::clamp(w, -scenario.max_turn_rate, scenario.max_turn_rate)};
}

std::vector<RangeBearing> sense(const Pose2D& true_pose, const Scenario& scenario, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<RangeBearing> out;
  for (const LandmarkTruth& lm : scenario.landmarks) {
    const double dx = lm.position.x() - true_pose.x;
    const double dy = lm.position.y() - true_pose.y;
    if (std::hypot(dx, dy) <= 1e-9) continue;
    const RangeBearing exact = measure(true_pose, lm);
    if (exact.r > scenario.max_range || std::abs(exact.phi) > 0.5 * scenario.fov) continue;
    const double er = normal(rng);
    const double ep = normal(rng);
    RangeBearing z = exact;
    z.r = std::max(exact.r + scenario.sensor_noise.sigma_r * er, 1e-6);
    z.phi = wrap_angle(exact.phi + scenario.sensor_noise.sigma_phi * ep);
    out.push_back(z);
  }
  std::sort(out.begin(), out.end(),
            [](const RangeBearing& a, const RangeBearing& b) { return a.landmark_id < b.landmark_id; });
  return out;
}

SimLog drive(const Scenario& scenario, std::mt19937_64& rng) {
  scenario.validate();
  SimLog log;
  log.initial_pose = scenario.initial_pose;
  log.dt = scenario.dt;

  const double stride = scenario.speed * scenario.dt;
  auto budget_for = [&](const Pose2D& pose, const Eigen::Vector2d& wp) {
    const double expected = std::ceil((wp - pose.position()).norm() / stride);
    return static_cast<std::size_t>(10.0 * std::max(expected, 1.0));
  };

  Pose2D pose = scenario.initial_pose;
  std::size_t target = 0;
  std::size_t spent = 0;
  std::size_t budget = budget_for(pose, scenario.waypoints[0]);
  while (target < scenario.waypoints.size()) {
    const Eigen::Vector2d& wp = scenario.waypoints[target];
    if ((wp - pose.position()).norm() < scenario.waypoint_radius) {
      ++target;
      spent = 0;
      if (target < scenario.waypoints.size()) budget = budget_for(pose, scenario.waypoints[target]);
      continue;
    }
    if (++spent > budget) {
      throw std::runtime_error("drive: waypoint " + std::to_string(target) + " at (" + std::to_string(wp.x()) +
                               ", " + std::to_string(wp.y()) + ") not reached after " + std::to_string(budget) +
                               " steps");
    }
    SimStep step;
    step.issued = steer(pose, wp, scenario);
    step.applied = sample_control(step.issued, scenario.motion_noise, rng);
    pose = motion_mean(pose, step.applied, scenario.dt);
    step.true_pose = pose;
    step.observations = sense(pose, scenario, rng);
    log.steps.push_back(std::move(step));
  }
  return log;
}

}  // namespace ufslam::sim
