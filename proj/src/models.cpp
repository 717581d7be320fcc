#include "ufslam/models.hpp"

#include <cmath>

namespace ufslam {

Pose2D motion_mean(const Pose2D& pose, const ControlInput& u, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("motion_mean: dt must be positive");
  const double th = pose.theta;
  if (std::abs(u.w) < kStraightLineTurnRate) {
    return {pose.x + u.v * dt * std::cos(th), pose.y + u.v * dt * std::sin(th), th};
  }
  const double radius = u.v / u.w;
  const double th_next = th + u.w * dt;
  return {pose.x - radius * std::sin(th) + radius * std::sin(th_next),
          pose.y + radius * std::cos(th) - radius * std::cos(th_next), th_next};
}

Eigen::Matrix2d control_noise_cov(const ControlInput& u, const MotionNoiseParams& p) {
  const double sv = p.a1 * std::abs(u.v) + p.a2 * std::abs(u.w);
  const double sw = p.a3 * std::abs(u.v) + p.a4 * std::abs(u.w);
  return Eigen::Vector2d(sv * sv, sw * sw).asDiagonal();
}

ControlInput sample_control(const ControlInput& u, const MotionNoiseParams& p, std::mt19937_64& rng) {
  const Eigen::Matrix2d q = control_noise_cov(u, p);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double ev = normal(rng);
  const double ew = normal(rng);
  return {u.v + std::sqrt(q(0, 0)) * ev, u.w + std::sqrt(q(1, 1)) * ew};
}

Pose2D sample_motion(const Pose2D& pose, const ControlInput& u, double dt, const MotionNoiseParams& p,
                     std::mt19937_64& rng) {
  return motion_mean(pose, sample_control(u, p, rng), dt);
}

RangeBearing measure(const Pose2D& pose, LandmarkId id, const Eigen::Vector2d& landmark) {
  const double dx = landmark.x() - pose.x;
  const double dy = landmark.y() - pose.y;
  const double r = std::hypot(dx, dy);
  if (!(r > 1e-9)) throw GeometryError("measure: landmark coincides with robot position");
  return {id, r, wrap_angle(std::atan2(dy, dx) - pose.theta)};
}

Eigen::Vector2d inverse_measure(const Pose2D& pose, const RangeBearing& z) {
  if (!(z.r > 0.0)) throw GeometryError("inverse_measure: range must be positive");
  const double a = pose.theta + z.phi;
  return {pose.x + z.r * std::cos(a), pose.y + z.r * std::sin(a)};
}

MeasurementJacobians measurement_jacobians(const Pose2D& pose, const Eigen::Vector2d& landmark) {
  const double dx = landmark.x() - pose.x;
  const double dy = landmark.y() - pose.y;
  const double q = dx * dx + dy * dy;
  if (!(q > 1e-12)) throw GeometryError("measurement_jacobians: degenerate geometry");
  const double r = std::sqrt(q);
  MeasurementJacobians j;
  j.landmark << dx / r, dy / r,
               -dy / q, dx / q;
  j.pose.leftCols<2>() = -j.landmark;
  j.pose.col(2) = Eigen::Vector2d(0.0, -1.0);
  return j;
}

MotionJacobians motion_jacobians(const Pose2D& pose, const ControlInput& u, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("motion_jacobians: dt must be positive");
  const double th = pose.theta;
  const double v = u.v;
  const double w = u.w;
  MotionJacobians j;
  j.pose.setIdentity();
  if (std::abs(w) < kStraightLineTurnRate) {
    const double c = std::cos(th);
    const double s = std::sin(th);
    j.pose(0, 2) = -v * dt * s;
    j.pose(1, 2) = v * dt * c;
    // Straight-line limit of the curved-arc derivatives as w -> 0.
    j.control << dt * c, -0.5 * v * dt * dt * s,
                 dt * s, 0.5 * v * dt * dt * c,
                 0.0, dt;
    return j;
  }
  // Half-angle forms: (sin th1 - sin th0)/w = dt cos(mid) sinc(a) with
  // a = w dt / 2, which avoids the 1/w^2 cancellation near the threshold.
  const double a = 0.5 * w * dt;
  const double mid = th + a;
  const double cm = std::cos(mid), sm = std::sin(mid);
  const double sinc = std::sin(a) / a;
  const double dsinc = std::abs(a) < 1e-3 ? -a / 3.0 + a * a * a / 30.0
                                          : (a * std::cos(a) - std::sin(a)) / (a * a);
  j.pose(0, 2) = -v * dt * sm * sinc;
  j.pose(1, 2) = v * dt * cm * sinc;
  j.control(0, 0) = dt * cm * sinc;
  j.control(1, 0) = dt * sm * sinc;
  j.control(2, 0) = 0.0;
  j.control(0, 1) = 0.5 * v * dt * dt * (-sm * sinc + cm * dsinc);
  j.control(1, 1) = 0.5 * v * dt * dt * (cm * sinc + sm * dsinc);
  j.control(2, 1) = dt;
  return j;
}

InverseMeasurementJacobians inverse_measurement_jacobians(const Pose2D& pose, const RangeBearing& z) {
  const double a = pose.theta + z.phi;
  const double c = std::cos(a);
  const double s = std::sin(a);
  InverseMeasurementJacobians j;
  j.measurement << c, -z.r * s,
                   s, z.r * c;
  j.pose << 1.0, 0.0, -z.r * s,
            0.0, 1.0, z.r * c;
  return j;
}

}  // namespace ufslam
