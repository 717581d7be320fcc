#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace ufslam {

/// Raised when a covariance cannot be repaired or factored, or an innovation
/// covariance is singular.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised for singular measurement geometry (landmark on top of the robot,
/// non-positive range).
class GeometryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr double kPi = 3.14159265358979323846;

/// Maps any finite angle into (-pi, pi].
double wrap_angle(double a);

/// Landmark identity (the colour of a ball in the camera experiments).
struct LandmarkId {
  std::int32_t value{0};
  auto operator<=>(const LandmarkId&) const = default;
};

struct Pose2D {
  double x{0.0};
  double y{0.0};
  double theta{0.0};

  Pose2D() = default;
  Pose2D(double x_, double y_, double theta_) : x(x_), y(y_), theta(wrap_angle(theta_)) {}

  static Pose2D from_vector(const Eigen::Vector3d& v) { return {v.x(), v.y(), v.z()}; }
  Eigen::Vector3d vector() const { return {x, y, theta}; }
  Eigen::Vector2d position() const { return {x, y}; }
};

struct ControlInput {
  double v{0.0};  // m/s
  double w{0.0};  // rad/s
};

struct RangeBearing {
  LandmarkId landmark_id{};
  double r{0.0};
  double phi{0.0};

  Eigen::Vector2d vector() const { return {r, phi}; }
};

struct LandmarkTruth {
  LandmarkId id{};
  Eigen::Vector2d position{Eigen::Vector2d::Zero()};
};

/// Gaussian belief of fixed (or dynamic) dimension.
template <int Dim>
struct Gaussian {
  using Vector = Eigen::Matrix<double, Dim, 1>;
  using Matrix = Eigen::Matrix<double, Dim, Dim>;

  Vector mean;
  Matrix cov;
};

using PoseGaussian = Gaussian<3>;

/// Returns (m + m^T)/2 with tiny negative eigenvalues (>= -1e-9 * trace)
/// clamped to zero. Throws NumericalError for genuinely indefinite input.
template <int Dim>
Eigen::Matrix<double, Dim, Dim> symmetrize_psd(const Eigen::Matrix<double, Dim, Dim>& m) {
  using Matrix = Eigen::Matrix<double, Dim, Dim>;
  if (m.rows() != m.cols()) throw std::invalid_argument("symmetrize_psd: matrix is not square");
  if (!m.allFinite()) throw NumericalError("symmetrize_psd: non-finite matrix");
  Matrix sym = 0.5 * (m + m.transpose());
  if (sym.rows() == 0) return sym;

  const double scale = sym.diagonal().cwiseAbs().sum();
  if (scale == 0.0 && sym.isZero(0.0)) return sym;
  if ((sym.diagonal().array() > 0.0).all()) {
    Eigen::LLT<Matrix> llt(sym);
    if (llt.info() == Eigen::Success) return sym;
  }

  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
  if (eig.info() != Eigen::Success) throw NumericalError("symmetrize_psd: eigen-decomposition failed");
  const double tol = 1e-9 * std::max(sym.trace(), scale);
  auto values = eig.eigenvalues().eval();
  if (values.minCoeff() < -tol) {
    throw NumericalError("symmetrize_psd: matrix is indefinite (min eigenvalue " +
                         std::to_string(values.minCoeff()) + ")");
  }
  if (values.minCoeff() >= 0.0) return sym;
  values = values.cwiseMax(0.0);
  Matrix repaired = eig.eigenvectors() * values.asDiagonal() * eig.eigenvectors().transpose();
  return 0.5 * (repaired + repaired.transpose());
}

inline Eigen::MatrixXd symmetrize_psd(const Eigen::MatrixXd& m) {
  return symmetrize_psd<Eigen::Dynamic>(m);
}

/// Checks the covariance invariant: symmetric within 1e-9 relative and no
/// eigenvalue below -1e-9 * trace.
bool is_valid_covariance(const Eigen::MatrixXd& m);

}  // namespace ufslam
