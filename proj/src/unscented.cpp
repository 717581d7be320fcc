#include "ufslam/unscented.hpp"

#include <string>

namespace ufslam {

UtWeights ut_weights(int n, const UtParams& p) {
  if (n < 1) throw std::invalid_argument("ut_weights: dimension must be >= 1");
  if (!(p.alpha > 0.0)) throw std::invalid_argument("ut_weights: alpha must be > 0");
  const double lambda = p.lambda(n);
  const double spread = n + lambda;
  if (!(spread > 0.0)) {
    throw std::invalid_argument("ut_weights: n + lambda = " + std::to_string(spread) + " is not positive");
  }
  UtWeights w;
  w.spread = spread;
  w.mean = Eigen::VectorXd::Constant(2 * n + 1, 1.0 / (2.0 * spread));
  w.cov = w.mean;
  w.mean(0) = lambda / spread;
  w.cov(0) = lambda / spread + (1.0 - p.alpha * p.alpha + p.beta);
  return w;
}

}  // namespace ufslam
