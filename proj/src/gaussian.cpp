#include "gpf/gaussian.hpp"

#include <Eigen/LU>
#include <cmath>

#include "gpf/rng.hpp"

namespace gpf {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;  // log(2*pi)
}

GaussianMeasure::GaussianMeasure(Eigen::VectorXd mean, SpdMatrix cov)
    : mean_(std::move(mean)), cov_(std::move(cov)) {
  if (mean_.size() != cov_.dim())
    throw DimensionError("GaussianMeasure: mean has dimension " +
                         std::to_string(mean_.size()) + ", covariance " +
                         std::to_string(cov_.dim()));
}

AffineMap::AffineMap(Eigen::MatrixXd linear, Eigen::VectorXd shift)
    : linear_(std::move(linear)), shift_(std::move(shift)) {
  if (linear_.rows() != linear_.cols() || linear_.rows() != shift_.size())
    throw DimensionError("AffineMap: incompatible linear/shift dimensions");
  Eigen::FullPivLU<Eigen::MatrixXd> lu(linear_);
  if (!lu.isInvertible())
    throw SingularMatrixError("AffineMap: linear part is singular");
}

AffineMap AffineMap::identity(Eigen::Index n) {
  return AffineMap(Eigen::MatrixXd::Identity(n, n), Eigen::VectorXd::Zero(n));
}

Eigen::VectorXd AffineMap::apply(const Eigen::VectorXd& x) const {
  if (x.size() != dim()) throw DimensionError("AffineMap::apply dimension mismatch");
  return linear_ * x + shift_;
}

AffineMap AffineMap::inverse() const {
  const Eigen::MatrixXd inv = linear_.inverse();
  return AffineMap(inv, -inv * shift_);
}

AffineMap compose(const AffineMap& outer, const AffineMap& inner) {
  if (outer.dim() != inner.dim())
    throw DimensionError("compose: dimension mismatch");
  return AffineMap(outer.linear() * inner.linear(),
                   outer.linear() * inner.shift() + outer.shift());
}

double log_density(const GaussianMeasure& g, const Eigen::VectorXd& x) {
  if (x.size() != g.dim())
    throw DimensionError("log_density: point has dimension " +
                         std::to_string(x.size()) + ", measure " +
                         std::to_string(g.dim()));
  const double n = static_cast<double>(g.dim());
  return -0.5 * n * kLog2Pi - 0.5 * g.cov().log_det() -
         0.5 * g.cov().inverse_quadratic(x - g.mean());
}

Eigen::MatrixXd sample(const GaussianMeasure& g, Eigen::Index count,
                       std::uint64_t seed) {
  if (count < 1) throw InvalidArgumentError("sample: count must be >= 1");
  NormalStream stream(seed);
  Eigen::MatrixXd z = stream.matrix(count, g.dim());
  // Row form of x = theta + Sigma^{1/2} z; the square root is symmetric.
  Eigen::MatrixXd x = z * g.cov().sqrt();
  x.rowwise() += g.mean().transpose();
  return x;
}

GaussianMeasure affine_pushforward(const GaussianMeasure& g, const AffineMap& m) {
  if (g.dim() != m.dim())
    throw DimensionError("affine_pushforward: dimension mismatch");
  return GaussianMeasure(
      m.linear() * g.mean() + m.shift(),
      SpdMatrix(m.linear() * g.cov().matrix() * m.linear().transpose()));
}

AffineMap whitening_map(const GaussianMeasure& g) {
  const Eigen::MatrixXd w = g.cov().inverse_sqrt();
  return AffineMap(w, -w * g.mean());
}

Eigen::MatrixXd apply_rows(const AffineMap& m, const Eigen::MatrixXd& pts) {
  if (pts.cols() != m.dim())
    throw DimensionError("apply_rows: points have " + std::to_string(pts.cols()) +
                         " columns, map expects " + std::to_string(m.dim()));
  Eigen::MatrixXd out = pts * m.linear().transpose();
  out.rowwise() += m.shift().transpose();
  return out;
}

}  // namespace gpf
