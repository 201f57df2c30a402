#include "gpf/random.hpp"

#include <Eigen/QR>

namespace gpf {

OrthogonalMatrix random_orthogonal(Eigen::Index n, NormalStream& stream) {
  const Eigen::MatrixXd g = stream.matrix(n, n);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < n; ++j)
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  return OrthogonalMatrix(q);
}

SpdMatrix random_spd(Eigen::Index n, NormalStream& stream, double lambda_min,
                     double lambda_max) {
  const OrthogonalMatrix q = random_orthogonal(n, stream);
  Eigen::VectorXd lambda(n);
  for (Eigen::Index i = 0; i < n; ++i)
    lambda(i) = lambda_min + (lambda_max - lambda_min) * stream.uniform();
  return SpdMatrix(q.matrix() * lambda.asDiagonal() * q.matrix().transpose());
}

Eigen::VectorXd random_unit(Eigen::Index n, NormalStream& stream) {
  Eigen::VectorXd v = stream.vector(n);
  while (v.norm() < 1e-8) v = stream.vector(n);
  return v / v.norm();
}

Eigen::MatrixXd random_nonsingular(Eigen::Index n, NormalStream& stream,
                                   double sigma_min, double sigma_max) {
  const OrthogonalMatrix q1 = random_orthogonal(n, stream);
  const OrthogonalMatrix q2 = random_orthogonal(n, stream);
  Eigen::VectorXd sv(n);
  for (Eigen::Index i = 0; i < n; ++i)
    sv(i) = sigma_min + (sigma_max - sigma_min) * stream.uniform();
  return q1.matrix() * sv.asDiagonal() * q2.matrix().transpose();
}

SymmetricProductPartition random_partition(Eigen::Index n, NormalStream& stream) {
  std::vector<std::vector<Interval>> plus(static_cast<size_t>(n));
  bool any_split = false;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double pick = stream.uniform();
    if (pick < 0.3) {
      plus[static_cast<size_t>(j)] = {{0.0, interval_infinity()}};
    } else if (pick < 0.7) {
      const double c = 0.3 + 1.5 * stream.uniform();
      plus[static_cast<size_t>(j)] = {{0.0, c}};
      any_split = true;
    } else {
      const double a = 0.2 + 0.6 * stream.uniform();
      const double b = a + 0.2 + 0.8 * stream.uniform();
      const double c = b + 0.2 + 0.8 * stream.uniform();
      plus[static_cast<size_t>(j)] = {{a, b}, {c, interval_infinity()}};
      any_split = true;
    }
  }
  if (!any_split) {
    // Force at least one genuine split so the transform is not plain V*U.
    const double c = 0.3 + 1.5 * stream.uniform();
    plus[0] = {{0.0, c}};
  }
  return SymmetricProductPartition(std::move(plus));
}

}  // namespace gpf
