#pragma once

#include <Eigen/Dense>

#include "gpf/linalg.hpp"
#include "gpf/partition.hpp"
#include "gpf/rng.hpp"

namespace gpf {

// Haar-like random orthogonal matrix: QR of a Gaussian matrix with the
// R diagonal signs folded into Q.
OrthogonalMatrix random_orthogonal(Eigen::Index n, NormalStream& stream);

// Random SPD matrix with eigenvalues uniform in [lambda_min, lambda_max].
SpdMatrix random_spd(Eigen::Index n, NormalStream& stream, double lambda_min,
                     double lambda_max);

Eigen::VectorXd random_unit(Eigen::Index n, NormalStream& stream);

// Random nonsingular matrix with singular values in [sigma_min, sigma_max].
Eigen::MatrixXd random_nonsingular(Eigen::Index n, NormalStream& stream,
                                   double sigma_min, double sigma_max);

// Random product partition: each coordinate independently is left trivial or
// split at one or two finite cut points.
SymmetricProductPartition random_partition(Eigen::Index n, NormalStream& stream);

}  // namespace gpf
