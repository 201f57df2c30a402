#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "gpf/linalg.hpp"

namespace gpf {

// N(theta, Sigma): mean vector plus SPD covariance.
class GaussianMeasure {
 public:
  GaussianMeasure(Eigen::VectorXd mean, SpdMatrix cov);

  Eigen::Index dim() const { return mean_.size(); }
  const Eigen::VectorXd& mean() const { return mean_; }
  const SpdMatrix& cov() const { return cov_; }

 private:
  Eigen::VectorXd mean_;
  SpdMatrix cov_;
};

// x |-> A x + a with A nonsingular.
class AffineMap {
 public:
  AffineMap(Eigen::MatrixXd linear, Eigen::VectorXd shift);
  static AffineMap identity(Eigen::Index n);

  Eigen::Index dim() const { return shift_.size(); }
  const Eigen::MatrixXd& linear() const { return linear_; }
  const Eigen::VectorXd& shift() const { return shift_; }

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  AffineMap inverse() const;

 private:
  Eigen::MatrixXd linear_;
  Eigen::VectorXd shift_;
};

// outer(inner(x)).
AffineMap compose(const AffineMap& outer, const AffineMap& inner);

double log_density(const GaussianMeasure& g, const Eigen::VectorXd& x);

// count x n matrix of i.i.d. draws via x = theta + Sigma^{1/2} z with the
// seed-deterministic NormalStream; the symmetric square root keeps samples
// covariant under orthogonal conjugation.
Eigen::MatrixXd sample(const GaussianMeasure& g, Eigen::Index count,
                       std::uint64_t seed);

// N(theta, Sigma) pushed through x |-> Ax + a is N(A theta + a, A Sigma A').
GaussianMeasure affine_pushforward(const GaussianMeasure& g, const AffineMap& m);

// The affine map x |-> Sigma^{-1/2}(x - theta) taking g to N(0, I).
AffineMap whitening_map(const GaussianMeasure& g);

// Row-wise application to a points-in-rows matrix.
Eigen::MatrixXd apply_rows(const AffineMap& m, const Eigen::MatrixXd& pts);

}  // namespace gpf
