#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "gpf/errors.hpp"

namespace gpf {

// Symmetric positive definite matrix. Construction validates symmetry
// (max |M_ij - M_ji| <= 1e-12 * max|M|) and a strictly positive spectrum,
// then stores the symmetrized matrix together with its eigendecomposition,
// so square roots, inverses and determinants are cheap and consistent.
class SpdMatrix {
 public:
  explicit SpdMatrix(const Eigen::MatrixXd& m);

  Eigen::Index dim() const { return mat_.rows(); }
  const Eigen::MatrixXd& matrix() const { return mat_; }
  const Eigen::MatrixXd& sqrt() const { return sqrt_; }

  Eigen::MatrixXd inverse() const;
  Eigen::MatrixXd inverse_sqrt() const;
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
  // x' M^{-1} x, the quadratic form appearing in Gaussian densities.
  double inverse_quadratic(const Eigen::VectorXd& x) const;
  double determinant() const;
  double log_det() const;
  const Eigen::VectorXd& eigenvalues() const { return eigval_; }
  const Eigen::MatrixXd& eigenvectors() const { return eigvec_; }

 private:
  Eigen::MatrixXd mat_;
  Eigen::MatrixXd sqrt_;
  Eigen::VectorXd eigval_;
  Eigen::MatrixXd eigvec_;
};

// Diagonal matrix with +-1 entries, stored as its sign vector.
class SignMatrix {
 public:
  explicit SignMatrix(Eigen::VectorXi signs);
  static SignMatrix all_plus(Eigen::Index n);

  Eigen::Index dim() const { return signs_.size(); }
  int operator[](Eigen::Index j) const { return signs_(j); }
  const Eigen::VectorXi& signs() const { return signs_; }
  std::vector<int> to_vector() const;

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  // s * M * s  (flips the sign of entries whose row/col signs differ).
  Eigen::MatrixXd conjugate(const Eigen::MatrixXd& m) const;
  Eigen::MatrixXd to_dense() const;

  friend bool operator==(const SignMatrix& a, const SignMatrix& b) {
    return a.signs_ == b.signs_;
  }

 private:
  Eigen::VectorXi signs_;
};

// Orthogonal matrix; construction validates Q'Q = I entrywise to 1e-12.
class OrthogonalMatrix {
 public:
  explicit OrthogonalMatrix(Eigen::MatrixXd q);
  static OrthogonalMatrix identity(Eigen::Index n);

  Eigen::Index dim() const { return q_.rows(); }
  const Eigen::MatrixXd& matrix() const { return q_; }
  OrthogonalMatrix transpose() const;

 private:
  Eigen::MatrixXd q_;
};

// SPD square root: the unique R with R = R' > 0 and R*R = M.
SpdMatrix spd_sqrt(const SpdMatrix& m);

// Left polar decomposition a = spd * orthogonal of a nonsingular matrix.
struct PolarDecomposition {
  SpdMatrix spd;
  OrthogonalMatrix orthogonal;
};
PolarDecomposition polar_decompose(const Eigen::MatrixXd& a);

// Coefficients of det(xI - M), descending powers, leading coefficient 1.
// Computed from the eigenvalues; stable for the small dimensions used here.
Eigen::VectorXd char_poly(const Eigen::MatrixXd& m);

// I + eps * u u' for unit u and eps > -1, eps != 0. Eigenvalues {1+eps, 1, ...}.
SpdMatrix rank_one_spd(double epsilon, const Eigen::VectorXd& u);

// Closed-form inverse I - (eps/(1+eps)) u u' of rank_one_spd(eps, u).
SpdMatrix rank_one_inverse(double epsilon, const Eigen::VectorXd& u);

// Inverse problem: if M = I + eps u u' up to tol_rank, recover (eps, u) with
// u's first nonvanishing coordinate positive; otherwise empty.
struct RankOnePerturbation {
  double epsilon;
  Eigen::VectorXd direction;
};
std::optional<RankOnePerturbation> extract_rank_one(const SpdMatrix& m,
                                                    double tol_rank = 1e-6);

// Fixes the sign of a vector so its first coordinate of magnitude > 1e-9
// is positive. Used wherever a direction is only determined up to sign.
Eigen::VectorXd canonical_sign(const Eigen::VectorXd& v);

}  // namespace gpf
