#include "gpf/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <complex>
#include <sstream>

namespace gpf {

namespace {

std::string dims(const Eigen::MatrixXd& m) {
  std::ostringstream os;
  os << m.rows() << "x" << m.cols();
  return os.str();
}

}  // namespace

SpdMatrix::SpdMatrix(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw DimensionError("SpdMatrix requires a square matrix, got " + dims(m));
  const double scale = m.cwiseAbs().maxCoeff();
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * scale)
    throw NotPositiveDefiniteError(
        "matrix is not symmetric: max asymmetry " + std::to_string(asym));
  mat_ = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mat_);
  if (es.info() != Eigen::Success)
    throw NumericalError("eigendecomposition failed for SpdMatrix");
  eigval_ = es.eigenvalues();
  eigvec_ = es.eigenvectors();
  if (eigval_.minCoeff() <= 0.0)
    throw NotPositiveDefiniteError(
        "matrix is not positive definite: min eigenvalue " +
        std::to_string(eigval_.minCoeff()));
  sqrt_ = eigvec_ * eigval_.cwiseSqrt().asDiagonal() * eigvec_.transpose();
  sqrt_ = 0.5 * (sqrt_ + sqrt_.transpose());
}

Eigen::MatrixXd SpdMatrix::inverse() const {
  Eigen::MatrixXd inv =
      eigvec_ * eigval_.cwiseInverse().asDiagonal() * eigvec_.transpose();
  return 0.5 * (inv + inv.transpose());
}

Eigen::MatrixXd SpdMatrix::inverse_sqrt() const {
  Eigen::MatrixXd inv = eigvec_ * eigval_.cwiseSqrt().cwiseInverse().asDiagonal() *
                        eigvec_.transpose();
  return 0.5 * (inv + inv.transpose());
}

Eigen::VectorXd SpdMatrix::solve(const Eigen::VectorXd& b) const {
  if (b.size() != dim())
    throw DimensionError("SpdMatrix::solve dimension mismatch");
  return eigvec_ * (eigvec_.transpose() * b).cwiseQuotient(eigval_);
}

double SpdMatrix::inverse_quadratic(const Eigen::VectorXd& x) const {
  if (x.size() != dim())
    throw DimensionError("SpdMatrix::inverse_quadratic dimension mismatch");
  const Eigen::VectorXd y = eigvec_.transpose() * x;
  return (y.array().square() / eigval_.array()).sum();
}

double SpdMatrix::determinant() const { return eigval_.prod(); }

double SpdMatrix::log_det() const { return eigval_.array().log().sum(); }

SignMatrix::SignMatrix(Eigen::VectorXi signs) : signs_(std::move(signs)) {
  if (signs_.size() == 0)
    throw DimensionError("SignMatrix requires at least one entry");
  for (Eigen::Index j = 0; j < signs_.size(); ++j)
    if (signs_(j) != 1 && signs_(j) != -1)
      throw InvalidArgumentError("SignMatrix entries must be +1 or -1");
}

SignMatrix SignMatrix::all_plus(Eigen::Index n) {
  return SignMatrix(Eigen::VectorXi::Ones(n));
}

std::vector<int> SignMatrix::to_vector() const {
  return std::vector<int>(signs_.data(), signs_.data() + signs_.size());
}

Eigen::VectorXd SignMatrix::apply(const Eigen::VectorXd& x) const {
  if (x.size() != signs_.size())
    throw DimensionError("SignMatrix::apply dimension mismatch");
  return x.cwiseProduct(signs_.cast<double>());
}

Eigen::MatrixXd SignMatrix::conjugate(const Eigen::MatrixXd& m) const {
  if (m.rows() != signs_.size() || m.cols() != signs_.size())
    throw DimensionError("SignMatrix::conjugate dimension mismatch");
  const Eigen::VectorXd s = signs_.cast<double>();
  return s.asDiagonal() * m * s.asDiagonal();
}

Eigen::MatrixXd SignMatrix::to_dense() const {
  return signs_.cast<double>().asDiagonal();
}

OrthogonalMatrix::OrthogonalMatrix(Eigen::MatrixXd q) : q_(std::move(q)) {
  if (q_.rows() != q_.cols() || q_.rows() == 0)
    throw DimensionError("OrthogonalMatrix requires a square matrix, got " +
                         dims(q_));
  const Eigen::MatrixXd gram = q_.transpose() * q_;
  const double dev =
      (gram - Eigen::MatrixXd::Identity(q_.rows(), q_.rows())).cwiseAbs().maxCoeff();
  if (dev > 1e-12)
    throw InvalidArgumentError("matrix is not orthogonal: max |Q'Q - I| = " +
                               std::to_string(dev));
}

OrthogonalMatrix OrthogonalMatrix::identity(Eigen::Index n) {
  return OrthogonalMatrix(Eigen::MatrixXd::Identity(n, n));
}

OrthogonalMatrix OrthogonalMatrix::transpose() const {
  return OrthogonalMatrix(q_.transpose());
}

SpdMatrix spd_sqrt(const SpdMatrix& m) { return SpdMatrix(m.sqrt()); }

PolarDecomposition polar_decompose(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols() || a.rows() == 0)
    throw DimensionError("polar_decompose requires a square matrix");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  if (sv(sv.size() - 1) <= 1e-12 * sv(0))
    throw SingularMatrixError("polar_decompose: matrix is singular (sigma_min/"
                              "sigma_max = " +
                              std::to_string(sv(sv.size() - 1) / sv(0)) + ")");
  const Eigen::MatrixXd u = svd.matrixU();
  Eigen::MatrixXd p = u * sv.asDiagonal() * u.transpose();
  p = 0.5 * (p + p.transpose());
  Eigen::MatrixXd q = u * svd.matrixV().transpose();
  return {SpdMatrix(p), OrthogonalMatrix(q)};
}

Eigen::VectorXd char_poly(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw DimensionError("char_poly requires a square matrix");
  const Eigen::Index n = m.rows();
  const double scale = m.cwiseAbs().maxCoeff();
  const bool symmetric =
      (m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + scale);

  std::vector<std::complex<double>> roots(static_cast<size_t>(n));
  if (symmetric) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
    if (es.info() != Eigen::Success)
      throw NumericalError("char_poly: eigendecomposition did not converge");
    for (Eigen::Index i = 0; i < n; ++i) roots[i] = es.eigenvalues()(i);
  } else {
    Eigen::EigenSolver<Eigen::MatrixXd> es(m);
    if (es.info() != Eigen::Success)
      throw NumericalError("char_poly: eigendecomposition did not converge");
    for (Eigen::Index i = 0; i < n; ++i) roots[i] = es.eigenvalues()(i);
  }

  // Expand prod (x - lambda_i); imaginary parts cancel for real input.
  std::vector<std::complex<double>> coeff(1, 1.0);
  for (const auto& r : roots) {
    coeff.push_back(0.0);
    for (size_t k = coeff.size() - 1; k >= 1; --k) coeff[k] -= r * coeff[k - 1];
  }
  Eigen::VectorXd out(n + 1);
  for (Eigen::Index i = 0; i <= n; ++i) out(i) = coeff[static_cast<size_t>(i)].real();
  out(0) = 1.0;
  return out;
}

namespace {

void validate_rank_one_args(double epsilon, const Eigen::VectorXd& u) {
  if (u.size() == 0) throw DimensionError("rank-one update needs a vector");
  if (std::abs(u.norm() - 1.0) > 1e-12)
    throw InvalidArgumentError("rank-one direction must be a unit vector, |u| = " +
                               std::to_string(u.norm()));
  if (epsilon == 0.0)
    throw DegeneratePerturbationError("rank-one perturbation with epsilon = 0");
  if (epsilon <= -1.0)
    throw NotPositiveDefiniteError(
        "rank-one perturbation needs epsilon > -1, got " + std::to_string(epsilon));
}

}  // namespace

SpdMatrix rank_one_spd(double epsilon, const Eigen::VectorXd& u) {
  validate_rank_one_args(epsilon, u);
  const Eigen::Index n = u.size();
  return SpdMatrix(Eigen::MatrixXd::Identity(n, n) + epsilon * u * u.transpose());
}

SpdMatrix rank_one_inverse(double epsilon, const Eigen::VectorXd& u) {
  validate_rank_one_args(epsilon, u);
  const Eigen::Index n = u.size();
  const double c = epsilon / (1.0 + epsilon);
  return SpdMatrix(Eigen::MatrixXd::Identity(n, n) - c * u * u.transpose());
}

Eigen::VectorXd canonical_sign(const Eigen::VectorXd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > 1e-9) return v(i) > 0 ? v : Eigen::VectorXd(-v);
  }
  return v;
}

std::optional<RankOnePerturbation> extract_rank_one(const SpdMatrix& m,
                                                    double tol_rank) {
  const Eigen::Index n = m.dim();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      m.matrix() - Eigen::MatrixXd::Identity(n, n));
  if (es.info() != Eigen::Success)
    throw NumericalError("extract_rank_one: eigendecomposition failed");
  Eigen::Index big = -1;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(es.eigenvalues()(i)) > tol_rank) {
      if (big >= 0) return std::nullopt;  // more than one large eigenvalue
      big = i;
    }
  }
  if (big < 0) return std::nullopt;  // perturbation is zero to tolerance
  return RankOnePerturbation{es.eigenvalues()(big),
                             canonical_sign(es.eigenvectors().col(big))};
}

}  // namespace gpf
