#include "gpf/recovery.hpp"

#include <Eigen/LU>
#include <cmath>
#include <sstream>

#include "gpf/stats.hpp"

namespace gpf {

namespace {

Eigen::MatrixXd stack_differences(const std::vector<Eigen::VectorXd>& points) {
  const Eigen::Index n = points[0].size();
  Eigen::MatrixXd rows(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    rows.row(j) = (points[static_cast<size_t>(j) + 1] - points[0]).transpose();
  return rows;
}

// Empirical covariance about the sample mean, 1/(N-1) normalization.
Eigen::MatrixXd empirical_covariance(const Eigen::MatrixXd& pts) {
  const Eigen::RowVectorXd mean = pts.colwise().mean();
  const Eigen::MatrixXd centered = pts.rowwise() - mean;
  return centered.transpose() * centered /
         static_cast<double>(pts.rows() - 1);
}

}  // namespace

AffineRecoveryInput::AffineRecoveryInput(std::vector<Eigen::VectorXd> t,
                                         std::vector<Eigen::VectorXd> p,
                                         SpdMatrix ps)
    : thetas(std::move(t)), phis(std::move(p)), psi(std::move(ps)) {
  const size_t expected = static_cast<size_t>(psi.dim()) + 1;
  if (thetas.size() != expected || phis.size() != expected)
    throw DimensionError("AffineRecoveryInput: need n+1 source and image means");
  for (const auto& v : thetas)
    if (v.size() != psi.dim())
      throw DimensionError("AffineRecoveryInput: source mean dimension mismatch");
  for (const auto& v : phis)
    if (v.size() != psi.dim())
      throw DimensionError("AffineRecoveryInput: image mean dimension mismatch");
}

AffineMap recover_affine(const AffineRecoveryInput& input) {
  const Eigen::Index n = input.dim();
  const Eigen::MatrixXd a = stack_differences(input.thetas);

  double scale = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) scale = std::max(scale, a.row(j).norm());
  const double det_a = a.determinant();
  if (std::abs(det_a) <= 1e-10 * std::pow(scale, static_cast<double>(n)))
    throw DegenerateConfigurationError(
        "source mean differences do not form a usable basis (|det| = " +
        std::to_string(std::abs(det_a)) + ")");

  const Eigen::MatrixXd psi_inv = input.psi.inverse();
  const Eigen::MatrixXd b = stack_differences(input.phis) * psi_inv;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_b(b);
  double b_scale = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) b_scale = std::max(b_scale, b.row(j).norm());
  if (std::abs(lu_b.determinant()) <=
      1e-10 * std::pow(std::max(b_scale, 1e-30), static_cast<double>(n)))
    throw InconsistentDataError(
        "image-side row matrix is singular; the data are not consistent with "
        "an affine pushforward");

  const Eigen::MatrixXd linear = lu_b.solve(a);
  const Eigen::VectorXd shift = input.phis[0] - linear * input.thetas[0];
  return AffineMap(linear, shift);
}

OrthogonalMatrix isometry_certificate(const AffineRecoveryInput& input,
                                      double gram_tol) {
  const Eigen::Index n = input.dim();
  const Eigen::MatrixXd x = stack_differences(input.thetas).transpose();
  const Eigen::MatrixXd psi_inv_sqrt = input.psi.inverse_sqrt();
  Eigen::MatrixXd y(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    y.col(j) = psi_inv_sqrt * (input.phis[static_cast<size_t>(j) + 1] - input.phis[0]);

  const Eigen::MatrixXd gram_theta = x.transpose() * x;
  const Eigen::MatrixXd gram_phi = y.transpose() * y;
  const double scale = 1.0 + gram_theta.cwiseAbs().maxCoeff();
  double worst = 0.0;
  int wi = 0, wj = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const double d = std::abs(gram_theta(i, j) - gram_phi(i, j));
      if (d > worst) {
        worst = d;
        wi = static_cast<int>(i) + 1;
        wj = static_cast<int>(j) + 1;
      }
    }
  if (worst > gram_tol * scale) {
    std::ostringstream os;
    os << "no isometry aligns the mean configurations: Gram mismatch " << worst
       << " at (" << wi << ", " << wj << ")";
    throw NoIsometryError(os.str(), wi, wj);
  }

  // Orthogonal Procrustes: the orthogonal polar factor of the cross-Gram.
  const PolarDecomposition pd = polar_decompose(y * x.transpose());
  return pd.orthogonal;
}

AffineMap whiten_and_recover(const std::vector<Eigen::VectorXd>& thetas,
                             const std::vector<Eigen::VectorXd>& phis,
                             const SpdMatrix& sigma, const SpdMatrix& psi) {
  const Eigen::MatrixXd w = sigma.inverse_sqrt();
  std::vector<Eigen::VectorXd> whitened;
  whitened.reserve(thetas.size());
  for (const auto& t : thetas) whitened.push_back(w * t);
  const AffineMap inner = recover_affine(AffineRecoveryInput(whitened, phis, psi));
  // T(x) = T'(Sigma^{-1/2} x).
  return AffineMap(inner.linear() * w, inner.shift());
}

namespace detail {

SignStep sign_step(const Eigen::MatrixXd& a_rows, const Eigen::MatrixXd& c_rows,
                   const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                   double guard) {
  const Eigen::Index n = x.size();
  const Eigen::VectorXd ax = a_rows * x;
  const Eigen::VectorXd cy = c_rows * y;
  SignStep step{true, Eigen::VectorXi(n), 0.0};
  for (Eigen::Index j = 0; j < n; ++j) {
    if (std::abs(ax(j)) < guard) return {false, {}, 0.0};
    step.signs(j) = (cy(j) / ax(j)) >= 0.0 ? 1 : -1;
  }
  step.residual =
      (cy - step.signs.cast<double>().cwiseProduct(ax)).norm();
  return step;
}

}  // namespace detail

PiecewiseRecovery recover_piecewise(const PiecewiseRecoveryInput& input,
                                    const RecoveryOptions& options) {
  const size_t n_sets = input.sigmas.size();
  if (n_sets == 0) throw InvalidArgumentError("recover_piecewise: no datasets");
  const Eigen::Index n = input.sigmas[0].dim();
  if (static_cast<Eigen::Index>(n_sets) != n)
    throw DimensionError("recover_piecewise: need exactly n probing covariances");
  if (input.rank_one_datasets.size() != n_sets)
    throw DimensionError("recover_piecewise: dataset count mismatch");
  for (const auto& ds : input.rank_one_datasets) {
    if (ds.xs.rows() != ds.txs.rows() || ds.xs.cols() != n || ds.txs.cols() != n)
      throw DimensionError("recover_piecewise: bad dataset shape");
    if (ds.xs.rows() < 10000)
      throw TooFewPairsError("recover_piecewise: each dataset needs >= 10^4 pairs");
  }
  if (input.identity_pairs.xs.rows() < 10000)
    throw TooFewPairsError("recover_piecewise: identity dataset needs >= 10^4 pairs");

  // Probing directions from the exact inputs.
  Eigen::MatrixXd a_rows(n, n);
  Eigen::VectorXd eps_true(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto ext = extract_rank_one(input.sigmas[static_cast<size_t>(j)]);
    if (!ext)
      throw NotInFamilyError("probing covariance " + std::to_string(j + 1) +
                             " is not a rank-one perturbation of the identity");
    a_rows.row(j) = ext->direction.transpose();
    eps_true(j) = ext->epsilon;
  }
  if (std::abs(a_rows.determinant()) <= 1e-10)
    throw DegenerateConfigurationError(
        "probing directions do not form a basis of unit vectors");

  // Image-side covariances: estimated, so the rank-one tolerance scales with
  // the sampling noise floor.
  const double n_samples =
      static_cast<double>(input.rank_one_datasets[0].txs.rows());
  const double tol_rank =
      std::max(options.tol_rank_floor,
               options.rank_noise_factor *
                   std::sqrt(static_cast<double>(n) / n_samples));

  Eigen::MatrixXd c_rows(n, n);
  Eigen::VectorXd eps_hat(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::MatrixXd psi_hat =
        empirical_covariance(input.rank_one_datasets[static_cast<size_t>(j)].txs);
    std::optional<RankOnePerturbation> ext;
    try {
      ext = extract_rank_one(SpdMatrix(psi_hat), tol_rank);
    } catch (const NotPositiveDefiniteError&) {
      ext = std::nullopt;
    }
    if (!ext)
      throw NotInFamilyError(
          "image covariance estimate " + std::to_string(j + 1) +
          " is not a rank-one perturbation of the identity (tol_rank = " +
          std::to_string(tol_rank) + ")");
    if (std::abs(ext->epsilon - eps_true(j)) > options.tol_eps)
      throw NotInFamilyError(
          "image perturbation size " + std::to_string(ext->epsilon) +
          " disagrees with source value " + std::to_string(eps_true(j)) +
          " for dataset " + std::to_string(j + 1));
    c_rows.row(j) = ext->direction.transpose();
    eps_hat(j) = ext->epsilon;
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_c(c_rows);
  if (std::abs(lu_c.determinant()) <= 1e-10)
    throw EstimationFailureError(
        "estimated image directions are numerically dependent");
  const Eigen::MatrixXd b = lu_c.inverse();

  // Calibration / holdout split of the identity pairs.
  const Eigen::Index total = input.identity_pairs.xs.rows();
  const Eigen::Index holdout =
      static_cast<Eigen::Index>(options.holdout_fraction * static_cast<double>(total));
  const Eigen::Index calib = total - holdout;

  PiecewiseRecovery result{
      OrthogonalMatrix::identity(n), OrthogonalMatrix::identity(n),
      a_rows,   c_rows,
      eps_hat,  {},
      {},       {DeviationQuantiles{0, 0, 0, 0}, 0.0, {}, 0.0, holdout, 0, 0,
                 tol_rank}};

  std::vector<double> residuals;
  std::vector<double> x_norms;
  residuals.reserve(static_cast<size_t>(calib));
  for (Eigen::Index i = 0; i < calib; ++i) {
    const Eigen::VectorXd x = input.identity_pairs.xs.row(i);
    const Eigen::VectorXd y = input.identity_pairs.txs.row(i);
    const auto step = detail::sign_step(a_rows, c_rows, x, y, options.null_guard);
    if (!step.retained) {
      ++result.diagnostics.discarded_count;
      continue;
    }
    result.sample_signs.emplace_back(step.signs);
    result.retained_indices.push_back(i);
    residuals.push_back(step.residual);
    x_norms.push_back(x.norm());
    std::vector<int> key(step.signs.data(), step.signs.data() + n);
    ++result.diagnostics.sign_cell_counts[key];
  }
  if (residuals.empty())
    throw EstimationFailureError("recover_piecewise: every pair was discarded");
  result.diagnostics.retained_count = static_cast<long>(residuals.size());
  result.diagnostics.residual =
      DeviationQuantiles{quantile(residuals, 50.0), quantile(residuals, 90.0),
                         quantile(residuals, 99.0), quantile(residuals, 100.0)};
  result.diagnostics.median_x_norm = quantile(x_norms, 50.0);

  // Orthogonalize: B = V K and A = H U through left polar decompositions.
  result.v = polar_decompose(b.transpose()).orthogonal.transpose();
  result.u = polar_decompose(a_rows).orthogonal;

  // Held-out reproduction with the orthogonalized transform.
  long holdout_ok = 0;
  long holdout_used = 0;
  for (Eigen::Index i = calib; i < total; ++i) {
    const Eigen::VectorXd x = input.identity_pairs.xs.row(i);
    const Eigen::VectorXd y = input.identity_pairs.txs.row(i);
    const auto step = detail::sign_step(a_rows, c_rows, x, y, options.null_guard);
    if (!step.retained) continue;
    ++holdout_used;
    const Eigen::VectorXd rebuilt =
        result.v.matrix() *
        (step.signs.cast<double>().cwiseProduct(result.u.matrix() * x));
    if ((rebuilt - y).norm() <= options.holdout_rel_err * x.norm()) ++holdout_ok;
  }
  result.diagnostics.holdout_count = holdout_used;
  result.diagnostics.holdout_ok_fraction =
      holdout_used > 0 ? static_cast<double>(holdout_ok) /
                             static_cast<double>(holdout_used)
                       : 1.0;

  const double median_bound =
      options.residual_median_bound * result.diagnostics.median_x_norm;
  if (result.diagnostics.residual.q50 > median_bound) {
    std::ostringstream os;
    os << "recovered model does not fit: median residual "
       << result.diagnostics.residual.q50 << " exceeds " << median_bound
       << " (quantiles 50/90/99/100 = " << result.diagnostics.residual.q50 << "/"
       << result.diagnostics.residual.q90 << "/" << result.diagnostics.residual.q99
       << "/" << result.diagnostics.residual.q100 << ")";
    throw ModelMismatchError(os.str());
  }
  if (holdout_used > 0 &&
      result.diagnostics.holdout_ok_fraction < options.holdout_pass_fraction) {
    std::ostringstream os;
    os << "recovered model fails held-out reproduction: only "
       << result.diagnostics.holdout_ok_fraction * 100.0
       << "% of pairs within tolerance";
    throw ModelMismatchError(os.str());
  }
  return result;
}

}  // namespace gpf
