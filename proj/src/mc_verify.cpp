#include "gpf/mc_verify.hpp"

#include <Eigen/Cholesky>
#include <chrono>
#include <cmath>

#include "gpf/stats.hpp"

namespace gpf {

VerificationPlan::VerificationPlan(PushforwardClaim c, long count,
                                   std::uint64_t s, double a)
    : claim(std::move(c)), sample_count(count), seed(s), alpha(a) {
  if (sample_count < 1000)
    throw InvalidArgumentError("VerificationPlan: sample_count must be >= 10^3");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw InvalidArgumentError("VerificationPlan: alpha must lie in (0, 1)");
}

MardiaResult mardia_test(const Eigen::MatrixXd& samples) {
  const Eigen::Index n_pts = samples.rows();
  const Eigen::Index dim = samples.cols();
  if (n_pts < 10) throw InvalidArgumentError("mardia_test: too few samples");
  const double n = static_cast<double>(n_pts);
  const double d = static_cast<double>(dim);

  const Eigen::RowVectorXd mean = samples.colwise().mean();
  const Eigen::MatrixXd centered = samples.rowwise() - mean;
  const Eigen::MatrixXd cov = centered.transpose() * centered / n;
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success)
    throw NumericalError("mardia_test: sample covariance is not positive definite");

  // Standardized scores y_i = L^{-1}(x_i - mean), rows of y.
  const Eigen::MatrixXd y =
      llt.matrixL().solve(centered.transpose()).transpose();

  // Skewness b1 = (1/n^2) sum_{ij} (y_i' y_j)^3 = |M3|_F^2 / n^2 where M3 is
  // the third moment tensor; accumulated entry by entry with pairwise sums.
  double b1 = 0.0;
  Eigen::VectorXd prod(n_pts);
  for (Eigen::Index a = 0; a < dim; ++a)
    for (Eigen::Index b = 0; b < dim; ++b) {
      const Eigen::VectorXd ab = y.col(a).cwiseProduct(y.col(b));
      for (Eigen::Index c = 0; c < dim; ++c) {
        prod = ab.cwiseProduct(y.col(c));
        const double t_abc = pairwise_sum(prod) / n;
        b1 += t_abc * t_abc;
      }
    }

  // Kurtosis b2 = (1/n) sum_i |y_i|^4.
  const Eigen::VectorXd sq = y.rowwise().squaredNorm();
  const Eigen::VectorXd sq2 = sq.cwiseProduct(sq);
  const double b2 = pairwise_sum(sq2) / n;

  MardiaResult r{};
  r.skewness_stat = n * b1 / 6.0;
  const double skew_dof = d * (d + 1.0) * (d + 2.0) / 6.0;
  const double skew_cdf = chi_squared_cdf(r.skewness_stat, skew_dof);
  r.skewness_p = 2.0 * std::min(skew_cdf, 1.0 - skew_cdf);

  r.kurtosis_stat =
      (b2 - d * (d + 2.0)) / std::sqrt(8.0 * d * (d + 2.0) / n);
  r.kurtosis_p = 2.0 * (1.0 - normal_cdf(std::abs(r.kurtosis_stat)));
  return r;
}

VerificationReport verify_transformed_samples(const Eigen::MatrixXd& transformed,
                                              const GaussianMeasure& claimed,
                                              double alpha) {
  if (transformed.cols() != claimed.dim())
    throw DimensionError("verify_transformed_samples: dimension mismatch");
  const double n = static_cast<double>(transformed.rows());
  const Eigen::Index dim = claimed.dim();

  VerificationReport report{};

  // Mean within 4 sqrt(Psi_jj / n) per coordinate.
  const Eigen::RowVectorXd mean = transformed.colwise().mean();
  report.mean_ok = true;
  report.max_mean_dev = 0.0;
  report.mean_band = 0.0;
  for (Eigen::Index j = 0; j < dim; ++j) {
    const double band = 4.0 * std::sqrt(claimed.cov().matrix()(j, j) / n);
    const double dev = std::abs(mean(j) - claimed.mean()(j));
    report.mean_band = std::max(report.mean_band, band);
    report.max_mean_dev = std::max(report.max_mean_dev, dev);
    if (dev > band) report.mean_ok = false;
  }

  // Covariance within 4 |Psi|_F sqrt(2(n+1)/count) in Frobenius distance.
  const Eigen::MatrixXd centered = transformed.rowwise() - mean;
  const Eigen::MatrixXd cov = centered.transpose() * centered / (n - 1.0);
  report.cov_dev = (cov - claimed.cov().matrix()).norm();
  report.cov_band = 4.0 * claimed.cov().matrix().norm() *
                    std::sqrt(2.0 * (static_cast<double>(dim) + 1.0) / n);
  report.cov_ok = report.cov_dev <= report.cov_band;

  const MardiaResult mardia = mardia_test(transformed);
  report.mardia_skewness_stat = mardia.skewness_stat;
  report.mardia_skewness_p = mardia.skewness_p;
  report.mardia_kurtosis_stat = mardia.kurtosis_stat;
  report.mardia_kurtosis_p = mardia.kurtosis_p;

  report.pass = report.mean_ok && report.cov_ok &&
                mardia.skewness_p >= alpha && mardia.kurtosis_p >= alpha;
  return report;
}

VerificationReport verify_pushforward(
    const std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)>& apply_fn,
    const VerificationPlan& plan) {
  const auto start = std::chrono::steady_clock::now();
  const Eigen::MatrixXd xs =
      sample(plan.claim.source, plan.sample_count, plan.seed);
  const Eigen::MatrixXd ys = apply_fn(xs);
  if (ys.rows() != xs.rows() || ys.cols() != plan.claim.image.dim())
    throw DimensionError("verify_pushforward: transform returned bad shape");
  VerificationReport report =
      verify_transformed_samples(ys, plan.claim.image, plan.alpha);
  report.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return report;
}

VerificationReport verify_pushforward(const AffineMap& map,
                                      const VerificationPlan& plan) {
  return verify_pushforward(
      [&map](const Eigen::MatrixXd& xs) { return apply_rows(map, xs); }, plan);
}

VerificationReport verify_pushforward(const PiecewiseSignOrthogonal& t,
                                      const VerificationPlan& plan) {
  return verify_pushforward(
      [&t](const Eigen::MatrixXd& xs) { return apply_rows(t, xs); }, plan);
}

double grid_density_oracle(const PiecewiseSignOrthogonal& t,
                           const GaussianMeasure& source,
                           const GaussianMeasure& claimed, const GridSpec& grid) {
  const Eigen::Index n = t.dim();
  if (n > 2)
    throw InvalidArgumentError("grid_density_oracle supports n <= 2, got n = " +
                               std::to_string(n));
  if (!t.is_pure())
    throw InvalidArgumentError(
        "grid_density_oracle requires a pure piecewise-orthogonal transform "
        "(unit Jacobian)");
  if (source.dim() != n || claimed.dim() != n)
    throw DimensionError("grid_density_oracle: dimension mismatch");
  if (grid.points_per_axis < 2)
    throw InvalidArgumentError("grid_density_oracle: need at least 2 nodes/axis");

  double sigma_max = 0.0;
  for (Eigen::Index j = 0; j < n; ++j)
    sigma_max = std::max({sigma_max, std::sqrt(source.cov().matrix()(j, j)),
                          std::sqrt(claimed.cov().matrix()(j, j))});
  const double half_width = 6.0 * sigma_max;
  const Eigen::Index m = grid.points_per_axis;
  const auto node = [&](Eigen::Index i) {
    return -half_width +
           2.0 * half_width * static_cast<double>(i) / static_cast<double>(m - 1);
  };

  double max_dev = 0.0;
  Eigen::VectorXd y(n);
  const Eigen::Index outer = (n == 2) ? m : 1;
  for (Eigen::Index i = 0; i < outer; ++i) {
    for (Eigen::Index k = 0; k < m; ++k) {
      if (n == 2) {
        y(0) = node(i);
        y(1) = node(k);
      } else {
        y(0) = node(k);
      }
      // Skip nodes on (images of) cell boundaries: |V'y| carries the same
      // magnitudes as Ux, so endpoint proximity is tested on V'y.
      const Eigen::VectorXd z = t.v().matrix().transpose() * y;
      bool skip = false;
      for (Eigen::Index j = 0; j < n && !skip; ++j)
        if (t.partition().endpoint_distance(j, z(j)) < 1e-9) skip = true;
      if (skip) continue;

      const double pushed = std::exp(log_density(source, apply_inverse(t, y)));
      const double stated = std::exp(log_density(claimed, y));
      max_dev = std::max(max_dev, std::abs(pushed - stated));
    }
  }
  return max_dev;
}

}  // namespace gpf
