#include "gpf/identity_checks.hpp"

#include <Eigen/LU>
#include <cmath>

#include "gpf/stats.hpp"

namespace gpf {

ClaimPair::ClaimPair(PushforwardClaim f, PushforwardClaim s)
    : first(std::move(f)), second(std::move(s)) {
  if (first.source.dim() != second.source.dim())
    throw DimensionError("ClaimPair: claims have different dimensions");
}

CheckResult check_charpoly(const ClaimPair& pair, double tol) {
  const auto product = [](const SpdMatrix& a, const SpdMatrix& b) {
    return Eigen::MatrixXd(a.sqrt() * b.inverse() * a.sqrt());
  };
  const Eigen::VectorXd cp_psi =
      char_poly(product(pair.first.image.cov(), pair.second.image.cov()));
  const Eigen::VectorXd cp_sigma =
      char_poly(product(pair.first.source.cov(), pair.second.source.cov()));
  const double dev = (cp_psi - cp_sigma).cwiseAbs().maxCoeff();
  const double scale =
      std::max(cp_psi.cwiseAbs().maxCoeff(), cp_sigma.cwiseAbs().maxCoeff());
  return {dev <= tol * (1.0 + scale), dev};
}

std::vector<double> default_resolvent_probes() {
  std::vector<double> probes(11);
  for (int i = 0; i < 11; ++i) probes[i] = -0.4 + 0.08 * i;
  return probes;
}

namespace {

// d' Binv (Ainv - z Binv)^{-1} Binv d, guarding the pole through |det|.
double resolvent_form(const Eigen::MatrixXd& a_inv, const Eigen::MatrixXd& b_inv,
                      const Eigen::VectorXd& d, double z, double pole_tol) {
  const Eigen::MatrixXd k = a_inv - z * b_inv;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(k);
  if (std::abs(lu.determinant()) <= pole_tol)
    throw ProbeAtPoleError("resolvent probe z = " + std::to_string(z) +
                               " is at or near a pole",
                           z);
  return d.dot(b_inv * lu.solve(b_inv * d));
}

}  // namespace

ResolventResult check_resolvent(const ClaimPair& pair, std::vector<double> probes,
                                double tol, double pole_tol) {
  if (probes.empty()) probes = default_resolvent_probes();
  const Eigen::VectorXd d_phi =
      pair.first.image.mean() - pair.second.image.mean();
  const Eigen::VectorXd d_theta =
      pair.first.source.mean() - pair.second.source.mean();
  const Eigen::MatrixXd psi1_inv = pair.first.image.cov().inverse();
  const Eigen::MatrixXd psi2_inv = pair.second.image.cov().inverse();
  const Eigen::MatrixXd sig1_inv = pair.first.source.cov().inverse();
  const Eigen::MatrixXd sig2_inv = pair.second.source.cov().inverse();

  double max_dev = 0.0;
  double magnitude = 0.0;
  for (const double z : probes) {
    const double lhs = resolvent_form(psi1_inv, psi2_inv, d_phi, z, pole_tol);
    const double rhs = resolvent_form(sig1_inv, sig2_inv, d_theta, z, pole_tol);
    max_dev = std::max(max_dev, std::abs(lhs - rhs));
    magnitude = std::max({magnitude, std::abs(lhs), std::abs(rhs)});
  }
  return {max_dev <= tol * (1.0 + magnitude), max_dev, std::move(probes)};
}

CheckResult check_mahalanobis(const ClaimPair& pair, double tol) {
  const Eigen::VectorXd d_phi =
      pair.first.image.mean() - pair.second.image.mean();
  const Eigen::VectorXd d_theta =
      pair.first.source.mean() - pair.second.source.mean();
  const double lhs = pair.second.image.cov().inverse_quadratic(d_phi);
  const double rhs = pair.second.source.cov().inverse_quadratic(d_theta);
  const double dev = std::abs(lhs - rhs);
  return {dev <= tol * (1.0 + std::abs(rhs)), dev};
}

CheckResult check_determinant_ratio(const ClaimPair& pair, double tol) {
  // log(|Sigma1|/|Sigma2|) - log(|Psi1|/|Psi2|); expm1 of the difference is
  // the relative deviation of the two ratios, stable against overflow.
  const double log_ratio_sigma = pair.first.source.cov().log_det() -
                                 pair.second.source.cov().log_det();
  const double log_ratio_psi =
      pair.first.image.cov().log_det() - pair.second.image.cov().log_det();
  const double dev = std::abs(std::expm1(log_ratio_sigma - log_ratio_psi));
  return {dev <= tol, dev};
}

DensityCheckResult check_density_identity(const ClaimPair& pair,
                                          const Eigen::MatrixXd& xs,
                                          const Eigen::MatrixXd& txs,
                                          double tol) {
  if (xs.rows() != txs.rows())
    throw DimensionError("check_density_identity: xs/txs row counts differ");
  if (xs.cols() != pair.dim() || txs.cols() != pair.dim())
    throw DimensionError("check_density_identity: column count mismatch");
  if (xs.rows() < 100)
    throw TooFewPairsError("check_density_identity needs at least 100 pairs, got " +
                           std::to_string(xs.rows()));

  const auto& c = pair;
  std::vector<double> devs(static_cast<size_t>(xs.rows()));
  std::vector<double> mags(static_cast<size_t>(xs.rows()));
  for (Eigen::Index i = 0; i < xs.rows(); ++i) {
    const Eigen::VectorXd x = xs.row(i);
    const Eigen::VectorXd y = txs.row(i);
    const double lhs =
        c.second.image.cov().inverse_quadratic(y - c.second.image.mean()) -
        c.first.image.cov().inverse_quadratic(y - c.first.image.mean());
    const double rhs =
        c.second.source.cov().inverse_quadratic(x - c.second.source.mean()) -
        c.first.source.cov().inverse_quadratic(x - c.first.source.mean());
    devs[static_cast<size_t>(i)] = std::abs(lhs - rhs);
    mags[static_cast<size_t>(i)] = std::max(std::abs(lhs), std::abs(rhs));
  }
  DeviationQuantiles q{quantile(devs, 50.0), quantile(devs, 90.0),
                       quantile(devs, 99.0), quantile(devs, 100.0)};
  const double median_mag = quantile(mags, 50.0);
  return {q.q99 <= tol * (1.0 + median_mag), q, median_mag, xs.rows()};
}

std::vector<ScreenViolation> equal_source_screen(const ClaimPair& pair,
                                                 double eq_tol, double neq_tol) {
  std::vector<ScreenViolation> out;
  const auto max_abs_diff = [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return (a - b).cwiseAbs().maxCoeff();
  };
  const Eigen::MatrixXd& s1 = pair.first.source.cov().matrix();
  const Eigen::MatrixXd& s2 = pair.second.source.cov().matrix();
  const double sigma_scale = 1.0 + std::max(s1.cwiseAbs().maxCoeff(),
                                            s2.cwiseAbs().maxCoeff());
  if (max_abs_diff(s1, s2) <= eq_tol * sigma_scale) {
    const double psi_dev = max_abs_diff(pair.first.image.cov().matrix(),
                                        pair.second.image.cov().matrix());
    if (psi_dev > neq_tol) out.push_back({ScreenViolationKind::covariance, psi_dev});
  }
  const double theta_scale =
      1.0 + std::max(pair.first.source.mean().cwiseAbs().maxCoeff(),
                     pair.second.source.mean().cwiseAbs().maxCoeff());
  if ((pair.first.source.mean() - pair.second.source.mean()).cwiseAbs().maxCoeff() <=
      eq_tol * theta_scale) {
    const double phi_dev =
        (pair.first.image.mean() - pair.second.image.mean()).cwiseAbs().maxCoeff();
    if (phi_dev > neq_tol) out.push_back({ScreenViolationKind::mean, phi_dev});
  }
  return out;
}

IdentityReport run_identity_checks(const ClaimPair& pair,
                                   const std::optional<PairedSamples>& samples,
                                   const IdentityTolerances& tol) {
  IdentityReport report{
      check_charpoly(pair, tol.charpoly),
      check_resolvent(pair, {}, tol.resolvent, tol.resolvent_pole),
      check_mahalanobis(pair, tol.mahalanobis),
      check_determinant_ratio(pair, tol.det_ratio),
      std::nullopt,
      equal_source_screen(pair, tol.screen_eq, tol.screen_neq),
      false};
  if (samples)
    report.density =
        check_density_identity(pair, samples->xs, samples->txs, tol.density);
  report.all_pass = report.charpoly.pass && report.resolvent.pass &&
                    report.mahalanobis.pass && report.det_ratio.pass &&
                    report.screen.empty() &&
                    (!report.density || report.density->pass);
  return report;
}

}  // namespace gpf
