#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "gpf/transform.hpp"

namespace gpf {

// Two pushforward claims through one (possibly unknown) transform; all four
// Gaussians share the same dimension.
struct ClaimPair {
  PushforwardClaim first;
  PushforwardClaim second;

  ClaimPair(PushforwardClaim f, PushforwardClaim s);
  Eigen::Index dim() const { return first.source.dim(); }
};

struct CheckResult {
  bool pass;
  double deviation;
};

// Equality of the characteristic polynomials of Psi1^{1/2} Psi2^{-1} Psi1^{1/2}
// and Sigma1^{1/2} Sigma2^{-1} Sigma1^{1/2}.
CheckResult check_charpoly(const ClaimPair& pair, double tol = 1e-8);

std::vector<double> default_resolvent_probes();  // 11 points in [-0.4, 0.4]

struct ResolventResult {
  bool pass;
  double max_deviation;
  std::vector<double> probes;
};

// Agreement of the two resolvent quadratic forms at finitely many pole-free
// probe points; both sides are rational in z of degree <= n, so n+1 pole-free
// agreements pin them as functions. Throws ProbeAtPoleError near a pole.
ResolventResult check_resolvent(const ClaimPair& pair,
                                std::vector<double> probes = {},
                                double tol = 1e-8, double pole_tol = 1e-10);

// (phi1-phi2)' Psi2^{-1} (phi1-phi2) = (theta1-theta2)' Sigma2^{-1} (theta1-theta2).
CheckResult check_mahalanobis(const ClaimPair& pair, double tol = 1e-10);

// |Sigma1|/|Sigma2| = |Psi1|/|Psi2|, compared through log-determinants.
CheckResult check_determinant_ratio(const ClaimPair& pair, double tol = 1e-10);

struct DeviationQuantiles {
  double q50;
  double q90;
  double q99;
  double q100;
};

struct DensityCheckResult {
  bool pass;
  DeviationQuantiles quantiles;
  double median_magnitude;
  long pair_count;
};

// The a.e. log-density-ratio identity evaluated on supplied (x, Tx) pairs
// (rows of xs / txs). Requires at least 100 pairs.
DensityCheckResult check_density_identity(const ClaimPair& pair,
                                          const Eigen::MatrixXd& xs,
                                          const Eigen::MatrixXd& txs,
                                          double tol = 1e-8);

// Screen for claims whose sources share a parameter: equal source covariances
// force equal image covariances, equal source means force equal image means.
enum class ScreenViolationKind { covariance, mean };

struct ScreenViolation {
  ScreenViolationKind kind;
  double deviation;
};

std::vector<ScreenViolation> equal_source_screen(const ClaimPair& pair,
                                                 double eq_tol = 1e-12,
                                                 double neq_tol = 1e-8);

struct IdentityTolerances {
  double charpoly = 1e-8;
  double resolvent = 1e-8;
  double resolvent_pole = 1e-10;
  double mahalanobis = 1e-10;
  double det_ratio = 1e-10;
  double density = 1e-8;
  double screen_eq = 1e-12;
  double screen_neq = 1e-8;
};

// Aggregate report over all checks; the density check runs only when paired
// samples are supplied.
struct IdentityReport {
  CheckResult charpoly;
  ResolventResult resolvent;
  CheckResult mahalanobis;
  CheckResult det_ratio;
  std::optional<DensityCheckResult> density;
  std::vector<ScreenViolation> screen;
  bool all_pass;
};

struct PairedSamples {
  Eigen::MatrixXd xs;
  Eigen::MatrixXd txs;
};

IdentityReport run_identity_checks(
    const ClaimPair& pair,
    const std::optional<PairedSamples>& samples = std::nullopt,
    const IdentityTolerances& tol = {});

}  // namespace gpf
