#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>

#include "gpf/gaussian.hpp"
#include "gpf/transform.hpp"

namespace gpf {

struct VerificationPlan {
  PushforwardClaim claim;
  long sample_count = 200000;
  std::uint64_t seed = 0;
  double alpha = 0.01;

  VerificationPlan(PushforwardClaim c, long count, std::uint64_t s,
                   double a = 0.01);
};

struct VerificationReport {
  bool mean_ok;
  double max_mean_dev;  // worst per-coordinate |mean - claimed| / band
  double mean_band;     // the widest absolute band, for reporting
  bool cov_ok;
  double cov_dev;   // Frobenius distance to the claimed covariance
  double cov_band;
  double mardia_skewness_stat;
  double mardia_skewness_p;
  double mardia_kurtosis_stat;
  double mardia_kurtosis_p;
  bool pass;
  double runtime_seconds;  // informational; not part of serialized reports
};

struct MardiaResult {
  double skewness_stat;
  double skewness_p;
  double kurtosis_stat;
  double kurtosis_p;
};

// Mardia's multivariate skewness and kurtosis with their asymptotic laws
// (chi-square and normal); two-sided p-values.
MardiaResult mardia_test(const Eigen::MatrixXd& samples);

// Core check on already-transformed samples: 4-sigma moment bands around the
// claimed mean/covariance plus the Mardia tests at the plan's alpha.
VerificationReport verify_transformed_samples(const Eigen::MatrixXd& transformed,
                                              const GaussianMeasure& claimed,
                                              double alpha);

// Draw from the claim's source, apply the map, run the checks.
VerificationReport verify_pushforward(
    const std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)>& apply_fn,
    const VerificationPlan& plan);
VerificationReport verify_pushforward(const AffineMap& map,
                                      const VerificationPlan& plan);
VerificationReport verify_pushforward(const PiecewiseSignOrthogonal& t,
                                      const VerificationPlan& plan);

struct GridSpec {
  Eigen::Index points_per_axis = 401;
};

// Exact low-dimensional oracle: the pushforward density of a pure piecewise
// transform is source_density(T^{-1} y) (unit Jacobian per piece); returns
// the max absolute deviation from the claimed density over a grid covering
// [-6 sigma_max, 6 sigma_max]^n, skipping nodes on cell-boundary images.
double grid_density_oracle(const PiecewiseSignOrthogonal& t,
                           const GaussianMeasure& source,
                           const GaussianMeasure& claimed,
                           const GridSpec& grid = {});

}  // namespace gpf
