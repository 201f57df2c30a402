#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

namespace gpf {

// Pairwise (cascade) summation: fixed reduction order independent of chunking,
// with O(log n) error growth. Used for the large Monte-Carlo reductions.
double pairwise_sum(std::span<const double> values);
double pairwise_sum(const Eigen::VectorXd& values);

// Linear-interpolation quantile of an unsorted sample, p in [0, 100].
double quantile(std::vector<double> values, double p);

// Regularized lower incomplete gamma P(a, x), for a > 0, x >= 0.
double gamma_p(double a, double x);

double chi_squared_cdf(double x, double dof);
double normal_cdf(double z);

}  // namespace gpf
