#include "gpf/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gpf/errors.hpp"

namespace gpf {

namespace {

double pairwise_sum_impl(const double* data, size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (size_t i = 0; i < n; ++i) s += data[i];
    return s;
  }
  const size_t half = n / 2;
  return pairwise_sum_impl(data, half) + pairwise_sum_impl(data + half, n - half);
}

// Series expansion of P(a,x), valid for x < a + 1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-15)
      return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
  }
  throw NumericalError("gamma_p: series did not converge");
}

// Continued fraction for Q(a,x) = 1 - P(a,x), valid for x >= a + 1 (Lentz).
double gamma_q_contfrac(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-15)
      return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
  }
  throw NumericalError("gamma_p: continued fraction did not converge");
}

}  // namespace

double pairwise_sum(std::span<const double> values) {
  return pairwise_sum_impl(values.data(), values.size());
}

double pairwise_sum(const Eigen::VectorXd& values) {
  return pairwise_sum_impl(values.data(), static_cast<size_t>(values.size()));
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw InvalidArgumentError("quantile of an empty sample");
  if (p < 0.0 || p > 100.0)
    throw InvalidArgumentError("quantile: p must be in [0, 100]");
  std::sort(values.begin(), values.end());
  const double h = p / 100.0 * static_cast<double>(values.size() - 1);
  const size_t lo = static_cast<size_t>(std::floor(h));
  const size_t hi = static_cast<size_t>(std::ceil(h));
  const double w = h - static_cast<double>(lo);
  return (1.0 - w) * values[lo] + w * values[hi];
}

double gamma_p(double a, double x) {
  if (a <= 0.0) throw InvalidArgumentError("gamma_p: a must be positive");
  if (x < 0.0) throw InvalidArgumentError("gamma_p: x must be nonnegative");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_contfrac(a, x);
}

double chi_squared_cdf(double x, double dof) {
  if (x <= 0.0) return 0.0;
  return gamma_p(0.5 * dof, 0.5 * x);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace gpf
