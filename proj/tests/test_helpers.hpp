#pragma once

#include <Eigen/Dense>

#include "gpf/random.hpp"
#include "gpf/rng.hpp"

namespace gpf::test {

inline Eigen::MatrixXd mat2(double a, double b, double c, double d) {
  Eigen::MatrixXd m(2, 2);
  m << a, b, c, d;
  return m;
}

inline Eigen::VectorXd vec2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

inline Eigen::VectorXd vec3(double a, double b, double c) {
  Eigen::VectorXd v(3);
  v << a, b, c;
  return v;
}

// Test-only determinant by recursive cofactor expansion, independent of any
// library decomposition.
inline double cofactor_det(const Eigen::MatrixXd& m) {
  const Eigen::Index n = m.rows();
  if (n == 1) return m(0, 0);
  double det = 0.0;
  double sign = 1.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::MatrixXd minor(n - 1, n - 1);
    for (Eigen::Index i = 1; i < n; ++i) {
      Eigen::Index col = 0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == k) continue;
        minor(i - 1, col++) = m(i, j);
      }
    }
    det += sign * m(0, k) * cofactor_det(minor);
    sign = -sign;
  }
  return det;
}

inline double eval_poly(const Eigen::VectorXd& coeff, double x) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < coeff.size(); ++i) acc = acc * x + coeff(i);
  return acc;
}

}  // namespace gpf::test
