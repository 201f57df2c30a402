#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "gpf/gaussian.hpp"
#include "test_helpers.hpp"

using namespace gpf;
using test::mat2;
using test::vec2;

TEST_SUITE_BEGIN("gaussian");

namespace {

GaussianMeasure standard(Eigen::Index n) {
  return GaussianMeasure(Eigen::VectorXd::Zero(n),
                         SpdMatrix(Eigen::MatrixXd::Identity(n, n)));
}

}  // namespace

TEST_CASE("log density at the mode of the standard normal") {
  const GaussianMeasure g = standard(1);
  CHECK(log_density(g, Eigen::VectorXd::Zero(1)) ==
        doctest::Approx(-0.9189385332046727).epsilon(1e-12));
}

TEST_CASE("log density one Mahalanobis unit out") {
  const GaussianMeasure g(Eigen::VectorXd::Zero(2), SpdMatrix(mat2(4, 0, 0, 1)));
  const double expected =
      -std::log(2.0 * 3.14159265358979323846) - 0.5 * std::log(4.0) - 0.5;
  CHECK(log_density(g, vec2(2.0, 0.0)) ==
        doctest::Approx(expected).epsilon(1e-12));
  CHECK_THROWS_AS(log_density(g, Eigen::VectorXd::Zero(3)), DimensionError);
}

TEST_CASE("density matches a quadrature-normalized oracle in one dimension") {
  NormalStream rng(8001);
  const double theta = rng.next();
  const double var = 0.5 + rng.uniform();
  const GaussianMeasure g(Eigen::VectorXd::Constant(1, theta),
                          SpdMatrix(Eigen::MatrixXd::Constant(1, 1, var)));
  const double sigma = std::sqrt(var);

  // Trapezoid normalization of the unnormalized kernel over [-10s, 10s].
  const int nodes = 10001;
  const double lo = theta - 10.0 * sigma;
  const double hi = theta + 10.0 * sigma;
  const double h = (hi - lo) / (nodes - 1);
  double integral = 0.0;
  const auto kernel = [&](double x) {
    return std::exp(-0.5 * (x - theta) * (x - theta) / var);
  };
  for (int i = 0; i < nodes; ++i) {
    const double w = (i == 0 || i == nodes - 1) ? 0.5 : 1.0;
    integral += w * kernel(lo + i * h);
  }
  integral *= h;

  const double x = theta + 0.7 * sigma;
  const double oracle = kernel(x) / integral;
  const double ours = std::exp(log_density(g, Eigen::VectorXd::Constant(1, x)));
  CHECK(std::abs(ours - oracle) <= 1e-8 * oracle);
}

TEST_CASE("density integrates to one in one dimension") {
  const GaussianMeasure g(Eigen::VectorXd::Constant(1, 0.3),
                          SpdMatrix(Eigen::MatrixXd::Constant(1, 1, 2.25)));
  const double sigma = 1.5;
  const int nodes = 10000;
  const double lo = 0.3 - 10.0 * sigma;
  const double hi = 0.3 + 10.0 * sigma;
  const double h = (hi - lo) / (nodes - 1);
  double integral = 0.0;
  for (int i = 0; i < nodes; ++i) {
    const double w = (i == 0 || i == nodes - 1) ? 0.5 : 1.0;
    integral += w * std::exp(log_density(g, Eigen::VectorXd::Constant(1, lo + i * h)));
  }
  integral *= h;
  CHECK(std::abs(integral - 1.0) <= 1e-6);
}

TEST_CASE("sampling is deterministic and hits the CLT bands") {
  const GaussianMeasure g = standard(2);
  const Eigen::MatrixXd a = sample(g, 100000, 42);
  const Eigen::MatrixXd b = sample(g, 100000, 42);
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);  // bit-identical

  const Eigen::RowVectorXd mean = a.colwise().mean();
  CHECK(std::abs(mean(0)) <= 0.02);
  CHECK(std::abs(mean(1)) <= 0.02);

  const Eigen::MatrixXd single = sample(g, 1, 7);
  CHECK(single.rows() == 1);
  CHECK(single.cols() == 2);
}

TEST_CASE("sampling recovers a shifted anisotropic mean") {
  const GaussianMeasure g(vec2(5.0, -3.0), SpdMatrix(mat2(2.0, 0.4, 0.4, 1.0)));
  const Eigen::MatrixXd xs = sample(g, 100000, 4242);
  const Eigen::RowVectorXd mean = xs.colwise().mean();
  CHECK(std::abs(mean(0) - 5.0) <= 0.05);
  CHECK(std::abs(mean(1) + 3.0) <= 0.05);

  const Eigen::MatrixXd centered = xs.rowwise() - mean;
  const Eigen::MatrixXd cov = centered.transpose() * centered / (xs.rows() - 1.0);
  CHECK((cov - g.cov().matrix()).cwiseAbs().maxCoeff() <= 0.05);
}

TEST_CASE("affine pushforward of simple maps") {
  const GaussianMeasure g = standard(2);
  const AffineMap doubling(2.0 * Eigen::MatrixXd::Identity(2, 2), vec2(1.0, 0.0));
  const GaussianMeasure pushed = affine_pushforward(g, doubling);
  CHECK((pushed.mean() - vec2(1.0, 0.0)).norm() <= 1e-14);
  CHECK((pushed.cov().matrix() - 4.0 * Eigen::MatrixXd::Identity(2, 2))
            .cwiseAbs()
            .maxCoeff() <= 1e-14);

  NormalStream rng(8002);
  const OrthogonalMatrix q = random_orthogonal(2, rng);
  const GaussianMeasure rotated =
      affine_pushforward(g, AffineMap(q.matrix(), Eigen::VectorXd::Zero(2)));
  CHECK((rotated.cov().matrix() - Eigen::MatrixXd::Identity(2, 2))
            .cwiseAbs()
            .maxCoeff() <= 1e-12);
}

TEST_CASE("affine pushforward matches the Monte-Carlo image") {
  NormalStream rng(8003);
  const GaussianMeasure g(rng.vector(3), random_spd(3, rng, 0.5, 2.0));
  const AffineMap m(random_nonsingular(3, rng, 0.5, 2.0), rng.vector(3));
  const GaussianMeasure exact = affine_pushforward(g, m);
  CHECK((exact.cov().matrix() -
         m.linear() * g.cov().matrix() * m.linear().transpose())
            .cwiseAbs()
            .maxCoeff() <= 1e-12);

  const Eigen::MatrixXd ys = apply_rows(m, sample(g, 100000, 8003));
  const Eigen::RowVectorXd mean = ys.colwise().mean();
  CHECK((mean.transpose() - exact.mean()).cwiseAbs().maxCoeff() <= 0.05);
  const Eigen::MatrixXd centered = ys.rowwise() - mean;
  const Eigen::MatrixXd cov = centered.transpose() * centered / (ys.rows() - 1.0);
  CHECK((cov - exact.cov().matrix()).cwiseAbs().maxCoeff() <= 0.05);
}

TEST_CASE("whitening sends the measure to the standard normal") {
  const GaussianMeasure simple(vec2(1.0, 1.0), SpdMatrix(mat2(4, 0, 0, 9)));
  const AffineMap w = whitening_map(simple);
  CHECK((w.apply(vec2(3.0, 4.0)) - vec2(1.0, 1.0)).norm() <= 1e-12);

  NormalStream rng(8004);
  const GaussianMeasure g(rng.vector(4), random_spd(4, rng, 0.4, 2.5));
  const GaussianMeasure white = affine_pushforward(g, whitening_map(g));
  CHECK(white.mean().cwiseAbs().maxCoeff() <= 1e-10);
  CHECK((white.cov().matrix() - Eigen::MatrixXd::Identity(4, 4))
            .cwiseAbs()
            .maxCoeff() <= 1e-10);

  const AffineMap id = whitening_map(standard(3));
  CHECK((id.linear() - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() <=
        1e-13);
  CHECK(id.shift().cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("pushing forward twice equals pushing the composition") {
  NormalStream rng(8005);
  const GaussianMeasure g(rng.vector(3), random_spd(3, rng, 0.5, 2.0));
  const AffineMap m1(random_nonsingular(3, rng, 0.5, 2.0), rng.vector(3));
  const AffineMap m2(random_nonsingular(3, rng, 0.5, 2.0), rng.vector(3));
  const GaussianMeasure two_steps =
      affine_pushforward(affine_pushforward(g, m1), m2);
  const GaussianMeasure one_step = affine_pushforward(g, compose(m2, m1));
  CHECK((two_steps.mean() - one_step.mean()).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK((two_steps.cov().matrix() - one_step.cov().matrix())
            .cwiseAbs()
            .maxCoeff() <= 1e-10);
}

TEST_CASE("affine map rejects singular linear parts") {
  Eigen::MatrixXd singular(2, 2);
  singular << 1.0, 2.0, 2.0, 4.0;
  CHECK_THROWS_AS(AffineMap(singular, vec2(0, 0)), SingularMatrixError);
}

TEST_SUITE_END();
