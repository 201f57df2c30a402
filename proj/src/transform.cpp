#include "gpf/transform.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "gpf/rng.hpp"

namespace gpf {

namespace {

std::string sign_string(const SignMatrix& s) {
  std::ostringstream os;
  os << "(";
  for (Eigen::Index j = 0; j < s.dim(); ++j)
    os << (s[j] > 0 ? "+" : "-") << (j + 1 < s.dim() ? "," : "");
  os << ")";
  return os.str();
}

}  // namespace

PiecewiseSignOrthogonal::PiecewiseSignOrthogonal(
    OrthogonalMatrix u, OrthogonalMatrix v, SymmetricProductPartition partition,
    std::optional<SpdMatrix> pre_whiten, std::optional<SpdMatrix> post_color)
    : u_(std::move(u)),
      v_(std::move(v)),
      partition_(std::move(partition)),
      pre_whiten_(std::move(pre_whiten)),
      post_color_(std::move(post_color)) {
  const Eigen::Index n = u_.dim();
  if (v_.dim() != n || partition_.dim() != n)
    throw DimensionError("PiecewiseSignOrthogonal: U, V and partition disagree");
  if (pre_whiten_ && pre_whiten_->dim() != n)
    throw DimensionError("PiecewiseSignOrthogonal: pre_whiten dimension mismatch");
  if (post_color_ && post_color_->dim() != n)
    throw DimensionError("PiecewiseSignOrthogonal: post_color dimension mismatch");
  pre_inv_ = pre_whiten_ ? pre_whiten_->inverse() : Eigen::MatrixXd::Identity(n, n);
  post_inv_ = post_color_ ? post_color_->inverse() : Eigen::MatrixXd::Identity(n, n);
}

SignMatrix sign_of(const PiecewiseSignOrthogonal& t, const Eigen::VectorXd& x) {
  if (x.size() != t.dim()) throw DimensionError("sign_of: dimension mismatch");
  const Eigen::VectorXd y = t.u().matrix() * x;
  Eigen::VectorXi s(t.dim());
  for (Eigen::Index j = 0; j < t.dim(); ++j) s(j) = t.partition().sign_at(j, y(j));
  return SignMatrix(s);
}

Eigen::VectorXd apply(const PiecewiseSignOrthogonal& t, const Eigen::VectorXd& x) {
  if (x.size() != t.dim()) throw DimensionError("apply: dimension mismatch");
  Eigen::VectorXd w = t.pre_whiten() ? Eigen::VectorXd(t.pre_whiten_inv() * x) : x;
  const Eigen::VectorXd y = t.u().matrix() * w;
  Eigen::VectorXd sy(t.dim());
  for (Eigen::Index j = 0; j < t.dim(); ++j)
    sy(j) = t.partition().sign_at(j, y(j)) > 0 ? y(j) : -y(j);
  Eigen::VectorXd out = t.v().matrix() * sy;
  if (t.post_color()) out = t.post_color()->matrix() * out;
  return out;
}

Eigen::VectorXd apply_inverse(const PiecewiseSignOrthogonal& t,
                              const Eigen::VectorXd& y) {
  if (y.size() != t.dim()) throw DimensionError("apply_inverse: dimension mismatch");
  Eigen::VectorXd z = t.post_color() ? Eigen::VectorXd(t.post_color_inv() * y) : y;
  z = t.v().matrix().transpose() * z;
  // |z_j| equals |(Uw)_j|, so the sign pattern is read off the same lists.
  Eigen::VectorXd sz(t.dim());
  for (Eigen::Index j = 0; j < t.dim(); ++j)
    sz(j) = t.partition().sign_at(j, z(j)) > 0 ? z(j) : -z(j);
  Eigen::VectorXd w = t.u().matrix().transpose() * sz;
  if (t.pre_whiten()) w = t.pre_whiten()->matrix() * w;
  return w;
}

Eigen::MatrixXd apply_rows(const PiecewiseSignOrthogonal& t,
                           const Eigen::MatrixXd& pts) {
  if (pts.cols() != t.dim())
    throw DimensionError("apply_rows: points have " + std::to_string(pts.cols()) +
                         " columns, transform expects " + std::to_string(t.dim()));
  Eigen::MatrixXd y = t.pre_whiten() ? Eigen::MatrixXd(pts * t.pre_whiten_inv())
                                     : pts;
  y = y * t.u().matrix().transpose();
  for (Eigen::Index i = 0; i < y.rows(); ++i)
    for (Eigen::Index j = 0; j < y.cols(); ++j)
      if (t.partition().sign_at(j, y(i, j)) < 0) y(i, j) = -y(i, j);
  y = y * t.v().matrix().transpose();
  if (t.post_color()) y = y * t.post_color()->matrix();
  return y;
}

Eigen::MatrixXd apply_inverse_rows(const PiecewiseSignOrthogonal& t,
                                   const Eigen::MatrixXd& pts) {
  if (pts.cols() != t.dim())
    throw DimensionError("apply_inverse_rows: dimension mismatch");
  Eigen::MatrixXd z = t.post_color() ? Eigen::MatrixXd(pts * t.post_color_inv())
                                     : pts;
  z = z * t.v().matrix();
  for (Eigen::Index i = 0; i < z.rows(); ++i)
    for (Eigen::Index j = 0; j < z.cols(); ++j)
      if (t.partition().sign_at(j, z(i, j)) < 0) z(i, j) = -z(i, j);
  z = z * t.u().matrix();
  if (t.pre_whiten()) z = z * t.pre_whiten()->matrix();
  return z;
}

PushforwardClaim::PushforwardClaim(GaussianMeasure s, GaussianMeasure i)
    : source(std::move(s)), image(std::move(i)) {
  if (source.dim() != image.dim())
    throw DimensionError("PushforwardClaim: source and image dimensions differ");
}

std::vector<SignMatrix> positive_measure_signs(
    const SymmetricProductPartition& partition) {
  const Eigen::Index n = partition.dim();
  if (n > 20)
    throw InvalidArgumentError(
        "positive_measure_signs: sign enumeration capped at n = 20");
  std::vector<std::vector<int>> allowed(static_cast<size_t>(n));
  for (Eigen::Index j = 0; j < n; ++j) {
    if (partition.plus_has_measure(j)) allowed[j].push_back(1);
    if (partition.minus_has_measure(j)) allowed[j].push_back(-1);
  }
  // Odometer over the per-coordinate options; every coordinate has at least
  // one option since an empty plus list makes the minus side cover R.
  std::vector<SignMatrix> out;
  std::vector<size_t> idx(static_cast<size_t>(n), 0);
  while (true) {
    Eigen::VectorXi current(n);
    for (Eigen::Index j = 0; j < n; ++j)
      current(j) = allowed[static_cast<size_t>(j)][idx[static_cast<size_t>(j)]];
    out.emplace_back(current);
    Eigen::Index j = n - 1;
    for (; j >= 0; --j) {
      auto& i = idx[static_cast<size_t>(j)];
      if (++i < allowed[static_cast<size_t>(j)].size()) break;
      i = 0;
    }
    if (j < 0) break;
  }
  return out;
}

std::vector<SignMatrix> positive_measure_signs(const PiecewiseSignOrthogonal& t) {
  return positive_measure_signs(t.partition());
}

GaussianMeasure exact_pushforward(const PiecewiseSignOrthogonal& t,
                                  const GaussianMeasure& source, double tol) {
  if (source.dim() != t.dim())
    throw DimensionError("exact_pushforward: dimension mismatch");
  if (source.mean().cwiseAbs().maxCoeff() > 1e-12)
    throw UnsupportedMeanError(
        "exact_pushforward requires a centered source measure");

  const Eigen::MatrixXd& u = t.u().matrix();
  const Eigen::MatrixXd whitened =
      t.pre_whiten_inv() * source.cov().matrix() * t.pre_whiten_inv();
  const Eigen::MatrixXd conj = u * whitened * u.transpose();

  const auto signs = positive_measure_signs(t);
  const double scale = 1.0 + conj.cwiseAbs().maxCoeff();
  const Eigen::MatrixXd base = signs.front().conjugate(conj);
  for (size_t k = 1; k < signs.size(); ++k) {
    const Eigen::MatrixXd other = signs[k].conjugate(conj);
    const double dev = (other - base).cwiseAbs().maxCoeff();
    if (dev > tol * scale)
      throw NotPushforwardClosedError(
          "covariance is not pushforward-closed: sign conjugates for " +
              sign_string(signs.front()) + " and " + sign_string(signs[k]) +
              " differ by " + std::to_string(dev),
          signs.front().to_vector(), signs[k].to_vector());
  }

  Eigen::MatrixXd psi = t.v().matrix() * base * t.v().matrix().transpose();
  if (t.post_color())
    psi = t.post_color()->matrix() * psi * t.post_color()->matrix();
  return GaussianMeasure(Eigen::VectorXd::Zero(t.dim()), SpdMatrix(psi));
}

std::vector<GaussianMeasure> exact_pushforwards(
    const PiecewiseSignOrthogonal& t, const std::vector<SpdMatrix>& sigmas,
    double tol) {
  std::vector<GaussianMeasure> out;
  out.reserve(sigmas.size());
  for (const auto& sigma : sigmas)
    out.push_back(exact_pushforward(
        t, GaussianMeasure(Eigen::VectorXd::Zero(sigma.dim()), sigma), tol));
  return out;
}

ImageCellReport image_cells(const PiecewiseSignOrthogonal& t, long mc_points,
                            std::uint64_t seed) {
  const Eigen::Index n = t.dim();
  ImageCellReport report;
  for (const auto& s : positive_measure_signs(t)) {
    ImageCell cell{s, {}};
    cell.abs_intervals.reserve(static_cast<size_t>(n));
    for (Eigen::Index j = 0; j < n; ++j)
      cell.abs_intervals.push_back(s[j] > 0 ? t.partition().plus_intervals(j)
                                            : t.partition().minus_intervals(j));
    report.cells.push_back(std::move(cell));
  }

  // Monte-Carlo tiling check: each sampled point must lie in exactly one
  // image cell V F_s. Membership of y in V F_s is tested through z = V'y
  // against the half-open interval lists of F_{s_j}.
  NormalStream stream(seed);
  report.points_checked = mc_points;
  for (long k = 0; k < mc_points; ++k) {
    const Eigen::VectorXd y = stream.vector(n);
    const Eigen::VectorXd z = t.v().matrix().transpose() * y;
    bool on_endpoint = false;
    for (Eigen::Index j = 0; j < n && !on_endpoint; ++j)
      if (t.partition().endpoint_distance(j, z(j)) == 0.0) on_endpoint = true;
    if (on_endpoint) {
      ++report.endpoint_hits;
      continue;
    }
    int containing = 0;
    for (const auto& cell : report.cells) {
      bool inside = true;
      for (Eigen::Index j = 0; j < n && inside; ++j) {
        const double a = std::abs(z(j));
        bool in_abs = false;
        for (const auto& iv : cell.abs_intervals[static_cast<size_t>(j)])
          if (a >= iv.lo && a < iv.hi) {
            in_abs = true;
            break;
          }
        inside = in_abs;
      }
      if (inside) ++containing;
    }
    if (containing == 0) ++report.misses;
    if (containing > 1) ++report.overlaps;
  }
  return report;
}

}  // namespace gpf
