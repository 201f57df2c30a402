#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "gpf/gaussian.hpp"
#include "gpf/linalg.hpp"
#include "gpf/partition.hpp"

namespace gpf {

// Piecewise sign-flip orthogonal map
//
//   T(x) = V s(x) U x,   s(x) the sign pattern of Ux in the product partition,
//
// optionally conjugated by SPD square roots on either side,
//
//   T(x) = P^{1/2} V s U S^{-1/2} x,
//
// where S^{1/2} = pre_whiten and P^{1/2} = post_color. Pure transforms
// (no conjugation) are isometries piece by piece and preserve N(0, I).
class PiecewiseSignOrthogonal {
 public:
  PiecewiseSignOrthogonal(OrthogonalMatrix u, OrthogonalMatrix v,
                          SymmetricProductPartition partition,
                          std::optional<SpdMatrix> pre_whiten = std::nullopt,
                          std::optional<SpdMatrix> post_color = std::nullopt);

  Eigen::Index dim() const { return u_.dim(); }
  const OrthogonalMatrix& u() const { return u_; }
  const OrthogonalMatrix& v() const { return v_; }
  const SymmetricProductPartition& partition() const { return partition_; }
  const std::optional<SpdMatrix>& pre_whiten() const { return pre_whiten_; }
  const std::optional<SpdMatrix>& post_color() const { return post_color_; }
  bool is_pure() const { return !pre_whiten_ && !post_color_; }

  // Cached inverses of the conjugation square roots (identity when unset).
  const Eigen::MatrixXd& pre_whiten_inv() const { return pre_inv_; }
  const Eigen::MatrixXd& post_color_inv() const { return post_inv_; }

 private:
  OrthogonalMatrix u_;
  OrthogonalMatrix v_;
  SymmetricProductPartition partition_;
  std::optional<SpdMatrix> pre_whiten_;
  std::optional<SpdMatrix> post_color_;
  Eigen::MatrixXd pre_inv_;
  Eigen::MatrixXd post_inv_;
};

// Sign pattern of the (already whitened) point: s_j = +1 iff |(Ux)_j| lies in
// coordinate j's plus set, endpoints counting as plus.
SignMatrix sign_of(const PiecewiseSignOrthogonal& t, const Eigen::VectorXd& x);

Eigen::VectorXd apply(const PiecewiseSignOrthogonal& t, const Eigen::VectorXd& x);

// Exact a.e. inverse: |V'y| carries the same magnitudes as Ux, so the sign
// pattern is recovered from the same interval lists and undone.
Eigen::VectorXd apply_inverse(const PiecewiseSignOrthogonal& t,
                              const Eigen::VectorXd& y);

// Batched row-wise application; rows are points.
Eigen::MatrixXd apply_rows(const PiecewiseSignOrthogonal& t,
                           const Eigen::MatrixXd& pts);
Eigen::MatrixXd apply_inverse_rows(const PiecewiseSignOrthogonal& t,
                                   const Eigen::MatrixXd& pts);

// A claimed pushforward: source measure and its asserted image.
struct PushforwardClaim {
  GaussianMeasure source;
  GaussianMeasure image;

  PushforwardClaim(GaussianMeasure s, GaussianMeasure i);
};

// All sign patterns whose product cell has positive Lebesgue measure.
std::vector<SignMatrix> positive_measure_signs(
    const SymmetricProductPartition& partition);
std::vector<SignMatrix> positive_measure_signs(const PiecewiseSignOrthogonal& t);

// Exact Gaussian image of a centered source whose (whitened, U-conjugated)
// covariance commutes with every positive-measure sign pattern. Throws
// UnsupportedMeanError for a nonzero mean and NotPushforwardClosedError,
// naming the offending sign pair, when the conjugates disagree.
GaussianMeasure exact_pushforward(const PiecewiseSignOrthogonal& t,
                                  const GaussianMeasure& source,
                                  double tol = 1e-10);

// Convenience: push a list of covariances (as centered Gaussians) through t.
std::vector<GaussianMeasure> exact_pushforwards(
    const PiecewiseSignOrthogonal& t, const std::vector<SpdMatrix>& sigmas,
    double tol = 1e-10);

// Image cell of one positive-measure sign pattern: V applied to the product
// of per-coordinate symmetric sets, described through |t|-interval lists.
struct ImageCell {
  SignMatrix signs;
  // abs_intervals[j] = F_{s_j} intersected with [0, inf).
  std::vector<std::vector<Interval>> abs_intervals;
};

struct ImageCellReport {
  std::vector<ImageCell> cells;
  long points_checked = 0;
  long overlaps = 0;       // points landing in more than one cell
  long misses = 0;         // points landing in no cell
  long endpoint_hits = 0;  // points skipped for sitting on an endpoint
};

// Describes {V s U (E_s)} for positive-measure s and verifies by Monte-Carlo
// membership counting that the image cells tile R^n up to null sets.
ImageCellReport image_cells(const PiecewiseSignOrthogonal& t,
                            long mc_points = 100000, std::uint64_t seed = 1);

}  // namespace gpf
