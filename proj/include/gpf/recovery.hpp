#pragma once

#include <Eigen/Dense>
#include <map>
#include <vector>

#include "gpf/gaussian.hpp"
#include "gpf/identity_checks.hpp"
#include "gpf/linalg.hpp"

namespace gpf {

// Inputs for affine recovery: n+1 source means whose differences from the
// first form a basis, the n+1 image means, and the common image covariance.
struct AffineRecoveryInput {
  std::vector<Eigen::VectorXd> thetas;
  std::vector<Eigen::VectorXd> phis;
  SpdMatrix psi;

  AffineRecoveryInput(std::vector<Eigen::VectorXd> t,
                      std::vector<Eigen::VectorXd> p, SpdMatrix ps);
  Eigen::Index dim() const { return psi.dim(); }
};

// Reconstructs the affine map x |-> phi0 + B^{-1} A (x - theta0) from the
// stacked difference rows A and Psi^{-1}-weighted image difference rows B.
AffineMap recover_affine(const AffineRecoveryInput& input);

// The orthogonal alignment U with U(theta_j - theta0) = Psi^{-1/2}(phi_j -
// phi0): exists iff the two Gram matrices agree, which is the data-level
// form of the Mahalanobis identity. Solved exactly through the polar factor
// of the cross-Gram matrix. Throws NoIsometryError on Gram mismatch.
OrthogonalMatrix isometry_certificate(const AffineRecoveryInput& input,
                                      double gram_tol = 1e-6);

// Affine recovery for a non-identity source covariance: whiten the source
// means by Sigma^{-1/2}, recover, and return the map in original coordinates.
AffineMap whiten_and_recover(const std::vector<Eigen::VectorXd>& thetas,
                             const std::vector<Eigen::VectorXd>& phis,
                             const SpdMatrix& sigma, const SpdMatrix& psi);

struct PairedDataset {
  Eigen::MatrixXd xs;   // rows are source points
  Eigen::MatrixXd txs;  // corresponding transformed points
};

// Inputs for piecewise recovery: the n probing covariances I + eps_j u_j u_j',
// paired samples drawn from each N(0, Sigma_j), and paired samples from N(0, I).
struct PiecewiseRecoveryInput {
  std::vector<SpdMatrix> sigmas;
  std::vector<PairedDataset> rank_one_datasets;
  PairedDataset identity_pairs;
};

struct RecoveryOptions {
  double tol_eps = 0.1;          // allowed |eps_hat - eps|
  double null_guard = 1e-6;      // discard pairs with |u_j' x| below this
  double holdout_fraction = 0.2; // trailing share of identity pairs held out
  double tol_rank_floor = 1e-6;
  // Statistical rank-one tolerance: max(floor, rank_noise_factor*sqrt(n/N)).
  double rank_noise_factor = 10.0;
  double residual_median_bound = 1e-2;  // median r <= bound * median |x|
  double holdout_rel_err = 1e-2;
  double holdout_pass_fraction = 0.99;
};

struct RecoveryDiagnostics {
  DeviationQuantiles residual;
  double median_x_norm;
  std::map<std::vector<int>, long> sign_cell_counts;
  double holdout_ok_fraction;
  long holdout_count;
  long retained_count;
  long discarded_count;
  double tol_rank_used;
};

struct PiecewiseRecovery {
  OrthogonalMatrix u;
  OrthogonalMatrix v;
  Eigen::MatrixXd u_dirs;  // rows: extracted u_j'
  Eigen::MatrixXd v_hat;   // rows: estimated v_j'
  Eigen::VectorXd eps_hat;
  std::vector<SignMatrix> sample_signs;        // per retained calibration pair
  std::vector<Eigen::Index> retained_indices;  // into the calibration block
  RecoveryDiagnostics diagnostics;
};

// Recovery pipeline: estimate each image covariance, extract its rank-one
// perturbation, assemble the row matrices, assign per-sample signs from the
// component ratios, and orthogonalize through polar decompositions. Errors:
// NotInFamilyError (rank-one extraction or eps agreement fails),
// EstimationFailureError (estimated row matrix singular),
// ModelMismatchError (residual or held-out reproduction contract violated).
PiecewiseRecovery recover_piecewise(const PiecewiseRecoveryInput& input,
                                    const RecoveryOptions& options = {});

namespace detail {
// One calibration step: signs s_j = sign((v_j' y) / (u_j' x)) and the
// residual |C y - s (A x)|; empty result when some |u_j' x| < guard.
struct SignStep {
  bool retained;
  Eigen::VectorXi signs;
  double residual;
};
SignStep sign_step(const Eigen::MatrixXd& a_rows, const Eigen::MatrixXd& c_rows,
                   const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                   double guard);
}  // namespace detail

}  // namespace gpf
