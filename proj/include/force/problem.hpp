#pragma once

#include <optional>
#include <string>
#include <vector>

#include "force/matlin.hpp"
#include "force/partition.hpp"

namespace force {

enum class SdpKind { Fixed, Adaptive };

struct DualCertificate;  // certificate.hpp

// A clustering SDP instance: maximize <-D, U> over U >= 0, U1 = 1, U psd,
// with either tr(U) = K (fixed) or a trace penalty kappa_hat (adaptive).
struct SdpInstance {
  Matrix D;
  SdpKind kind = SdpKind::Fixed;
  Index K = 0;            // fixed kind only
  double kappa = 0.0;     // adaptive kind only

  Index dim() const { return D.rows(); }

  // Objective matrix of the equivalent minimization: D (fixed) or D + kappa*I.
  Matrix objective_matrix() const;

  static SdpInstance fixed(Matrix D, Index K);
  static SdpInstance adaptive(Matrix D, double kappa_hat);
};

// F_{d,K} = (K-1)/(d-1) I + (d-K)/(d^2-d) 11^T, strictly feasible for the
// fixed-K problem with ||F^{-1}||_2 = (d-1)/(K-1). Requires 1 < K < d.
SpectralShiftd feasible_start_fixed(Index d, Index K);

// F = 1/2 I + 1/(2d) 11^T, strictly feasible for the adaptive problem with
// eigenvalues in [1/2, 1].
SpectralShiftd feasible_start_adaptive(Index d);

SpectralShiftd feasible_start(const SdpInstance& inst);

// D_ij = ||x_i - x_j||^2 for points given as rows of X.
Matrix distance_matrix_points(const Matrix& X);

// D = diag(gamma_hat) - Sigma_hat.
Matrix difference_matrix_variables(const Matrix& Sigma_hat, const Vector& Gamma_hat);

// <-D, U> (fixed) or <-D - kappa*I, U> (adaptive).
double primal_objective(const SdpInstance& inst, const Matrix& U);

// 2*sum(y_a) + K*y_T (fixed) or 2*sum(y_a) (adaptive).
double dual_objective(const SdpInstance& inst, const DualCertificate& cert);

struct FeasibilityReport {
  double min_entry = 0;        // entrywise nonnegativity
  double max_row_sum_err = 0;  // max |row sum - 1|
  double trace_err = 0;        // |tr - K|, fixed kind only (0 otherwise)
  double lambda_min = 0;
  bool feasible = false;
};

FeasibilityReport check_feasibility(const SdpInstance& inst, const Matrix& U,
                                    double tol = 1e-8);

}  // namespace force
