#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "force/certificate.hpp"
#include "force/matlin.hpp"
#include "force/partition.hpp"
#include "force/problem.hpp"
#include "force/rounding.hpp"

namespace force {

// Iterate of the eigenvalue-maximization form. The slack matrix stores the
// d^2 diagonal slack variables arranged as a d x d symmetric matrix; position
// (a, b) pairs with (b, a) in every constraint, so symmetric storage is exact.
struct AugmentedIterate {
  Matrix V;
  Matrix slack;
};

struct SolverConfig {
  double epsilon = 0.05;    // relative accuracy target, in (0,1)
  double mu = 0.0;          // smoothing parameter; 0 selects epsilon / (6 log d)
  long T_max = 0;           // iteration cap; 0 selects the budget 2 sqrt(log d) ||F^-1||^2 R / eps
  int stop_window = 100;    // early-stop window s
  double stop_delta = 1e-4; // early-stop threshold delta
  int cert_period = 25;     // certificate search frequency h
  int warmup_iters = 30;    // iterations N of the warm-start heuristic
  bool restart = true;      // adaptive restart of the acceleration sequences
  bool use_subscheme = false;  // replace the warm-start heuristic by the subscheme
  double cert_tol = 1e-7;
  double constraint_tol = 1e-5;  // iterate drift beyond this is an error
  std::uint64_t rng_seed = 0;
  RoundingConfig rounding;
  CertSearchMode cert_mode = CertSearchMode::Direct;
  std::string trace_path;   // optional progress CSV
};

enum class TerminationReason { Certificate, EarlyStop, IterationCap };

struct SolveResult {
  Matrix U_final;           // radially projected final iterate
  double objective = 0;     // primal objective at U_final
  long iterations = 0;
  TerminationReason terminated_by = TerminationReason::IterationCap;
  std::optional<DualCertificate> certificate;
  std::optional<Partition> rounded;
  long rounding_calls = 0;  // Lloyd runs consumed (for best-of-N comparisons)
  long restarts = 0;
};

// lambda_min of F^{-1/2} U F^{-1/2}, using the structured inverse square root.
double lambda_min_F(const Matrix& U, const SpectralShiftd& F);

// Union spectrum minimum: the matrix block together with slack_ab / F_ab.
double lambda_min_F_augmented(const AugmentedIterate& it, const SpectralShiftd& F);

// P_F(U) = F + (U - F) / (1 - lambda_min_F(U)); the ray from F through U hits
// the psd cone boundary there. Requires lambda_min_F(U) < 1.
Matrix radial_projection(const Matrix& U, const SpectralShiftd& F);

// Augmented version; slack transforms by the same ray map, which keeps the
// projected upper block entrywise nonnegative when the slack ratio is active.
AugmentedIterate radial_projection_augmented(const AugmentedIterate& it, const SpectralShiftd& F,
                                             double* lambda_out = nullptr);

// Softmin of the union spectrum: -mu log sum exp(-lambda_j / mu), max-shifted.
double smoothed_objective(const AugmentedIterate& it, const SpectralShiftd& F, double mu);

// Gradient of the smoothed objective (ascent direction). Softmax weights are
// normalized jointly over matrix eigenvalues and slack ratios; the V block is
// F^{-1/2} Q diag(w) Q^T F^{-1/2} and each slack entry is w_ab / F_ab.
AugmentedIterate smoothed_gradient(const AugmentedIterate& it, const SpectralShiftd& F, double mu,
                                   double* f_value = nullptr);

// Projection onto the orthogonal complement of the constraint set of the
// level-set problem. The d+2 (fixed) or d+1 (adaptive) multiplier system
// depends only on the instance and is factored once.
class ConstraintProjector {
 public:
  explicit ConstraintProjector(const SdpInstance& inst);

  AugmentedIterate project(const AugmentedIterate& g) const;

  // residual of the affine constraints at an iterate on level u0
  double constraint_residual(const AugmentedIterate& it, double u0) const;

  bool degenerate() const { return degenerate_; }
  const Matrix& objective_matrix() const { return Dt_; }

 private:
  SdpKind kind_;
  Index d_ = 0;
  Index K_ = 0;
  Matrix Dt_;        // D or D + kappa I
  Vector row_sums_;  // row sums of Dt
  double tr_ = 0;    // trace of Dt
  Eigen::CompleteOrthogonalDecomposition<Matrix> system_;
  bool degenerate_ = false;
};

struct PgdOptions {
  double mu = 0.1;
  long T = 1000;
  double step = 0;          // 0 selects mu / ||F^{-1}||_2^2
  int stop_window = 0;      // 0 disables early stopping
  double stop_delta = 0;
  bool restart = true;
  double constraint_tol = 1e-5;
  long hook_period = 0;     // 0 disables the hook
  std::function<bool(long iter, const AugmentedIterate& U)> hook;  // true stops the run
  std::ostream* trace = nullptr;
  double trace_dF = 0;      // <Dt, F>, for the projected-objective trace column
  double trace_u0 = 0;
};

struct PgdOutcome {
  AugmentedIterate U;
  long iterations = 0;
  long restarts = 0;
  bool early_stopped = false;
  bool hook_stopped = false;
};

// Accelerated projected gradient ascent on the smoothed objective over the
// level set through `start`, with adaptive restart and windowed early stop.
PgdOutcome accelerated_pgd(const AugmentedIterate& start, const SpectralShiftd& F,
                           const ConstraintProjector& proj, const PgdOptions& opt);

struct WarmStartResult {
  AugmentedIterate it;
  double u0 = 0;             // level <Dt, it>
  Partition initial_rounding;
  long rounding_calls = 0;
  long iterations = 0;
};

// U_0 = (1/d) B(K(D,K)) + (d-1)/d F, a few accelerated steps, then radial
// projection. Falls back to the subscheme when no rounding beats F.
WarmStartResult warm_start(const SdpInstance& inst, const SpectralShiftd& F,
                           const ConstraintProjector& proj, const SolverConfig& config);

// Level-shifting subscheme: starting from an iterate with union lambda 1/6,
// repeat fixed-budget inner runs, pushing the level 5/6 of the way to the
// cone boundary until the inner run cannot raise the union lambda above 1/3.
AugmentedIterate smoothed_subscheme(const AugmentedIterate& U0, const SdpInstance& inst,
                                    const SpectralShiftd& F, const ConstraintProjector& proj,
                                    const SolverConfig& config, long* iterations = nullptr,
                                    std::vector<double>* levels = nullptr);

// Line-search helper: the point on [F, candidate] with union lambda exactly 1/6.
AugmentedIterate subscheme_start(const Matrix& candidate, const SpectralShiftd& F);

using RoundingOracle = std::function<Partition(const Matrix& U_projected, long* calls)>;
using CertificateOracle = std::function<DualCertificate(const Partition& G)>;

// Primal-only solve (no certificate search).
SolveResult solve_sdp(const SdpInstance& inst, const SpectralShiftd& F, const SolverConfig& config);

// Full loop: primal iteration with periodic rounding and certificate search;
// terminates early when a feasible certificate matches the rounded value.
// Empty oracles select kmeans++/Lloyd rounding (with trace-based K selection
// for adaptive instances) and the direct certificate search.
SolveResult force_solve(const SdpInstance& inst, const SpectralShiftd& F,
                        const SolverConfig& config, RoundingOracle rounder = {},
                        CertificateOracle certifier = {});

// Acceleration auxiliary sequences: lambda_{t+1} = (1 + sqrt(1+4 lambda_t^2))/2,
// gamma_t = (1 - lambda_t)/lambda_{t+1}.
double accel_next_lambda(double lambda);

}  // namespace force
