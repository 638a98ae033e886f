#include "force/problem.hpp"

#include <cmath>
#include <stdexcept>

#include "force/certificate.hpp"

namespace force {

Matrix SdpInstance::objective_matrix() const {
  if (kind == SdpKind::Fixed) return D;
  Matrix M = D;
  M.diagonal().array() += kappa;
  return M;
}

SdpInstance SdpInstance::fixed(Matrix D, Index K) {
  const Index d = D.rows();
  if (d < 2 || D.cols() != d) throw std::invalid_argument("SdpInstance: D must be square, d >= 2");
  if (!D.allFinite()) throw std::invalid_argument("SdpInstance: non-finite entries in D");
  if (K <= 1 || K >= d)
    throw std::invalid_argument("SdpInstance: fixed kind requires 1 < K < d "
                                "(the strictly feasible family degenerates otherwise)");
  SdpInstance inst;
  inst.D = symmetrize(D);
  inst.kind = SdpKind::Fixed;
  inst.K = K;
  return inst;
}

SdpInstance SdpInstance::adaptive(Matrix D, double kappa_hat) {
  const Index d = D.rows();
  if (d < 1 || D.cols() != d) throw std::invalid_argument("SdpInstance: D must be square");
  if (!D.allFinite() || !std::isfinite(kappa_hat))
    throw std::invalid_argument("SdpInstance: non-finite input");
  SdpInstance inst;
  inst.D = symmetrize(D);
  inst.kind = SdpKind::Adaptive;
  inst.kappa = kappa_hat;
  return inst;
}

SpectralShiftd feasible_start_fixed(Index d, Index K) {
  if (K <= 1 || K >= d)
    throw std::invalid_argument("feasible_start_fixed: requires 1 < K < d");
  const double dd = double(d);
  return {d, double(K - 1) / (dd - 1), double(d - K) / (dd * dd - dd)};
}

SpectralShiftd feasible_start_adaptive(Index d) {
  if (d < 1) throw std::invalid_argument("feasible_start_adaptive: d >= 1 required");
  return {d, 0.5, 0.5 / double(d)};
}

SpectralShiftd feasible_start(const SdpInstance& inst) {
  return inst.kind == SdpKind::Fixed ? feasible_start_fixed(inst.dim(), inst.K)
                                     : feasible_start_adaptive(inst.dim());
}

Matrix distance_matrix_points(const Matrix& X) {
  const Index d = X.rows();
  if (d < 2) throw std::invalid_argument("distance_matrix_points: need at least 2 points");
  const Vector sq = X.rowwise().squaredNorm();
  Matrix D = sq.replicate(1, d) + sq.transpose().replicate(d, 1) - 2.0 * (X * X.transpose());
  D = D.cwiseMax(0.0);
  D.diagonal().setZero();
  return symmetrize(D, 1e-6);
}

Matrix difference_matrix_variables(const Matrix& Sigma_hat, const Vector& Gamma_hat) {
  if (Sigma_hat.rows() != Sigma_hat.cols() || Sigma_hat.rows() != Gamma_hat.size())
    throw std::invalid_argument("difference_matrix_variables: dimension mismatch");
  Matrix D = -Sigma_hat;
  D.diagonal() += Gamma_hat;
  return D;
}

double primal_objective(const SdpInstance& inst, const Matrix& U) {
  if (U.rows() != inst.dim() || U.cols() != inst.dim())
    throw std::invalid_argument("primal_objective: dimension mismatch");
  double v = -trace_inner(inst.D, U);
  if (inst.kind == SdpKind::Adaptive) v -= inst.kappa * U.trace();
  return v;
}

double dual_objective(const SdpInstance& inst, const DualCertificate& cert) {
  if (cert.y.size() != inst.dim())
    throw std::invalid_argument("dual_objective: dimension mismatch");
  double v = 2.0 * cert.y.sum();
  if (inst.kind == SdpKind::Fixed) v += double(inst.K) * cert.y_T;
  return v;
}

FeasibilityReport check_feasibility(const SdpInstance& inst, const Matrix& U, double tol) {
  if (U.rows() != inst.dim() || U.cols() != inst.dim())
    throw std::invalid_argument("check_feasibility: dimension mismatch");
  FeasibilityReport r;
  r.min_entry = U.minCoeff();
  r.max_row_sum_err = (U.rowwise().sum().array() - 1.0).abs().maxCoeff();
  r.trace_err = inst.kind == SdpKind::Fixed ? std::abs(U.trace() - double(inst.K)) : 0.0;
  r.lambda_min = min_eigenvalue(((U + U.transpose()) / 2).eval());
  r.feasible = r.min_entry >= -tol && r.max_row_sum_err <= tol && r.trace_err <= tol &&
               r.lambda_min >= -tol;
  return r;
}

}  // namespace force
