#include "force/solver.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include "force/rng.hpp"

namespace force {

namespace {

Matrix dense_F(const SpectralShiftd& F) { return F.dense(); }

double ratio_min(const Matrix& slack, const Matrix& Fd) {
  return (slack.array() / Fd.array()).minCoeff();
}

}  // namespace

double lambda_min_F(const Matrix& U, const SpectralShiftd& F) {
  if (!F.positive_definite()) throw std::invalid_argument("lambda_min_F: F not positive definite");
  if (U.rows() != F.dim || U.cols() != F.dim)
    throw std::invalid_argument("lambda_min_F: dimension mismatch");
  return min_eigenvalue(F.inv_sqrt().conjugate(U).eval());
}

double lambda_min_F_augmented(const AugmentedIterate& it, const SpectralShiftd& F) {
  const Matrix Fd = dense_F(F);
  return std::min(lambda_min_F(it.V, F), ratio_min(it.slack, Fd));
}

Matrix radial_projection(const Matrix& U, const SpectralShiftd& F) {
  const double lam = lambda_min_F(U, F);
  if (lam >= 1.0 - 1e-12)
    throw std::invalid_argument("radial_projection: lambda_min_F(U) >= 1, ray through F is degenerate");
  const Matrix Fd = dense_F(F);
  return Fd + (U - Fd) / (1.0 - lam);
}

AugmentedIterate radial_projection_augmented(const AugmentedIterate& it, const SpectralShiftd& F,
                                             double* lambda_out) {
  const double lam = lambda_min_F_augmented(it, F);
  if (lambda_out) *lambda_out = lam;
  if (lam >= 1.0 - 1e-12)
    throw std::invalid_argument("radial_projection: union lambda >= 1, ray through F is degenerate");
  const Matrix Fd = dense_F(F);
  const double scale = 1.0 / (1.0 - lam);
  AugmentedIterate out;
  out.V = Fd + (it.V - Fd) * scale;
  out.slack = Fd + (it.slack - Fd) * scale;
  return out;
}

namespace {

// Shared spectral work for objective and gradient: eigendecomposition of the
// conjugated V block plus the slack ratio spectrum, softmax weights over the
// union with a max shift for overflow safety.
struct SpectralWork {
  EigDecomp<double> eig;   // of F^{-1/2} V F^{-1/2}
  Matrix ratios;           // slack ./ F
  double f = 0;
  Vector w_matrix;
  Matrix w_slack;
};

SpectralWork spectral_work(const AugmentedIterate& it, const SpectralShiftd& F, const Matrix& Fd,
                           double mu, bool want_weights) {
  if (mu <= 0) throw std::invalid_argument("smoothed objective: mu > 0 required");
  SpectralWork w;
  w.eig = eig_sym(F.inv_sqrt().conjugate(it.V).eval());
  w.ratios = it.slack.array() / Fd.array();
  if (!w.ratios.allFinite() || !w.eig.values.allFinite())
    throw std::invalid_argument("smoothed objective: non-finite iterate");

  const double shift = std::min(w.eig.values(0), w.ratios.minCoeff());
  const Eigen::ArrayXd em = (-(w.eig.values.array() - shift) / mu).exp();
  const Eigen::ArrayXXd es = (-(w.ratios.array() - shift) / mu).exp();
  const double Z = em.sum() + es.sum();
  w.f = shift - mu * std::log(Z);
  if (want_weights) {
    w.w_matrix = (em / Z).matrix();
    w.w_slack = (es / Z).matrix();
  }
  return w;
}

}  // namespace

double smoothed_objective(const AugmentedIterate& it, const SpectralShiftd& F, double mu) {
  return spectral_work(it, F, dense_F(F), mu, false).f;
}

AugmentedIterate smoothed_gradient(const AugmentedIterate& it, const SpectralShiftd& F, double mu,
                                   double* f_value) {
  const Matrix Fd = dense_F(F);
  SpectralWork w = spectral_work(it, F, Fd, mu, true);
  if (f_value) *f_value = w.f;
  AugmentedIterate g;
  const Matrix inner = w.eig.vectors * w.w_matrix.asDiagonal() * w.eig.vectors.transpose();
  g.V = F.inv_sqrt().conjugate(inner);
  g.V = (g.V + g.V.transpose()) / 2;
  g.slack = w.w_slack.array() / Fd.array();
  g.slack = (g.slack + g.slack.transpose()) / 2;
  return g;
}

ConstraintProjector::ConstraintProjector(const SdpInstance& inst)
    : kind_(inst.kind), d_(inst.dim()), K_(inst.K) {
  Dt_ = inst.objective_matrix();
  row_sums_ = Dt_.rowwise().sum();
  tr_ = Dt_.trace();
  const double dd = double(d_);

  if (kind_ == SdpKind::Fixed) {
    Matrix A(d_ + 2, d_ + 2);
    A.setOnes();
    A.topLeftCorner(d_, d_).diagonal().array() += dd;
    for (Index a = 0; a < d_; ++a) {
      A(a, d_) = 1.0;
      A(a, d_ + 1) = row_sums_(a);
      A(d_, a) = 2.0;
      A(d_ + 1, a) = 2.0 * row_sums_(a);
    }
    A(d_, d_) = dd;
    A(d_, d_ + 1) = tr_;
    A(d_ + 1, d_) = tr_;
    A(d_ + 1, d_ + 1) = Dt_.squaredNorm();
    system_.compute(A);
    degenerate_ = system_.rank() < d_ + 2;
  } else {
    Matrix A(d_ + 1, d_ + 1);
    A.setOnes();
    A.topLeftCorner(d_, d_).diagonal().array() += dd;
    for (Index a = 0; a < d_; ++a) {
      A(a, d_) = row_sums_(a);
      A(d_, a) = 2.0 * row_sums_(a);
    }
    A(d_, d_) = Dt_.squaredNorm();
    system_.compute(A);
    degenerate_ = system_.rank() < d_ + 1;
  }
  if (degenerate_)
    std::cerr << "[force] constraint system is rank-deficient (objective matrix is linearly "
                 "dependent on the equality constraints); using the minimum-norm projection\n";
}

AugmentedIterate ConstraintProjector::project(const AugmentedIterate& g) const {
  if (g.V.rows() != d_ || g.slack.rows() != d_)
    throw std::invalid_argument("ConstraintProjector: dimension mismatch");
  const Matrix M = g.V + g.slack;
  const Vector m_rows = M.rowwise().sum();

  Vector rhs(kind_ == SdpKind::Fixed ? d_ + 2 : d_ + 1);
  rhs.head(d_) = m_rows;
  if (kind_ == SdpKind::Fixed) {
    rhs(d_) = M.trace();
    rhs(d_ + 1) = trace_inner(Dt_, M);
  } else {
    rhs(d_) = trace_inner(Dt_, M);
  }

  const Vector sol = system_.solve(rhs);
  const Vector y = sol.head(d_);
  const double y_T = kind_ == SdpKind::Fixed ? sol(d_) : 0.0;
  const double lam = kind_ == SdpKind::Fixed ? sol(d_ + 1) : sol(d_);

  Matrix V = M;
  V.noalias() -= y * Vector::Ones(d_).transpose();
  V.noalias() -= Vector::Ones(d_) * y.transpose();
  V -= lam * Dt_;
  V.diagonal().array() -= y_T;
  V *= 0.5;
  V = (V + V.transpose()) / 2;
  return {V, V};
}

double ConstraintProjector::constraint_residual(const AugmentedIterate& it, double u0) const {
  double r = (it.V - it.slack).cwiseAbs().maxCoeff();
  r = std::max(r, 2.0 * (it.V.rowwise().sum().array() - 1.0).abs().maxCoeff());
  if (kind_ == SdpKind::Fixed) r = std::max(r, std::abs(it.V.trace() - double(K_)));
  r = std::max(r, std::abs(trace_inner(Dt_, it.V) - u0));
  return r;
}

double accel_next_lambda(double lambda) {
  return 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * lambda * lambda));
}

PgdOutcome accelerated_pgd(const AugmentedIterate& start, const SpectralShiftd& F,
                           const ConstraintProjector& proj, const PgdOptions& opt) {
  const double inv_norm = F.inverse_norm();
  const double step = opt.step > 0 ? opt.step : opt.mu / (inv_norm * inv_norm);
  const Matrix Fd = dense_F(F);
  const double u0 = trace_inner(proj.objective_matrix(), start.V);

  PgdOutcome out;
  AugmentedIterate U = start;   // stepped sequence
  AugmentedIterate V = start;   // gradient evaluation point
  double lambda = 1.0;
  double f_prev = -std::numeric_limits<double>::infinity();
  std::vector<double> fhist;
  fhist.reserve(size_t(std::min<long>(opt.T, 1 << 20)));
  const auto t_start = std::chrono::steady_clock::now();

  for (long t = 1; t <= opt.T; ++t) {
    double f = 0;
    AugmentedIterate grad = smoothed_gradient(V, F, opt.mu, &f);
    AugmentedIterate pg = proj.project(grad);

    AugmentedIterate U_next;
    U_next.V = V.V + step * pg.V;
    U_next.slack = V.slack + step * pg.slack;

    if (opt.restart && f < f_prev) {
      lambda = 1.0;
      V = U_next;
      ++out.restarts;
    } else {
      const double lambda_next = accel_next_lambda(lambda);
      const double gamma = (1.0 - lambda) / lambda_next;
      AugmentedIterate V_next;
      V_next.V = (1.0 - gamma) * U_next.V + gamma * U.V;
      V_next.slack = (1.0 - gamma) * U_next.slack + gamma * U.slack;
      lambda = lambda_next;
      V = std::move(V_next);
    }
    f_prev = f;
    U = std::move(U_next);
    out.iterations = t;
    fhist.push_back(f);

    // keep the iterate exactly on the affine set; drift accumulates slowly
    const double resid = proj.constraint_residual(V, u0);
    const double scale = 1.0 + std::abs(u0);
    if (resid > 1e-9 * scale) {
      AugmentedIterate delta{V.V - start.V, V.slack - start.slack};
      AugmentedIterate pd = proj.project(delta);
      V.V = start.V + pd.V;
      V.slack = start.slack + pd.slack;
      if (proj.constraint_residual(V, u0) > opt.constraint_tol * scale)
        throw std::runtime_error("accelerated_pgd: constraint renormalization failed");
    }

    if (opt.trace) {
      const double lam_u = lambda_min_F_augmented(U, F);
      const double obj_p = -(opt.trace_dF + (opt.trace_u0 - opt.trace_dF) / (1.0 - lam_u));
      const double ms = std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - t_start).count();
      (*opt.trace) << t << ',' << f << ',' << obj_p << ',' << resid << ',' << out.restarts << ','
                   << ms << '\n';
    }

    if (opt.hook_period > 0 && opt.hook && t % opt.hook_period == 0) {
      if (opt.hook(t, U)) {
        out.hook_stopped = true;
        break;
      }
    }

    const long s = opt.stop_window;
    if (s > 0 && long(fhist.size()) > s) {
      const double base = fhist[fhist.size() - 1 - size_t(s)];
      double best = -std::numeric_limits<double>::infinity();
      for (size_t u = fhist.size() - size_t(s); u < fhist.size(); ++u)
        best = std::max(best, fhist[u]);
      if ((best - base) / std::max(std::abs(base), 1e-12) < opt.stop_delta) {
        out.early_stopped = true;
        break;
      }
    }
  }
  out.U = std::move(U);
  return out;
}

namespace {

struct Candidate {
  Partition G;
  double objective;  // <Dt, B(G)>, smaller is better
};

Candidate best_rounding_candidate(const SdpInstance& inst, const Matrix& Dt,
                                  const SolverConfig& config, long* rounding_calls,
                                  Partition* chosen) {
  const Index d = inst.dim();
  std::vector<Partition> candidates;

  if (inst.kind == SdpKind::Fixed) {
    RoundingConfig rc = config.rounding;
    rc.rng_seed = Rng::mix(config.rng_seed, 0x77617273);
    candidates.push_back(kmeanspp_lloyd(inst.D, inst.K, rc));
    *rounding_calls += rc.restarts;
    candidates.push_back(clink(inst.D, inst.K));
    *rounding_calls += 1;
  } else {
    // pick K by scanning the complete-linkage merge path with the penalized
    // objective, then refine with kmeans++ at that K
    const auto path = clink_path(inst.D);
    Index bestK = 1;
    double best = std::numeric_limits<double>::infinity();
    for (Index K = 1; K <= d; ++K) {
      const double obj = trace_inner(Dt, partnership_matrix(path[size_t(K - 1)]));
      if (obj < best) {
        best = obj;
        bestK = K;
      }
    }
    *rounding_calls += 1;
    candidates.push_back(path[size_t(bestK - 1)]);
    RoundingConfig rc = config.rounding;
    rc.rng_seed = Rng::mix(config.rng_seed, 0x77617273);
    candidates.push_back(kmeanspp_lloyd(inst.D, bestK, rc));
    *rounding_calls += rc.restarts;
  }

  Candidate out{candidates.front(), std::numeric_limits<double>::infinity()};
  for (auto& G : candidates) {
    const double obj = trace_inner(Dt, partnership_matrix(G));
    if (obj < out.objective) out = {std::move(G), obj};
  }
  if (chosen) *chosen = out.G;
  return out;
}

double pick_mu(const SdpInstance& inst, const SolverConfig& config) {
  if (config.mu > 0) return config.mu;
  if (config.epsilon <= 0 || config.epsilon >= 1)
    throw std::invalid_argument("SolverConfig: epsilon must be in (0,1)");
  return config.epsilon / (6.0 * std::log(double(std::max<Index>(inst.dim(), 2))));
}

long pick_budget(const SdpInstance& inst, const SpectralShiftd& F, const SolverConfig& config) {
  if (config.T_max > 0) return config.T_max;
  const double d = double(inst.dim());
  const double R = std::sqrt(2.0) * d;
  const double inv2 = F.inverse_norm() * F.inverse_norm();
  const double T = 2.0 * std::sqrt(std::log(std::max(d, 2.0))) * inv2 * R / config.epsilon;
  return std::min<long>(long(std::ceil(T)), 500000);
}

}  // namespace

AugmentedIterate subscheme_start(const Matrix& candidate, const SpectralShiftd& F) {
  AugmentedIterate cand{candidate, candidate};
  const double lam = lambda_min_F_augmented(cand, F);
  if (lam >= 1.0) throw std::invalid_argument("subscheme_start: candidate coincides with F");
  const double t = (5.0 / 6.0) / (1.0 - lam);
  const Matrix Fd = dense_F(F);
  AugmentedIterate out;
  out.V = Fd + t * (candidate - Fd);
  out.slack = out.V;
  return out;
}

AugmentedIterate smoothed_subscheme(const AugmentedIterate& U0, const SdpInstance& inst,
                                    const SpectralShiftd& F, const ConstraintProjector& proj,
                                    const SolverConfig& config, long* iterations,
                                    std::vector<double>* levels) {
  const Index d = inst.dim();
  const Matrix& Dt = proj.objective_matrix();
  const double dF = trace_inner(Dt, dense_F(F));
  const double mu = 1.0 / (6.0 * std::log(double(std::max<Index>(d, 2))));
  const double inv2 = F.inverse_norm() * F.inverse_norm();
  const double R = std::sqrt(2.0) * double(d);
  const long T_inner = std::min<long>(
      long(std::ceil(2.0 * std::sqrt(std::log(double(std::max<Index>(d, 2)))) * inv2 * R)), 20000);

  // outer cap from a crude lower bound on the optimal value
  const double u_lb = -Dt.norm() * double(inst.kind == SdpKind::Fixed ? inst.K : d);
  double u_l = trace_inner(Dt, U0.V);
  if (u_l >= dF) throw std::invalid_argument("smoothed_subscheme: start does not improve on F");
  const long outer_cap =
      2 + long(std::ceil(std::log(std::max((dF - u_lb) / (dF - u_l), 1.0)) / std::log(1.25)));

  AugmentedIterate U = U0;
  const Matrix Fd = dense_F(F);
  if (levels) levels->push_back(u_l);
  for (long l = 0; l <= outer_cap; ++l) {
    PgdOptions opt;
    opt.mu = mu;
    opt.T = T_inner;
    opt.stop_window = config.stop_window;
    opt.stop_delta = config.stop_delta;
    opt.restart = config.restart;
    opt.constraint_tol = config.constraint_tol;
    PgdOutcome run = accelerated_pgd(U, F, proj, opt);
    if (iterations) *iterations += run.iterations;
    const double lam = lambda_min_F_augmented(run.U, F);
    if (lam <= 1.0 / 3.0) return run.U;
    const double t = (5.0 / 6.0) / (1.0 - lam);
    U.V = Fd + t * (run.U.V - Fd);
    U.slack = Fd + t * (run.U.slack - Fd);
    u_l = trace_inner(Dt, U.V);
    if (levels) levels->push_back(u_l);
  }
  throw std::runtime_error("smoothed_subscheme: outer iteration cap exceeded");
}

WarmStartResult warm_start(const SdpInstance& inst, const SpectralShiftd& F,
                           const ConstraintProjector& proj, const SolverConfig& config) {
  const Index d = inst.dim();
  const Matrix& Dt = proj.objective_matrix();
  const Matrix Fd = dense_F(F);
  const double dF = trace_inner(Dt, Fd);

  WarmStartResult out;
  Candidate cand = best_rounding_candidate(inst, Dt, config, &out.rounding_calls,
                                           &out.initial_rounding);

  const double margin = 1e-12 * (1.0 + std::abs(dF));
  if (config.use_subscheme || cand.objective >= dF - margin) {
    if (cand.objective >= dF - margin)
      throw std::runtime_error("warm_start: no rounding improves on the strictly feasible start");
    AugmentedIterate U0 = subscheme_start(partnership_matrix(cand.G), F);
    out.it = smoothed_subscheme(U0, inst, F, proj, config, &out.iterations);
    out.u0 = trace_inner(Dt, out.it.V);
    return out;
  }

  const Matrix B = partnership_matrix(cand.G);
  AugmentedIterate U0;
  U0.V = (1.0 / double(d)) * B + (double(d - 1) / double(d)) * Fd;
  U0.slack = U0.V;

  PgdOptions opt;
  opt.mu = pick_mu(inst, config);
  opt.T = std::max(1, config.warmup_iters);
  opt.restart = config.restart;
  opt.constraint_tol = config.constraint_tol;
  PgdOutcome run = accelerated_pgd(U0, F, proj, opt);
  out.iterations = run.iterations;

  double lam = 0;
  AugmentedIterate U1 = radial_projection_augmented(run.U, F, &lam);
  out.it = std::move(U1);
  out.u0 = trace_inner(Dt, out.it.V);
  if (out.u0 >= dF - margin) {
    // the heuristic failed to produce a usable level; fall back
    AugmentedIterate S0 = subscheme_start(B, F);
    out.it = smoothed_subscheme(S0, inst, F, proj, config, &out.iterations);
    out.u0 = trace_inner(Dt, out.it.V);
  }
  return out;
}

namespace {

SolveResult run_solver(const SdpInstance& inst, const SpectralShiftd& F,
                       const SolverConfig& config, bool certify, RoundingOracle rounder,
                       CertificateOracle certifier) {
  if (!F.positive_definite()) throw std::invalid_argument("solver: F must be positive definite");
  if (F.dim != inst.dim()) throw std::invalid_argument("solver: F dimension mismatch");

  ConstraintProjector proj(inst);
  const Matrix& Dt = proj.objective_matrix();
  const double dF = trace_inner(Dt, dense_F(F));

  SolveResult result;
  WarmStartResult ws = warm_start(inst, F, proj, config);
  result.iterations += ws.iterations;
  result.rounding_calls += ws.rounding_calls;

  if (!rounder) {
    rounder = [&inst, &config](const Matrix& U, long* calls) {
      RoundingConfig rc = config.rounding;
      rc.rng_seed = Rng::mix(config.rng_seed, 0x726f756e64);
      const Index K = inst.kind == SdpKind::Fixed ? inst.K : select_K_trace(U);
      if (calls) *calls += rc.restarts;
      return kmeanspp_lloyd(U, K, rc);
    };
  }
  if (!certifier) {
    certifier = [&inst, &config](const Partition& G) {
      if (inst.kind == SdpKind::Fixed)
        return certificate_search_fixed(inst.D, G, Vector::Zero(inst.dim()), 1,
                                        CertSearchMode::Direct, config.cert_tol);
      return dual_candidate_adaptive(inst.D, G, inst.kappa, config.cert_tol);
    };
  }

  std::ofstream trace_file;
  if (!config.trace_path.empty()) {
    trace_file.open(config.trace_path);
    trace_file << "iter,f_mu,primal_obj_projected,constraint_residual,restarts,wall_ms\n";
  }

  PgdOptions opt;
  opt.mu = pick_mu(inst, config);
  opt.T = pick_budget(inst, F, config);
  opt.stop_window = config.stop_window;
  opt.stop_delta = config.stop_delta;
  opt.restart = config.restart;
  opt.constraint_tol = config.constraint_tol;
  if (trace_file.is_open()) {
    opt.trace = &trace_file;
    opt.trace_dF = dF;
    opt.trace_u0 = ws.u0;
  }

  std::optional<DualCertificate> found_cert;
  std::optional<Partition> found_G;
  Matrix certified_U;
  if (certify) {
    opt.hook_period = std::max(1, config.cert_period);
    opt.hook = [&](long, const AugmentedIterate& U) {
      AugmentedIterate P = radial_projection_augmented(U, F);
      Partition G = rounder(P.V, &result.rounding_calls);
      DualCertificate cert = certifier(G);
      if (!cert.feasible) return false;
      const double dual = dual_objective(inst, cert);
      const double primal = primal_objective(inst, partnership_matrix(G));
      if (std::abs(dual - primal) > config.cert_tol * (1.0 + std::abs(dual))) return false;
      found_cert = std::move(cert);
      found_G = std::move(G);
      certified_U = std::move(P.V);
      return true;
    };
  }

  PgdOutcome run = accelerated_pgd(ws.it, F, proj, opt);
  result.iterations += run.iterations;
  result.restarts = run.restarts;

  if (run.hook_stopped && found_cert) {
    result.U_final = std::move(certified_U);
    result.certificate = std::move(found_cert);
    result.rounded = std::move(found_G);
    result.terminated_by = TerminationReason::Certificate;
  } else {
    AugmentedIterate P = radial_projection_augmented(run.U, F);
    result.U_final = std::move(P.V);
    result.rounded = rounder(result.U_final, &result.rounding_calls);
    result.terminated_by =
        run.early_stopped ? TerminationReason::EarlyStop : TerminationReason::IterationCap;
  }
  result.objective = primal_objective(inst, result.U_final);
  return result;
}

}  // namespace

SolveResult solve_sdp(const SdpInstance& inst, const SpectralShiftd& F,
                      const SolverConfig& config) {
  return run_solver(inst, F, config, false, {}, {});
}

SolveResult force_solve(const SdpInstance& inst, const SpectralShiftd& F,
                        const SolverConfig& config, RoundingOracle rounder,
                        CertificateOracle certifier) {
  return run_solver(inst, F, config, true, std::move(rounder), std::move(certifier));
}

}  // namespace force
