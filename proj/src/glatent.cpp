#include "force/glatent.hpp"

#include <cmath>
#include <stdexcept>

#include "force/certificate.hpp"
#include "force/rng.hpp"

namespace force {

Matrix scale_free_graph(Index K, std::uint64_t seed) {
  if (K < 2) throw std::invalid_argument("scale_free_graph: K >= 2 required");
  Rng rng(seed);
  Matrix W = Matrix::Zero(K, K);
  std::vector<Index> degree(size_t(K), 0);
  W(0, 1) = W(1, 0) = 1;
  degree[0] = degree[1] = 1;
  for (Index s = 2; s < K; ++s) {
    Index total = 0;
    for (Index i = 0; i < s; ++i) total += degree[size_t(i)];
    const double target = rng.uniform() * double(total);
    double acc = 0;
    Index pick = s - 1;
    for (Index i = 0; i < s; ++i) {
      acc += double(degree[size_t(i)]);
      if (acc >= target) { pick = i; break; }
    }
    W(s, pick) = W(pick, s) = 1;
    ++degree[size_t(s)];
    ++degree[size_t(pick)];
  }
  return W;
}

void latent_covariance(const Matrix& W, double rho, Matrix& Theta, Matrix& C) {
  if (W.rows() != W.cols()) throw std::invalid_argument("latent_covariance: W must be square");
  const double lmin = min_eigenvalue(W);
  Theta = rho * W;
  Theta.diagonal().array() += std::abs(lmin) + 0.2;
  const double theta_lmin = min_eigenvalue(Theta);
  if (theta_lmin <= 0)
    throw std::invalid_argument("latent_covariance: shift does not make Theta spd (rho too large)");
  C = Theta.llt().solve(Matrix::Identity(W.rows(), W.rows()));
  C = symmetrize(C, 1e-6);
}

double delta_Cstar(const Matrix& C) {
  const Index K = C.rows();
  if (C.cols() != K || K < 2) throw std::invalid_argument("delta_Cstar: need K >= 2 square input");
  double delta = std::numeric_limits<double>::infinity();
  for (Index j = 0; j < K; ++j)
    for (Index k = j + 1; k < K; ++k)
      delta = std::min(delta, C(j, j) + C(k, k) - 2 * C(j, k));
  return delta;
}

ModelTruth model_truth(const GLatentDesign& design) {
  if (design.K < 2) throw std::invalid_argument("model_truth: K >= 2 required");
  if (design.rho < 0 || design.gamma < 0)
    throw std::invalid_argument("model_truth: rho and gamma must be nonnegative");

  std::vector<Index> sizes = design.group_sizes;
  if (sizes.empty()) {
    sizes.assign(size_t(design.K), design.d / design.K);
    for (Index r = 0; r < design.d % design.K; ++r) ++sizes[size_t(r)];
  }
  Index total = 0;
  for (Index m : sizes) {
    if (m < 3) throw std::invalid_argument("model_truth: group sizes must be >= 3");
    total += m;
  }
  if (Index(sizes.size()) != design.K || total != design.d)
    throw std::invalid_argument("model_truth: group sizes inconsistent with (d, K)");

  std::vector<std::vector<Index>> groups(static_cast<size_t>(design.K));
  Index next = 0;
  for (Index k = 0; k < design.K; ++k)
    for (Index j = 0; j < sizes[size_t(k)]; ++j) groups[size_t(k)].push_back(next++);

  ModelTruth truth;
  truth.Gstar = Partition(std::move(groups), design.d);
  const Matrix W = scale_free_graph(design.K, Rng::mix(design.seed, 0));
  latent_covariance(W, design.rho, truth.Theta, truth.C);
  truth.gamma = design.gamma;
  truth.delta = delta_Cstar(truth.C);
  if (truth.delta <= 0)
    throw std::runtime_error("model_truth: generated design has nonpositive separation");
  return truth;
}

Matrix sample(const GLatentDesign& design, const ModelTruth& truth, Index n) {
  if (n < 1) throw std::invalid_argument("sample: n >= 1 required");
  const Index d = design.d;
  const Index K = design.K;

  Eigen::LLT<Matrix> llt(truth.C);
  Matrix L;
  if (llt.info() == Eigen::Success) {
    L = llt.matrixL();
  } else {
    Matrix jittered = truth.C;
    jittered.diagonal().array() += 1e-12;
    Eigen::LLT<Matrix> retry(jittered);
    if (retry.info() != Eigen::Success)
      throw std::runtime_error("sample: Cholesky of C failed even with jitter");
    L = retry.matrixL();
  }

  Rng rng(Rng::mix(design.seed, 1));
  const double noise_sd = std::sqrt(design.gamma);
  const auto labels = truth.Gstar.labels();
  Matrix X(n, d);
  Vector z(K), lz(K);
  for (Index j = 0; j < n; ++j) {
    for (Index k = 0; k < K; ++k) z(k) = rng.normal();
    lz.noalias() = L * z;
    for (Index a = 0; a < d; ++a)
      X(j, a) = lz(labels[size_t(a)]) + noise_sd * rng.normal();
  }
  return X;
}

Matrix sample_cov(const Matrix& X) {
  const Index n = X.rows();
  if (n < 1) throw std::invalid_argument("sample_cov: empty sample");
  Matrix S = (X.transpose() * X) / double(n);
  return symmetrize(S, 1e-6);
}

namespace {

// Pecok-style diagonal noise estimator. Closeness of columns a, b is judged
// by V(a,b) = max over other pairs (c,e) of the normalized correlation of the
// differences X_a - X_b and X_c - X_e; all values come from the Gram matrix.
Vector pecok_gamma(const Matrix& X) {
  const Index d = X.cols();
  const Index n = X.rows();
  if (d < 3) throw std::invalid_argument("gamma_estimator: pecok mode needs d >= 3");
  const Matrix G = (X.transpose() * X) / double(n);

  auto diff_inner = [&](Index a, Index b, Index c, Index e) {
    return G(a, c) - G(a, e) - G(b, c) + G(b, e);
  };
  auto diff_norm = [&](Index c, Index e) {
    return std::sqrt(std::max(0.0, G(c, c) + G(e, e) - 2 * G(c, e)));
  };

  Vector gamma(d);
  for (Index a = 0; a < d; ++a) {
    double v1 = std::numeric_limits<double>::infinity();
    double v2 = std::numeric_limits<double>::infinity();
    Index b1 = -1, b2 = -1;
    for (Index b = 0; b < d; ++b) {
      if (b == a) continue;
      double vab = 0;
      for (Index c = 0; c < d; ++c) {
        if (c == a || c == b) continue;
        for (Index e = c + 1; e < d; ++e) {
          if (e == a || e == b) continue;
          const double nrm = diff_norm(c, e);
          if (nrm <= 0) continue;  // duplicate columns carry no information
          vab = std::max(vab, std::abs(diff_inner(a, b, c, e)) / nrm);
        }
      }
      if (vab < v1) {
        v2 = v1; b2 = b1;
        v1 = vab; b1 = b;
      } else if (vab < v2) {
        v2 = vab; b2 = b;
      }
    }
    gamma(a) = std::max(0.0, G(a, a) - G(a, b1) - G(a, b2) + G(b1, b2));
  }
  return gamma;
}

}  // namespace

Vector gamma_estimator(const Matrix& X, GammaMode mode, const ModelTruth* truth) {
  if (mode == GammaMode::Oracle) {
    if (!truth) throw std::invalid_argument("gamma_estimator: oracle mode needs model truth");
    return Vector::Constant(X.cols(), truth->gamma);
  }
  if (X.rows() < 2) throw std::invalid_argument("gamma_estimator: n >= 2 required");
  return pecok_gamma(X);
}

GeneratedInstance build_instance(const GLatentDesign& design, Index n, bool K_known,
                                 GammaMode gamma_mode) {
  GeneratedInstance out;
  out.truth = model_truth(design);
  out.X = sample(design, out.truth, n);
  const Matrix Sigma_hat = sample_cov(out.X);
  out.Gamma_hat = gamma_estimator(out.X, gamma_mode, &out.truth);
  Matrix D = difference_matrix_variables(Sigma_hat, out.Gamma_hat);
  if (K_known)
    out.inst = SdpInstance::fixed(std::move(D), design.K);
  else
    out.inst = SdpInstance::adaptive(std::move(D), kappa_hat_rule(out.Gamma_hat, design.d, n));
  return out;
}

}  // namespace force
