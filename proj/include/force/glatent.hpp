#pragma once

#include <cstdint>
#include <vector>

#include "force/matlin.hpp"
#include "force/partition.hpp"
#include "force/problem.hpp"

namespace force {

// Design of a latent-cluster generative model: d observed variables in K
// groups, each group loading on one latent coordinate of Z ~ N(0, C) with
// additive diagonal noise gamma.
struct GLatentDesign {
  Index d = 0;
  Index K = 0;
  double rho = 0.3;
  double gamma = 0.3;
  std::vector<Index> group_sizes;  // empty = balanced
  std::uint64_t seed = 0;
};

struct ModelTruth {
  Partition Gstar;
  Matrix Theta;   // latent precision, K x K spd
  Matrix C;       // latent covariance, Theta^{-1}
  double gamma = 0;
  double delta = 0;  // min_{j<k} C_jj + C_kk - 2 C_jk
};

enum class GammaMode { Oracle, Pecok };

// Preferential-attachment graph on K nodes: a 2-node chain, then each new
// node attaches one edge to an existing node with probability proportional
// to its degree. K-1 edges total.
Matrix scale_free_graph(Index K, std::uint64_t seed);

// Theta = rho*W + (|lambda_min(W)| + 0.2) I, C = Theta^{-1}. Throws if the
// shift fails to make Theta spd (possible for large rho).
void latent_covariance(const Matrix& W, double rho, Matrix& Theta, Matrix& C);

double delta_Cstar(const Matrix& C);

ModelTruth model_truth(const GLatentDesign& design);

// n x d sample matrix X = Z A^T + E, deterministic per (design, n, seed).
Matrix sample(const GLatentDesign& design, const ModelTruth& truth, Index n);

// (1/n) X^T X; the model is mean zero, no centering.
Matrix sample_cov(const Matrix& X);

// Oracle mode returns the true noise diagonal (simulation only). Pecok mode
// is the neighbor-difference estimator: for each variable pick the two
// columns whose difference correlates least with every other column
// difference, and take Gamma_aa = <X_a - X_b1, X_a - X_b2>/n, floored at 0.
Vector gamma_estimator(const Matrix& X, GammaMode mode, const ModelTruth* truth = nullptr);

struct GeneratedInstance {
  SdpInstance inst;
  ModelTruth truth;
  Matrix X;
  Vector Gamma_hat;
};

GeneratedInstance build_instance(const GLatentDesign& design, Index n, bool K_known,
                                 GammaMode gamma_mode);

}  // namespace force
