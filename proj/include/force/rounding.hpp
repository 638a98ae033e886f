#pragma once

#include <cstdint>

#include "force/matlin.hpp"
#include "force/partition.hpp"

namespace force {

enum class RoundingMethod { LloydKmeanspp, Clink };

struct RoundingConfig {
  RoundingMethod method = RoundingMethod::LloydKmeanspp;
  int restarts = 5;
  int max_lloyd_iters = 100;
  std::uint64_t rng_seed = 0;
};

// K(M, K): rows of M are d points in d-space; kmeans++ seeding followed by
// Lloyd iterations to an assignment fixpoint (or the iteration cap), best of
// config.restarts runs by within-cluster cost. Deterministic per seed.
Partition kmeanspp_lloyd(const Matrix& M, Index K, const RoundingConfig& config);

// Complete-linkage agglomerative clustering on row distances, cut at K.
Partition clink(const Matrix& M, Index K);

// Whole merge path: partitions for every K in [1, d]; path[K-1] has K groups.
std::vector<Partition> clink_path(const Matrix& M);

// K = round(tr(U)) clamped to [1, d]; half rounds away from zero.
Index select_K_trace(const Matrix& U);

// Runs kmeanspp_lloyd N times on nested seed streams and returns the
// partition maximizing <-D, B(G)>. `calls` (optional) accumulates the number
// of Lloyd runs performed.
Partition best_of_N(const Matrix& M, const Matrix& D, Index K, int N, std::uint64_t seed,
                    long* calls = nullptr, const RoundingConfig& base = RoundingConfig{});

// Exact-recovery indicator, invariant to group relabeling.
int metric_d1(const Partition& Ghat, const Partition& Gstar);

// (1/d) sum_i max_j |Ghat_i intersect Gstar_j|.
double metric_d2(const Partition& Ghat, const Partition& Gstar);

}  // namespace force
