#include "force/rounding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "force/rng.hpp"

namespace force {

namespace {

struct LloydRun {
  std::vector<Index> labels;
  double cost = std::numeric_limits<double>::infinity();
};

// One kmeans++ seeding plus Lloyd iteration on the rows of M.
LloydRun lloyd_once(const Matrix& M, Index K, int max_iters, Rng rng) {
  const Index d = M.rows();
  Matrix centers(K, M.cols());

  // kmeans++ seeding
  std::vector<double> mindist(size_t(d), std::numeric_limits<double>::infinity());
  Index first = Index(rng.uniform_int(0, d - 1));
  centers.row(0) = M.row(first);
  for (Index k = 1; k < K; ++k) {
    double total = 0;
    for (Index i = 0; i < d; ++i) {
      const double dist = (M.row(i) - centers.row(k - 1)).squaredNorm();
      mindist[size_t(i)] = std::min(mindist[size_t(i)], dist);
      total += mindist[size_t(i)];
    }
    Index pick = 0;
    if (total > 0) {
      const double target = rng.uniform() * total;
      double acc = 0;
      for (Index i = 0; i < d; ++i) {
        acc += mindist[size_t(i)];
        if (acc >= target) { pick = i; break; }
        pick = i;
      }
    } else {
      pick = Index(rng.uniform_int(0, d - 1));
    }
    centers.row(k) = M.row(pick);
  }

  std::vector<Index> labels(size_t(d), 0);
  std::vector<Index> counts(size_t(K), 0);
  for (int it = 0; it < max_iters; ++it) {
    bool changed = (it == 0);
    for (Index i = 0; i < d; ++i) {
      Index best = 0;
      double bestd = (M.row(i) - centers.row(0)).squaredNorm();
      for (Index k = 1; k < K; ++k) {
        const double dist = (M.row(i) - centers.row(k)).squaredNorm();
        if (dist < bestd) { bestd = dist; best = k; }
      }
      if (labels[size_t(i)] != best) { labels[size_t(i)] = best; changed = true; }
    }

    centers.setZero();
    std::fill(counts.begin(), counts.end(), 0);
    for (Index i = 0; i < d; ++i) {
      centers.row(labels[size_t(i)]) += M.row(i);
      ++counts[size_t(labels[size_t(i)])];
    }
    for (Index k = 0; k < K; ++k) {
      if (counts[size_t(k)] > 0) {
        centers.row(k) /= double(counts[size_t(k)]);
      } else {
        // empty cluster: reseed with the point farthest from its own center
        Index far = 0;
        double fard = -1;
        for (Index i = 0; i < d; ++i) {
          const double dist = (M.row(i) - centers.row(labels[size_t(i)])).squaredNorm();
          if (dist > fard) { fard = dist; far = i; }
        }
        centers.row(k) = M.row(far);
        labels[size_t(far)] = k;
        changed = true;
      }
    }
    if (!changed) break;
  }

  LloydRun run;
  run.labels = labels;
  run.cost = 0;
  for (Index i = 0; i < d; ++i)
    run.cost += (M.row(i) - centers.row(labels[size_t(i)])).squaredNorm();
  return run;
}

}  // namespace

Partition kmeanspp_lloyd(const Matrix& M, Index K, const RoundingConfig& config) {
  const Index d = M.rows();
  if (K < 1 || K > d) throw std::invalid_argument("kmeanspp_lloyd: K must be in [1, d]");
  if (config.restarts < 1) throw std::invalid_argument("kmeanspp_lloyd: restarts >= 1");
  if (K == d) return Partition::singletons(d);

  Rng rng(config.rng_seed);
  LloydRun best;
  for (int r = 0; r < config.restarts; ++r) {
    LloydRun run = lloyd_once(M, K, config.max_lloyd_iters, rng.fork(std::uint64_t(r)));
    if (run.cost < best.cost) best = std::move(run);
  }
  // collapse any unused labels so the partition has <= K nonempty groups
  return Partition::from_labels(best.labels);
}

std::vector<Partition> clink_path(const Matrix& M) {
  const Index d = M.rows();
  // complete linkage by Lance-Williams: cluster distance = max pair distance
  Matrix dist(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) dist(i, j) = (M.row(i) - M.row(j)).norm();

  std::vector<std::vector<Index>> clusters(static_cast<size_t>(d));
  for (Index i = 0; i < d; ++i) clusters[size_t(i)] = {i};
  std::vector<bool> alive(size_t(d), true);

  std::vector<Partition> path(static_cast<size_t>(d));
  auto snapshot = [&](Index K) {
    std::vector<std::vector<Index>> groups;
    for (Index i = 0; i < d; ++i)
      if (alive[size_t(i)]) groups.push_back(clusters[size_t(i)]);
    path[size_t(K - 1)] = Partition(std::move(groups), d);
  };
  snapshot(d);

  for (Index step = 0; step < d - 1; ++step) {
    // closest pair; ties resolved by smallest indices
    Index bi = -1, bj = -1;
    double bestd = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < d; ++i) {
      if (!alive[size_t(i)]) continue;
      for (Index j = i + 1; j < d; ++j) {
        if (!alive[size_t(j)]) continue;
        if (dist(i, j) < bestd) { bestd = dist(i, j); bi = i; bj = j; }
      }
    }
    for (Index k = 0; k < d; ++k)
      if (alive[size_t(k)] && k != bi && k != bj)
        dist(bi, k) = dist(k, bi) = std::max(dist(bi, k), dist(bj, k));
    auto& merged = clusters[size_t(bi)];
    merged.insert(merged.end(), clusters[size_t(bj)].begin(), clusters[size_t(bj)].end());
    alive[size_t(bj)] = false;
    snapshot(d - 1 - step);
  }
  return path;
}

Partition clink(const Matrix& M, Index K) {
  const Index d = M.rows();
  if (K < 1 || K > d) throw std::invalid_argument("clink: K must be in [1, d]");
  return clink_path(M)[size_t(K - 1)];
}

Index select_K_trace(const Matrix& U) {
  if (U.rows() != U.cols()) throw std::invalid_argument("select_K_trace: square matrix required");
  const Index d = U.rows();
  const Index K = Index(std::llround(U.trace()));
  return std::clamp(K, Index(1), d);
}

Partition best_of_N(const Matrix& M, const Matrix& D, Index K, int N, std::uint64_t seed,
                    long* calls, const RoundingConfig& base) {
  if (N < 1) throw std::invalid_argument("best_of_N: N >= 1 required");
  Partition best;
  double best_obj = -std::numeric_limits<double>::infinity();
  RoundingConfig cfg = base;
  for (int i = 0; i < N; ++i) {
    cfg.rng_seed = Rng::mix(seed, std::uint64_t(i));
    Partition G = kmeanspp_lloyd(M, K, cfg);
    const double obj = -trace_inner(D, partnership_matrix(G));
    if (calls) *calls += cfg.restarts;
    if (obj > best_obj) {
      best_obj = obj;
      best = std::move(G);
    }
  }
  return best;
}

int metric_d1(const Partition& Ghat, const Partition& Gstar) {
  if (Ghat.d != Gstar.d) throw std::invalid_argument("metric_d1: dimension mismatch");
  return Ghat == Gstar ? 1 : 0;  // groups canonicalized at construction
}

double metric_d2(const Partition& Ghat, const Partition& Gstar) {
  if (Ghat.d != Gstar.d) throw std::invalid_argument("metric_d2: dimension mismatch");
  const auto lab = Gstar.labels();
  double total = 0;
  for (const auto& grp : Ghat.groups) {
    std::vector<Index> overlap(size_t(Gstar.num_groups()), 0);
    for (Index i : grp) ++overlap[size_t(lab[size_t(i)])];
    total += double(*std::max_element(overlap.begin(), overlap.end()));
  }
  return total / double(Ghat.d);
}

}  // namespace force
