#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "force/glatent.hpp"
#include "force/solver.hpp"

namespace force {

// Shared experiment inputs: a generative design evaluated over a seed list.
// Each seed produces one instance; instances may be evaluated in parallel and
// results are reported in seed order, so output is independent of scheduling.
struct ExperimentBase {
  GLatentDesign design;
  Index n = 0;
  std::vector<std::uint64_t> seeds;
  bool K_known = true;
  GammaMode gamma_mode = GammaMode::Oracle;
  SolverConfig solver;
  int threads = 1;
};

// Certificate existence at the planted partition over a noise grid.
struct PhaseSpec {
  ExperimentBase base;
  std::vector<double> gamma_grid;
  bool fixed_kind = true;
  bool adaptive_kind = true;
};

struct PhaseRow {
  Index d = 0, K = 0;
  double rho = 0, gamma = 0;
  Index n = 0;
  std::string kind;
  int seeds = 0;
  double cert_exists_rate = 0;
};

std::vector<PhaseRow> run_phase(const PhaseSpec& spec);
void write_phase_csv(std::ostream& os, const std::vector<PhaseRow>& rows);

// Solver and heuristic comparison on one design.
struct BenchSpec {
  ExperimentBase base;
  std::vector<std::string> algorithms;  // subset of {FORCE, FORCE-P, lloyd_kpp, clink, best_of_N}
  int best_of_N_N = 100;
};

struct BenchRow {
  std::string algorithm;
  Index d = 0, K = 0;
  double rho = 0, gamma = 0;
  Index n = 0;
  double rel_err = 0;
  double d1_rate = 0;
  double d2_mean = 0;
  double converged_rate = 0;
  double wall_ms_mean = 0;  // the one column outside the bit-for-bit contract
};

std::vector<BenchRow> run_bench(const BenchSpec& spec);
void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows);

// Clustering quality of K(M, K) and best-of-N on the raw matrices versus the
// projected iterate, plus the certified-recovery reference row.
struct HeuristicsSpec {
  ExperimentBase base;
  std::vector<double> gamma_grid;
  int reruns = 10;  // repetitions of the randomized rounding per instance
};

struct HeuristicsRow {
  std::string input_matrix;  // sigma_hat | sigma_minus_gamma | iterate | force
  std::string algorithm;     // kpp | best_of_N | force
  double gamma = 0;
  double d1_mean = 0;
  double d2_mean = 0;
};

std::vector<HeuristicsRow> run_heuristics(const HeuristicsSpec& spec);
void write_heuristics_csv(std::ostream& os, const std::vector<HeuristicsRow>& rows);

// Per-seed desk-scale recovery record (solver and certificate on one design);
// backs both the recovery and the adaptive K-selection studies.
struct RecoveryRow {
  std::uint64_t seed = 0;
  int d1 = 0;
  int cert_feasible = 0;
  Index K_selected = 0;
  double forcep_rel_err = 0;
  long force_iterations = 0;
};

std::vector<RecoveryRow> run_recovery(const ExperimentBase& base, bool run_forcep);
void write_recovery_csv(std::ostream& os, const std::vector<RecoveryRow>& rows);

// map [0, count) over up to `threads` workers; deterministic result slots
void parallel_for(int threads, long count, const std::function<void(long)>& fn);

}  // namespace force
