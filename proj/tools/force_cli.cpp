// Command-line driver: solve and certify clustering SDP instances, generate
// synthetic data, and run the experiment families as CSV.

#include <CLI11.hpp>
#include <chrono>
#include <fstream>
#include <iostream>

#include "force/experiments.hpp"
#include "force/io.hpp"
#include "force/rng.hpp"

namespace {

using namespace force;

struct GlobalFlags {
  std::uint64_t seed = 1;
  int threads = 1;
  double tol = 1e-8;
  std::string config_path;
};

// key=value config file, overridden afterwards by explicit flags
void apply_config_file(const std::string& path, SolverConfig& cfg) {
  if (path.empty()) return;
  const KvMap kv = read_kv(path);
  const auto get = [&](const char* k, auto parse, auto& out) {
    if (auto it = kv.find(k); it != kv.end()) out = parse(it->second);
  };
  const auto to_d = [](const std::string& s) { return std::stod(s); };
  const auto to_l = [](const std::string& s) { return std::stol(s); };
  const auto to_i = [](const std::string& s) { return std::stoi(s); };
  get("epsilon", to_d, cfg.epsilon);
  get("mu", to_d, cfg.mu);
  get("tmax", to_l, cfg.T_max);
  get("stop_window", to_i, cfg.stop_window);
  get("stop_delta", to_d, cfg.stop_delta);
  get("cert_period", to_i, cfg.cert_period);
  get("warmup_iters", to_i, cfg.warmup_iters);
  get("cert_tol", to_d, cfg.cert_tol);
  if (auto it = kv.find("restart"); it != kv.end()) cfg.restart = it->second != "off";
  if (auto it = kv.find("cert_mode"); it != kv.end())
    cfg.cert_mode = it->second == "binary" ? CertSearchMode::Binary : CertSearchMode::Direct;
}

std::vector<std::uint64_t> seed_list(std::uint64_t base, int count) {
  std::vector<std::uint64_t> seeds;
  seeds.reserve(size_t(count));
  for (int i = 0; i < count; ++i) seeds.push_back(Rng::mix(base, std::uint64_t(i)));
  return seeds;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open output: " + path);
  return f;
}

int cmd_solve(const GlobalFlags& gf, const std::string& instance_path, const std::string& mode,
              const std::string& out_prefix, double reference, bool has_reference,
              const SolverConfig& cfg_in) {
  SdpInstance inst = read_instance(instance_path);
  const SpectralShiftd F = feasible_start(inst);
  SolverConfig cfg = cfg_in;
  cfg.rng_seed = gf.seed;
  if (!out_prefix.empty()) cfg.trace_path = out_prefix + ".trace.csv";

  const auto t0 = std::chrono::steady_clock::now();
  SolveResult res = mode == "primal-only" ? solve_sdp(inst, F, cfg) : force_solve(inst, F, cfg);
  const double wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

  std::string status;
  switch (res.terminated_by) {
    case TerminationReason::Certificate: status = "certified"; break;
    case TerminationReason::EarlyStop: status = "early_stop"; break;
    case TerminationReason::IterationCap: status = "iteration_cap"; break;
  }

  if (!out_prefix.empty()) {
    if (res.rounded) write_partition(out_prefix + ".partition.txt", *res.rounded);
    if (res.certificate) write_certificate(out_prefix + ".certificate.txt", *res.certificate);
  }

  std::string rel_err;
  if (has_reference) {
    const double value = res.rounded && res.terminated_by == TerminationReason::Certificate
                             ? primal_objective(inst, partnership_matrix(*res.rounded))
                             : res.objective;
    rel_err = format_double(std::abs(value - reference) / std::max(std::abs(reference), 1e-12));
  }
  std::cout << "status=" << status << " objective=" << format_double(res.objective)
            << " iterations=" << res.iterations;
  if (inst.kind == SdpKind::Adaptive)
    std::cout << " K=" << select_K_trace(res.U_final);
  std::cout << " rel_err=" << rel_err << " wall_ms=" << format_double(wall_ms) << "\n";
  return 0;
}

int cmd_certify(const std::string& instance_path, const std::string& partition_path,
                const std::string& mode, Index n, double gamma_inf, const std::string& out_path,
                double tol) {
  SdpInstance inst = read_instance(instance_path);
  Partition G = read_partition(partition_path, inst.dim());
  DualCertificate cert;
  if (inst.kind == SdpKind::Fixed) {
    // the binary-mode interval bound needs the noise scale ||Gamma_hat||_inf
    const CertSearchMode m = mode == "binary" && gamma_inf > 0 ? CertSearchMode::Binary
                                                               : CertSearchMode::Direct;
    cert = certificate_search_fixed(inst.D, G, Vector::Constant(inst.dim(), gamma_inf),
                                    std::max<Index>(n, 1), m, tol);
  } else {
    cert = dual_candidate_adaptive(inst.D, G, inst.kappa, tol);
  }
  const CertificateVerdict verdict = verify_certificate(cert, inst, G, tol);
  if (!out_path.empty()) write_certificate(out_path, cert);
  std::cout << "feasible=" << (cert.feasible ? "true" : "false")
            << " verified=" << (verdict.ok ? "true" : "false")
            << " value=" << format_double(cert.value)
            << " min_cross_yab=" << format_double(cert.min_cross_yab)
            << " min_block_eig=" << format_double(cert.min_block_eig) << "\n";
  return cert.feasible == verdict.ok ? 0 : 2;
}

int cmd_simulate(const GlobalFlags& gf, const std::string& design_path, Index n, bool adaptive,
                 const std::string& gamma_mode, const std::string& out_prefix) {
  GLatentDesign design = read_design(design_path);
  if (design.seed == 0) design.seed = gf.seed;
  const GammaMode gm = gamma_mode == "pecok" ? GammaMode::Pecok : GammaMode::Oracle;
  GeneratedInstance gen = build_instance(design, n, !adaptive, gm);
  write_instance(out_prefix + ".inst", gen.inst);
  write_partition(out_prefix + ".gstar.txt", gen.truth.Gstar);
  write_matrix_csv(out_prefix + ".sample.csv", gen.X);
  std::cout << "d=" << design.d << " K=" << design.K << " n=" << n
            << " delta=" << format_double(gen.truth.delta)
            << " out=" << out_prefix << ".inst\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"first-order certifiably optimal clustering"};
  app.require_subcommand(1);

  GlobalFlags gf;
  app.add_option("--seed", gf.seed, "base RNG seed");
  app.add_option("--threads", gf.threads, "parallel instance evaluation cap");
  app.add_option("--tol", gf.tol, "feasibility tolerance override");
  app.add_option("--config", gf.config_path, "key=value solver config file");

  SolverConfig cfg;
  // config file first, explicit flags override it during parsing
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    try {
      if (arg == "--config" && i + 1 < argc) apply_config_file(argv[i + 1], cfg);
      else if (arg.rfind("--config=", 0) == 0) apply_config_file(arg.substr(9), cfg);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    }
  }
  // solver overrides shared by all subcommands
  auto add_solver_flags = [&](CLI::App* sub) {
    sub->add_option("--epsilon", cfg.epsilon, "relative accuracy target");
    sub->add_option("--mu", cfg.mu, "smoothing parameter (0 = epsilon/(6 log d))");
    sub->add_option("--tmax", cfg.T_max, "iteration cap (0 = theory budget)");
    sub->add_option("--stop-window", cfg.stop_window, "early-stop window");
    sub->add_option("--stop-delta", cfg.stop_delta, "early-stop threshold");
    sub->add_option("--cert-period", cfg.cert_period, "certificate search frequency");
    sub->add_option("--warmup-iters", cfg.warmup_iters, "warm-start iterations");
    sub->add_flag_callback("--no-restart", [&] { cfg.restart = false; },
                           "disable adaptive restart");
    sub->add_flag_callback("--subscheme", [&] { cfg.use_subscheme = true; },
                           "use the level-shifting subscheme instead of the warm start");
  };

  // solve
  std::string instance_path, mode = "certified", out_prefix;
  double reference = 0;
  bool has_reference = false;
  auto* solve = app.add_subcommand("solve", "solve an instance file");
  solve->add_option("instance", instance_path, "instance header file")->required();
  solve->add_option("--mode", mode, "certified | primal-only");
  solve->add_option("--out", out_prefix, "output prefix for partition/certificate/trace");
  solve->add_option("--reference", reference, "reference objective for rel_err")
      ->each([&](const std::string&) { has_reference = true; });
  add_solver_flags(solve);

  // certify
  std::string partition_path, cert_mode = "direct", cert_out;
  Index cert_n = 1;
  double cert_gamma_inf = 0;
  auto* certify = app.add_subcommand("certify", "construct and verify a certificate");
  certify->add_option("instance", instance_path, "instance header file")->required();
  certify->add_option("partition", partition_path, "candidate partition file")->required();
  certify->add_option("--mode", cert_mode, "direct | binary");
  certify->add_option("--n", cert_n, "sample count (binary-mode interval bound)");
  certify->add_option("--gamma-inf", cert_gamma_inf, "noise sup-norm (binary-mode bound)");
  certify->add_option("--out", cert_out, "certificate dump path");

  // simulate
  std::string design_path, gamma_mode = "oracle", sim_out = "instance";
  Index sim_n = 0;
  bool sim_adaptive = false;
  auto* simulate = app.add_subcommand("simulate", "generate an instance from a design file");
  simulate->add_option("design", design_path, "design key=value file")->required();
  simulate->add_option("--n", sim_n, "sample count (default d)");
  simulate->add_flag("--adaptive", sim_adaptive, "emit an adaptive instance");
  simulate->add_option("--gamma-mode", gamma_mode, "oracle | pecok");
  simulate->add_option("--out", sim_out, "output prefix");

  // experiment families
  std::string exp_design_path, exp_out = "out.csv";
  Index exp_n = 0;
  int exp_seeds = 20;
  std::vector<double> gamma_grid;
  std::string kinds = "both";
  auto* phase = app.add_subcommand("phase", "certificate existence over a noise grid");
  phase->add_option("design", exp_design_path)->required();
  phase->add_option("--gammas", gamma_grid, "noise grid")->required();
  phase->add_option("--n", exp_n, "sample count (default d)");
  phase->add_option("--num-seeds", exp_seeds, "instances per grid point");
  phase->add_option("--kinds", kinds, "fixed | adaptive | both");
  phase->add_option("--out", exp_out, "output CSV");

  std::vector<std::string> algos = {"FORCE", "FORCE-P", "lloyd_kpp", "clink", "best_of_N"};
  int bestN = 100;
  auto* bench = app.add_subcommand("bench", "solver and heuristic comparison");
  bench->add_option("design", exp_design_path)->required();
  bench->add_option("--algorithms", algos, "subset to run");
  bench->add_option("--n", exp_n, "sample count (default d)");
  bench->add_option("--num-seeds", exp_seeds, "instances");
  bench->add_option("--best-of-n", bestN, "N for best_of_N");
  bench->add_option("--out", exp_out, "output CSV");
  add_solver_flags(bench);

  int reruns = 10;
  auto* heur = app.add_subcommand("heuristics", "clustering-input comparison");
  heur->add_option("design", exp_design_path)->required();
  heur->add_option("--gammas", gamma_grid, "noise grid")->required();
  heur->add_option("--n", exp_n, "sample count (default d)");
  heur->add_option("--num-seeds", exp_seeds, "instances per grid point");
  heur->add_option("--reruns", reruns, "rounding repetitions per instance");
  heur->add_option("--out", exp_out, "output CSV");
  add_solver_flags(heur);

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return cmd_solve(gf, instance_path, mode, out_prefix, reference,
                                          has_reference, cfg);
    if (certify->parsed())
      return cmd_certify(instance_path, partition_path, cert_mode, cert_n, cert_gamma_inf,
                         cert_out, gf.tol);
    if (simulate->parsed()) {
      GLatentDesign d = read_design(design_path);
      return cmd_simulate(gf, design_path, sim_n > 0 ? sim_n : d.d, sim_adaptive, gamma_mode,
                          sim_out);
    }

    ExperimentBase base;
    base.design = read_design(exp_design_path);
    if (base.design.seed == 0) base.design.seed = gf.seed;
    base.n = exp_n > 0 ? exp_n : base.design.d;
    base.seeds = seed_list(gf.seed, exp_seeds);
    base.solver = cfg;
    base.threads = gf.threads;

    if (phase->parsed()) {
      PhaseSpec spec;
      spec.base = base;
      spec.gamma_grid = gamma_grid;
      spec.fixed_kind = kinds != "adaptive";
      spec.adaptive_kind = kinds != "fixed";
      auto rows = run_phase(spec);
      auto f = open_output(exp_out);
      write_phase_csv(f, rows);
      return 0;
    }
    if (bench->parsed()) {
      BenchSpec spec;
      spec.base = base;
      spec.algorithms = algos;
      spec.best_of_N_N = bestN;
      auto rows = run_bench(spec);
      auto f = open_output(exp_out);
      write_bench_csv(f, rows);
      return 0;
    }
    if (heur->parsed()) {
      HeuristicsSpec spec;
      spec.base = base;
      spec.gamma_grid = gamma_grid;
      spec.reruns = reruns;
      auto rows = run_heuristics(spec);
      auto f = open_output(exp_out);
      write_heuristics_csv(f, rows);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
