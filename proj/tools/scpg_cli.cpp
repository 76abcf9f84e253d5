// Experiment harness: instance generation, single solver runs, baseline
// comparisons, certificate validation, and the count-bound Monte Carlo.
// A JSON config file supplies defaults; command-line flags override it.

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "scpg/analysis.hpp"
#include "scpg/cubic.hpp"
#include "scpg/experiment.hpp"
#include "scpg/linalg.hpp"
#include "scpg/rng.hpp"
#include "scpg/solver.hpp"

namespace {

using nlohmann::json;
using namespace scpg;

std::string default_out_dir() {
  const char* env = std::getenv("SCPG_OUT_DIR");
  return env && *env ? env : ".";
}

std::string join_path(const std::string& dir, const std::string& name) {
  if (dir.empty() || dir == ".") return name;
  return dir.back() == '/' ? dir + name : dir + "/" + name;
}

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("--config", "cannot open " + path);
  json j;
  in >> j;
  return j;
}

// Config values fill in only the flags the user did not pass.
template <typename T>
void config_default(const json& cfg, const char* key, CLI::App* cmd, const std::string& flag,
                    T& dst) {
  if (cfg.contains(key) && cmd->count(flag) == 0) dst = cfg.at(key).get<T>();
}

struct InstanceFlags {
  int n = 2000;
  int m = -1;  // -1 mirrors n; ignored when nonconvex
  bool nonconvex = false;
  double density = 0.0;
  double cubic_weight = 1.0;
  double ridge = 0.0;
  std::uint64_t seed = 0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--n", n, "problem dimension");
    cmd->add_option("--m", m, "rows of B in A = B^T B (default n)");
    cmd->add_flag("--nonconvex", nonconvex, "use A = C + C^T instead of a Gram matrix");
    cmd->add_option("--density", density, "nonzeros fraction per row (<= 0 picks 10/n)");
    cmd->add_option("--M", cubic_weight, "cubic regularization weight");
    cmd->add_option("--ridge", ridge, "ridge added to A");
    cmd->add_option("--seed", seed, "instance seed");
  }

  void apply_config(const json& cfg, CLI::App* cmd) {
    config_default(cfg, "n", cmd, "--n", n);
    config_default(cfg, "m", cmd, "--m", m);
    config_default(cfg, "nonconvex", cmd, "--nonconvex", nonconvex);
    config_default(cfg, "density", cmd, "--density", density);
    config_default(cfg, "M", cmd, "--M", cubic_weight);
    config_default(cfg, "ridge", cmd, "--ridge", ridge);
    config_default(cfg, "seed", cmd, "--seed", seed);
  }

  InstanceSpec spec() const {
    InstanceSpec s;
    s.n = n;
    if (nonconvex)
      s.m.reset();
    else
      s.m = m < 0 ? n : m;
    s.density = density;
    s.cubic_weight = cubic_weight;
    s.ridge = ridge;
    s.seed = seed;
    return s;
  }
};

StepConstantRule::Mode parse_step_mode(const std::string& name) {
  if (name == "convex") return StepConstantRule::Mode::ConvexAlongSubspaces;
  if (name == "general") return StepConstantRule::Mode::General;
  if (name == "practical") return StepConstantRule::Mode::PracticalCurvature;
  throw CLI::ValidationError("--step-rule", "expected convex|general|practical");
}

int cmd_generate(const InstanceFlags& flags, const std::string& out_dir,
                 const std::string& out_name) {
  const InstanceSpec spec = flags.spec();
  const CubicQuadraticInstance inst = generate_instance(spec);
  const std::string path =
      join_path(out_dir, out_name.empty() ? "instance.json" : out_name);
  write_text_file(path, instance_to_json(inst, spec));
  std::cout << "wrote " << path << " (n=" << inst.dimension()
            << ", nnz=" << inst.a().nonzeros() << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SCPG benchmark and certificate harness"};
  app.require_subcommand(1);
  // lets --config/--out appear after the subcommand name
  app.fallthrough();

  std::string config_path;
  app.add_option("--config", config_path, "JSON file with default option values");
  std::string out_dir = default_out_dir();
  app.add_option("--out", out_dir, "output directory (env SCPG_OUT_DIR)");

  // generate
  auto* gen = app.add_subcommand("generate", "emit a testbed instance as JSON");
  InstanceFlags gen_inst;
  gen_inst.attach(gen);
  std::string gen_name;
  gen->add_option("--name", gen_name, "output file name");

  // run
  auto* run_cmd = app.add_subcommand("run", "run one method on one instance");
  InstanceFlags run_inst;
  run_inst.attach(run_cmd);
  std::string run_method = "scpg";
  int run_p = 0;
  std::string run_sketch = "orthonormal";
  std::string run_step = "practical";
  double run_eta = 1e-3;
  double run_tol = 1e-2;
  long run_max_iter = 200000;
  long run_t_align = 10;
  std::uint64_t run_solver_seed = 0;
  bool run_solver_seed_set = false;
  run_cmd->add_option("--method", run_method, "scpg|carmon-duchi|nesterov");
  run_cmd->add_option("--p", run_p, "subspace dimension (0 picks ceil(sqrt(n)))");
  run_cmd->add_option("--sketch", run_sketch,
                      "block|orthonormal|gaussian-jlt|s-hashing:<s>");
  run_cmd->add_option("--step-rule", run_step, "convex|general|practical");
  run_cmd->add_option("--eta", run_eta, "relative descent margin for the step rule");
  run_cmd->add_option("--tol", run_tol, "gradient norm stopping tolerance");
  run_cmd->add_option("--max-iter", run_max_iter, "iteration cap");
  run_cmd->add_option("--t-align", run_t_align, "telemetry period (full gradients)");
  run_cmd->add_option("--solver-seed", run_solver_seed, "sketch stream seed")
      ->each([&](const std::string&) { run_solver_seed_set = true; });

  // compare
  auto* cmp = app.add_subcommand("compare", "run all three methods over seeds");
  InstanceFlags cmp_inst;
  cmp_inst.attach(cmp);
  int cmp_p = 0;
  std::string cmp_sketch = "orthonormal";
  double cmp_tol = 1e-2;
  long cmp_max_iter = 200000;
  int cmp_seeds = 5;
  cmp->add_option("--p", cmp_p, "subspace dimension (0 picks ceil(sqrt(n)))");
  cmp->add_option("--sketch", cmp_sketch, "block|orthonormal|gaussian-jlt|s-hashing:<s>");
  cmp->add_option("--tol", cmp_tol, "gradient norm stopping tolerance");
  cmp->add_option("--max-iter", cmp_max_iter, "iteration cap");
  cmp->add_option("--seeds", cmp_seeds, "number of repetitions (seeds base..base+r-1)");

  // certify
  auto* cert = app.add_subcommand("certify", "validate every convergence certificate");
  InstanceFlags cert_inst;
  cert_inst.attach(cert);
  int cert_p = 45;
  double cert_beta = 0.5;
  double cert_delta = 0.1;
  double cert_tol = 1e-2;
  long cert_max_iter = 40000;
  int cert_seeds = 5;
  long cert_trials = 20000;
  long cert_grid = 1000;
  double cert_ridge_kl = 1.0;
  cert->add_option("--p", cert_p, "subspace dimension for the theory runs");
  cert->add_option("--beta", cert_beta, "count-bound slack parameter");
  cert->add_option("--delta", cert_delta, "alignment failure probability");
  cert->add_option("--tol", cert_tol, "gradient norm stopping tolerance");
  cert->add_option("--max-iter", cert_max_iter, "iteration cap per theory run");
  cert->add_option("--seeds", cert_seeds, "number of theory-run repetitions");
  cert->add_option("--trials", cert_trials, "Monte Carlo trials");
  cert->add_option("--grid", cert_grid, "scalar inequality grid resolution");
  cert->add_option("--ridge-kl", cert_ridge_kl, "ridge for the linear-rate instance");

  // mc-align
  auto* mc = app.add_subcommand("mc-align", "Monte Carlo check of the count bound");
  double mc_beta = 0.5;
  double mc_delta = 0.1;
  long mc_k = 100;
  long mc_trials = 100000;
  std::uint64_t mc_seed = 0;
  mc->add_option("--beta", mc_beta, "count-bound slack parameter");
  mc->add_option("--delta", mc_delta, "alignment failure probability");
  mc->add_option("--k", mc_k, "iteration horizon K");
  mc->add_option("--trials", mc_trials, "Monte Carlo trials");
  mc->add_option("--seed", mc_seed, "trial stream seed");

  CLI11_PARSE(app, argc, argv);

  try {
    json cfg = json::object();
    if (!config_path.empty()) cfg = load_config(config_path);
    if (cfg.contains("out") && app.count("--out") == 0)
      out_dir = cfg.at("out").get<std::string>();

    if (gen->parsed()) {
      gen_inst.apply_config(cfg, gen);
      config_default(cfg, "name", gen, "--name", gen_name);
      return cmd_generate(gen_inst, out_dir, gen_name);
    }

    if (run_cmd->parsed()) {
      run_inst.apply_config(cfg, run_cmd);
      config_default(cfg, "method", run_cmd, "--method", run_method);
      config_default(cfg, "p", run_cmd, "--p", run_p);
      config_default(cfg, "sketch", run_cmd, "--sketch", run_sketch);
      config_default(cfg, "step_rule", run_cmd, "--step-rule", run_step);
      config_default(cfg, "eta", run_cmd, "--eta", run_eta);
      config_default(cfg, "tol", run_cmd, "--tol", run_tol);
      config_default(cfg, "max_iter", run_cmd, "--max-iter", run_max_iter);
      config_default(cfg, "t_align", run_cmd, "--t-align", run_t_align);

      const InstanceSpec spec = run_inst.spec();
      auto inst = std::make_shared<const CubicQuadraticInstance>(generate_instance(spec));
      const Vector x0 = starting_point(*inst);
      const Method method = parse_method(run_method);

      if (method == Method::Scpg) {
        SolverConfig sc;
        const SketchSpec sk = parse_sketch_spec(run_sketch);
        sc.sketch = sk.kind;
        sc.hash_nnz = sk.hash_nnz;
        sc.subspace_dim = run_p;
        sc.step.mode = parse_step_mode(run_step);
        sc.step.eta = run_eta;
        sc.tolerance = run_tol;
        sc.max_iterations = run_max_iter;
        sc.telemetry_period = run_t_align;
        sc.seed = run_solver_seed_set ? run_solver_seed : mix_seed(spec.seed, 1);

        const CompositeProblem problem = make_composite(inst);
        const auto t0 = std::chrono::steady_clock::now();
        const RunTrace trace = run(problem, x0.span(), sc);
        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        const std::string csv_path = join_path(out_dir, "trace.csv");
        write_trace_csv(trace, csv_path);
        const std::string summary = trace_summary_json(trace, wall);
        write_text_file(join_path(out_dir, "run_summary.json"), summary);
        std::cout << summary << '\n';
        return trace.exit == ExitStatus::Converged ? 0 : 2;
      }

      const double a_norm = spectral_norm(inst->a());
      const BaselineKind kind{method == Method::CarmonDuchi
                                  ? BaselineKind::Method::CarmonDuchi
                                  : BaselineKind::Method::NesterovProx,
                              0.0};
      const auto t0 = std::chrono::steady_clock::now();
      const BaselineTrace t =
          run_baseline(*inst, kind, x0.span(), a_norm, run_tol, run_max_iter);
      const double wall =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      json j;
      j["method"] = format_method(method);
      j["iterations"] = t.iterations;
      j["converged"] = t.exit == ExitStatus::Converged;
      j["final_grad_norm"] = t.final_grad_norm;
      j["final_objective"] = t.final_objective;
      j["wall_time_seconds"] = wall;
      const std::string summary = j.dump(2);
      write_text_file(join_path(out_dir, "run_summary.json"), summary);
      std::cout << summary << '\n';
      return t.exit == ExitStatus::Converged ? 0 : 2;
    }

    if (cmp->parsed()) {
      cmp_inst.apply_config(cfg, cmp);
      config_default(cfg, "p", cmp, "--p", cmp_p);
      config_default(cfg, "sketch", cmp, "--sketch", cmp_sketch);
      config_default(cfg, "tol", cmp, "--tol", cmp_tol);
      config_default(cfg, "max_iter", cmp, "--max-iter", cmp_max_iter);
      config_default(cfg, "seeds", cmp, "--seeds", cmp_seeds);

      ExperimentConfig ec;
      ec.instance = cmp_inst.spec();
      ec.subspace_dim = cmp_p;
      const SketchSpec sk = parse_sketch_spec(cmp_sketch);
      ec.sketch = sk.kind;
      ec.hash_nnz = sk.hash_nnz;
      ec.tolerance = cmp_tol;
      ec.max_iterations = cmp_max_iter;
      ec.repetitions = cmp_seeds;

      const std::vector<ComparisonRow> rows = run_comparison(ec);
      const std::string csv_path = join_path(out_dir, "comparison.csv");
      write_text_file(csv_path, comparison_csv(rows));
      const std::string summary_path = join_path(out_dir, "comparison_summary.json");
      write_text_file(summary_path, comparison_summary_json(ec, rows));
      std::cout << "wrote " << csv_path << " and " << summary_path << '\n';
      return 0;
    }

    if (cert->parsed()) {
      cert_inst.apply_config(cfg, cert);
      config_default(cfg, "p", cert, "--p", cert_p);
      config_default(cfg, "beta", cert, "--beta", cert_beta);
      config_default(cfg, "delta", cert, "--delta", cert_delta);
      config_default(cfg, "tol", cert, "--tol", cert_tol);
      config_default(cfg, "max_iter", cert, "--max-iter", cert_max_iter);
      config_default(cfg, "seeds", cert, "--seeds", cert_seeds);
      config_default(cfg, "trials", cert, "--trials", cert_trials);
      config_default(cfg, "grid", cert, "--grid", cert_grid);
      config_default(cfg, "ridge_kl", cert, "--ridge-kl", cert_ridge_kl);

      CertifyConfig cc;
      cc.instance = cert_inst.spec();
      cc.theory.subspace_dim = cert_p;
      cc.theory.beta = cert_beta;
      cc.theory.delta = cert_delta;
      cc.theory.tolerance = cert_tol;
      cc.theory.max_iterations = cert_max_iter;
      cc.repetitions = cert_seeds;
      cc.mc_trials = cert_trials;
      cc.grid = cert_grid;
      cc.ridge_for_kl = cert_ridge_kl;
      cc.seed = cert_inst.seed;

      const CertifyOutcome outcome = validate_certificates(cc);
      const std::string path = join_path(out_dir, "certificates.json");
      write_text_file(path, outcome.report_json);
      std::cout << "wrote " << path << "; all_validated="
                << (outcome.all_validated ? "true" : "false") << '\n';
      return outcome.all_validated ? 0 : 3;
    }

    if (mc->parsed()) {
      config_default(cfg, "beta", mc, "--beta", mc_beta);
      config_default(cfg, "delta", mc, "--delta", mc_delta);
      config_default(cfg, "k", mc, "--k", mc_k);
      config_default(cfg, "trials", mc, "--trials", mc_trials);
      config_default(cfg, "seed", mc, "--seed", mc_seed);

      const AlignmentMonteCarlo r =
          validate_alignment_count_bound(mc_beta, mc_delta, mc_k, mc_trials, mc_seed);
      json j;
      j["beta"] = mc_beta;
      j["delta"] = mc_delta;
      j["k_max"] = mc_k;
      j["threshold"] = r.threshold;
      j["prob_floor"] = r.prob_floor;
      j["empirical"] = r.empirical;
      j["std_error"] = r.std_error;
      j["trials"] = r.trials;
      j["ok"] = r.ok;
      std::cout << j.dump(2) << '\n';
      return r.ok ? 0 : 3;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
