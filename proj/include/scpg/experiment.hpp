#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "scpg/cubic.hpp"
#include "scpg/problem.hpp"
#include "scpg/solver.hpp"

namespace scpg {

// Random cubic-regularized quadratic testbed instance. Convex mode (m set)
// builds A = B^T B from a sparse Gaussian B in R^{m x n}; nonconvex mode
// (m empty) builds A = C + C^T. density is the fraction of nonzeros per
// row of B / C; values <= 0 pick 10/n. ridge adds ridge * I to A.
struct InstanceSpec {
  int n = 2000;
  std::optional<int> m = 2000;
  double density = 0.0;
  double cubic_weight = 1.0;
  double ridge = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
  int nonzeros_per_row() const;
};

CubicQuadraticInstance generate_instance(const InstanceSpec& spec);

// Lossless JSON round trip for generated instances.
std::string instance_to_json(const CubicQuadraticInstance& inst, const InstanceSpec& spec);
CubicQuadraticInstance instance_from_json(const std::string& text);

enum class Method { Scpg, CarmonDuchi, Nesterov };

Method parse_method(const std::string& name);
std::string format_method(Method method);

struct BaselineTrace {
  long iterations = 0;
  ExitStatus exit = ExitStatus::MaxIter;
  double final_grad_norm = 0.0;
  double final_objective = 0.0;
  std::vector<double> final_point;
};

// Full-space baseline loop: gradient stopping test every iteration, then
// one Carmon-Duchi or Nesterov step. kind.parameter <= 0 picks the default
// (eta at its upper bound, H = ||A||) from a_norm.
BaselineTrace run_baseline(const CubicQuadraticInstance& inst, BaselineKind kind,
                           std::span<const double> x0, double a_norm, double tolerance,
                           long max_iterations);

// Best-found optimum: Nesterov to ||grad F|| <= 1e-8.
struct ReferenceOptimum {
  double value = 0.0;
  std::vector<double> point;
  bool converged = false;
};

ReferenceOptimum reference_optimum(const CubicQuadraticInstance& inst, double a_norm,
                                   long max_iterations);

struct ExperimentConfig {
  InstanceSpec instance;
  int subspace_dim = 0;  // 0 picks ceil(sqrt(n))
  SketchKind sketch = SketchKind::RandomOrthonormal;
  int hash_nnz = 0;
  StepConstantRule step{};  // PracticalCurvature default
  double tolerance = 1e-2;
  long max_iterations = 200000;
  int repetitions = 5;

  void validate() const;
};

struct MethodResult {
  long iterations = 0;
  double epoch_equivalents = 0.0;
  bool converged = false;
  double wall_seconds = 0.0;
  std::string error;  // nonempty when the run aborted
};

struct ComparisonRow {
  int n = 0;
  std::optional<int> m;
  int p = 0;
  double cubic_weight = 0.0;
  std::uint64_t seed = 0;
  MethodResult scpg;
  MethodResult carmon_duchi;
  MethodResult nesterov;
};

// One row per repetition; repetition r uses instance seed base + r and all
// three methods start from the prescribed starting point.
std::vector<ComparisonRow> run_comparison(const ExperimentConfig& config);

// Deterministic CSV: no wall times, %.17g numeric formatting.
std::string comparison_csv(const std::vector<ComparisonRow>& rows);
// Medians and wall times; schema stable across runs.
std::string comparison_summary_json(const ExperimentConfig& config,
                                    const std::vector<ComparisonRow>& rows);

// One theory-mode run on a convex instance with full telemetry, checked
// against the descent, gradient-bound, telescoping, and rate certificates
// using measured surrogates (eta_min, H maxima) and a reference optimum.
struct TheoryCheckConfig {
  int subspace_dim = 45;
  SketchKind sketch = SketchKind::CoordinateBlock;
  double beta = 0.5;
  double delta = 0.1;
  double tolerance = 1e-2;
  long max_iterations = 40000;

  void validate() const;
};

struct TheoryRunReport {
  std::uint64_t instance_seed = 0;
  long iterations = 0;
  bool converged = false;
  double initial_objective = 0.0;
  double reference_value = 0.0;
  double gap0 = 0.0;
  double alpha = 0.0;
  double eta_min = 0.0;
  double h_f_max = 0.0;
  double h_psi_max = 0.0;
  long aligned_count = 0;
  double aligned_threshold = 0.0;
  bool threshold_met = false;
  double min_grad_sq = 0.0;
  double theorem1_value = 0.0;
  bool theorem1_ok = false;
  double r_estimate = 0.0;
  double final_gap = 0.0;
  double convex_bound = 0.0;
  bool convex_ok = false;
  long descent_violations = 0;
  double descent_worst = 0.0;  // max over records of (eta/2)||d||^2 - (F_k - F_{k+1})
  long gradient_bound_violations = 0;
  double gradient_bound_worst = 0.0;
  double telescoping_margin = 0.0;  // F_0 - F_K - (eta_min/2) sum ||d||^2
  bool telescoping_ok = false;
};

TheoryRunReport run_theory_check(const InstanceSpec& spec, const TheoryCheckConfig& check);

// Linear-rate check on a strongly convex instance (A >= ridge I): the
// measured-constant q = 2 bound with sigma_2 = ridge / 2 dominates the
// observed final gap.
struct KLRunReport {
  std::uint64_t instance_seed = 0;
  long iterations = 0;
  double sigma2 = 0.0;
  double gamma2 = 0.0;
  double gap0 = 0.0;
  double final_gap = 0.0;
  double bound = 0.0;
  bool threshold_met = false;
  bool ok = false;
};

KLRunReport run_kl_check(const InstanceSpec& spec, const TheoryCheckConfig& check);

struct CertifyConfig {
  InstanceSpec instance;   // convex base; seeds instance.seed .. +repetitions-1
  TheoryCheckConfig theory{};
  int repetitions = 5;
  long mc_trials = 20000;
  long grid = 1000;
  double grid_y_max = 20.0;
  long recurrence_draws = 50;
  long recurrence_k_max = 10000;
  double ridge_for_kl = 1.0;
  std::uint64_t seed = 0;
};

struct CertifyOutcome {
  std::string report_json;
  bool all_validated = false;
};

// Drives every certificate end to end: scalar-inequality grid, Bernoulli
// Monte Carlo for the count bound, recurrence dominance, sampler checks,
// and the run-trace rate checks. Failures are recorded, not thrown.
CertifyOutcome validate_certificates(const CertifyConfig& config);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace scpg
