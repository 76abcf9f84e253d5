#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scpg/errors.hpp"
#include "scpg/problem.hpp"
#include "scpg/sketch.hpp"

namespace scpg {

// Subspace step constant H_{f,U}. ConvexAlongSubspaces and General follow
// the margin rules (L_U + eta)/2 and L_U + eta; PracticalCurvature uses the
// curvature oracle value L_U itself (for a quadratic smooth part that is
// ||U^T A U||). With eta_relative the margin is eta * L_U.
struct StepConstantRule {
  enum class Mode { ConvexAlongSubspaces, General, PracticalCurvature };
  Mode mode = Mode::PracticalCurvature;
  double eta = 1e-3;
  bool eta_relative = true;

  void validate() const;
};

struct SolverConfig {
  SketchKind sketch = SketchKind::RandomOrthonormal;
  int subspace_dim = 0;  // 0 picks ceil(sqrt(n))
  int hash_nnz = 0;      // s-hashing only
  StepConstantRule step{};
  double tolerance = 1e-2;  // on ||grad F||
  long max_iterations = 200000;
  std::uint64_t seed = 0;
  // Full gradients are computed every telemetry_period iterations; the
  // stopping rule fires on those checks and at max_iterations.
  long telemetry_period = 10;
  // Squared-sense alignment constant: an iteration counts as aligned when
  // ||U^T grad F||^2 >= alpha ||grad F||^2. 0 picks 0.5 * p / n, matching
  // the concentration of ||U^T v||^2 / ||v||^2 around p/n for the
  // orthonormal-column families.
  double alignment_alpha = 0.0;
  // When set, the trace tracks max_k ||x_k - reference|| (level-set radius
  // estimate for the convex rate bound).
  std::optional<std::vector<double>> reference_point;

  void validate(int dimension) const;
  int effective_dim(int dimension) const;
  double effective_alpha(int dimension) const;
};

struct IterationRecord {
  long k = 0;
  double f_value = 0.0;   // F(x_{k+1})
  double step_norm = 0.0; // ||d_k||
  std::optional<double> grad_norm;  // ||grad F(x_k)||, telemetry iterations only
  std::optional<bool> aligned;
  double h_f_used = 0.0;
  // Margin eta_U implied by the step rule (descent predicts
  // F_{k+1} <= F_k - (eta/2) ||d||^2). PracticalCurvature records L_U,
  // valid when psi is convex along the subspaces.
  double eta_used = 0.0;
  // max of ||U^T hess psi U|| at the two segment endpoints x_k, x_{k+1}
  double h_psi_seg = 0.0;
};

enum class ExitStatus { Converged, MaxIter };

struct RunTrace {
  std::vector<IterationRecord> records;
  ExitStatus exit = ExitStatus::MaxIter;
  long iterations = 0;
  double epoch_equivalents = 0.0;
  double initial_objective = 0.0;
  // Gradient norm at the final iterate (always computed on exit).
  double final_grad_norm = 0.0;
  std::vector<double> final_point;
  int subspace_dim = 0;
  double alignment_alpha = 0.0;
  // Populated only when the config carried a reference point.
  std::optional<double> max_distance_to_reference;
};

// Subproblem failure mid-run; carries the iterations completed so far.
class RunAborted : public NumericalError {
 public:
  RunAborted(const std::string& what, RunTrace partial);
  const RunTrace& partial_trace() const { return *trace_; }

 private:
  std::shared_ptr<const RunTrace> trace_;
};

struct StepResult {
  std::vector<double> direction;  // d, length p
  std::vector<double> x_next;     // x + U d
};

// One SCPG update: solve the sketched prox subproblem at x and lift the
// step back to full space.
StepResult scpg_step(const CompositeProblem& problem, std::span<const double> x,
                     const Sketch& u, double h_f);

double choose_step_constant(const StepConstantRule& rule, const CompositeProblem& problem,
                            const Sketch& u);

// Same rule applied to an already computed L_U.
double step_constant_from(const StepConstantRule& rule, double subspace_lipschitz);

// Margin eta_U the rule yields together with choose_step_constant.
double step_margin(const StepConstantRule& rule, double subspace_lipschitz);

RunTrace run(const CompositeProblem& problem, std::span<const double> x0,
             const SolverConfig& config);

struct AlignmentTelemetry {
  long count_aligned = 0;
  long checks = 0;
  double fraction = 0.0;
  double min_grad_norm = 0.0;
};

// Summarizes the recorded alignment snapshots of a trace. Throws
// std::invalid_argument when the trace holds no gradient telemetry.
AlignmentTelemetry alignment_telemetry(const RunTrace& trace);

// Columns: k,F,step_norm,grad_norm,aligned,H_f with %.17g formatting;
// optional cells are left empty on non-telemetry iterations.
void write_trace_csv(const RunTrace& trace, const std::string& path);

std::string trace_summary_json(const RunTrace& trace, double wall_seconds);

}  // namespace scpg
