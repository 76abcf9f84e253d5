#include "scpg/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "scpg/kernels.hpp"
#include "scpg/rng.hpp"

namespace scpg {

namespace {

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void StepConstantRule::validate() const {
  if (mode == Mode::PracticalCurvature) return;
  if (!(eta > 0.0) || !std::isfinite(eta))
    throw std::invalid_argument("StepConstantRule: eta must be positive and finite");
}

void SolverConfig::validate(int dimension) const {
  step.validate();
  if (dimension < 1) throw std::invalid_argument("SolverConfig: dimension must be >= 1");
  if (!(tolerance > 0.0)) throw std::invalid_argument("SolverConfig: tolerance must be > 0");
  if (max_iterations < 1)
    throw std::invalid_argument("SolverConfig: max_iterations must be >= 1");
  if (telemetry_period < 1)
    throw std::invalid_argument("SolverConfig: telemetry_period must be >= 1");
  const int p = effective_dim(dimension);
  if (p < 1 || p > dimension)
    throw std::invalid_argument("SolverConfig: subspace_dim out of range");
  if (sketch == SketchKind::SHashing && (hash_nnz < 1 || hash_nnz > p))
    throw std::invalid_argument("SolverConfig: hash_nnz must lie in [1, p]");
  const double a = effective_alpha(dimension);
  if (!(a > 0.0) || !(a < 1.0))
    throw std::invalid_argument("SolverConfig: alignment_alpha must lie in (0, 1)");
  if (reference_point &&
      reference_point->size() != static_cast<std::size_t>(dimension))
    throw std::invalid_argument("SolverConfig: reference_point dimension mismatch");
}

int SolverConfig::effective_dim(int dimension) const {
  if (subspace_dim > 0) return subspace_dim;
  const int p = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(dimension))));
  return std::min(std::max(p, 1), dimension);
}

double SolverConfig::effective_alpha(int dimension) const {
  if (alignment_alpha > 0.0) return alignment_alpha;
  return 0.5 * static_cast<double>(effective_dim(dimension)) /
         static_cast<double>(dimension);
}

RunAborted::RunAborted(const std::string& what, RunTrace partial)
    : NumericalError(what), trace_(std::make_shared<const RunTrace>(std::move(partial))) {}

double choose_step_constant(const StepConstantRule& rule, const CompositeProblem& problem,
                            const Sketch& u) {
  if (!problem.subspace_lipschitz)
    throw std::invalid_argument("choose_step_constant: no subspace Lipschitz oracle");
  return step_constant_from(rule, problem.subspace_lipschitz(u));
}

double step_constant_from(const StepConstantRule& rule, double subspace_lipschitz) {
  rule.validate();
  if (!(subspace_lipschitz >= 0.0) || !std::isfinite(subspace_lipschitz))
    throw NumericalError("step_constant_from: bad subspace Lipschitz value");
  switch (rule.mode) {
    case StepConstantRule::Mode::ConvexAlongSubspaces:
      return 0.5 * (subspace_lipschitz + step_margin(rule, subspace_lipschitz));
    case StepConstantRule::Mode::General:
      return subspace_lipschitz + step_margin(rule, subspace_lipschitz);
    case StepConstantRule::Mode::PracticalCurvature:
      return subspace_lipschitz;
  }
  throw std::invalid_argument("step_constant_from: unknown mode");
}

double step_margin(const StepConstantRule& rule, double subspace_lipschitz) {
  if (rule.mode == StepConstantRule::Mode::PracticalCurvature) return subspace_lipschitz;
  return rule.eta_relative ? rule.eta * subspace_lipschitz : rule.eta;
}

StepResult scpg_step(const CompositeProblem& problem, std::span<const double> x,
                     const Sketch& u, double h_f) {
  if (!(h_f > 0.0)) throw std::invalid_argument("scpg_step: H must be > 0");
  if (!problem.subspace_prox)
    throw std::invalid_argument("scpg_step: problem has no subspace prox oracle");
  StepResult res;
  res.direction = problem.subspace_prox(x, u, h_f);
  res.x_next.assign(x.begin(), x.end());
  apply_add(u, res.direction, res.x_next);
  return res;
}

RunTrace run(const CompositeProblem& problem, std::span<const double> x0,
             const SolverConfig& config) {
  const int n = problem.dimension;
  config.validate(n);
  if (x0.size() != static_cast<std::size_t>(n))
    throw std::invalid_argument("run: starting point dimension mismatch");

  const int p = config.effective_dim(n);
  const double alpha = config.effective_alpha(n);
  // eq:1 threshold matching the squared-sense alpha
  const double align_ratio = std::sqrt(alpha);

  RunTrace trace;
  trace.subspace_dim = p;
  trace.alignment_alpha = alpha;
  trace.initial_objective = problem.value(x0);

  std::vector<double> x(x0.begin(), x0.end());
  std::vector<double> grad(static_cast<std::size_t>(n));
  std::vector<double> sketched_grad;
  Rng rng(config.seed);

  if (config.reference_point) {
    std::vector<double> diff(x);
    kernels::axpy(-1.0, *config.reference_point, diff);
    trace.max_distance_to_reference = kernels::norm(diff);
  }

  const auto finish = [&](ExitStatus status, double grad_norm, long iterations) {
    trace.exit = status;
    trace.final_grad_norm = grad_norm;
    trace.iterations = iterations;
    trace.epoch_equivalents =
        static_cast<double>(iterations) * static_cast<double>(p) / static_cast<double>(n);
    trace.final_point = std::move(x);
    return std::move(trace);
  };

  for (long k = 0; k < config.max_iterations; ++k) {
    const bool telemetry = (k % config.telemetry_period) == 0;
    double grad_norm = 0.0;
    if (telemetry) {
      problem.gradient(x, grad);
      grad_norm = kernels::norm(grad);
      if (grad_norm <= config.tolerance) return finish(ExitStatus::Converged, grad_norm, k);
    }

    const Sketch u = sample(config.sketch, n, p, rng.next_u64(), config.hash_nnz);
    if (!problem.subspace_lipschitz)
      throw std::invalid_argument("run: problem has no subspace Lipschitz oracle");
    const double l_u = problem.subspace_lipschitz(u);
    const double h_f = step_constant_from(config.step, l_u);

    IterationRecord rec;
    rec.k = k;
    rec.h_f_used = h_f;
    rec.eta_used = step_margin(config.step, l_u);
    if (telemetry) {
      rec.grad_norm = grad_norm;
      if (grad_norm == 0.0) {
        rec.aligned = true;
      } else {
        sketched_grad.resize(static_cast<std::size_t>(u.p));
        apply_transpose(u, grad, sketched_grad);
        rec.aligned = kernels::norm(sketched_grad) >= align_ratio * grad_norm;
      }
    }

    StepResult step;
    try {
      step = scpg_step(problem, x, u, h_f);
    } catch (const NumericalError& err) {
      RunTrace partial = finish(ExitStatus::MaxIter, grad_norm, k);
      throw RunAborted(std::string("run: subproblem failed at iteration ") +
                           std::to_string(k) + ": " + err.what(),
                       std::move(partial));
    }

    rec.step_norm = kernels::norm(step.direction);
    rec.f_value = problem.value(step.x_next);
    if (problem.regularizer_curvature)
      rec.h_psi_seg = std::max(problem.regularizer_curvature(x, u),
                               problem.regularizer_curvature(step.x_next, u));
    trace.records.push_back(std::move(rec));
    x = std::move(step.x_next);

    if (config.reference_point) {
      std::vector<double> diff(x);
      kernels::axpy(-1.0, *config.reference_point, diff);
      trace.max_distance_to_reference =
          std::max(*trace.max_distance_to_reference, kernels::norm(diff));
    }
  }

  problem.gradient(x, grad);
  const double grad_norm = kernels::norm(grad);
  return finish(grad_norm <= config.tolerance ? ExitStatus::Converged : ExitStatus::MaxIter,
                grad_norm, config.max_iterations);
}

AlignmentTelemetry alignment_telemetry(const RunTrace& trace) {
  AlignmentTelemetry t;
  t.min_grad_norm = std::numeric_limits<double>::infinity();
  for (const IterationRecord& rec : trace.records) {
    if (!rec.grad_norm) continue;
    ++t.checks;
    t.min_grad_norm = std::min(t.min_grad_norm, *rec.grad_norm);
    if (rec.aligned && *rec.aligned) ++t.count_aligned;
  }
  if (t.checks == 0) throw std::invalid_argument("alignment_telemetry: no telemetry");
  t.fraction = static_cast<double>(t.count_aligned) / static_cast<double>(t.checks);
  return t;
}

void write_trace_csv(const RunTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_trace_csv: cannot open " + path);
  out << "k,F,step_norm,grad_norm,aligned,H_f\n";
  for (const IterationRecord& rec : trace.records) {
    out << rec.k << ',' << format_g17(rec.f_value) << ',' << format_g17(rec.step_norm)
        << ',';
    if (rec.grad_norm) out << format_g17(*rec.grad_norm);
    out << ',';
    if (rec.aligned) out << (*rec.aligned ? '1' : '0');
    out << ',' << format_g17(rec.h_f_used) << '\n';
  }
  if (!out) throw std::runtime_error("write_trace_csv: write failed for " + path);
}

std::string trace_summary_json(const RunTrace& trace, double wall_seconds) {
  nlohmann::json j;
  j["exit"] = trace.exit == ExitStatus::Converged ? "converged" : "max_iter";
  j["iterations"] = trace.iterations;
  j["epoch_equivalents"] = trace.epoch_equivalents;
  j["initial_objective"] = trace.initial_objective;
  j["final_grad_norm"] = trace.final_grad_norm;
  j["subspace_dim"] = trace.subspace_dim;
  j["alignment_alpha"] = trace.alignment_alpha;
  if (trace.max_distance_to_reference)
    j["max_distance_to_reference"] = *trace.max_distance_to_reference;
  j["wall_time_seconds"] = wall_seconds;
  return j.dump(2);
}

}  // namespace scpg
