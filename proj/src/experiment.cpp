#include "scpg/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <utility>

#include <json.hpp>

#include "scpg/analysis.hpp"
#include "scpg/cubic.hpp"
#include "scpg/errors.hpp"
#include "scpg/kernels.hpp"
#include "scpg/rng.hpp"

namespace scpg {

namespace {

using nlohmann::json;

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 == 1 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const char* step_mode_name(StepConstantRule::Mode mode) {
  switch (mode) {
    case StepConstantRule::Mode::ConvexAlongSubspaces: return "convex-along-subspaces";
    case StepConstantRule::Mode::General: return "general";
    case StepConstantRule::Mode::PracticalCurvature: return "practical-curvature";
  }
  return "unknown";
}

}  // namespace

void InstanceSpec::validate() const {
  if (n < 2) throw std::invalid_argument("InstanceSpec: n must be >= 2");
  if (m && *m < 1) throw std::invalid_argument("InstanceSpec: m must be >= 1 when set");
  if (!(cubic_weight > 0.0) || !std::isfinite(cubic_weight))
    throw std::invalid_argument("InstanceSpec: cubic_weight must be positive");
  if (!std::isfinite(density) || density > 1.0)
    throw std::invalid_argument("InstanceSpec: density must be <= 1");
  if (!(ridge >= 0.0) || !std::isfinite(ridge))
    throw std::invalid_argument("InstanceSpec: ridge must be >= 0");
}

int InstanceSpec::nonzeros_per_row() const {
  validate();
  const double d = density > 0.0 ? density : 10.0 / static_cast<double>(n);
  const long k = std::lround(d * static_cast<double>(n));
  return static_cast<int>(std::clamp(k, 1L, static_cast<long>(n)));
}

CubicQuadraticInstance generate_instance(const InstanceSpec& spec) {
  spec.validate();
  const int n = spec.n;
  const int k = spec.nonzeros_per_row();
  const int rows = spec.m ? *spec.m : n;

  Rng mat_rng(mix_seed(spec.seed, 1));
  std::vector<Triplet> trips;
  const std::size_t per_row = spec.m ? static_cast<std::size_t>(k) * k : 2u * k;
  trips.reserve(static_cast<std::size_t>(rows) * per_row + static_cast<std::size_t>(n));

  std::vector<int> pool(n);
  std::vector<int> cols(k);
  std::vector<double> vals(k);
  for (int i = 0; i < rows; ++i) {
    // k distinct positions by partial Fisher-Yates, then sorted for a
    // deterministic accumulation order
    std::iota(pool.begin(), pool.end(), 0);
    for (int t = 0; t < k; ++t) {
      const int j = t + static_cast<int>(mat_rng.uniform_index(static_cast<std::uint64_t>(n - t)));
      std::swap(pool[t], pool[j]);
      cols[t] = pool[t];
    }
    std::sort(cols.begin(), cols.end());
    for (int t = 0; t < k; ++t) vals[t] = mat_rng.normal();

    if (spec.m) {
      // A = B^T B, one rank-one contribution per row of B
      for (int a = 0; a < k; ++a)
        for (int c = 0; c < k; ++c)
          trips.push_back({cols[a], cols[c], vals[a] * vals[c]});
    } else {
      // A = C + C^T, entries mirrored with identical values
      for (int t = 0; t < k; ++t) {
        trips.push_back({i, cols[t], vals[t]});
        trips.push_back({cols[t], i, vals[t]});
      }
    }
  }
  if (spec.ridge > 0.0)
    for (int i = 0; i < n; ++i) trips.push_back({i, i, spec.ridge});

  SparseMatrix a = SparseMatrix::from_triplets(n, n, trips, DuplicatePolicy::Sum);

  Rng b_rng(mix_seed(spec.seed, 2));
  std::vector<double> b(n);
  for (int i = 0; i < n; ++i) b[i] = b_rng.normal();

  return CubicQuadraticInstance(std::move(a), Vector(std::move(b)), spec.cubic_weight);
}

std::string instance_to_json(const CubicQuadraticInstance& inst, const InstanceSpec& spec) {
  const SparseMatrix& a = inst.a();
  json ja;
  json rows = json::array();
  json cols = json::array();
  json values = json::array();
  const auto rp = a.row_ptr();
  const auto ci = a.col_idx();
  const auto vs = a.values();
  for (int r = 0; r < a.rows(); ++r)
    for (int idx = rp[r]; idx < rp[r + 1]; ++idx) {
      rows.push_back(r);
      cols.push_back(ci[idx]);
      values.push_back(vs[idx]);
    }
  ja["rows"] = std::move(rows);
  ja["cols"] = std::move(cols);
  ja["values"] = std::move(values);

  json j;
  j["n"] = inst.dimension();
  j["m"] = spec.m ? json(*spec.m) : json(nullptr);
  j["M"] = inst.cubic_weight();
  j["density"] = spec.density;
  j["ridge"] = spec.ridge;
  j["seed"] = spec.seed;
  j["A"] = std::move(ja);
  j["b"] = inst.b().data();
  return j.dump();
}

CubicQuadraticInstance instance_from_json(const std::string& text) {
  const json j = json::parse(text);
  const int n = j.at("n").get<int>();
  const double m_weight = j.at("M").get<double>();
  const json& ja = j.at("A");
  const auto& rows = ja.at("rows");
  const auto& cols = ja.at("cols");
  const auto& values = ja.at("values");
  if (rows.size() != cols.size() || rows.size() != values.size())
    throw std::invalid_argument("instance_from_json: ragged triplet arrays");
  std::vector<Triplet> trips(rows.size());
  for (std::size_t i = 0; i < trips.size(); ++i)
    trips[i] = {rows[i].get<int>(), cols[i].get<int>(), values[i].get<double>()};
  SparseMatrix a = SparseMatrix::from_triplets(n, n, trips, DuplicatePolicy::Error);
  std::vector<double> b = j.at("b").get<std::vector<double>>();
  return CubicQuadraticInstance(std::move(a), Vector(std::move(b)), m_weight);
}

Method parse_method(const std::string& name) {
  if (name == "scpg") return Method::Scpg;
  if (name == "carmon-duchi") return Method::CarmonDuchi;
  if (name == "nesterov") return Method::Nesterov;
  throw std::invalid_argument("unknown method: " + name);
}

std::string format_method(Method method) {
  switch (method) {
    case Method::Scpg: return "scpg";
    case Method::CarmonDuchi: return "carmon-duchi";
    case Method::Nesterov: return "nesterov";
  }
  throw std::invalid_argument("unknown method enum");
}

BaselineTrace run_baseline(const CubicQuadraticInstance& inst, BaselineKind kind,
                           std::span<const double> x0, double a_norm, double tolerance,
                           long max_iterations) {
  const int n = inst.dimension();
  if (static_cast<int>(x0.size()) != n)
    throw std::invalid_argument("run_baseline: x0 dimension mismatch");
  if (!(tolerance > 0.0)) throw std::invalid_argument("run_baseline: tolerance must be > 0");
  if (max_iterations < 1)
    throw std::invalid_argument("run_baseline: max_iterations must be >= 1");

  double param = kind.parameter;
  if (param <= 0.0)
    param = kind.method == BaselineKind::Method::CarmonDuchi ? carmon_duchi_eta(inst, a_norm)
                                                             : a_norm;
  if (!(param > 0.0) || !std::isfinite(param))
    throw std::invalid_argument("run_baseline: step parameter must be positive");

  std::vector<double> x(x0.begin(), x0.end());
  std::vector<double> grad(n);
  std::vector<double> next(n);

  BaselineTrace trace;
  for (long k = 0; k < max_iterations; ++k) {
    eval_gradient(inst, x, grad);
    const double gn = kernels::norm(grad);
    if (gn <= tolerance) {
      trace.iterations = k;
      trace.exit = ExitStatus::Converged;
      trace.final_grad_norm = gn;
      trace.final_objective = eval_objective(inst, x);
      trace.final_point = std::move(x);
      return trace;
    }
    if (kind.method == BaselineKind::Method::CarmonDuchi) {
      kernels::axpy(-param, grad, x);
    } else {
      nesterov_step(inst, x, param, next);
      std::swap(x, next);
    }
  }
  eval_gradient(inst, x, grad);
  const double gn = kernels::norm(grad);
  trace.iterations = max_iterations;
  trace.exit = gn <= tolerance ? ExitStatus::Converged : ExitStatus::MaxIter;
  trace.final_grad_norm = gn;
  trace.final_objective = eval_objective(inst, x);
  trace.final_point = std::move(x);
  return trace;
}

ReferenceOptimum reference_optimum(const CubicQuadraticInstance& inst, double a_norm,
                                   long max_iterations) {
  const Vector x0 = starting_point(inst);
  BaselineTrace t = run_baseline(inst, {BaselineKind::Method::NesterovProx, 0.0}, x0.span(),
                                 a_norm, 1e-8, max_iterations);
  ReferenceOptimum ref;
  ref.value = t.final_objective;
  ref.point = std::move(t.final_point);
  ref.converged = t.exit == ExitStatus::Converged;
  return ref;
}

void ExperimentConfig::validate() const {
  instance.validate();
  if (subspace_dim < 0) throw std::invalid_argument("ExperimentConfig: subspace_dim >= 0");
  if (hash_nnz < 0) throw std::invalid_argument("ExperimentConfig: hash_nnz >= 0");
  step.validate();
  if (!(tolerance > 0.0)) throw std::invalid_argument("ExperimentConfig: tolerance > 0");
  if (max_iterations < 1) throw std::invalid_argument("ExperimentConfig: max_iterations >= 1");
  if (repetitions < 1) throw std::invalid_argument("ExperimentConfig: repetitions >= 1");
}

std::vector<ComparisonRow> run_comparison(const ExperimentConfig& config) {
  config.validate();
  std::vector<ComparisonRow> rows;
  rows.reserve(config.repetitions);

  for (int r = 0; r < config.repetitions; ++r) {
    InstanceSpec spec = config.instance;
    spec.seed = config.instance.seed + static_cast<std::uint64_t>(r);
    auto inst = std::make_shared<const CubicQuadraticInstance>(generate_instance(spec));
    const double a_norm = spectral_norm(inst->a());
    const Vector x0 = starting_point(*inst);

    SolverConfig sc;
    sc.sketch = config.sketch;
    sc.subspace_dim = config.subspace_dim;
    sc.hash_nnz = config.hash_nnz;
    sc.step = config.step;
    sc.tolerance = config.tolerance;
    sc.max_iterations = config.max_iterations;
    sc.seed = mix_seed(spec.seed, 1);
    sc.telemetry_period = 1;

    ComparisonRow row;
    row.n = spec.n;
    row.m = spec.m;
    row.p = sc.effective_dim(spec.n);
    row.cubic_weight = spec.cubic_weight;
    row.seed = spec.seed;

    const CompositeProblem problem = make_composite(inst);
    {
      const auto t0 = std::chrono::steady_clock::now();
      try {
        const RunTrace trace = run(problem, x0.span(), sc);
        row.scpg.iterations = trace.iterations;
        row.scpg.epoch_equivalents = trace.epoch_equivalents;
        row.scpg.converged = trace.exit == ExitStatus::Converged;
      } catch (const RunAborted& e) {
        const RunTrace& partial = e.partial_trace();
        row.scpg.iterations = partial.iterations;
        row.scpg.epoch_equivalents = partial.epoch_equivalents;
        row.scpg.error = e.what();
      } catch (const NumericalError& e) {
        row.scpg.error = e.what();
      }
      row.scpg.wall_seconds = seconds_since(t0);
    }
    {
      const auto t0 = std::chrono::steady_clock::now();
      const BaselineTrace t = run_baseline(*inst, {BaselineKind::Method::CarmonDuchi, 0.0},
                                           x0.span(), a_norm, config.tolerance,
                                           config.max_iterations);
      row.carmon_duchi.iterations = t.iterations;
      row.carmon_duchi.epoch_equivalents = static_cast<double>(t.iterations);
      row.carmon_duchi.converged = t.exit == ExitStatus::Converged;
      row.carmon_duchi.wall_seconds = seconds_since(t0);
    }
    {
      const auto t0 = std::chrono::steady_clock::now();
      const BaselineTrace t = run_baseline(*inst, {BaselineKind::Method::NesterovProx, 0.0},
                                           x0.span(), a_norm, config.tolerance,
                                           config.max_iterations);
      row.nesterov.iterations = t.iterations;
      row.nesterov.epoch_equivalents = static_cast<double>(t.iterations);
      row.nesterov.converged = t.exit == ExitStatus::Converged;
      row.nesterov.wall_seconds = seconds_since(t0);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string comparison_csv(const std::vector<ComparisonRow>& rows) {
  std::string out =
      "n,m,p,M,seed,scpg_iterations,scpg_epoch_equivalents,scpg_converged,"
      "carmon_duchi_iterations,carmon_duchi_converged,nesterov_iterations,"
      "nesterov_converged\n";
  for (const ComparisonRow& r : rows) {
    out += std::to_string(r.n);
    out += ',';
    if (r.m) out += std::to_string(*r.m);
    out += ',';
    out += std::to_string(r.p);
    out += ',';
    out += format_g17(r.cubic_weight);
    out += ',';
    out += std::to_string(r.seed);
    out += ',';
    out += std::to_string(r.scpg.iterations);
    out += ',';
    out += format_g17(r.scpg.epoch_equivalents);
    out += ',';
    out += r.scpg.converged ? '1' : '0';
    out += ',';
    out += std::to_string(r.carmon_duchi.iterations);
    out += ',';
    out += r.carmon_duchi.converged ? '1' : '0';
    out += ',';
    out += std::to_string(r.nesterov.iterations);
    out += ',';
    out += r.nesterov.converged ? '1' : '0';
    out += '\n';
  }
  return out;
}

std::string comparison_summary_json(const ExperimentConfig& config,
                                    const std::vector<ComparisonRow>& rows) {
  json j;
  j["n"] = config.instance.n;
  j["m"] = config.instance.m ? json(*config.instance.m) : json(nullptr);
  j["density"] = config.instance.density;
  j["M"] = config.instance.cubic_weight;
  j["p"] = rows.empty() ? 0 : rows.front().p;
  j["sketch"] = format_sketch_spec({config.sketch, config.hash_nnz});
  j["step_mode"] = step_mode_name(config.step.mode);
  j["tolerance"] = config.tolerance;
  j["max_iterations"] = config.max_iterations;
  j["repetitions"] = config.repetitions;
  j["base_seed"] = config.instance.seed;

  auto method_json = [](const MethodResult& m) {
    json o;
    o["iterations"] = m.iterations;
    o["epoch_equivalents"] = m.epoch_equivalents;
    o["converged"] = m.converged;
    o["wall_seconds"] = m.wall_seconds;
    if (!m.error.empty()) o["error"] = m.error;
    return o;
  };

  json jr = json::array();
  std::vector<double> scpg_it, scpg_ep, cd_it, nes_it;
  for (const ComparisonRow& r : rows) {
    json o;
    o["seed"] = r.seed;
    o["scpg"] = method_json(r.scpg);
    o["carmon_duchi"] = method_json(r.carmon_duchi);
    o["nesterov"] = method_json(r.nesterov);
    jr.push_back(std::move(o));
    scpg_it.push_back(static_cast<double>(r.scpg.iterations));
    scpg_ep.push_back(r.scpg.epoch_equivalents);
    cd_it.push_back(static_cast<double>(r.carmon_duchi.iterations));
    nes_it.push_back(static_cast<double>(r.nesterov.iterations));
  }
  j["rows"] = std::move(jr);
  j["medians"] = {{"scpg_iterations", median(scpg_it)},
                  {"scpg_epoch_equivalents", median(scpg_ep)},
                  {"carmon_duchi_iterations", median(cd_it)},
                  {"nesterov_iterations", median(nes_it)}};
  return j.dump(2);
}

void TheoryCheckConfig::validate() const {
  if (subspace_dim < 1) throw std::invalid_argument("TheoryCheckConfig: subspace_dim >= 1");
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("TheoryCheckConfig: beta in (0,1)");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("TheoryCheckConfig: delta in (0,1)");
  if (!(tolerance > 0.0)) throw std::invalid_argument("TheoryCheckConfig: tolerance > 0");
  if (max_iterations < 1) throw std::invalid_argument("TheoryCheckConfig: max_iterations >= 1");
}

TheoryRunReport run_theory_check(const InstanceSpec& spec, const TheoryCheckConfig& check) {
  check.validate();
  auto inst = std::make_shared<const CubicQuadraticInstance>(generate_instance(spec));
  const double a_norm = spectral_norm(inst->a());
  const Vector x0 = starting_point(*inst);
  const ReferenceOptimum ref = reference_optimum(*inst, a_norm, 500000);

  SolverConfig sc;
  sc.sketch = check.sketch;
  sc.subspace_dim = check.subspace_dim;
  sc.step = StepConstantRule{StepConstantRule::Mode::ConvexAlongSubspaces, 1e-3, true};
  sc.tolerance = check.tolerance;
  sc.max_iterations = check.max_iterations;
  sc.seed = mix_seed(spec.seed, 1);
  sc.telemetry_period = 1;
  sc.reference_point = ref.point;

  const CompositeProblem problem = make_composite(inst);
  const RunTrace trace = run(problem, x0.span(), sc);

  TheoryRunReport rep;
  rep.instance_seed = spec.seed;
  rep.iterations = trace.iterations;
  rep.converged = trace.exit == ExitStatus::Converged;
  rep.initial_objective = trace.initial_objective;
  rep.reference_value = ref.value;
  rep.gap0 = trace.initial_objective - ref.value;
  rep.alpha = trace.alignment_alpha;
  if (trace.records.empty()) return rep;

  // descent, aligned gradient bound, telescoping: per-record constants
  double eta_min = std::numeric_limits<double>::infinity();
  double h_f_max = 0.0;
  double h_psi_max = 0.0;
  double sum_dsq = 0.0;
  double descent_worst = -std::numeric_limits<double>::infinity();
  double gradient_worst = -std::numeric_limits<double>::infinity();
  double f_prev = trace.initial_objective;
  for (const IterationRecord& rec : trace.records) {
    eta_min = std::min(eta_min, rec.eta_used);
    h_f_max = std::max(h_f_max, rec.h_f_used);
    h_psi_max = std::max(h_psi_max, rec.h_psi_seg);
    const double dsq = rec.step_norm * rec.step_norm;
    sum_dsq += dsq;
    const double descent_excess = 0.5 * rec.eta_used * dsq - (f_prev - rec.f_value);
    descent_worst = std::max(descent_worst, descent_excess);
    if (descent_excess > 1e-9 * std::max(1.0, std::fabs(f_prev))) ++rep.descent_violations;
    if (rec.grad_norm && rec.aligned && *rec.aligned) {
      const double gsq = *rec.grad_norm * *rec.grad_norm;
      const double cap =
          2.0 * (rec.h_f_used * rec.h_f_used + rec.h_psi_seg * rec.h_psi_seg) / rep.alpha * dsq;
      const double excess = gsq - cap;
      gradient_worst = std::max(gradient_worst, excess);
      if (excess > 1e-9 * std::max(1.0, gsq)) ++rep.gradient_bound_violations;
    }
    f_prev = rec.f_value;
  }
  rep.eta_min = eta_min;
  rep.h_f_max = h_f_max;
  rep.h_psi_max = h_psi_max;
  rep.descent_worst = descent_worst;
  rep.gradient_bound_worst = gradient_worst;
  rep.telescoping_margin = (trace.initial_objective - f_prev) - 0.5 * eta_min * sum_dsq;
  rep.telescoping_ok =
      rep.telescoping_margin >= -1e-9 * std::max(1.0, std::fabs(trace.initial_objective));
  rep.final_gap = f_prev - ref.value;

  const AlignmentTelemetry tele = alignment_telemetry(trace);
  rep.aligned_count = tele.count_aligned;
  rep.min_grad_sq = tele.min_grad_norm * tele.min_grad_norm;

  const long k_max = trace.iterations - 1;
  const AlignmentCountBound acb = alignment_count_bound(check.beta, check.delta, k_max);
  rep.aligned_threshold = acb.threshold;
  rep.threshold_met = static_cast<double>(rep.aligned_count) >= acb.threshold;

  const BoundParams bp{rep.alpha, check.beta, check.delta, eta_min, h_f_max, h_psi_max};
  bp.validate();
  if (ref.converged && rep.gap0 >= 0.0) {
    rep.theorem1_value = theorem1_bound(bp, rep.gap0, check.beta, check.delta, k_max);
    rep.theorem1_ok =
        rep.threshold_met && rep.min_grad_sq <= rep.theorem1_value * (1.0 + 1e-9);
  }
  rep.r_estimate = trace.max_distance_to_reference.value_or(0.0);
  const bool past =
      static_cast<double>(k_max + 1) * (1.0 - check.beta) * (1.0 - check.delta) > 1.0;
  if (ref.converged && rep.r_estimate > 0.0 && past) {
    rep.convex_bound = convex_rate_bound(bp, rep.r_estimate, check.beta, check.delta, k_max);
    rep.convex_ok = rep.threshold_met && rep.final_gap <= rep.convex_bound * (1.0 + 1e-9);
  }
  return rep;
}

KLRunReport run_kl_check(const InstanceSpec& spec, const TheoryCheckConfig& check) {
  if (!(spec.ridge > 0.0))
    throw std::invalid_argument("run_kl_check: spec.ridge must be > 0");
  const TheoryRunReport base = run_theory_check(spec, check);

  KLRunReport rep;
  rep.instance_seed = base.instance_seed;
  rep.iterations = base.iterations;
  rep.sigma2 = 0.5 * spec.ridge;
  rep.gap0 = base.gap0;
  rep.final_gap = base.final_gap;
  rep.threshold_met = base.threshold_met;

  const BoundParams bp{base.alpha, check.beta, check.delta,
                       base.eta_min, base.h_f_max, base.h_psi_max};
  KLParams kp;
  kp.q = 2.0;
  kp.sigma_q = rep.sigma2;
  kp.mode = KLParams::Mode::UniformlyConvex;
  kp.rate_constant = bp.rate_constant();
  rep.gamma2 = kp.gamma2();

  if (rep.gamma2 > 0.0 && rep.gamma2 < 1.0 && base.gap0 >= 0.0 && base.iterations >= 1) {
    rep.bound = kl_rate_bound(kp, base.gap0, check.beta, check.delta, base.iterations - 1);
    rep.ok = rep.threshold_met && rep.final_gap <= rep.bound * (1.0 + 1e-9);
  } else {
    rep.bound = std::numeric_limits<double>::quiet_NaN();
    rep.ok = false;
  }
  return rep;
}

namespace {

// worst |(U^T U - I)_{ij}| for the dense kinds; block sketches are checked
// for a strictly increasing index set instead
double gram_deviation(const Sketch& sk) {
  if (sk.kind == SketchKind::CoordinateBlock) {
    for (int i = 0; i < sk.p; ++i) {
      if (sk.block[i] < 0 || sk.block[i] >= sk.n) return 1.0;
      if (i > 0 && sk.block[i] <= sk.block[i - 1]) return 1.0;
    }
    return 0.0;
  }
  double worst = 0.0;
  for (int i = 0; i < sk.p; ++i) {
    const double* ci = sk.dense.data() + static_cast<std::size_t>(i) * sk.n;
    for (int j = i; j < sk.p; ++j) {
      const double* cj = sk.dense.data() + static_cast<std::size_t>(j) * sk.n;
      double g = 0.0;
      for (int r = 0; r < sk.n; ++r) g += ci[r] * cj[r];
      worst = std::max(worst, std::fabs(g - (i == j ? 1.0 : 0.0)));
    }
  }
  return worst;
}

// worst deviation of an s-hashing draw from its structural contract:
// exactly s entries per row, each +-1/sqrt(s)
double hashing_deviation(const Sketch& sk) {
  const double mag = 1.0 / std::sqrt(static_cast<double>(sk.hash_nnz));
  double worst = 0.0;
  for (int r = 0; r < sk.n; ++r) {
    int nnz = 0;
    for (int c = 0; c < sk.p; ++c) {
      const double v = sk.dense[static_cast<std::size_t>(c) * sk.n + r];
      if (v != 0.0) {
        ++nnz;
        worst = std::max(worst, std::fabs(std::fabs(v) - mag));
      }
    }
    worst = std::max(worst, static_cast<double>(std::abs(nnz - sk.hash_nnz)));
  }
  return worst;
}

}  // namespace

CertifyOutcome validate_certificates(const CertifyConfig& config) {
  config.instance.validate();
  config.theory.validate();
  if (config.repetitions < 1)
    throw std::invalid_argument("CertifyConfig: repetitions >= 1");

  json certs = json::array();
  bool all = true;
  auto push = [&](const std::string& name, json params, json value, bool validated,
                  json evidence) {
    certs.push_back({{"bound_name", name},
                     {"params", std::move(params)},
                     {"value", std::move(value)},
                     {"validated", validated},
                     {"evidence", std::move(evidence)}});
    all = all && validated;
  };

  {
    const ScalarInequalityReport r =
        scalar_inequality_report(config.grid, config.grid, config.grid_y_max);
    push("exp_moment_scalar_inequality",
         {{"grid_p", r.grid_p}, {"grid_y", r.grid_y}, {"y_max", r.y_max}}, r.max_violation,
         r.ok, {{"tolerance", 1e-12}});
  }

  {
    const struct {
      double beta, delta;
      long k;
    } cells[] = {{0.3, 0.05, 50}, {0.5, 0.1, 200}, {0.62, 0.5, 1000}};
    json evidence = json::array();
    bool ok = true;
    double worst = 1.0;
    for (std::size_t i = 0; i < std::size(cells); ++i) {
      const AlignmentMonteCarlo mc = validate_alignment_count_bound(
          cells[i].beta, cells[i].delta, cells[i].k, config.mc_trials,
          mix_seed(config.seed, 10 + i));
      evidence.push_back({{"beta", cells[i].beta},
                          {"delta", cells[i].delta},
                          {"k_max", cells[i].k},
                          {"threshold", mc.threshold},
                          {"prob_floor", mc.prob_floor},
                          {"empirical", mc.empirical},
                          {"std_error", mc.std_error},
                          {"ok", mc.ok}});
      ok = ok && mc.ok;
      worst = std::min(worst, mc.empirical - mc.prob_floor);
    }
    push("aligned_count_tail_bound", {{"trials", config.mc_trials}}, worst, ok, evidence);
  }

  {
    const struct {
      RecurrenceSpec::Case kind;
      const char* name;
    } cases[] = {{RecurrenceSpec::Case::Sublinear, "recurrence_sublinear"},
                 {RecurrenceSpec::Case::Linear, "recurrence_linear"},
                 {RecurrenceSpec::Case::Superlinear, "recurrence_superlinear"}};
    for (std::size_t i = 0; i < std::size(cases); ++i) {
      const RecurrenceValidation rv = validate_recurrence_dominance(
          cases[i].kind, config.recurrence_draws, config.recurrence_k_max,
          mix_seed(config.seed, 20 + i));
      push(cases[i].name,
           {{"draws", rv.draws}, {"k_max", config.recurrence_k_max}}, rv.max_violation,
           rv.ok, {{"steps_checked", rv.steps_checked}});
    }
  }

  {
    double worst = 0.0;
    const int draws = 25, n = 400, p = 40;
    for (int d = 0; d < draws; ++d) {
      worst = std::max(worst, gram_deviation(sample(SketchKind::RandomOrthonormal, n, p,
                                                    mix_seed(config.seed, 30 + d))));
      worst = std::max(worst, gram_deviation(sample(SketchKind::CoordinateBlock, n, p,
                                                    mix_seed(config.seed, 60 + d))));
    }
    push("sampler_orthonormality", {{"draws", 2 * draws}, {"n", n}, {"p", p}}, worst,
         worst <= 1e-12, {{"tolerance", 1e-12}});
  }

  {
    double worst = 0.0;
    const int draws = 25, n = 300, p = 24, s = 4;
    for (int d = 0; d < draws; ++d)
      worst = std::max(worst, hashing_deviation(sample(SketchKind::SHashing, n, p,
                                                       mix_seed(config.seed, 90 + d), s)));
    push("s_hashing_structure", {{"draws", draws}, {"n", n}, {"p", p}, {"s", s}}, worst,
         worst <= 1e-12, {{"tolerance", 1e-12}});
  }

  {
    const int n = 1000, p = 12;
    const double alpha = 0.5, delta = 0.05;
    const int trials = static_cast<int>(std::min<long>(config.mc_trials, 5000));
    Rng grad_rng(mix_seed(config.seed, 7));
    std::vector<double> grad(n);
    for (int i = 0; i < n; ++i) grad[i] = grad_rng.normal();
    const double freq = estimate_alignment_probability(
        SketchKind::GaussianJLT, n, p, grad, alpha, trials, mix_seed(config.seed, 8));
    const double floor = 1.0 - delta - 0.02;
    push("jlt_alignment_probability",
         {{"n", n}, {"p", p}, {"alpha", alpha}, {"delta", delta}, {"trials", trials}}, freq,
         freq >= floor, {{"floor", floor}});
  }

  std::vector<TheoryRunReport> reports;
  reports.reserve(config.repetitions);
  for (int r = 0; r < config.repetitions; ++r) {
    InstanceSpec spec = config.instance;
    spec.seed = config.instance.seed + static_cast<std::uint64_t>(r);
    reports.push_back(run_theory_check(spec, config.theory));
  }

  {
    json evidence = json::array();
    bool ok = true;
    double worst_ratio = 0.0;
    for (const TheoryRunReport& r : reports) {
      evidence.push_back({{"seed", r.instance_seed},
                          {"iterations", r.iterations},
                          {"aligned_count", r.aligned_count},
                          {"threshold", r.aligned_threshold},
                          {"min_grad_sq", r.min_grad_sq},
                          {"bound", r.theorem1_value},
                          {"ok", r.theorem1_ok}});
      ok = ok && r.theorem1_ok;
      if (r.theorem1_value > 0.0)
        worst_ratio = std::max(worst_ratio, r.min_grad_sq / r.theorem1_value);
    }
    push("gradient_norm_rate",
         {{"beta", config.theory.beta}, {"delta", config.theory.delta},
          {"runs", config.repetitions}},
         worst_ratio, ok, evidence);
  }

  {
    json evidence = json::array();
    bool ok = true;
    double worst_ratio = 0.0;
    for (const TheoryRunReport& r : reports) {
      evidence.push_back({{"seed", r.instance_seed},
                          {"r_estimate", r.r_estimate},
                          {"final_gap", r.final_gap},
                          {"bound", r.convex_bound},
                          {"ok", r.convex_ok}});
      ok = ok && r.convex_ok;
      if (r.convex_bound > 0.0)
        worst_ratio = std::max(worst_ratio, r.final_gap / r.convex_bound);
    }
    push("convex_function_gap_rate",
         {{"beta", config.theory.beta}, {"delta", config.theory.delta},
          {"runs", config.repetitions}},
         worst_ratio, ok, evidence);
  }

  {
    json evidence = json::array();
    bool ok = true;
    double worst = -std::numeric_limits<double>::infinity();
    long violations = 0;
    for (const TheoryRunReport& r : reports) {
      evidence.push_back({{"seed", r.instance_seed},
                          {"violations", r.descent_violations},
                          {"worst_excess", r.descent_worst}});
      ok = ok && r.descent_violations == 0;
      violations += r.descent_violations;
      worst = std::max(worst, r.descent_worst);
    }
    push("descent_margin", {{"runs", config.repetitions}, {"violations", violations}}, worst,
         ok, evidence);
  }

  {
    json evidence = json::array();
    bool ok = true;
    double worst = -std::numeric_limits<double>::infinity();
    long violations = 0;
    for (const TheoryRunReport& r : reports) {
      evidence.push_back({{"seed", r.instance_seed},
                          {"violations", r.gradient_bound_violations},
                          {"worst_excess", r.gradient_bound_worst}});
      ok = ok && r.gradient_bound_violations == 0;
      violations += r.gradient_bound_violations;
      worst = std::max(worst, r.gradient_bound_worst);
    }
    push("aligned_gradient_bound",
         {{"runs", config.repetitions}, {"violations", violations}}, worst, ok, evidence);
  }

  {
    json evidence = json::array();
    bool ok = true;
    double worst = std::numeric_limits<double>::infinity();
    for (const TheoryRunReport& r : reports) {
      evidence.push_back({{"seed", r.instance_seed},
                          {"margin", r.telescoping_margin},
                          {"ok", r.telescoping_ok}});
      ok = ok && r.telescoping_ok;
      worst = std::min(worst, r.telescoping_margin);
    }
    push("telescoped_descent", {{"runs", config.repetitions}}, worst, ok, evidence);
  }

  {
    InstanceSpec spec = config.instance;
    spec.ridge = config.ridge_for_kl;
    const KLRunReport r = run_kl_check(spec, config.theory);
    push("kl_linear_rate",
         {{"sigma2", r.sigma2}, {"gamma2", r.gamma2}, {"seed", r.instance_seed}},
         r.final_gap, r.ok,
         {{"gap0", r.gap0},
          {"bound", r.bound},
          {"iterations", r.iterations},
          {"threshold_met", r.threshold_met}});
  }

  json report;
  report["config"] = {{"n", config.instance.n},
                      {"m", config.instance.m ? json(*config.instance.m) : json(nullptr)},
                      {"density", config.instance.density},
                      {"M", config.instance.cubic_weight},
                      {"base_seed", config.instance.seed},
                      {"repetitions", config.repetitions},
                      {"subspace_dim", config.theory.subspace_dim},
                      {"beta", config.theory.beta},
                      {"delta", config.theory.delta},
                      {"tolerance", config.theory.tolerance},
                      {"mc_trials", config.mc_trials},
                      {"grid", config.grid},
                      {"ridge_for_kl", config.ridge_for_kl},
                      {"seed", config.seed}};
  report["certificates"] = std::move(certs);
  report["all_validated"] = all;

  CertifyOutcome outcome;
  outcome.report_json = report.dump(2);
  outcome.all_validated = all;
  return outcome;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_text_file: cannot open " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("write_text_file: write failed for " + path);
}

}  // namespace scpg
