#include "scpg/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "scpg/rng.hpp"

namespace scpg {

namespace {

void check_unit_interval(double v, const char* name) {
  if (!(v > 0.0) || !(v < 1.0))
    throw std::invalid_argument(std::string(name) + " must lie in (0, 1)");
}

// (1-beta)(1-delta)(K+1) > 1, required by the function-value rates
void check_k_past_threshold(double beta, double delta, long k_max) {
  if (static_cast<double>(k_max + 1) * (1.0 - beta) * (1.0 - delta) <= 1.0)
    throw std::invalid_argument("k_max must exceed 1/((1-beta)(1-delta)) - 1");
}

}  // namespace

void BoundParams::validate() const {
  check_unit_interval(alpha, "BoundParams: alpha");
  check_unit_interval(beta, "BoundParams: beta");
  check_unit_interval(delta, "BoundParams: delta");
  if (!(eta_min > 0.0)) throw std::invalid_argument("BoundParams: eta_min must be > 0");
  if (!(h_f_max >= 0.0) || !(h_psi_max >= 0.0))
    throw std::invalid_argument("BoundParams: curvature constants must be >= 0");
  if (h_f_max == 0.0 && h_psi_max == 0.0)
    throw std::invalid_argument("BoundParams: need a positive curvature constant");
}

double BoundParams::rate_constant() const {
  validate();
  return alpha * eta_min / (4.0 * (h_f_max * h_f_max + h_psi_max * h_psi_max));
}

AlignmentCountBound alignment_count_bound(double beta, double delta, long k_max) {
  check_unit_interval(beta, "alignment_count_bound: beta");
  check_unit_interval(delta, "alignment_count_bound: delta");
  if (k_max < 0) throw std::invalid_argument("alignment_count_bound: k_max must be >= 0");
  AlignmentCountBound b;
  const double horizon = static_cast<double>(k_max + 1);
  b.threshold = (1.0 - beta) * (1.0 - delta) * horizon;
  b.prob_floor = 1.0 - std::exp(-0.5 * beta * beta * (1.0 - delta) * horizon);
  return b;
}

AlignmentMonteCarlo validate_alignment_count_bound(double beta, double delta, long k_max,
                                                   long trials, std::uint64_t seed) {
  if (trials < 1)
    throw std::invalid_argument("validate_alignment_count_bound: trials must be >= 1");
  const AlignmentCountBound bound = alignment_count_bound(beta, delta, k_max);
  const double success = 1.0 - delta;
  const long draws = k_max + 1;

  // fixed chunking keeps the result independent of the thread count
  const long chunks = 64;
  long hits = 0;
#ifdef _OPENMP
#pragma omp parallel for reduction(+ : hits) schedule(static)
#endif
  for (long c = 0; c < chunks; ++c) {
    const long lo = c * trials / chunks;
    const long hi = (c + 1) * trials / chunks;
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(c)));
    long local = 0;
    for (long t = lo; t < hi; ++t) {
      long count = 0;
      for (long i = 0; i < draws; ++i) count += rng.bernoulli(success) ? 1 : 0;
      if (static_cast<double>(count) >= bound.threshold) ++local;
    }
    hits += local;
  }

  AlignmentMonteCarlo mc;
  mc.threshold = bound.threshold;
  mc.prob_floor = bound.prob_floor;
  mc.trials = trials;
  mc.empirical = static_cast<double>(hits) / static_cast<double>(trials);
  mc.std_error =
      std::sqrt(std::max(0.0, mc.empirical * (1.0 - mc.empirical)) /
                static_cast<double>(trials));
  mc.ok = mc.empirical >= mc.prob_floor - 3.0 * mc.std_error;
  return mc;
}

ScalarInequalityReport scalar_inequality_report(long grid_p, long grid_y, double y_max) {
  if (grid_p < 2 || grid_y < 2)
    throw std::invalid_argument("scalar_inequality_report: grids must be >= 2");
  if (!(y_max > 0.0))
    throw std::invalid_argument("scalar_inequality_report: y_max must be > 0");
  ScalarInequalityReport rep;
  rep.grid_p = grid_p;
  rep.grid_y = grid_y;
  rep.y_max = y_max;
  double worst = -std::numeric_limits<double>::infinity();
  for (long i = 0; i < grid_p; ++i) {
    const double p = static_cast<double>(i) / static_cast<double>(grid_p - 1);
    for (long j = 0; j < grid_y; ++j) {
      const double y = y_max * static_cast<double>(j) / static_cast<double>(grid_y - 1);
      // 1 - p + p e^{-y} = 1 + p (e^{-y} - 1), accurate near the corners
      const double lhs = p * y + std::log1p(p * std::expm1(-y));
      const double rhs = 0.5 * y * y * p;
      worst = std::max(worst, lhs - rhs);
    }
  }
  rep.max_violation = worst;
  rep.ok = worst <= 1e-12;
  return rep;
}

bool verify_scalar_inequality(long grid_p, long grid_y, double y_max) {
  return scalar_inequality_report(grid_p, grid_y, y_max).ok;
}

double theorem1_bound(const BoundParams& params, double f0_minus_fstar, double beta,
                      double delta, long k_max) {
  check_unit_interval(beta, "theorem1_bound: beta");
  check_unit_interval(delta, "theorem1_bound: delta");
  if (k_max < 0) throw std::invalid_argument("theorem1_bound: k_max must be >= 0");
  if (!(f0_minus_fstar >= 0.0))
    throw std::invalid_argument("theorem1_bound: gap must be >= 0");
  const double c = params.rate_constant();
  return f0_minus_fstar /
         (c * (1.0 - beta) * (1.0 - delta) * static_cast<double>(k_max + 1));
}

long iteration_threshold(double epsilon, double gamma, const BoundParams& params,
                         double f0_minus_fstar, double beta, double delta) {
  check_unit_interval(epsilon, "iteration_threshold: epsilon");
  check_unit_interval(gamma, "iteration_threshold: gamma");
  check_unit_interval(beta, "iteration_threshold: beta");
  check_unit_interval(delta, "iteration_threshold: delta");
  if (!(f0_minus_fstar >= 0.0))
    throw std::invalid_argument("iteration_threshold: gap must be >= 0");
  const double c = params.rate_constant();
  const double accuracy_branch =
      f0_minus_fstar / (epsilon * epsilon * c * (1.0 - delta) * (1.0 - beta)) - 1.0;
  const double probability_branch =
      2.0 / (beta * beta * (1.0 - delta)) * std::log(1.0 / gamma) - 1.0;
  return static_cast<long>(std::ceil(std::max(accuracy_branch, probability_branch)));
}

double convex_rate_bound(const BoundParams& params, double r_level, double beta,
                         double delta, long k_max) {
  check_unit_interval(beta, "convex_rate_bound: beta");
  check_unit_interval(delta, "convex_rate_bound: delta");
  if (!(r_level > 0.0)) throw std::invalid_argument("convex_rate_bound: R must be > 0");
  check_k_past_threshold(beta, delta, k_max);
  const double c = params.rate_constant();
  const double aligned_floor =
      (1.0 - beta) * (1.0 - delta) * static_cast<double>(k_max + 1) - 1.0;
  return r_level * r_level / (c * aligned_floor);
}

RecurrenceSpec::Case RecurrenceSpec::case_kind() const {
  if (!(delta0 > 0.0)) throw std::invalid_argument("RecurrenceSpec: delta0 must be > 0");
  if (!(zeta > -1.0)) throw std::invalid_argument("RecurrenceSpec: zeta must be > -1");
  if (zeta > 0.0) {
    if (c != 1.0)
      throw std::invalid_argument("RecurrenceSpec: the sublinear case requires c = 1");
    return Case::Sublinear;
  }
  if (zeta == 0.0) {
    if (!(c > 0.0) || !(c < 1.0))
      throw std::invalid_argument("RecurrenceSpec: the linear case requires c in (0, 1)");
    return Case::Linear;
  }
  if (!(c > 0.0))
    throw std::invalid_argument("RecurrenceSpec: the superlinear case requires c > 0");
  return Case::Superlinear;
}

double recurrence_rate_bound(const RecurrenceSpec& spec, long k) {
  if (k < 0) throw std::invalid_argument("recurrence_rate_bound: k must be >= 0");
  switch (spec.case_kind()) {
    case RecurrenceSpec::Case::Sublinear:
      return spec.delta0 /
             std::pow(spec.zeta * std::pow(spec.delta0, spec.zeta) *
                              static_cast<double>(k) +
                          1.0,
                      1.0 / spec.zeta);
    case RecurrenceSpec::Case::Linear:
      return std::pow(1.0 - spec.c, static_cast<double>(k)) * spec.delta0;
    case RecurrenceSpec::Case::Superlinear:
      throw std::invalid_argument(
          "recurrence_rate_bound: superlinear case has no closed form in k; use "
          "superlinear_contraction");
  }
  throw std::invalid_argument("recurrence_rate_bound: unknown case");
}

double recurrence_rate_ceiling(const RecurrenceSpec& spec, long k) {
  if (spec.case_kind() != RecurrenceSpec::Case::Sublinear)
    throw std::invalid_argument("recurrence_rate_ceiling: sublinear case only");
  if (k < 1) throw std::invalid_argument("recurrence_rate_ceiling: k must be >= 1");
  return std::pow(1.0 / (spec.zeta * static_cast<double>(k)), 1.0 / spec.zeta);
}

double superlinear_contraction(const RecurrenceSpec& spec, double delta_next) {
  if (spec.case_kind() != RecurrenceSpec::Case::Superlinear)
    throw std::invalid_argument("superlinear_contraction: superlinear case only");
  if (!(delta_next > 0.0))
    throw std::invalid_argument("superlinear_contraction: delta_next must be > 0");
  return 1.0 / (1.0 + spec.c * std::pow(delta_next, spec.zeta));
}

RecurrenceValidation validate_recurrence_dominance(RecurrenceSpec::Case kind, long draws,
                                                   long k_max, std::uint64_t seed) {
  if (draws < 1 || k_max < 1)
    throw std::invalid_argument("validate_recurrence_dominance: draws and k_max >= 1");
  RecurrenceValidation out;
  out.draws = draws;
  out.max_violation = -std::numeric_limits<double>::infinity();
  Rng rng(seed);
  for (long d = 0; d < draws; ++d) {
    RecurrenceSpec spec;
    switch (kind) {
      case RecurrenceSpec::Case::Sublinear:
        spec.zeta = rng.uniform(0.1, 3.0);
        spec.c = 1.0;
        // delta0 < 1 keeps the equality iterates positive
        spec.delta0 = rng.uniform(0.05, 0.95);
        break;
      case RecurrenceSpec::Case::Linear:
        spec.zeta = 0.0;
        spec.c = rng.uniform(0.05, 0.95);
        spec.delta0 = rng.uniform(0.1, 10.0);
        break;
      case RecurrenceSpec::Case::Superlinear:
        spec.zeta = rng.uniform(-0.9, -0.1);
        spec.c = rng.uniform(0.05, 0.5);
        spec.delta0 = rng.uniform(1.0, 10.0);
        break;
    }
    double delta = spec.delta0;
    for (long k = 0; k < k_max; ++k) {
      const double decrease = spec.c * std::pow(delta, spec.zeta + 1.0);
      const double next = delta - decrease;
      if (!(next > 0.0)) break;  // superlinear iterates hit zero in finite steps
      if (kind == RecurrenceSpec::Case::Superlinear) {
        const double bound = superlinear_contraction(spec, next) * delta;
        out.max_violation = std::max(out.max_violation, next - bound);
      } else {
        const double bound = recurrence_rate_bound(spec, k + 1);
        out.max_violation = std::max(out.max_violation, next - bound);
      }
      ++out.steps_checked;
      delta = next;
      if (delta < 1e-300) break;
    }
  }
  out.ok = out.max_violation <= 1e-12;
  return out;
}

void KLParams::validate() const {
  if (!(q > 1.0)) throw std::invalid_argument("KLParams: q must be > 1");
  if (!(sigma_q > 0.0)) throw std::invalid_argument("KLParams: sigma_q must be > 0");
  if (!(rate_constant > 0.0))
    throw std::invalid_argument("KLParams: rate_constant must be > 0");
}

double KLParams::gamma1() const {
  validate();
  if (mode == Mode::KL) return rate_constant * std::pow(sigma_q, -2.0 / q);
  return rate_constant * std::pow(q, 2.0 / q) * std::pow(sigma_q, 2.0 * (q - 1.0) / q);
}

double KLParams::gamma2() const {
  validate();
  if (q != 2.0) throw std::invalid_argument("KLParams: gamma2 is defined for q = 2 only");
  if (mode == Mode::KL) return 1.0 - rate_constant / sigma_q;
  return 1.0 - 2.0 * sigma_q * rate_constant;
}

double kl_rate_bound(const KLParams& params, double f_gap_at_k0, double beta, double delta,
                     long k_max) {
  params.validate();
  check_unit_interval(beta, "kl_rate_bound: beta");
  check_unit_interval(delta, "kl_rate_bound: delta");
  if (!(f_gap_at_k0 >= 0.0)) throw std::invalid_argument("kl_rate_bound: gap must be >= 0");
  check_k_past_threshold(beta, delta, k_max);
  const double c2 = (1.0 - beta) * (1.0 - delta);
  const double aligned_floor = c2 * static_cast<double>(k_max + 1) - 1.0;
  const double gap_pow = std::pow(f_gap_at_k0, (2.0 - params.q) / params.q);
  if (params.q < 2.0) {
    const double denom =
        std::pow(1.0 + params.c1() * aligned_floor * params.gamma1() * gap_pow,
                 params.q / (2.0 - params.q));
    return f_gap_at_k0 / denom;
  }
  if (params.q == 2.0) {
    const double g2 = params.gamma2();
    if (!(g2 > 0.0) || !(g2 < 1.0))
      throw std::invalid_argument("kl_rate_bound: gamma2 must lie in (0, 1) for q = 2");
    return std::pow(g2, aligned_floor) * f_gap_at_k0;
  }
  return 1.0 / (1.0 + params.gamma1() * gap_pow);
}

}  // namespace scpg
