#pragma once

#include <cstdint>
#include <string>

namespace scpg {

// Constants entering the gradient-norm rate: C = alpha * eta_min /
// (4 (H_f_max^2 + H_psi_max^2)). alpha is the squared-sense alignment
// constant; eta_min the smallest descent margin; the H's are the largest
// observed (or assumed) curvature constants.
struct BoundParams {
  double alpha = 0.0;
  double beta = 0.0;
  double delta = 0.0;
  double eta_min = 0.0;
  double h_f_max = 0.0;
  double h_psi_max = 0.0;

  void validate() const;
  double rate_constant() const;  // C
};

// High-probability lower bound on the number of well-aligned iterations
// among 0..K: P[count >= threshold] >= prob_floor.
struct AlignmentCountBound {
  double threshold = 0.0;
  double prob_floor = 0.0;
};

AlignmentCountBound alignment_count_bound(double beta, double delta, long k_max);

// Bernoulli Monte Carlo for the count bound: draws K+1 independent
// Bernoulli(1-delta) indicators per trial and compares the empirical
// frequency of {count >= threshold} against prob_floor minus three
// binomial standard errors. Deterministic given seed.
struct AlignmentMonteCarlo {
  double threshold = 0.0;
  double prob_floor = 0.0;
  double empirical = 0.0;
  double std_error = 0.0;
  long trials = 0;
  bool ok = false;
};

AlignmentMonteCarlo validate_alignment_count_bound(double beta, double delta, long k_max,
                                                   long trials, std::uint64_t seed);

// p*y + log(1 - p + p e^{-y}) <= y^2 p / 2 over [0,1] x [0, y_max].
struct ScalarInequalityReport {
  long grid_p = 0;
  long grid_y = 0;
  double y_max = 0.0;
  double max_violation = 0.0;  // max over the grid of LHS - RHS
  bool ok = false;             // max_violation <= 1e-12
};

ScalarInequalityReport scalar_inequality_report(long grid_p, long grid_y, double y_max);
bool verify_scalar_inequality(long grid_p, long grid_y, double y_max);

// min over recorded iterations of ||grad F||^2 is bounded by
// gap / (C (1-beta)(1-delta)(K+1)) with probability >= prob_floor.
double theorem1_bound(const BoundParams& params, double f0_minus_fstar, double beta,
                      double delta, long k_max);

// Smallest K guaranteeing min ||grad F|| <= epsilon with probability
// >= 1 - gamma: ceil of max{gap/(eps^2 C (1-delta)(1-beta)) - 1,
// (2/(beta^2 (1-delta))) ln(1/gamma) - 1}.
long iteration_threshold(double epsilon, double gamma, const BoundParams& params,
                         double f0_minus_fstar, double beta, double delta);

// F(x_K) - F* <= (1/C) R^2 / ((1-beta)(1-delta)(K+1) - 1); requires
// K > 1/((1-beta)(1-delta)) - 1.
double convex_rate_bound(const BoundParams& params, double r_level, double beta,
                         double delta, long k_max);

// Delta_k - Delta_{k+1} >= c Delta_k^{zeta+1}. Case inference:
// zeta > 0 with c = 1 is the sublinear case, zeta = 0 with c in (0,1)
// the linear case, zeta in (-1,0) with c > 0 the superlinear case.
struct RecurrenceSpec {
  double zeta = 0.0;
  double c = 0.0;
  double delta0 = 0.0;

  enum class Case { Sublinear, Linear, Superlinear };
  Case case_kind() const;  // throws std::invalid_argument on invalid combos
};

// Bound at step k for the sublinear / linear cases:
//   sublinear: Delta_0 / (zeta Delta_0^zeta k + 1)^{1/zeta}
//   linear:    (1-c)^k Delta_0
// The superlinear case has no closed form in k; use
// superlinear_contraction instead.
double recurrence_rate_bound(const RecurrenceSpec& spec, long k);

// Secondary sublinear ceiling (1/(zeta k))^{1/zeta}, k >= 1.
double recurrence_rate_ceiling(const RecurrenceSpec& spec, long k);

// Per-step factor 1/(1 + c Delta_{k+1}^zeta) of the superlinear case,
// evaluated at the later (smaller) element.
double superlinear_contraction(const RecurrenceSpec& spec, double delta_next);

// Iterates the equality version of the recurrence from random valid
// (zeta, c, delta0) draws and verifies the corresponding bound dominates
// every element up to k_max (per-step contraction for the superlinear
// case). max_violation is the largest observed excess over the bound.
struct RecurrenceValidation {
  long draws = 0;
  long steps_checked = 0;
  double max_violation = 0.0;
  bool ok = false;  // max_violation <= 1e-12
};

RecurrenceValidation validate_recurrence_dominance(RecurrenceSpec::Case kind, long draws,
                                                   long k_max, std::uint64_t seed);

// Function-value rate constants under the KL / uniform-convexity
// hypotheses. rate_constant is the C of BoundParams.
struct KLParams {
  enum class Mode { KL, UniformlyConvex };
  double q = 2.0;
  double sigma_q = 0.0;
  Mode mode = Mode::KL;
  double rate_constant = 0.0;

  void validate() const;
  double gamma1() const;
  double gamma2() const;  // q = 2 only
  double c1() const { return (2.0 - q) / q; }
};

// High-probability function-value bound after K iterations given the gap
// at the first well-aligned iteration. q in (1,2): sublinear; q = 2:
// linear factor gamma2^{(1-beta)(1-delta)(K+1)-1} (requires gamma2 in
// (0,1)); q > 2: returns the per-aligned-step contraction factor
// 1/(1 + gamma1 * gap^{(2-q)/q}). Requires K > 1/((1-beta)(1-delta)) - 1.
double kl_rate_bound(const KLParams& params, double f_gap_at_k0, double beta, double delta,
                     long k_max);

}  // namespace scpg
