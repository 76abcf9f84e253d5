#pragma once

#include <span>
#include <vector>

#include "scpg/problem.hpp"
#include "scpg/quartic.hpp"
#include "scpg/sketch.hpp"

namespace scpg {

// Exact minimizer of the sketched model
//   m(d) = <g, d> + (H/2) ||d||^2 + (M/6) (w + ||u + d||^2)^(3/2)
// where g = U^T grad f(x), u = U^T x and w = ||x||^2 - ||u||^2. Solved by
// reducing the stationarity condition to a quartic in mu = ||x + U d||;
// among the nonnegative real roots the one with the smallest model value
// wins, ties going to the smaller ||d||.
struct SubspaceProxResult {
  std::vector<double> step;  // d
  double shifted_norm = 0.0; // mu = ||x + U d||
  double model_value = 0.0;  // m(d)
};

// Requires a sketch with orthonormal columns (coordinate block or random
// orthonormal); the quartic reduction is not valid for the JLT kinds.
// Throws NumericalError when no usable root exists or the recovered step
// fails the |  ||x + U d|| - mu | <= 1e-6 * max(1, mu) consistency check.
SubspaceProxResult sketched_cubic_prox(const CubicQuadraticInstance& inst,
                                       std::span<const double> x, const Sketch& sk,
                                       double step_constant);

// Model value m(d) for the quantities above; shared by the prox and by
// validation code.
double subspace_model_value(std::span<const double> g, std::span<const double> u,
                            double w, double step_constant, double cubic_weight,
                            std::span<const double> d);

// Quartic for mu = ||x + U d|| given the scalar reductions
// (residual_sq = ||H u - g||^2, complement_sq = w).
QuarticCoefficients shifted_norm_quartic(double step_constant, double cubic_weight,
                                         double complement_sq, double residual_sq);

// Full-space baselines.
struct BaselineKind {
  enum class Method { CarmonDuchi, NesterovProx };
  Method method = Method::CarmonDuchi;
  // CarmonDuchi: step size eta; NesterovProx: curvature weight H
  double parameter = 0.0;
};

// x_next = x - eta * grad F(x), written in the stabilized affine form
// (I - eta A - (M/2) eta ||x|| I) x - eta b.
void carmon_duchi_step(const CubicQuadraticInstance& inst, std::span<const double> x,
                       double eta, std::span<double> out);

// Default step size 1 / (4 ||A|| + 2 M R) with the level-set radius
// R = ||A||/M + sqrt(||A||^2/M^2 + 2 ||b||/M).
double carmon_duchi_eta(const CubicQuadraticInstance& inst, double a_norm);

// x_next = 2 (H x - A x - b) / (2 H + M mu) where mu solves
// (M/2) mu^2 + H mu = ||H x - A x - b||; postcondition ||x_next|| = mu.
void nesterov_step(const CubicQuadraticInstance& inst, std::span<const double> x,
                   double h_weight, std::span<double> out);

// x0 = -r b / ||b|| with r chosen so that the model along -b/||b|| is
// stationary. Throws std::invalid_argument when b = 0.
Vector starting_point(const CubicQuadraticInstance& inst);

}  // namespace scpg
