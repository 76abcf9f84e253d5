#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "scpg/linalg.hpp"
#include "scpg/sketch.hpp"

namespace scpg {

// Composite objective F = f + psi given as a bundle of callables: a
// smooth part f with its gradient, a simple regularizer psi with its
// gradient, a subspace prox oracle that minimizes
//   <U^T grad f(x), d> + (H/2) ||d||^2 + psi(x + U d)
// over d, and curvature oracles used for step constants and telemetry.
// Oracles a problem cannot provide stay empty; consumers check before
// calling.
struct CompositeProblem {
  int dimension = 0;

  std::function<double(std::span<const double>)> smooth_value;
  std::function<void(std::span<const double>, std::span<double>)> smooth_gradient;
  std::function<double(std::span<const double>)> regularizer_value;
  std::function<void(std::span<const double>, std::span<double>)> regularizer_gradient;

  std::function<std::vector<double>(std::span<const double>, const Sketch&, double)>
      subspace_prox;

  // Lipschitz constant of U^T grad f(x + U h) in h (L_U)
  std::function<double(const Sketch&)> subspace_lipschitz;
  // ||U^T hess psi(x) U|| at a point, for telemetry surrogates
  std::function<double(std::span<const double>, const Sketch&)> regularizer_curvature;

  double value(std::span<const double> x) const {
    return smooth_value(x) + regularizer_value(x);
  }
  void gradient(std::span<const double> x, std::span<double> out) const;
};

// F(x) = 0.5 <A x, x> + <b, x> + (M/6) ||x||^3 with A symmetric and M > 0.
class CubicQuadraticInstance {
 public:
  CubicQuadraticInstance(SparseMatrix a, Vector b, double cubic_weight);

  const SparseMatrix& a() const { return a_; }
  const Vector& b() const { return b_; }
  double cubic_weight() const { return cubic_weight_; }
  int dimension() const { return a_.rows(); }

 private:
  SparseMatrix a_;
  Vector b_;
  double cubic_weight_;
};

double eval_objective(const CubicQuadraticInstance& inst, std::span<const double> x);
void eval_gradient(const CubicQuadraticInstance& inst, std::span<const double> x,
                   std::span<double> out);

// Oracle bundle for a cubic-regularized quadratic. The instance is
// retained by the returned callables.
CompositeProblem make_composite(std::shared_ptr<const CubicQuadraticInstance> inst);

// Randomized check of the descent-lemma inequality
//   |f(x + U h) - f(x) - <U^T grad f(x), h>| <= (L/2) ||h||^2 + 1e-10
// over `trials` Gaussian (x, h) pairs. Deterministic given seed.
bool check_lipschitz_along_subspace(
    const std::function<double(std::span<const double>)>& f_value,
    const std::function<void(std::span<const double>, std::span<double>)>& f_gradient,
    const Sketch& sk, double lipschitz, int trials, std::uint64_t seed);

}  // namespace scpg
