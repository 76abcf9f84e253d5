#include "scpg/problem.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "scpg/kernels.hpp"
#include "scpg/rng.hpp"

namespace scpg {

void CompositeProblem::gradient(std::span<const double> x, std::span<double> out) const {
  smooth_gradient(x, out);
  std::vector<double> reg(x.size());
  regularizer_gradient(x, reg);
  kernels::axpy(1.0, reg, out);
}

CubicQuadraticInstance::CubicQuadraticInstance(SparseMatrix a, Vector b, double cubic_weight)
    : a_(std::move(a)), b_(std::move(b)), cubic_weight_(cubic_weight) {
  if (a_.rows() != a_.cols()) throw std::invalid_argument("instance: A must be square");
  if (b_.size() != static_cast<std::size_t>(a_.rows()))
    throw std::invalid_argument("instance: b dimension mismatch");
  if (!(cubic_weight_ > 0.0) || !std::isfinite(cubic_weight_))
    throw std::invalid_argument("instance: cubic weight must be positive");
  if (!a_.is_symmetric()) throw std::invalid_argument("instance: A must be symmetric");
}

double eval_objective(const CubicQuadraticInstance& inst, std::span<const double> x) {
  if (x.size() != static_cast<std::size_t>(inst.dimension()))
    throw std::invalid_argument("eval_objective: dimension mismatch");
  std::vector<double> ax(x.size());
  inst.a().multiply(x, ax);
  const double quad = 0.5 * kernels::dot(ax, x) + kernels::dot(inst.b().span(), x);
  const double nx = kernels::norm(x);
  return quad + inst.cubic_weight() / 6.0 * nx * nx * nx;
}

void eval_gradient(const CubicQuadraticInstance& inst, std::span<const double> x,
                   std::span<double> out) {
  if (x.size() != static_cast<std::size_t>(inst.dimension()) || out.size() != x.size())
    throw std::invalid_argument("eval_gradient: dimension mismatch");
  inst.a().multiply(x, out);
  kernels::axpy(1.0, inst.b().span(), out);
  const double nx = kernels::norm(x);
  kernels::axpy(0.5 * inst.cubic_weight() * nx, x, out);
}

bool check_lipschitz_along_subspace(
    const std::function<double(std::span<const double>)>& f_value,
    const std::function<void(std::span<const double>, std::span<double>)>& f_gradient,
    const Sketch& sk, double lipschitz, int trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("check_lipschitz_along_subspace: trials >= 1");
  Rng rng(seed);
  const std::size_t n = static_cast<std::size_t>(sk.n);
  const std::size_t p = static_cast<std::size_t>(sk.p);
  std::vector<double> x(n), grad(n), sketched(p), h(p), shifted(n);
  for (int t = 0; t < trials; ++t) {
    for (double& v : x) v = rng.normal();
    for (double& v : h) v = rng.normal();
    f_gradient(x, grad);
    apply_transpose(sk, grad, sketched);
    shifted.assign(x.begin(), x.end());
    apply_add(sk, h, shifted);
    const double lhs = std::abs(f_value(shifted) - f_value(x) - kernels::dot(sketched, h));
    const double rhs = 0.5 * lipschitz * kernels::norm_sq(h) + 1e-10;
    if (lhs > rhs) return false;
  }
  return true;
}

}  // namespace scpg
