#include "scpg/cubic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "scpg/errors.hpp"
#include "scpg/kernels.hpp"
#include "scpg/linalg.hpp"

namespace scpg {

namespace {

// g = U^T (A x + b), u = U^T x, w = ||x||^2 - ||u||^2 restricted views.
// For a coordinate block the complement energy is accumulated directly,
// which avoids the cancellation in ||x||^2 - ||u||^2.
struct SketchedState {
  std::vector<double> g;
  std::vector<double> u;
  double complement_sq = 0.0;
};

SketchedState restrict_to_sketch(const CubicQuadraticInstance& inst,
                                 std::span<const double> x, const Sketch& sk) {
  const std::size_t p = static_cast<std::size_t>(sk.p);
  SketchedState st;
  st.g.resize(p);
  st.u.resize(p);
  if (sk.kind == SketchKind::CoordinateBlock) {
    inst.a().rows_times_vector(sk.block, x, st.g);
    std::size_t j = 0;
    double w = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (j < p && sk.block[j] == static_cast<int>(i)) {
        st.u[j] = x[i];
        st.g[j] += inst.b()[i];
        ++j;
      } else {
        w += x[i] * x[i];
      }
    }
    st.complement_sq = w;
  } else {
    std::vector<double> grad(x.size());
    inst.a().multiply(x, grad);
    kernels::axpy(1.0, inst.b().span(), grad);
    apply_transpose(sk, grad, st.g);
    apply_transpose(sk, x, st.u);
    st.complement_sq = std::max(0.0, kernels::norm_sq(x) - kernels::norm_sq(st.u));
  }
  return st;
}

}  // namespace

QuarticCoefficients shifted_norm_quartic(double step_constant, double cubic_weight,
                                         double complement_sq, double residual_sq) {
  const double h = step_constant;
  const double m = cubic_weight;
  QuarticCoefficients q;
  q.c4 = 0.25 * m * m;
  q.c3 = h * m;
  q.c2 = h * h - 0.25 * m * m * complement_sq;
  q.c1 = -h * m * complement_sq;
  q.c0 = -residual_sq - h * h * complement_sq;
  return q;
}

double subspace_model_value(std::span<const double> g, std::span<const double> u,
                            double w, double step_constant, double cubic_weight,
                            std::span<const double> d) {
  double lin = 0.0, dsq = 0.0, shift_sq = w;
  for (std::size_t i = 0; i < d.size(); ++i) {
    lin += g[i] * d[i];
    dsq += d[i] * d[i];
    const double s = u[i] + d[i];
    shift_sq += s * s;
  }
  return lin + 0.5 * step_constant * dsq +
         cubic_weight / 6.0 * shift_sq * std::sqrt(shift_sq);
}

SubspaceProxResult sketched_cubic_prox(const CubicQuadraticInstance& inst,
                                       std::span<const double> x, const Sketch& sk,
                                       double step_constant) {
  if (!sk.has_orthonormal_columns())
    throw std::invalid_argument(
        "sketched_cubic_prox: sketch must have orthonormal columns (block or orthonormal)");
  if (x.size() != static_cast<std::size_t>(inst.dimension()) || sk.n != inst.dimension())
    throw std::invalid_argument("sketched_cubic_prox: dimension mismatch");
  if (!(step_constant > 0.0)) throw std::invalid_argument("sketched_cubic_prox: H must be > 0");

  const double m = inst.cubic_weight();
  const double h = step_constant;
  const std::size_t p = static_cast<std::size_t>(sk.p);
  const SketchedState st = restrict_to_sketch(inst, x, sk);
  const double w = st.complement_sq;

  SubspaceProxResult res;
  res.step.assign(p, 0.0);

  // Stationarity at d = 0 means the sketched full gradient vanishes.
  const double xnorm = std::sqrt(w + kernels::norm_sq(st.u));
  {
    double sg_sq = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
      const double v = st.g[i] + 0.5 * m * xnorm * st.u[i];
      sg_sq += v * v;
    }
    if (sg_sq == 0.0) {
      res.shifted_norm = xnorm;
      res.model_value = subspace_model_value(st.g, st.u, w, h, m, res.step);
      return res;
    }
  }

  double residual_sq = 0.0;
  for (std::size_t i = 0; i < p; ++i) {
    const double v = h * st.u[i] - st.g[i];
    residual_sq += v * v;
  }
  const QuarticCoefficients quartic = shifted_norm_quartic(h, m, w, residual_sq);
  const std::vector<double> roots = solve_quartic_real_roots(quartic);

  std::vector<double> d(p);
  bool found = false;
  double best_value = 0.0, best_norm_sq = 0.0;
  for (double mu : roots) {
    if (mu < -1e-12 * std::max(1.0, xnorm)) continue;
    mu = std::max(mu, 0.0);
    const double denom = 2.0 * h + m * mu;
    for (std::size_t i = 0; i < p; ++i) d[i] = -(2.0 * st.g[i] + m * mu * st.u[i]) / denom;
    const double value = subspace_model_value(st.g, st.u, w, h, m, d);
    const double dn = kernels::norm_sq(d);
    const double tie = 1e-12 * std::max(1.0, std::abs(best_value));
    if (!found || value < best_value - tie ||
        (std::abs(value - best_value) <= tie && dn < best_norm_sq)) {
      found = true;
      best_value = value;
      best_norm_sq = dn;
      res.step.assign(d.begin(), d.end());
      res.shifted_norm = mu;
    }
  }
  if (!found)
    throw NumericalError("sketched_cubic_prox: quartic produced no nonnegative real root");

  double shift_sq = w;
  for (std::size_t i = 0; i < p; ++i) {
    const double s = st.u[i] + res.step[i];
    shift_sq += s * s;
  }
  const double mu_actual = std::sqrt(shift_sq);
  if (std::abs(mu_actual - res.shifted_norm) > 1e-6 * std::max(1.0, res.shifted_norm)) {
    std::ostringstream msg;
    msg << "sketched_cubic_prox: shifted-norm consistency failure (mu=" << res.shifted_norm
        << ", ||x+Ud||=" << mu_actual << ", H=" << h << ", M=" << m << ")";
    throw NumericalError(msg.str());
  }
  res.model_value = best_value;
  return res;
}

CompositeProblem make_composite(std::shared_ptr<const CubicQuadraticInstance> inst) {
  if (!inst) throw std::invalid_argument("make_composite: null instance");
  CompositeProblem prob;
  prob.dimension = inst->dimension();

  prob.smooth_value = [inst](std::span<const double> x) {
    std::vector<double> ax(x.size());
    inst->a().multiply(x, ax);
    return 0.5 * kernels::dot(ax, x) + kernels::dot(inst->b().span(), x);
  };
  prob.smooth_gradient = [inst](std::span<const double> x, std::span<double> out) {
    inst->a().multiply(x, out);
    kernels::axpy(1.0, inst->b().span(), out);
  };
  prob.regularizer_value = [inst](std::span<const double> x) {
    const double nx = kernels::norm(x);
    return inst->cubic_weight() / 6.0 * nx * nx * nx;
  };
  prob.regularizer_gradient = [inst](std::span<const double> x, std::span<double> out) {
    const double nx = kernels::norm(x);
    const double scale = 0.5 * inst->cubic_weight() * nx;
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = scale * x[i];
  };
  prob.subspace_prox = [inst](std::span<const double> x, const Sketch& sk, double h) {
    return sketched_cubic_prox(*inst, x, sk, h).step;
  };
  prob.subspace_lipschitz = [inst](const Sketch& sk) {
    // tightest constant for a quadratic smooth part: || U^T A U ||
    if (sk.kind == SketchKind::CoordinateBlock) {
      const std::vector<double> sub = inst->a().dense_submatrix(sk.block);
      return spectral_norm_dense(sk.p, sub);
    }
    const std::size_t n = static_cast<std::size_t>(sk.n);
    const std::size_t p = static_cast<std::size_t>(sk.p);
    std::vector<double> au(n * p);
    inst->a().multiply_block(sk.dense, sk.p, au);
    std::vector<double> small(p * p);
    for (std::size_t j = 0; j < p; ++j)
      kernels::gemv_transpose(sk.dense, sk.n, sk.p,
                              std::span<const double>(au).subspan(j * n, n),
                              std::span<double>(small).subspan(j * p, p));
    return spectral_norm_dense(sk.p, small);
  };
  prob.regularizer_curvature = [inst](std::span<const double> x, const Sketch& sk) {
    // || U^T hess psi(x) U || = (M/2) (||x|| + ||U^T x||^2 / ||x||)
    const double nx = kernels::norm(x);
    if (nx == 0.0) return 0.0;
    std::vector<double> u(static_cast<std::size_t>(sk.p));
    apply_transpose(sk, x, u);
    return 0.5 * inst->cubic_weight() * (nx + kernels::norm_sq(u) / nx);
  };
  return prob;
}

void carmon_duchi_step(const CubicQuadraticInstance& inst, std::span<const double> x,
                       double eta, std::span<double> out) {
  if (x.size() != out.size() || x.size() != static_cast<std::size_t>(inst.dimension()))
    throw std::invalid_argument("carmon_duchi_step: dimension mismatch");
  if (!(eta > 0.0)) throw std::invalid_argument("carmon_duchi_step: eta must be > 0");
  inst.a().multiply(x, out);
  const double shrink = 0.5 * inst.cubic_weight() * eta * kernels::norm(x);
  for (std::size_t i = 0; i < x.size(); ++i)
    out[i] = x[i] - eta * out[i] - shrink * x[i] - eta * inst.b()[i];
}

double carmon_duchi_eta(const CubicQuadraticInstance& inst, double a_norm) {
  if (!(a_norm >= 0.0)) throw std::invalid_argument("carmon_duchi_eta: bad norm");
  const double m = inst.cubic_weight();
  const double bn = kernels::norm(inst.b().span());
  const double ratio = a_norm / m;
  const double radius = ratio + std::sqrt(ratio * ratio + 2.0 * bn / m);
  return 1.0 / (4.0 * a_norm + 2.0 * m * radius);
}

void nesterov_step(const CubicQuadraticInstance& inst, std::span<const double> x,
                   double h_weight, std::span<double> out) {
  if (x.size() != out.size() || x.size() != static_cast<std::size_t>(inst.dimension()))
    throw std::invalid_argument("nesterov_step: dimension mismatch");
  if (!(h_weight > 0.0)) throw std::invalid_argument("nesterov_step: H must be > 0");
  const double m = inst.cubic_weight();
  inst.a().multiply(x, out);
  for (std::size_t i = 0; i < x.size(); ++i)
    out[i] = h_weight * x[i] - out[i] - inst.b()[i];
  const double gn = kernels::norm(out);
  // positive root of (M/2) mu^2 + H mu - ||g|| = 0, cancellation-free
  const double mu = 2.0 * gn / (h_weight + std::sqrt(h_weight * h_weight + 2.0 * m * gn));
  kernels::scal(2.0 / (2.0 * h_weight + m * mu), out);
}

Vector starting_point(const CubicQuadraticInstance& inst) {
  const double bn = kernels::norm(inst.b().span());
  if (bn == 0.0)
    throw std::invalid_argument("starting_point: b = 0, prescribed start undefined");
  const std::size_t n = static_cast<std::size_t>(inst.dimension());
  std::vector<double> ab(n);
  inst.a().multiply(inst.b().span(), ab);
  const double m = inst.cubic_weight();
  const double t = kernels::dot(inst.b().span(), ab) / (m * bn * bn);
  const double r = -t + std::sqrt(t * t + 2.0 * bn / m);
  std::vector<double> x(n);
  const double scale = -r / bn;
  for (std::size_t i = 0; i < n; ++i) x[i] = scale * inst.b()[i];
  return Vector(std::move(x));
}

}  // namespace scpg
