#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

#include "oracles.hpp"
#include "scpg/cubic.hpp"
#include "scpg/errors.hpp"
#include "scpg/kernels.hpp"
#include "scpg/linalg.hpp"
#include "scpg/problem.hpp"
#include "scpg/rng.hpp"
#include "scpg/sketch.hpp"

namespace {

scpg::SparseMatrix random_symmetric(int n, std::uint64_t seed) {
  scpg::Rng rng(seed);
  std::vector<scpg::Triplet> trips;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const double v = rng.normal();
      trips.push_back({i, j, v});
      if (j != i) trips.push_back({j, i, v});
    }
  }
  return scpg::SparseMatrix::from_triplets(n, n, trips, scpg::DuplicatePolicy::Error);
}

std::vector<double> random_vector(int n, std::uint64_t seed) {
  scpg::Rng rng(seed);
  std::vector<double> x(n);
  for (double& v : x) v = rng.normal();
  return x;
}

struct SketchedQuantities {
  std::vector<double> g;
  std::vector<double> u;
  double w = 0.0;
};

SketchedQuantities sketched_quantities(const scpg::CubicQuadraticInstance& inst,
                                       std::span<const double> x,
                                       const scpg::Sketch& sk) {
  const int p = sk.p;
  std::vector<double> grad(x.size());
  inst.a().multiply(x, grad);
  scpg::kernels::axpy(1.0, inst.b().span(), grad);
  SketchedQuantities q;
  q.g.resize(p);
  q.u.resize(p);
  scpg::apply_transpose(sk, grad, q.g);
  scpg::apply_transpose(sk, x, q.u);
  q.w = std::max(0.0, scpg::kernels::norm_sq(x) - scpg::kernels::norm_sq(q.u));
  return q;
}

double stationarity_residual(const SketchedQuantities& q, double h, double m,
                             const scpg::SubspaceProxResult& res) {
  double acc = 0.0;
  for (std::size_t i = 0; i < res.step.size(); ++i) {
    const double r = q.g[i] + h * res.step[i] +
                     0.5 * m * res.shifted_norm * (q.u[i] + res.step[i]);
    acc += r * r;
  }
  return std::sqrt(acc);
}

}  // namespace

TEST_CASE("prox output satisfies stationarity and the shifted-norm identity") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    scpg::Rng rng(500 + s);
    const int n = 3 + static_cast<int>(rng.uniform_index(6));
    const int p = 1 + static_cast<int>(rng.uniform_index(
                          static_cast<std::size_t>(std::min(n, 3))));
    const auto inst = scpg::CubicQuadraticInstance(
        random_symmetric(n, 600 + s), scpg::Vector(random_vector(n, 700 + s)),
        rng.uniform(0.1, 3.0));
    const auto x = random_vector(n, 800 + s);
    const double h = rng.uniform(0.5, 5.0);
    const auto kind = (s % 2 == 0) ? scpg::SketchKind::CoordinateBlock
                                   : scpg::SketchKind::RandomOrthonormal;
    const auto sk = scpg::sample(kind, n, p, 900 + s);

    const auto res = scpg::sketched_cubic_prox(inst, x, sk, h);
    const auto q = sketched_quantities(inst, x, sk);

    // mu recorded by the prox equals the norm it implies
    double shift_sq = q.w;
    for (int i = 0; i < p; ++i) {
      const double v = q.u[i] + res.step[i];
      shift_sq += v * v;
    }
    CHECK(std::sqrt(shift_sq) ==
          doctest::Approx(res.shifted_norm).epsilon(1e-8));

    // first-order condition g + H d + (M/2) mu (u + d) = 0
    const double gn = scpg::kernels::norm(q.g);
    CHECK(stationarity_residual(q, h, inst.cubic_weight(), res) <=
          1e-6 * std::max(1.0, gn));

    // reported model value matches the shared evaluator
    CHECK(res.model_value ==
          doctest::Approx(scpg::subspace_model_value(q.g, q.u, q.w, h,
                                                     inst.cubic_weight(), res.step))
              .epsilon(1e-10));

    // fixed point form d_i = -(2 g_i + M mu u_i) / (2 H + M mu)
    const double m = inst.cubic_weight();
    const double denom = 2.0 * h + m * res.shifted_norm;
    for (int i = 0; i < p; ++i) {
      const double expect = -(2.0 * q.g[i] + m * res.shifted_norm * q.u[i]) / denom;
      CHECK(res.step[i] == doctest::Approx(expect).epsilon(1e-7));
    }
  }
}

TEST_CASE("prox value never loses to a dense grid scan of the model") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    scpg::Rng rng(1000 + s);
    const int n = 4 + static_cast<int>(rng.uniform_index(5));
    const int p = 1 + static_cast<int>(rng.uniform_index(2));
    const auto inst = scpg::CubicQuadraticInstance(
        random_symmetric(n, 1100 + s), scpg::Vector(random_vector(n, 1200 + s)),
        rng.uniform(0.1, 3.0));
    const auto x = random_vector(n, 1300 + s);
    const double h = rng.uniform(0.5, 5.0);
    const auto sk = scpg::sample(scpg::SketchKind::CoordinateBlock, n, p, 1400 + s);

    const auto res = scpg::sketched_cubic_prox(inst, x, sk, h);
    const auto q = sketched_quantities(inst, x, sk);

    const double gn = scpg::kernels::norm(q.g);
    const double xn = scpg::kernels::norm(x);
    const double m = inst.cubic_weight();
    double radius =
        (gn + std::sqrt(gn * gn + h * m / 3.0 * xn * xn * xn)) / h;
    double dmax = 0.0;
    for (const double v : res.step) dmax = std::max(dmax, std::abs(v));
    radius = std::max(radius, 1.2 * dmax + 1.0);

    const auto grid = oracle::grid_scan_subspace_model(q.g, q.u, q.w, h, m,
                                                       radius, 201);
    CHECK(res.model_value <=
          grid.best_value + 1e-9 * std::max(1.0, std::abs(grid.best_value)));
  }
}

TEST_CASE("full block prox reproduces the cubic-regularized Newton step") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    scpg::Rng rng(2000 + s);
    const int n = 2 + static_cast<int>(rng.uniform_index(29));
    const auto inst = scpg::CubicQuadraticInstance(
        random_symmetric(n, 2100 + s), scpg::Vector(random_vector(n, 2200 + s)),
        rng.uniform(0.2, 2.0));
    const auto x = random_vector(n, 2300 + s);
    const double h = rng.uniform(0.5, 5.0);
    const auto sk = scpg::sample(scpg::SketchKind::CoordinateBlock, n, n, 2400 + s);

    const auto res = scpg::sketched_cubic_prox(inst, x, sk, h);
    std::vector<double> nesterov(n);
    scpg::nesterov_step(inst, x, h, nesterov);
    for (int i = 0; i < n; ++i) {
      const double moved = x[i] + res.step[i];
      CHECK(moved == doctest::Approx(nesterov[i]).epsilon(1e-8));
    }
  }
}

TEST_CASE("prox rejects sketches without orthonormal columns") {
  const int n = 12;
  const auto inst = scpg::CubicQuadraticInstance(
      random_symmetric(n, 3000), scpg::Vector(random_vector(n, 3001)), 1.0);
  const auto x = random_vector(n, 3002);
  const auto jlt = scpg::sample(scpg::SketchKind::GaussianJLT, n, 4, 3003);
  CHECK_THROWS_AS(scpg::sketched_cubic_prox(inst, x, jlt, 1.0),
                  std::invalid_argument);
  const auto hash = scpg::sample(scpg::SketchKind::SHashing, n, 4, 3004, 2);
  CHECK_THROWS_AS(scpg::sketched_cubic_prox(inst, x, hash, 1.0),
                  std::invalid_argument);

  const auto block = scpg::sample(scpg::SketchKind::CoordinateBlock, n, 4, 3005);
  CHECK_THROWS_AS(scpg::sketched_cubic_prox(inst, x, block, 0.0),
                  std::invalid_argument);
  const auto short_x = random_vector(n - 1, 3006);
  CHECK_THROWS_AS(scpg::sketched_cubic_prox(inst, short_x, block, 1.0),
                  std::invalid_argument);
}

TEST_CASE("gradient step matches the explicit update") {
  const int n = 10;
  const auto inst = scpg::CubicQuadraticInstance(
      random_symmetric(n, 3100), scpg::Vector(random_vector(n, 3101)), 0.8);
  const auto x = random_vector(n, 3102);
  const double eta = 0.03;

  std::vector<double> stepped(n), grad(n);
  scpg::carmon_duchi_step(inst, x, eta, stepped);
  scpg::eval_gradient(inst, x, grad);
  for (int i = 0; i < n; ++i)
    CHECK(stepped[i] == doctest::Approx(x[i] - eta * grad[i]).epsilon(1e-12));
}

TEST_CASE("default gradient step size uses the level-set radius") {
  const std::vector<double> diag = {2.0, -1.0, 0.5};
  const auto inst = scpg::CubicQuadraticInstance(scpg::SparseMatrix::diagonal(diag),
                                                 scpg::Vector({3.0, 0.0, -4.0}), 2.0);
  const double a_norm = 2.0;
  const double bn = 5.0;
  const double ratio = a_norm / 2.0;
  const double radius = ratio + std::sqrt(ratio * ratio + 2.0 * bn / 2.0);
  CHECK(scpg::carmon_duchi_eta(inst, a_norm) ==
        doctest::Approx(1.0 / (4.0 * a_norm + 2.0 * 2.0 * radius)).epsilon(1e-14));
}

TEST_CASE("proximal baseline step lands on the prescribed sphere") {
  for (std::uint64_t s = 0; s < 8; ++s) {
    scpg::Rng rng(3200 + s);
    const int n = 3 + static_cast<int>(rng.uniform_index(10));
    const auto inst = scpg::CubicQuadraticInstance(
        random_symmetric(n, 3300 + s), scpg::Vector(random_vector(n, 3400 + s)),
        rng.uniform(0.2, 2.5));
    const auto x = random_vector(n, 3500 + s);
    const double h = rng.uniform(0.5, 4.0);

    std::vector<double> out(n), g(n);
    scpg::nesterov_step(inst, x, h, out);

    inst.a().multiply(x, g);
    for (int i = 0; i < n; ++i) g[i] = h * x[i] - g[i] - inst.b()[i];
    const double gn = scpg::kernels::norm(g);
    const double mu = scpg::kernels::norm(out);
    const double m = inst.cubic_weight();
    CHECK(0.5 * m * mu * mu + h * mu == doctest::Approx(gn).epsilon(1e-10));

    // out is parallel to g
    const double cross = scpg::kernels::dot(out, g);
    CHECK(cross == doctest::Approx(mu * gn).epsilon(1e-10));
  }
}

TEST_CASE("proximal baseline is a fixed point at a stationary point") {
  const int n = 20;
  const auto inst = scpg::CubicQuadraticInstance(
      random_symmetric(n, 3600), scpg::Vector(random_vector(n, 3601)), 1.5);
  const auto x0 = scpg::starting_point(inst);
  auto x = std::vector<double>(x0.span().begin(), x0.span().end());
  const double h = 1.1 * scpg::spectral_norm(inst.a());

  std::vector<double> next(n);
  for (int k = 0; k < 4000; ++k) {
    scpg::nesterov_step(inst, x, h, next);
    std::swap(x, next);
  }
  std::vector<double> grad(n);
  scpg::eval_gradient(inst, x, grad);
  REQUIRE(scpg::kernels::norm(grad) < 1e-9);

  scpg::nesterov_step(inst, x, h, next);
  for (int i = 0; i < n; ++i)
    CHECK(next[i] == doctest::Approx(x[i]).epsilon(1e-7));
}

TEST_CASE("prescribed start solves the ray stationarity for the identity example") {
  // A = I, b = e1, M = 1: radius sqrt(3) - 1 along -e1
  std::vector<scpg::Triplet> trips;
  for (int i = 0; i < 5; ++i) trips.push_back({i, i, 1.0});
  const auto inst = scpg::CubicQuadraticInstance(
      scpg::SparseMatrix::from_triplets(5, 5, trips, scpg::DuplicatePolicy::Error),
      scpg::Vector({1.0, 0.0, 0.0, 0.0, 0.0}), 1.0);
  const auto x0 = scpg::starting_point(inst);
  CHECK(x0[0] == doctest::Approx(-(std::sqrt(3.0) - 1.0)).epsilon(1e-14));
  for (int i = 1; i < 5; ++i) CHECK(x0[i] == 0.0);

  const auto zero_b = scpg::CubicQuadraticInstance(
      scpg::SparseMatrix::identity(3), scpg::Vector::zeros(3), 1.0);
  CHECK_THROWS_AS(scpg::starting_point(zero_b), std::invalid_argument);
}

TEST_CASE("prescribed start is stationary along its ray on random instances") {
  for (std::uint64_t s = 0; s < 6; ++s) {
    const int n = 7;
    const auto inst = scpg::CubicQuadraticInstance(
        random_symmetric(n, 3700 + s), scpg::Vector(random_vector(n, 3800 + s)),
        0.5 + 0.3 * static_cast<double>(s));
    const auto x0 = scpg::starting_point(inst);

    // directional derivative of F along x0/||x0|| vanishes at x0
    std::vector<double> grad(n);
    scpg::eval_gradient(inst, x0.span(), grad);
    const double along = scpg::kernels::dot(grad, x0.span());
    CHECK(std::abs(along) <= 1e-9 * std::max(1.0, scpg::kernels::norm(grad) *
                                                      scpg::kernels::norm(x0.span())));
  }
}
