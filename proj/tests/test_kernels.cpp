#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "scpg/kernels.hpp"
#include "scpg/linalg.hpp"
#include "scpg/rng.hpp"

using namespace scpg;

namespace {

std::vector<double> random_vector(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (double& x : v) x = rng.normal();
  return v;
}

double rel_err(double a, double b) {
  return std::fabs(a - b) / std::max({1.0, std::fabs(a), std::fabs(b)});
}

}  // namespace

TEST_CASE("dot and norm_sq match a long double reference") {
  for (std::size_t n : {0ul, 1ul, 7ul, 1000ul, 20000ul}) {
    const auto x = random_vector(n, 1 + n);
    const auto y = random_vector(n, 2 + n);
    long double acc = 0.0L;
    for (std::size_t i = 0; i < n; ++i) acc += static_cast<long double>(x[i]) * y[i];
    CHECK(rel_err(kernels::serial::dot(x, y), static_cast<double>(acc)) < 1e-13);
    CHECK(rel_err(kernels::dot(x, y), static_cast<double>(acc)) < 1e-12);

    long double nacc = 0.0L;
    for (std::size_t i = 0; i < n; ++i) nacc += static_cast<long double>(x[i]) * x[i];
    CHECK(rel_err(kernels::serial::norm_sq(x), static_cast<double>(nacc)) < 1e-13);
    CHECK(rel_err(kernels::norm_sq(x), static_cast<double>(nacc)) < 1e-12);
    CHECK(rel_err(kernels::norm(x), std::sqrt(static_cast<double>(nacc))) < 1e-12);
  }
}

TEST_CASE("parallel kernels agree with the serial reference") {
  // sizes straddle the parallel cutoff
  for (std::size_t n : {100ul, kernels::kParallelCutoff, 3 * kernels::kParallelCutoff}) {
    const auto x = random_vector(n, 11 + n);
    const auto y = random_vector(n, 12 + n);
    CHECK(rel_err(kernels::dot(x, y), kernels::serial::dot(x, y)) < 1e-12);
    CHECK(rel_err(kernels::norm_sq(x), kernels::serial::norm_sq(x)) < 1e-12);

    auto ya = y, yb = y;
    kernels::serial::axpy(0.37, x, ya);
    kernels::axpy(0.37, x, yb);
    for (std::size_t i = 0; i < n; ++i) CHECK(ya[i] == yb[i]);

    auto xa = x, xb = x;
    kernels::serial::scal(-1.25, xa);
    kernels::scal(-1.25, xb);
    for (std::size_t i = 0; i < n; ++i) CHECK(xa[i] == xb[i]);
  }
}

TEST_CASE("axpy and scal semantics") {
  std::vector<double> x{1.0, -2.0, 3.0};
  std::vector<double> y{10.0, 20.0, 30.0};
  kernels::axpy(2.0, x, y);
  CHECK(y[0] == 12.0);
  CHECK(y[1] == 16.0);
  CHECK(y[2] == 36.0);
  kernels::scal(0.5, y);
  CHECK(y[0] == 6.0);
  CHECK(y[1] == 8.0);
  CHECK(y[2] == 18.0);
}

TEST_CASE("reductions are reproducible call to call") {
  const auto x = random_vector(50000, 5);
  const auto y = random_vector(50000, 6);
  const double d1 = kernels::dot(x, y);
  const double d2 = kernels::dot(x, y);
  CHECK(d1 == d2);
  const double n1 = kernels::norm_sq(x);
  const double n2 = kernels::norm_sq(x);
  CHECK(n1 == n2);
}

TEST_CASE("csr_matvec matches a dense triple loop") {
  const int n = 37;
  Rng rng(17);
  std::vector<Triplet> trips;
  std::vector<double> dense(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int t = 0; t < 5; ++t) {
      const int j = static_cast<int>(rng.uniform_index(n));
      const double v = rng.normal();
      trips.push_back({i, j, v});
      dense[static_cast<std::size_t>(i) * n + j] += v;
    }
  const SparseMatrix a = SparseMatrix::from_triplets(n, n, trips, DuplicatePolicy::Sum);
  const auto x = random_vector(n, 23);
  std::vector<double> y(n), y_ref(n, 0.0);
  kernels::csr_matvec(a.row_ptr(), a.col_idx(), a.values(), x, y);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) y_ref[i] += dense[static_cast<std::size_t>(i) * n + j] * x[j];
  for (int i = 0; i < n; ++i) CHECK(rel_err(y[i], y_ref[i]) < 1e-12);
}

TEST_CASE("gemv_transpose and gemv_add match naive loops") {
  const int n = 211, p = 9;
  const auto u = random_vector(static_cast<std::size_t>(n) * p, 31);
  const auto v = random_vector(n, 32);
  const auto d = random_vector(p, 33);

  std::vector<double> out(p), out_ref(p, 0.0);
  kernels::gemv_transpose(u, n, p, v, out);
  for (int j = 0; j < p; ++j)
    for (int i = 0; i < n; ++i) out_ref[j] += u[static_cast<std::size_t>(j) * n + i] * v[i];
  for (int j = 0; j < p; ++j) CHECK(rel_err(out[j], out_ref[j]) < 1e-12);

  std::vector<double> y(n, 0.5), y_ref(n, 0.5);
  kernels::gemv_add(u, n, p, d, y);
  for (int j = 0; j < p; ++j)
    for (int i = 0; i < n; ++i)
      y_ref[i] += u[static_cast<std::size_t>(j) * n + i] * d[j];
  for (int i = 0; i < n; ++i) CHECK(rel_err(y[i], y_ref[i]) < 1e-12);

  // serial twins agree
  std::vector<double> out_s(p);
  kernels::serial::gemv_transpose(u, n, p, v, out_s);
  for (int j = 0; j < p; ++j) CHECK(rel_err(out[j], out_s[j]) < 1e-12);
}
