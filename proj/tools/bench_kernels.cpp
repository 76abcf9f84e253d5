// Times each OpenMP kernel against its serial reference and reports the
// speedup plus the worst relative disagreement. Wall times vary with the
// machine; the agreement column is the part that must stay small.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "scpg/kernels.hpp"
#include "scpg/linalg.hpp"
#include "scpg/rng.hpp"

namespace {

using scpg::Rng;
namespace kernels = scpg::kernels;

double time_best_of(int reps, const std::function<void()>& fn) {
  double best = std::numeric_limits<double>::infinity();
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const double s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    best = std::min(best, s);
  }
  return best;
}

double rel_diff(double a, double b) {
  return std::fabs(a - b) / std::max({1.0, std::fabs(a), std::fabs(b)});
}

double max_rel_diff(std::span<const double> a, std::span<const double> b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, rel_diff(a[i], b[i]));
  return worst;
}

void print_row(const std::string& name, int n, double serial_s, double parallel_s,
               double agreement) {
  std::printf("%-16s %10d %12.3f %12.3f %8.2fx %12.3e\n", name.c_str(), n,
              serial_s * 1e3, parallel_s * 1e3, serial_s / parallel_s, agreement);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"serial vs parallel kernel benchmark"};
  int n = 1 << 22;
  int reps = 5;
  app.add_option("--n", n, "vector length");
  app.add_option("--reps", reps, "repetitions (best time wins)");
  CLI11_PARSE(app, argc, argv);

  Rng rng(42);
  std::vector<double> x(n), y(n), y2(n);
  for (int i = 0; i < n; ++i) x[i] = rng.normal();
  for (int i = 0; i < n; ++i) y[i] = rng.normal();

  std::printf("%-16s %10s %12s %12s %9s %12s\n", "kernel", "n", "serial_ms",
              "parallel_ms", "speedup", "max_rel_diff");

  {
    volatile double sink = 0.0;
    double rs = 0.0, rp = 0.0;
    const double ts = time_best_of(reps, [&] { rs = kernels::serial::dot(x, y); sink = rs; });
    const double tp = time_best_of(reps, [&] { rp = kernels::dot(x, y); sink = rp; });
    (void)sink;
    print_row("dot", n, ts, tp, rel_diff(rs, rp));
  }
  {
    volatile double sink = 0.0;
    double rs = 0.0, rp = 0.0;
    const double ts =
        time_best_of(reps, [&] { rs = kernels::serial::norm_sq(x); sink = rs; });
    const double tp = time_best_of(reps, [&] { rp = kernels::norm_sq(x); sink = rp; });
    (void)sink;
    print_row("norm_sq", n, ts, tp, rel_diff(rs, rp));
  }
  {
    y2 = y;
    std::vector<double> y3 = y;
    const double ts = time_best_of(reps, [&] { kernels::serial::axpy(0.5, x, y2); });
    const double tp = time_best_of(reps, [&] { kernels::axpy(0.5, x, y3); });
    print_row("axpy", n, ts, tp, max_rel_diff(y2, y3));
  }
  {
    y2 = y;
    std::vector<double> y3 = y;
    const double ts = time_best_of(reps, [&] { kernels::serial::scal(1.0001, y2); });
    const double tp = time_best_of(reps, [&] { kernels::scal(1.0001, y3); });
    print_row("scal", n, ts, tp, max_rel_diff(y2, y3));
  }
  {
    // sparse matvec on a 10-per-row random matrix at a smaller n
    const int sn = std::min(n, 1 << 18);
    Rng srng(7);
    std::vector<scpg::Triplet> trips;
    trips.reserve(static_cast<std::size_t>(sn) * 10);
    for (int i = 0; i < sn; ++i)
      for (int t = 0; t < 10; ++t)
        trips.push_back({i, static_cast<int>(srng.uniform_index(sn)), srng.normal()});
    const scpg::SparseMatrix a = scpg::SparseMatrix::from_triplets(
        sn, sn, trips, scpg::DuplicatePolicy::Sum);
    std::vector<double> xs(x.begin(), x.begin() + sn);
    std::vector<double> out_s(sn), out_p(sn);
    const double ts = time_best_of(reps, [&] {
      kernels::serial::csr_matvec(a.row_ptr(), a.col_idx(), a.values(), xs, out_s);
    });
    const double tp = time_best_of(reps, [&] {
      kernels::csr_matvec(a.row_ptr(), a.col_idx(), a.values(), xs, out_p);
    });
    print_row("csr_matvec", sn, ts, tp, max_rel_diff(out_s, out_p));
  }
  {
    const int gn = std::min(n, 1 << 18);
    const int p = 64;
    Rng grng(9);
    std::vector<double> u(static_cast<std::size_t>(gn) * p);
    for (double& v : u) v = grng.normal();
    std::vector<double> out_s(p), out_p(p);
    std::vector<double> xs(x.begin(), x.begin() + gn);
    const double ts = time_best_of(
        reps, [&] { kernels::serial::gemv_transpose(u, gn, p, xs, out_s); });
    const double tp =
        time_best_of(reps, [&] { kernels::gemv_transpose(u, gn, p, xs, out_p); });
    print_row("gemv_transpose", gn, ts, tp, max_rel_diff(out_s, out_p));

    std::vector<double> d(p);
    for (double& v : d) v = grng.normal();
    std::vector<double> ya(y.begin(), y.begin() + gn);
    std::vector<double> yb = ya;
    const double tsa =
        time_best_of(reps, [&] { kernels::serial::gemv_add(u, gn, p, d, ya); });
    const double tpa = time_best_of(reps, [&] { kernels::gemv_add(u, gn, p, d, yb); });
    print_row("gemv_add", gn, tsa, tpa, max_rel_diff(ya, yb));
  }
  return 0;
}
