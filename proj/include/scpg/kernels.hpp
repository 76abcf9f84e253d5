#pragma once

#include <cstddef>
#include <span>

// Data-parallel building blocks. Every kernel has a serial reference in
// kernels::serial and an OpenMP entry point in kernels:: that falls back
// to the reference below a size cutoff (or when built without OpenMP).
//
// Reductions accumulate one partial per thread and combine the partials
// in thread order, so results are reproducible run to run for a fixed
// thread count. Rounding may differ from the serial reference; tests
// compare the two within a small relative tolerance.

namespace scpg::kernels {

inline constexpr std::size_t kParallelCutoff = 8192;

namespace serial {

double dot(std::span<const double> x, std::span<const double> y);
double norm_sq(std::span<const double> x);
// y += a * x
void axpy(double a, std::span<const double> x, std::span<double> y);
void scal(double a, std::span<double> x);
// y = A x for CSR (row_ptr has rows+1 entries)
void csr_matvec(std::span<const int> row_ptr, std::span<const int> col_idx,
                std::span<const double> vals, std::span<const double> x,
                std::span<double> y);
// out = U^T v for column-major U (n x p)
void gemv_transpose(std::span<const double> u, int n, int p,
                    std::span<const double> v, std::span<double> out);
// y += U d for column-major U (n x p)
void gemv_add(std::span<const double> u, int n, int p,
              std::span<const double> d, std::span<double> y);

}  // namespace serial

double dot(std::span<const double> x, std::span<const double> y);
double norm_sq(std::span<const double> x);
void axpy(double a, std::span<const double> x, std::span<double> y);
void scal(double a, std::span<double> x);
void csr_matvec(std::span<const int> row_ptr, std::span<const int> col_idx,
                std::span<const double> vals, std::span<const double> x,
                std::span<double> y);
void gemv_transpose(std::span<const double> u, int n, int p,
                    std::span<const double> v, std::span<double> out);
void gemv_add(std::span<const double> u, int n, int p,
              std::span<const double> d, std::span<double> y);

double norm(std::span<const double> x);

}  // namespace scpg::kernels
