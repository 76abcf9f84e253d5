#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace scpg {

// Dense vector with entries validated to be finite at construction.
// Element mutation is unchecked; IO boundaries re-validate.
class Vector {
 public:
  Vector() = default;
  explicit Vector(std::size_t n) : data_(n, 0.0) {}
  explicit Vector(std::vector<double> values);
  Vector(std::initializer_list<double> values);

  static Vector zeros(std::size_t n) { return Vector(n); }

  std::size_t size() const { return data_.size(); }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::span<double> span() { return data_; }
  std::span<const double> span() const { return data_; }
  const std::vector<double>& data() const { return data_; }

 private:
  std::vector<double> data_;
};

struct Triplet {
  int row = 0;
  int col = 0;
  double value = 0.0;
};

enum class DuplicatePolicy { Error, Sum };

// Sparse matrix built from coordinate triplets, stored as CSR for matvec.
// Symmetric matrices are stored with both triangles present.
class SparseMatrix {
 public:
  SparseMatrix() = default;

  // Validates index ranges and finite values. DuplicatePolicy::Error
  // rejects repeated (row, col) pairs, DuplicatePolicy::Sum accumulates
  // them in deterministic (sorted, stable) order.
  static SparseMatrix from_triplets(int rows, int cols,
                                    std::span<const Triplet> triplets,
                                    DuplicatePolicy policy = DuplicatePolicy::Error);
  static SparseMatrix identity(int n);
  static SparseMatrix diagonal(std::span<const double> entries);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::int64_t nonzeros() const { return static_cast<std::int64_t>(vals_.size()); }

  std::span<const int> row_ptr() const { return row_ptr_; }
  std::span<const int> col_idx() const { return col_idx_; }
  std::span<const double> values() const { return vals_; }

  // y = A x
  void multiply(std::span<const double> x, std::span<double> y) const;
  // out = A u for each column of column-major u (n x p)
  void multiply_block(std::span<const double> u, int p, std::span<double> out) const;
  // out[j] = (A x)[subset[j]] for a sorted index subset
  void rows_times_vector(std::span<const int> subset, std::span<const double> x,
                         std::span<double> out) const;
  // dense column-major principal submatrix A[subset, subset]
  std::vector<double> dense_submatrix(std::span<const int> subset) const;

  SparseMatrix transpose() const;
  // exact entrywise comparison with the transpose
  bool is_symmetric() const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<int> row_ptr_ = {0};
  std::vector<int> col_idx_;
  std::vector<double> vals_;
};

// Largest singular value of a symmetric matrix by power iteration on A^2
// (two matvecs per step, robust to +/- eigenvalue pairs). The start
// vector is seeded, so the estimate is deterministic. Throws
// SpectralNormFailure with the best estimate when the iteration budget
// runs out before |lambda_new - lambda_old| <= tol * lambda holds on two
// consecutive sweeps.
double spectral_norm(const SparseMatrix& a, double tol = 1e-6, int max_iter = 5000,
                     std::uint64_t seed = 0);

// Same contract for a dense column-major symmetric matrix.
double spectral_norm_dense(int n, std::span<const double> a, double tol = 1e-6,
                           int max_iter = 5000, std::uint64_t seed = 0);

}  // namespace scpg
