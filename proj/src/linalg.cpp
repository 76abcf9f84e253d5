#include "scpg/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "scpg/errors.hpp"
#include "scpg/kernels.hpp"
#include "scpg/rng.hpp"

namespace scpg {

namespace {

void require_finite(std::span<const double> values, const char* what) {
  for (const double v : values) {
    if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + ": non-finite entry");
  }
}

}  // namespace

Vector::Vector(std::vector<double> values) : data_(std::move(values)) {
  require_finite(data_, "Vector");
}

Vector::Vector(std::initializer_list<double> values) : data_(values) {
  require_finite(data_, "Vector");
}

SparseMatrix SparseMatrix::from_triplets(int rows, int cols,
                                         std::span<const Triplet> triplets,
                                         DuplicatePolicy policy) {
  if (rows < 0 || cols < 0) throw std::invalid_argument("SparseMatrix: negative dimension");
  std::vector<Triplet> sorted(triplets.begin(), triplets.end());
  for (const Triplet& t : sorted) {
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
      throw std::invalid_argument("SparseMatrix: triplet index out of range");
    if (!std::isfinite(t.value)) throw std::invalid_argument("SparseMatrix: non-finite value");
  }
  std::stable_sort(sorted.begin(), sorted.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });

  SparseMatrix m;
  m.rows_ = rows;
  m.cols_ = cols;
  m.row_ptr_.assign(static_cast<std::size_t>(rows) + 1, 0);
  m.col_idx_.reserve(sorted.size());
  m.vals_.reserve(sorted.size());
  for (std::size_t i = 0; i < sorted.size();) {
    const int r = sorted[i].row;
    const int c = sorted[i].col;
    double v = sorted[i].value;
    std::size_t j = i + 1;
    while (j < sorted.size() && sorted[j].row == r && sorted[j].col == c) {
      if (policy == DuplicatePolicy::Error)
        throw std::invalid_argument("SparseMatrix: duplicate (row, col) entry");
      v += sorted[j].value;
      ++j;
    }
    m.col_idx_.push_back(c);
    m.vals_.push_back(v);
    ++m.row_ptr_[static_cast<std::size_t>(r) + 1];
    i = j;
  }
  for (int r = 0; r < rows; ++r) m.row_ptr_[static_cast<std::size_t>(r) + 1] += m.row_ptr_[r];
  return m;
}

SparseMatrix SparseMatrix::identity(int n) {
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) t.push_back({i, i, 1.0});
  return from_triplets(n, n, t);
}

SparseMatrix SparseMatrix::diagonal(std::span<const double> entries) {
  std::vector<Triplet> t;
  t.reserve(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i)
    t.push_back({static_cast<int>(i), static_cast<int>(i), entries[i]});
  return from_triplets(static_cast<int>(entries.size()), static_cast<int>(entries.size()), t);
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  if (x.size() != static_cast<std::size_t>(cols_) || y.size() != static_cast<std::size_t>(rows_))
    throw std::invalid_argument("SparseMatrix::multiply: dimension mismatch");
  kernels::csr_matvec(row_ptr_, col_idx_, vals_, x, y);
}

void SparseMatrix::multiply_block(std::span<const double> u, int p,
                                  std::span<double> out) const {
  if (u.size() != static_cast<std::size_t>(cols_) * p ||
      out.size() != static_cast<std::size_t>(rows_) * p)
    throw std::invalid_argument("SparseMatrix::multiply_block: dimension mismatch");
  for (int j = 0; j < p; ++j) {
    multiply(u.subspan(static_cast<std::size_t>(j) * cols_, cols_),
             out.subspan(static_cast<std::size_t>(j) * rows_, rows_));
  }
}

void SparseMatrix::rows_times_vector(std::span<const int> subset,
                                     std::span<const double> x,
                                     std::span<double> out) const {
  if (x.size() != static_cast<std::size_t>(cols_) || out.size() != subset.size())
    throw std::invalid_argument("SparseMatrix::rows_times_vector: dimension mismatch");
  for (std::size_t j = 0; j < subset.size(); ++j) {
    const int r = subset[j];
    double s = 0.0;
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) s += vals_[k] * x[col_idx_[k]];
    out[j] = s;
  }
}

std::vector<double> SparseMatrix::dense_submatrix(std::span<const int> subset) const {
  const int p = static_cast<int>(subset.size());
  // position of each global column inside the subset, -1 elsewhere
  std::vector<int> pos(static_cast<std::size_t>(cols_), -1);
  for (int j = 0; j < p; ++j) pos[subset[j]] = j;
  std::vector<double> dense(static_cast<std::size_t>(p) * p, 0.0);
  for (int i = 0; i < p; ++i) {
    const int r = subset[i];
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      const int j = pos[col_idx_[k]];
      if (j >= 0) dense[static_cast<std::size_t>(j) * p + i] = vals_[k];
    }
  }
  return dense;
}

SparseMatrix SparseMatrix::transpose() const {
  std::vector<Triplet> t;
  t.reserve(vals_.size());
  for (int r = 0; r < rows_; ++r)
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
      t.push_back({col_idx_[k], r, vals_[k]});
  return from_triplets(cols_, rows_, t);
}

bool SparseMatrix::is_symmetric() const {
  if (rows_ != cols_) return false;
  const SparseMatrix at = transpose();
  return at.row_ptr_ == row_ptr_ && at.col_idx_ == col_idx_ && at.vals_ == vals_;
}

namespace {

// Power iteration on A^2. apply must write y = A x.
template <class Apply>
double power_norm(int n, const Apply& apply, double tol, int max_iter, std::uint64_t seed) {
  if (n <= 0) throw std::invalid_argument("spectral_norm: empty matrix");
  if (tol <= 0 || max_iter < 1) throw std::invalid_argument("spectral_norm: bad tolerance or budget");

  Rng rng(mix_seed(0x5eedULL, seed));
  std::vector<double> x(static_cast<std::size_t>(n));
  std::vector<double> y(static_cast<std::size_t>(n));
  std::vector<double> z(static_cast<std::size_t>(n));

  auto randomize = [&] {
    for (double& v : x) v = rng.normal();
    const double nx = kernels::norm(x);
    kernels::scal(1.0 / nx, x);
  };
  randomize();

  double lambda = 0.0;
  double prev = -1.0;
  int hits = 0;
  int restarts = 0;
  for (int it = 0; it < max_iter; ++it) {
    apply(x, y);  // y = A x, with x normalized
    const double ny = kernels::norm(y);
    if (ny == 0.0) {
      // start vector in the kernel; retry, then accept zero
      if (++restarts <= 3) {
        randomize();
        prev = -1.0;
        hits = 0;
        continue;
      }
      return 0.0;
    }
    lambda = ny;
    if (prev >= 0.0 && std::abs(lambda - prev) <= tol * std::max(lambda, 1e-300)) {
      if (++hits >= 2) return lambda;
    } else {
      hits = 0;
    }
    prev = lambda;
    apply(y, z);  // z = A^2 x
    const double nz = kernels::norm(z);
    if (nz == 0.0) return 0.0;
    for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = z[static_cast<std::size_t>(i)] / nz;
  }
  throw SpectralNormFailure("spectral_norm: no convergence within max_iter", lambda);
}

}  // namespace

double spectral_norm(const SparseMatrix& a, double tol, int max_iter, std::uint64_t seed) {
  if (a.rows() != a.cols()) throw std::invalid_argument("spectral_norm: matrix not square");
  if (a.nonzeros() == 0) return 0.0;
  return power_norm(
      a.rows(), [&](std::span<const double> x, std::span<double> y) { a.multiply(x, y); }, tol,
      max_iter, seed);
}

double spectral_norm_dense(int n, std::span<const double> a, double tol, int max_iter,
                           std::uint64_t seed) {
  if (a.size() != static_cast<std::size_t>(n) * n)
    throw std::invalid_argument("spectral_norm_dense: dimension mismatch");
  return power_norm(
      n,
      [&](std::span<const double> x, std::span<double> y) {
        for (int i = 0; i < n; ++i) y[i] = 0.0;
        kernels::gemv_add(a, n, n, x, y);
      },
      tol, max_iter, seed);
}

}  // namespace scpg
