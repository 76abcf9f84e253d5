#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace scpg {

enum class SketchKind {
  CoordinateBlock,    // uniform index subset, U = columns of the identity
  RandomOrthonormal,  // thin QR of a Gaussian matrix
  GaussianJLT,        // i.i.d. N(0, 1/p) entries
  SHashing,           // s nonzeros per row with values +-1/sqrt(s)
};

// Sampled n x p subspace map. CoordinateBlock stores the sorted index
// set; the dense kinds store the matrix column-major.
struct Sketch {
  SketchKind kind = SketchKind::CoordinateBlock;
  int n = 0;
  int p = 0;
  int hash_nnz = 0;          // s, SHashing only
  std::vector<int> block;    // CoordinateBlock only, sorted, size p
  std::vector<double> dense; // other kinds, column-major, size n*p

  // true when U^T U = I holds by construction (block and orthonormal kinds)
  bool has_orthonormal_columns() const {
    return kind == SketchKind::CoordinateBlock || kind == SketchKind::RandomOrthonormal;
  }
};

// Alignment parameters: alignment holds when the sketched gradient keeps
// at least an alpha fraction of the gradient norm; delta is the allowed
// per-iteration failure probability.
struct AlignmentParams {
  double alpha = 0.5;
  double delta = 0.1;

  void validate() const;
};

// Draws a sketch. Identical (kind, n, p, seed, hash_nnz) give bit
// identical results. hash_nnz is required for SHashing (1 <= s <= p) and
// ignored otherwise.
Sketch sample(SketchKind kind, int n, int p, std::uint64_t seed, int hash_nnz = 0);

// out = U^T v (size p)
void apply_transpose(const Sketch& sk, std::span<const double> v, std::span<double> out);
// x += U d
void apply_add(const Sketch& sk, std::span<const double> d, std::span<double> x);
// U d as a fresh vector (size n)
std::vector<double> apply(const Sketch& sk, std::span<const double> d);

// Smallest subspace dimension the orthonormal-family alignment bound
// asks for: ceil(alpha*n + 8*sqrt(log(3/delta)*n)), clamped to [1, n].
int min_dimension_orthonormal(double alpha, double delta, int n);

// ||U^T grad|| >= alpha * ||grad||; a zero gradient counts as aligned.
bool is_well_aligned(const Sketch& sk, std::span<const double> grad, double alpha);

// Fraction of `trials` fresh sketches that are well aligned with a fixed
// gradient. Deterministic given seed.
double estimate_alignment_probability(SketchKind kind, int n, int p,
                                      std::span<const double> grad, double alpha,
                                      int trials, std::uint64_t seed, int hash_nnz = 0);

// CLI names: "block", "orthonormal", "gaussian-jlt", "s-hashing:<s>".
struct SketchSpec {
  SketchKind kind = SketchKind::CoordinateBlock;
  int hash_nnz = 0;
};
SketchSpec parse_sketch_spec(const std::string& text);
std::string format_sketch_spec(const SketchSpec& spec);

}  // namespace scpg
