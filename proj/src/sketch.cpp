#include "scpg/sketch.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "scpg/kernels.hpp"
#include "scpg/rng.hpp"

namespace scpg {

void AlignmentParams::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
}

namespace {

// first p entries of a seeded Fisher-Yates shuffle of 0..n-1
std::vector<int> uniform_subset(int n, int p, Rng& rng) {
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  for (int k = 0; k < p; ++k) {
    const int j = k + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(n - k)));
    std::swap(idx[static_cast<std::size_t>(k)], idx[static_cast<std::size_t>(j)]);
  }
  idx.resize(static_cast<std::size_t>(p));
  std::sort(idx.begin(), idx.end());
  return idx;
}

// Householder QR of a Gaussian matrix; returns the thin Q factor with
// the diagonal of R forced positive so the draw is sign-deterministic.
std::vector<double> orthonormal_columns(int n, int p, Rng& rng) {
  const std::size_t np = static_cast<std::size_t>(n);
  std::vector<double> a(np * static_cast<std::size_t>(p));
  for (double& v : a) v = rng.normal();

  std::vector<double> tau(static_cast<std::size_t>(p), 0.0);
  std::vector<double> rdiag(static_cast<std::size_t>(p), 0.0);
  auto at = [&](int i, int j) -> double& { return a[static_cast<std::size_t>(j) * np + i]; };

  for (int k = 0; k < p; ++k) {
    double nrm = 0.0;
    for (int i = k; i < n; ++i) nrm += at(i, k) * at(i, k);
    nrm = std::sqrt(nrm);
    if (nrm == 0.0) {
      // degenerate column; leave the reflector trivial
      rdiag[static_cast<std::size_t>(k)] = 0.0;
      continue;
    }
    const double alpha = at(k, k) >= 0.0 ? -nrm : nrm;
    const double v0 = at(k, k) - alpha;
    at(k, k) = v0;
    double vnorm_sq = 0.0;
    for (int i = k; i < n; ++i) vnorm_sq += at(i, k) * at(i, k);
    tau[static_cast<std::size_t>(k)] = vnorm_sq > 0.0 ? 2.0 / vnorm_sq : 0.0;
    rdiag[static_cast<std::size_t>(k)] = alpha;
    for (int j = k + 1; j < p; ++j) {
      double s = 0.0;
      for (int i = k; i < n; ++i) s += at(i, k) * at(i, j);
      s *= tau[static_cast<std::size_t>(k)];
      for (int i = k; i < n; ++i) at(i, j) -= s * at(i, k);
    }
  }

  // accumulate Q = H_0 ... H_{p-1} applied to the first p identity columns
  std::vector<double> q(np * static_cast<std::size_t>(p), 0.0);
  auto qt = [&](int i, int j) -> double& { return q[static_cast<std::size_t>(j) * np + i]; };
  for (int j = 0; j < p; ++j) qt(j, j) = 1.0;
  for (int k = p - 1; k >= 0; --k) {
    const double t = tau[static_cast<std::size_t>(k)];
    if (t == 0.0) continue;
    for (int j = 0; j < p; ++j) {
      double s = 0.0;
      for (int i = k; i < n; ++i) s += at(i, k) * qt(i, j);
      s *= t;
      for (int i = k; i < n; ++i) qt(i, j) -= s * at(i, k);
    }
  }
  for (int k = 0; k < p; ++k) {
    if (rdiag[static_cast<std::size_t>(k)] < 0.0)
      for (int i = 0; i < n; ++i) qt(i, k) = -qt(i, k);
  }
  return q;
}

}  // namespace

Sketch sample(SketchKind kind, int n, int p, std::uint64_t seed, int hash_nnz) {
  if (n < 1) throw std::invalid_argument("sample: n must be positive");
  if (p < 1 || p > n) throw std::invalid_argument("sample: p must lie in [1, n]");

  Rng rng(seed);
  Sketch sk;
  sk.kind = kind;
  sk.n = n;
  sk.p = p;

  switch (kind) {
    case SketchKind::CoordinateBlock:
      sk.block = uniform_subset(n, p, rng);
      break;
    case SketchKind::RandomOrthonormal:
      sk.dense = orthonormal_columns(n, p, rng);
      break;
    case SketchKind::GaussianJLT: {
      sk.dense.resize(static_cast<std::size_t>(n) * p);
      const double scale = 1.0 / std::sqrt(static_cast<double>(p));
      for (double& v : sk.dense) v = rng.normal() * scale;
      break;
    }
    case SketchKind::SHashing: {
      if (hash_nnz < 1 || hash_nnz > p)
        throw std::invalid_argument("sample: s-hashing needs 1 <= s <= p");
      sk.hash_nnz = hash_nnz;
      sk.dense.assign(static_cast<std::size_t>(n) * p, 0.0);
      const double mag = 1.0 / std::sqrt(static_cast<double>(hash_nnz));
      std::vector<int> cols(static_cast<std::size_t>(p));
      for (int i = 0; i < n; ++i) {
        std::iota(cols.begin(), cols.end(), 0);
        for (int k = 0; k < hash_nnz; ++k) {
          const int j = k + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(p - k)));
          std::swap(cols[static_cast<std::size_t>(k)], cols[static_cast<std::size_t>(j)]);
          const double sign = rng.bernoulli(0.5) ? 1.0 : -1.0;
          sk.dense[static_cast<std::size_t>(cols[static_cast<std::size_t>(k)]) * n + i] =
              sign * mag;
        }
      }
      break;
    }
  }
  return sk;
}

void apply_transpose(const Sketch& sk, std::span<const double> v, std::span<double> out) {
  if (v.size() != static_cast<std::size_t>(sk.n) || out.size() != static_cast<std::size_t>(sk.p))
    throw std::invalid_argument("apply_transpose: dimension mismatch");
  if (sk.kind == SketchKind::CoordinateBlock) {
    for (int j = 0; j < sk.p; ++j) out[j] = v[sk.block[static_cast<std::size_t>(j)]];
  } else {
    kernels::gemv_transpose(sk.dense, sk.n, sk.p, v, out);
  }
}

void apply_add(const Sketch& sk, std::span<const double> d, std::span<double> x) {
  if (d.size() != static_cast<std::size_t>(sk.p) || x.size() != static_cast<std::size_t>(sk.n))
    throw std::invalid_argument("apply_add: dimension mismatch");
  if (sk.kind == SketchKind::CoordinateBlock) {
    for (int j = 0; j < sk.p; ++j) x[sk.block[static_cast<std::size_t>(j)]] += d[j];
  } else {
    kernels::gemv_add(sk.dense, sk.n, sk.p, d, x);
  }
}

std::vector<double> apply(const Sketch& sk, std::span<const double> d) {
  std::vector<double> x(static_cast<std::size_t>(sk.n), 0.0);
  apply_add(sk, d, x);
  return x;
}

int min_dimension_orthonormal(double alpha, double delta, int n) {
  AlignmentParams{alpha, delta}.validate();
  if (n < 1) throw std::invalid_argument("min_dimension_orthonormal: n must be positive");
  const double nn = static_cast<double>(n);
  const double raw = alpha * nn + 8.0 * std::sqrt(std::log(3.0 / delta) * nn);
  const double clamped = std::min(std::max(std::ceil(raw), 1.0), nn);
  return static_cast<int>(clamped);
}

bool is_well_aligned(const Sketch& sk, std::span<const double> grad, double alpha) {
  const double gn = kernels::norm(grad);
  if (gn == 0.0) return true;  // nothing to capture
  std::vector<double> sketched(static_cast<std::size_t>(sk.p));
  apply_transpose(sk, grad, sketched);
  return kernels::norm(sketched) >= alpha * gn;
}

double estimate_alignment_probability(SketchKind kind, int n, int p,
                                      std::span<const double> grad, double alpha,
                                      int trials, std::uint64_t seed, int hash_nnz) {
  if (trials < 1) throw std::invalid_argument("estimate_alignment_probability: trials >= 1");
  long hits = 0;
  for (int t = 0; t < trials; ++t) {
    const Sketch sk = sample(kind, n, p, mix_seed(seed, static_cast<std::uint64_t>(t)), hash_nnz);
    if (is_well_aligned(sk, grad, alpha)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(trials);
}

SketchSpec parse_sketch_spec(const std::string& text) {
  if (text == "block") return {SketchKind::CoordinateBlock, 0};
  if (text == "orthonormal") return {SketchKind::RandomOrthonormal, 0};
  if (text == "gaussian-jlt") return {SketchKind::GaussianJLT, 0};
  const std::string prefix = "s-hashing:";
  if (text.rfind(prefix, 0) == 0) {
    const std::string arg = text.substr(prefix.size());
    std::size_t used = 0;
    int s = 0;
    try {
      s = std::stoi(arg, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("unknown sketch spec: " + text);
    }
    if (used != arg.size() || s < 1) throw std::invalid_argument("unknown sketch spec: " + text);
    return {SketchKind::SHashing, s};
  }
  throw std::invalid_argument("unknown sketch spec: " + text);
}

std::string format_sketch_spec(const SketchSpec& spec) {
  switch (spec.kind) {
    case SketchKind::CoordinateBlock: return "block";
    case SketchKind::RandomOrthonormal: return "orthonormal";
    case SketchKind::GaussianJLT: return "gaussian-jlt";
    case SketchKind::SHashing: return "s-hashing:" + std::to_string(spec.hash_nnz);
  }
  throw std::invalid_argument("unknown sketch kind");
}

}  // namespace scpg
