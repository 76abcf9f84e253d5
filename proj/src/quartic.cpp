#include "scpg/quartic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace scpg {

namespace {

// Real roots of x^2 + b x + c, tolerant of a slightly negative
// discriminant near a double root. Returns the count.
int quadratic_real_roots(double b, double c, double out[2]) {
  const double disc = b * b - 4.0 * c;
  const double scale = b * b + 4.0 * std::abs(c);
  if (disc < -1e-12 * std::max(scale, 1.0)) return 0;
  if (disc <= 0.0) {
    out[0] = -0.5 * b;
    return 1;
  }
  const double s = std::sqrt(disc);
  const double q = b >= 0.0 ? -0.5 * (b + s) : -0.5 * (b - s);
  out[0] = q;
  out[1] = q != 0.0 ? c / q : -b;  // q == 0 forces c == 0
  if (out[0] > out[1]) std::swap(out[0], out[1]);
  return 2;
}

// Real roots of z^3 + a z^2 + b z + c (Cardano / trigonometric form).
int cubic_real_roots(double a, double b, double c, double out[3]) {
  const double p = b - a * a / 3.0;
  const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
  const double shift = a / 3.0;
  const double half_q = 0.5 * q;
  const double disc = half_q * half_q + (p / 3.0) * (p / 3.0) * (p / 3.0);
  int count;
  if (disc > 0.0) {
    const double s = std::sqrt(disc);
    const double u = std::cbrt(-half_q + s);
    const double v = std::cbrt(-half_q - s);
    out[0] = u + v - shift;
    count = 1;
  } else if (p == 0.0) {
    out[0] = std::cbrt(-q) - shift;  // triple root
    count = 1;
  } else {
    const double m = 2.0 * std::sqrt(-p / 3.0);
    const double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
    const double theta = std::acos(arg) / 3.0;
    const double two_thirds_pi = 2.0943951023931954923;
    for (int k = 0; k < 3; ++k)
      out[k] = m * std::cos(theta - two_thirds_pi * k) - shift;
    std::sort(out, out + 3);
    count = 3;
  }
  // one Newton pass tightens the Cardano output
  for (int k = 0; k < count; ++k) {
    const double z = out[k];
    const double f = ((z + a) * z + b) * z + c;
    const double df = (3.0 * z + 2.0 * a) * z + b;
    if (df != 0.0) {
      const double step = f / df;
      if (std::isfinite(step) && std::abs(step) < 1.0 + std::abs(z)) out[k] = z - step;
    }
  }
  return count;
}

// Damped Newton against the monic quartic; keeps the better endpoint.
double polish_root(double mu, double a, double b, double c, double d) {
  auto f = [&](double x) { return (((x + a) * x + b) * x + c) * x + d; };
  auto df = [&](double x) { return ((4.0 * x + 3.0 * a) * x + 2.0 * b) * x + c; };
  double best = mu;
  double best_abs = std::abs(f(mu));
  double x = mu;
  for (int it = 0; it < 24; ++it) {
    const double fx = f(x);
    const double dfx = df(x);
    if (fx == 0.0) return x;
    if (dfx == 0.0) break;
    double step = fx / dfx;
    if (!std::isfinite(step)) break;
    const double cap = 0.5 * (1.0 + std::abs(x));
    if (std::abs(step) > cap) step = step > 0.0 ? cap : -cap;
    x -= step;
    const double fa = std::abs(f(x));
    if (fa < best_abs) {
      best_abs = fa;
      best = x;
    }
    if (std::abs(step) <= 1e-16 * (1.0 + std::abs(x))) break;
  }
  return best;
}

}  // namespace

std::vector<double> solve_quartic_real_roots(const QuarticCoefficients& q) {
  for (const double v : {q.c4, q.c3, q.c2, q.c1, q.c0})
    if (!std::isfinite(v)) throw std::invalid_argument("quartic: non-finite coefficient");
  if (q.c4 == 0.0) throw std::invalid_argument("quartic: leading coefficient is zero");

  // monic form mu^4 + a mu^3 + b mu^2 + c mu + d
  const double a = q.c3 / q.c4;
  const double b = q.c2 / q.c4;
  const double c = q.c1 / q.c4;
  const double d = q.c0 / q.c4;

  // depressed form y^4 + P y^2 + Q y + R with mu = y - a/4
  const double a2 = a * a;
  const double P = b - 3.0 * a2 / 8.0;
  const double Q = c - 0.5 * a * b + a2 * a / 8.0;
  const double R = d - 0.25 * a * c + a2 * b / 16.0 - 3.0 * a2 * a2 / 256.0;

  // size of y suggested by the coefficients, for the Q ~ 0 test
  const double yscale = std::max(
      {std::sqrt(std::abs(P)), std::cbrt(std::abs(Q)), std::pow(std::abs(R), 0.25), 1e-150});

  std::vector<double> roots;
  roots.reserve(4);
  const double quarter_a = 0.25 * a;

  if (std::abs(Q) <= 1e-13 * yscale * yscale * yscale) {
    // biquadratic: t^2 + P t + R with y^2 = t
    double t[2];
    const int nt = quadratic_real_roots(P, R, t);
    for (int i = 0; i < nt; ++i) {
      const double tscale = std::max(std::abs(P), std::sqrt(std::abs(R)));
      if (t[i] < -1e-12 * std::max(tscale, 1.0)) continue;
      const double y = std::sqrt(std::max(t[i], 0.0));
      roots.push_back(y - quarter_a);
      if (y > 0.0) roots.push_back(-y - quarter_a);
    }
  } else {
    // factor y^4 + P y^2 + Q y + R = (y^2 + alpha y + beta)(y^2 - alpha y + gamma)
    // with alpha^2 the positive root of A^3 + 2P A^2 + (P^2 - 4R) A - Q^2 = 0
    double zr[3];
    const int nz = cubic_real_roots(2.0 * P, P * P - 4.0 * R, -Q * Q, zr);
    double asq = zr[nz - 1];
    if (!(asq > 0.0)) asq = std::abs(asq) + 1e-300;  // guards rounding; the cubic has a positive root
    const double alpha = std::sqrt(asq);
    const double sum = P + asq;
    const double diff = Q / alpha;
    const double beta = 0.5 * (sum - diff);
    const double gamma = 0.5 * (sum + diff);
    double r2[2];
    int nr = quadratic_real_roots(alpha, beta, r2);
    for (int i = 0; i < nr; ++i) roots.push_back(r2[i] - quarter_a);
    nr = quadratic_real_roots(-alpha, gamma, r2);
    for (int i = 0; i < nr; ++i) roots.push_back(r2[i] - quarter_a);
  }

  for (double& r : roots) r = polish_root(r, a, b, c, d);

  // residual contract; drops near-miss candidates from the tolerant
  // quadratic factorizations
  const double residual_cap = 1e-8 * std::max(1.0, std::abs(q.c0));
  std::sort(roots.begin(), roots.end());
  std::vector<double> unique;
  for (const double r : roots) {
    if (std::abs(q.eval(r)) > residual_cap) continue;
    if (unique.empty() || std::abs(r - unique.back()) > 1e-10 * std::max(1.0, std::abs(r)))
      unique.push_back(r);
  }
  return unique;
}

}  // namespace scpg
