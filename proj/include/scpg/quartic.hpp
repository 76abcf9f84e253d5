#pragma once

#include <vector>

namespace scpg {

// c4 mu^4 + c3 mu^3 + c2 mu^2 + c1 mu + c0. The subspace step reduction
// produces c4 = M^2/4 > 0; the solver only needs c4 != 0.
struct QuarticCoefficients {
  double c4 = 0.0;
  double c3 = 0.0;
  double c2 = 0.0;
  double c1 = 0.0;
  double c0 = 0.0;

  double eval(double mu) const {
    return (((c4 * mu + c3) * mu + c2) * mu + c1) * mu + c0;
  }
  double derivative(double mu) const {
    return ((4.0 * c4 * mu + 3.0 * c3) * mu + 2.0 * c2) * mu + c1;
  }
};

// All real roots in ascending order, repeated roots collapsed. Roots are
// factored in closed form (resolvent cubic) and then polished by damped
// Newton so that |q(root)| <= 1e-8 * max(1, |c0|). Throws
// std::invalid_argument when c4 == 0 or a coefficient is not finite.
std::vector<double> solve_quartic_real_roots(const QuarticCoefficients& q);

}  // namespace scpg
