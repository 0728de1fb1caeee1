#pragma once

#include <cmath>
#include <numbers>

#include "annulus_nls/errors.hpp"

namespace annulus_nls {

// Parameters of the stationary problem on the annulus 1 < |x| < 2:
//   -(u'' + ((N-1)/r) u') + lambda u = u_+^{p-1},  u(1) = u(2) = 0.
struct ProblemSpec {
  int N = 2;
  double p = 4.0;
  double lambda = 0.0;

  void validate() const {
    if (N < 2) throw InvalidParameterError("ProblemSpec: N must be >= 2");
    if (!(p > 2.0)) throw InvalidParameterError("ProblemSpec: p must be > 2");
    if (N >= 3 && !(p < 2.0 * N / (N - 2.0)))
      throw InvalidParameterError("ProblemSpec: p must be subcritical, p < 2N/(N-2)");
    if (!std::isfinite(lambda)) throw InvalidParameterError("ProblemSpec: lambda must be finite");
  }
};

// Surface measure of the unit sphere in R^N; multiplies radial integrals.
inline double sphere_measure(int N) {
  if (N < 2) throw InvalidParameterError("sphere_measure: N must be >= 2");
  if (N == 2) return 2.0 * std::numbers::pi;
  if (N == 3) return 4.0 * std::numbers::pi;
  return 2.0 * std::pow(std::numbers::pi, 0.5 * N) / std::tgamma(0.5 * N);
}

}  // namespace annulus_nls
