#pragma once

#include <cmath>
#include <numbers>

#include "annulus_nls/errors.hpp"
#include "annulus_nls/quadrature.hpp"

namespace annulus_nls::asymptotics {

// Closed-form decaying positive solution of -W'' + W = W^{p-1} on the line.
inline double soliton_eval(double p, double r) {
  if (!(p > 2.0)) throw InvalidParameterError("soliton_eval: p must be > 2");
  const double sech = 1.0 / std::cosh(0.5 * (p - 2.0) * r);
  return std::pow(0.5 * p * sech * sech, 1.0 / (p - 2.0));
}

inline double soliton_peak(double p) {
  if (!(p > 2.0)) throw InvalidParameterError("soliton_peak: p must be > 2");
  return std::pow(0.5 * p, 1.0 / (p - 2.0));
}

// Integral of W^2 r^k over the whole line. Odd k vanishes by symmetry; even k
// doubles the half-line integral, truncated where the sech tail is below 1e-12.
inline double soliton_moment(double p, int k) {
  if (!(p > 2.0)) throw InvalidParameterError("soliton_moment: p must be > 2");
  if (k < 0) throw InvalidParameterError("soliton_moment: k must be >= 0");
  if (k % 2 == 1) return 0.0;
  // W ~ (2p)^{1/(p-2)} e^{-r}; pick R so the remaining tail of W^2 r^k is negligible
  const double R = 20.0 + 3.0 * k + std::max(0.0, 2.0 * std::log(2.0 * p) / (p - 2.0));
  auto f = [p, k](double r) {
    const double w = soliton_eval(p, r);
    return w * w * numerics::int_pow(r, k);
  };
  return 2.0 * numerics::adaptive_simpson(f, 0.0, R, 1e-14);
}

// Max finite-difference residual of -W'' + W - W^{p-1} on [lo, hi]. The stencil
// is the fourth-order five-point one: a three-point probe bottoms out near 3e-7
// in double precision (truncation against subtraction noise), which could not
// certify the 1e-8 invariant this function exists to check.
inline double soliton_ode_residual(double p, double lo = -10.0, double hi = 10.0,
                                   double h = 1e-3) {
  if (!(p > 2.0)) throw InvalidParameterError("soliton_ode_residual: p must be > 2");
  double worst = 0.0;
  const long m = std::lround((hi - lo) / h);
  for (long i = 2; i + 1 < m; ++i) {
    const double r = lo + i * h;
    const double w2m = soliton_eval(p, r - 2.0 * h), wm = soliton_eval(p, r - h),
                 w0 = soliton_eval(p, r), wp = soliton_eval(p, r + h),
                 w2p = soliton_eval(p, r + 2.0 * h);
    const double lap =
        (-w2p + 16.0 * wp - 30.0 * w0 + 16.0 * wm - w2m) / (12.0 * h * h);
    const double res = -lap + w0 - std::pow(w0, p - 1.0);
    worst = std::max(worst, std::abs(res));
  }
  return worst;
}

}  // namespace annulus_nls::asymptotics
