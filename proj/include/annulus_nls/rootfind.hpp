#pragma once

#include <cmath>
#include <concepts>

#include "annulus_nls/errors.hpp"

namespace annulus_nls::numerics {

struct RootBracket {
  double lo = 0.0, hi = 0.0;
  double f_lo = 0.0, f_hi = 0.0;

  bool valid() const {
    return lo < hi && std::isfinite(f_lo) && std::isfinite(f_hi) &&
           ((f_lo < 0.0 && f_hi > 0.0) || (f_lo > 0.0 && f_hi < 0.0));
  }
};

// Bisection with a secant-accelerated trial point; the bracket never widens and the
// result never leaves the initial bracket. Deterministic.
template <std::invocable<double> F>
double find_root(F&& f, RootBracket br, double tol) {
  if (!br.valid()) throw BracketError("find_root: invalid bracket");
  if (!(tol > 0.0)) throw InvalidParameterError("find_root: tol must be positive");
  if (br.f_lo == 0.0) return br.lo;
  if (br.f_hi == 0.0) return br.hi;

  for (int it = 0; it < 300 && (br.hi - br.lo) > tol; ++it) {
    const double mid = 0.5 * (br.lo + br.hi);
    double x = mid;
    // every other step is a plain bisection, so the width provably halves
    if (it % 2 == 0) {
      const double denom = br.f_hi - br.f_lo;
      if (denom != 0.0) {
        const double sec = br.lo - br.f_lo * (br.hi - br.lo) / denom;
        const double margin = 0.01 * (br.hi - br.lo);
        if (sec > br.lo + margin && sec < br.hi - margin) x = sec;
      }
    }
    const double fx = f(x);
    if (fx == 0.0) return x;
    if ((fx < 0.0) == (br.f_lo < 0.0)) {
      br.lo = x;
      br.f_lo = fx;
    } else {
      br.hi = x;
      br.f_hi = fx;
    }
  }
  return std::abs(br.f_lo) <= std::abs(br.f_hi) ? br.lo : br.hi;
}

}  // namespace annulus_nls::numerics
