#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "annulus_nls/errors.hpp"

namespace annulus_nls::numerics {

struct IvpResult {
  std::vector<double> r;   // accepted step endpoints, starts at r0
  std::vector<double> u;   // solution values at r
  std::vector<double> du;  // derivative values at r
  std::optional<double> first_zero;  // first r > r0 where u crosses 0 from above
  bool overflowed = false;           // magnitudes exceeded the overflow guard
};

namespace detail {

struct Dopri5State {
  double u, v;
};

// quartic dense-output interpolant for one accepted step
struct DenseSeg {
  double r0, h;
  std::array<double, 5> c;  // rcont coefficients for the u component
  double eval(double r) const {
    const double th = (r - r0) / h, th1 = 1.0 - th;
    return c[0] + th * (c[1] + th1 * (c[2] + th * (c[3] + th1 * c[4])));
  }
};

}  // namespace detail

// Integrates u'' + ((N-1)/r) u' = f(u) from r0 to r_end with u(r0)=u0, u'(r0)=du0.
// Dormand-Prince 5(4) with PI step control and dense-output event location:
// the first downward crossing of u through zero past r0 is bisected to 1e-12 in r.
// stop_at_zero halts integration at that event. Solutions beyond the overflow
// guard (1e120) truncate the result with overflowed set instead of throwing.
template <class F>
IvpResult integrate_radial_ivp(int N, F&& f, double r0, double u0, double du0,
                               double r_end, double tol, bool stop_at_zero) {
  if (N < 1) throw InvalidParameterError("integrate_radial_ivp: N must be >= 1");
  if (!(r_end > r0)) throw InvalidParameterError("integrate_radial_ivp: need r_end > r0");
  if (!(r0 > 0.0)) throw InvalidParameterError("integrate_radial_ivp: need r0 > 0");
  if (!(tol > 0.0)) throw InvalidParameterError("integrate_radial_ivp: need tol > 0");

  const double drift = static_cast<double>(N - 1);
  auto rhs = [&](double r, const detail::Dopri5State& y) {
    return detail::Dopri5State{y.v, -drift / r * y.v + f(y.u)};
  };

  // Dormand-Prince coefficients
  constexpr double a21 = 1.0 / 5.0;
  constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
  constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
  constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                   a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
  constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                   a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
  constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                   b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
  constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                   e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
  constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                   d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                   d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

  constexpr double kOverflow = 1e120;
  const double atol = tol, rtol = tol;

  IvpResult out;
  out.r.push_back(r0);
  out.u.push_back(u0);
  out.du.push_back(du0);

  detail::Dopri5State y{u0, du0};
  double r = r0;
  detail::Dopri5State k1 = rhs(r, y);

  // scale-aware first step guess
  double h;
  {
    const double sc_u = atol + rtol * std::abs(y.u);
    const double sc_v = atol + rtol * std::abs(y.v);
    const double d0 = std::hypot(y.u / sc_u, y.v / sc_v);
    const double dd = std::hypot(k1.u / sc_u, k1.v / sc_v);
    h = (d0 > 1e-10 && dd > 1e-10) ? 0.01 * d0 / dd : 1e-6;
    h = std::min(h, r_end - r0);
  }

  bool armed = u0 > 0.0;
  double errold = 1e-4;
  bool last_rejected = false;
  constexpr std::size_t kMaxSteps = 2'000'000;

  for (std::size_t step = 0; step < kMaxSteps; ++step) {
    if (r >= r_end) return out;
    if (h < 1e-14 * std::max(1.0, std::abs(r)))
      throw StepUnderflowError("integrate_radial_ivp: step size underflow");
    bool last = false;
    if (r + h >= r_end) {
      h = r_end - r;
      last = true;
    }

    const detail::Dopri5State k2 = rhs(r + 0.2 * h, {y.u + h * a21 * k1.u, y.v + h * a21 * k1.v});
    const detail::Dopri5State k3 = rhs(r + 0.3 * h, {y.u + h * (a31 * k1.u + a32 * k2.u),
                                                     y.v + h * (a31 * k1.v + a32 * k2.v)});
    const detail::Dopri5State k4 =
        rhs(r + 0.8 * h, {y.u + h * (a41 * k1.u + a42 * k2.u + a43 * k3.u),
                          y.v + h * (a41 * k1.v + a42 * k2.v + a43 * k3.v)});
    const detail::Dopri5State k5 =
        rhs(r + 8.0 / 9.0 * h, {y.u + h * (a51 * k1.u + a52 * k2.u + a53 * k3.u + a54 * k4.u),
                                y.v + h * (a51 * k1.v + a52 * k2.v + a53 * k3.v + a54 * k4.v)});
    const detail::Dopri5State k6 =
        rhs(r + h, {y.u + h * (a61 * k1.u + a62 * k2.u + a63 * k3.u + a64 * k4.u + a65 * k5.u),
                    y.v + h * (a61 * k1.v + a62 * k2.v + a63 * k3.v + a64 * k4.v + a65 * k5.v)});
    const detail::Dopri5State ynew{
        y.u + h * (b1 * k1.u + b3 * k3.u + b4 * k4.u + b5 * k5.u + b6 * k6.u),
        y.v + h * (b1 * k1.v + b3 * k3.v + b4 * k4.v + b5 * k5.v + b6 * k6.v)};
    const detail::Dopri5State k7 = rhs(r + h, ynew);  // FSAL

    const double err_u = h * (e1 * k1.u + e3 * k3.u + e4 * k4.u + e5 * k5.u + e6 * k6.u + e7 * k7.u);
    const double err_v = h * (e1 * k1.v + e3 * k3.v + e4 * k4.v + e5 * k5.v + e6 * k6.v + e7 * k7.v);
    const double sc_u = atol + rtol * std::max(std::abs(y.u), std::abs(ynew.u));
    const double sc_v = atol + rtol * std::max(std::abs(y.v), std::abs(ynew.v));
    double err = std::sqrt(0.5 * ((err_u / sc_u) * (err_u / sc_u) + (err_v / sc_v) * (err_v / sc_v)));
    if (!std::isfinite(err)) err = 1e10;

    if (err > 1.0) {
      h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
      last_rejected = true;
      continue;
    }

    // accepted: build the dense interpolant before advancing
    detail::DenseSeg seg;
    {
      const double ydiff = ynew.u - y.u;
      const double bspl = h * k1.u - ydiff;
      seg.r0 = r;
      seg.h = h;
      seg.c[0] = y.u;
      seg.c[1] = ydiff;
      seg.c[2] = bspl;
      seg.c[3] = ydiff - h * k7.u - bspl;
      seg.c[4] = h * (d1 * k1.u + d3 * k3.u + d4 * k4.u + d5 * k5.u + d6 * k6.u + d7 * k7.u);
    }

    const double rnew = last ? r_end : r + h;

    // event: first crossing of zero from above, checked at midpoint and endpoint
    if (!out.first_zero) {
      double cross_hi = 0.0;
      bool crossed = false;
      const double umid = seg.eval(r + 0.5 * h);
      if (armed && umid <= 0.0) {
        cross_hi = r + 0.5 * h;
        crossed = true;
      } else if ((armed || umid > 0.0) && ynew.u <= 0.0) {
        cross_hi = rnew;
        crossed = true;
      }
      if (crossed) {
        double lo = r, hi = cross_hi;
        while (hi - lo > 1e-12) {
          const double mid = 0.5 * (lo + hi);
          if (seg.eval(mid) > 0.0)
            lo = mid;
          else
            hi = mid;
        }
        out.first_zero = 0.5 * (lo + hi);
        if (stop_at_zero) {
          out.r.push_back(*out.first_zero);
          out.u.push_back(0.0);
          out.du.push_back((seg.eval(*out.first_zero + 1e-9) - seg.eval(*out.first_zero - 1e-9)) / 2e-9);
          return out;
        }
      }
      if (ynew.u > 0.0) armed = true;
    }

    r = rnew;
    y = ynew;
    k1 = k7;
    out.r.push_back(r);
    out.u.push_back(y.u);
    out.du.push_back(y.v);

    if (std::abs(y.u) > kOverflow || std::abs(y.v) > kOverflow) {
      out.overflowed = true;
      return out;
    }

    const double errc = std::max(err, 1e-4);
    double fac = 0.9 * std::pow(errc, -0.2 + 0.04 * 0.75) * std::pow(errold, 0.04);
    fac = std::clamp(fac, 0.2, 5.0);
    if (last_rejected) fac = std::min(fac, 1.0);
    last_rejected = false;
    errold = errc;
    h *= fac;
  }
  throw SolverError("integrate_radial_ivp: step budget exhausted");
}

}  // namespace annulus_nls::numerics
