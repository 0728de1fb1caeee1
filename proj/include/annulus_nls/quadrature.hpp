#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "annulus_nls/errors.hpp"
#include "annulus_nls/interpolate.hpp"
#include "annulus_nls/mesh.hpp"

namespace annulus_nls::numerics {

inline double int_pow(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

namespace detail {

// Composite Simpson over a uniform grid with an even interval count.
inline double simpson_uniform(std::span<const double> g, double h) {
  const std::size_t n = g.size();
  double s = g[0] + g[n - 1];
  for (std::size_t i = 1; i + 1 < n; ++i) s += g[i] * (i % 2 == 1 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// Newton-Cotes 3-point rule on a possibly non-uniform node pair of intervals.
inline double simpson_pair(double x0, double x1, double x2, double g0, double g1, double g2) {
  const double h0 = x1 - x0, h1 = x2 - x1, H = x2 - x0;
  const double a = g0 * (2.0 * h0 - h1) / h0;
  const double b = g1 * H * H / (h0 * h1);
  const double c = g2 * (2.0 * h1 - h0) / h1;
  return H / 6.0 * (a + b + c);
}

}  // namespace detail

// Integral of f(r) r^k over [1,2] by composite Simpson on the mesh. An odd interval
// count is first resampled by cubic interpolation onto a one-node-finer uniform grid.
inline double quad_weighted(const Mesh& mesh, std::span<const double> values, int k) {
  const std::size_t n = mesh.size();
  if (values.size() != n) throw InvalidParameterError("quad_weighted: size mismatch");
  if (k < 0) throw InvalidParameterError("quad_weighted: weight exponent must be >= 0");
  if (n < 3) throw InvalidParameterError("quad_weighted: mesh too small");

  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = values[i] * int_pow(mesh.nodes[i], k);

  if (mesh.uniform_step) {
    if ((n - 1) % 2 == 0) return detail::simpson_uniform(g, *mesh.uniform_step);
    // resample to an even interval count
    MonotoneCubic interp(mesh.nodes, std::vector<double>(values.begin(), values.end()));
    Mesh fine = uniform_mesh(n + 1);
    std::vector<double> gf(n + 1);
    for (std::size_t i = 0; i <= n; ++i)
      gf[i] = interp(fine.nodes[i]) * int_pow(fine.nodes[i], k);
    return detail::simpson_uniform(gf, *fine.uniform_step);
  }

  // non-uniform fallback: pairwise 3-point rules, trailing trapezoid if odd
  double total = 0.0;
  std::size_t i = 0;
  for (; i + 2 < n; i += 2)
    total += detail::simpson_pair(mesh.nodes[i], mesh.nodes[i + 1], mesh.nodes[i + 2],
                                  g[i], g[i + 1], g[i + 2]);
  if (i + 1 < n)
    total += 0.5 * (g[i] + g[i + 1]) * (mesh.nodes[i + 1] - mesh.nodes[i]);
  return total;
}

inline double quad_weighted(const Mesh& mesh, const std::vector<double>& values, int k) {
  return quad_weighted(mesh, std::span<const double>(values), k);
}

// Adaptive Simpson on [a,b]; deterministic recursion with absolute tolerance.
template <class F>
double adaptive_simpson(F&& f, double a, double b, double tol, int depth = 0,
                        double fa = std::nan(""), double fm = std::nan(""),
                        double fb = std::nan("")) {
  if (std::isnan(fa)) fa = f(a);
  if (std::isnan(fb)) fb = f(b);
  const double m = 0.5 * (a + b);
  if (std::isnan(fm)) fm = f(m);
  const double h = b - a;
  const double whole = h / 6.0 * (fa + 4.0 * fm + fb);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = h / 12.0 * (fa + 4.0 * flm + fm);
  const double right = h / 12.0 * (fm + 4.0 * frm + fb);
  const double err = (left + right - whole) / 15.0;
  if (depth > 40 || std::abs(err) <= tol)
    return left + right + err;
  return adaptive_simpson(f, a, m, 0.5 * tol, depth + 1, fa, flm, fm) +
         adaptive_simpson(f, m, b, 0.5 * tol, depth + 1, fm, frm, fb);
}

}  // namespace annulus_nls::numerics
