#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "annulus_nls/errors.hpp"

namespace annulus_nls::numerics {

inline double abs_of(double x) { return std::abs(x); }
inline double abs_of(const std::complex<double>& x) { return std::abs(x); }

// Thomas algorithm. sub/diag/sup/rhs all have length n; sub[0] and sup[n-1] are ignored.
// Verifies the residual against 1e-12 * (matrix max-norm * solution max-norm).
template <class T>
std::vector<T> solve_tridiagonal(std::span<const T> sub, std::span<const T> diag,
                                 std::span<const T> sup, std::span<const T> rhs) {
  const std::size_t n = diag.size();
  if (n == 0 || sub.size() != n || sup.size() != n || rhs.size() != n)
    throw InvalidParameterError("tridiagonal bands must share one nonzero length");

  double mat_norm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mat_norm = std::max(mat_norm, abs_of(diag[i]));
    if (i > 0) mat_norm = std::max(mat_norm, abs_of(sub[i]));
    if (i + 1 < n) mat_norm = std::max(mat_norm, abs_of(sup[i]));
  }

  std::vector<T> c(n), d(n), x(n);
  T piv = diag[0];
  if (abs_of(piv) <= 1e-14 * mat_norm)
    throw SolverError("tridiagonal solve: near-singular pivot at row 0");
  c[0] = sup[0] / piv;
  d[0] = rhs[0] / piv;
  for (std::size_t i = 1; i < n; ++i) {
    piv = diag[i] - sub[i] * c[i - 1];
    if (abs_of(piv) <= 1e-14 * mat_norm)
      throw SolverError("tridiagonal solve: near-singular pivot at row " + std::to_string(i));
    if (i + 1 < n) c[i] = sup[i] / piv;
    d[i] = (rhs[i] - sub[i] * d[i - 1]) / piv;
  }
  x[n - 1] = d[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];

  double sol_norm = 0.0;
  for (const T& v : x) sol_norm = std::max(sol_norm, abs_of(v));
  double res_norm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    T r = diag[i] * x[i] - rhs[i];
    if (i > 0) r += sub[i] * x[i - 1];
    if (i + 1 < n) r += sup[i] * x[i + 1];
    res_norm = std::max(res_norm, abs_of(r));
  }
  if (res_norm > 1e-12 * mat_norm * std::max(sol_norm, 1e-300))
    throw SolverError("tridiagonal solve: residual exceeds stability bound");
  return x;
}

template <class T>
std::vector<T> solve_tridiagonal(const std::vector<T>& sub, const std::vector<T>& diag,
                                 const std::vector<T>& sup, const std::vector<T>& rhs) {
  return solve_tridiagonal<T>(std::span<const T>(sub), std::span<const T>(diag),
                              std::span<const T>(sup), std::span<const T>(rhs));
}

}  // namespace annulus_nls::numerics
