#pragma once

#include <cmath>
#include <span>

#include "annulus_nls/errors.hpp"

namespace annulus_nls::numerics {

struct PowerLawFit {
  double amplitude = 0.0;  // c in y ~ c * x^alpha
  double exponent = 0.0;   // alpha
  double rms_log_residual = 0.0;
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

// Ordinary least squares of y against x.
inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n)
    throw InvalidParameterError("fit_line: need >= 2 matching samples");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw InvalidParameterError("fit_line: x values are all equal");
  LineFit fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / static_cast<double>(n);
  return fit;
}

// Least squares of log y against log x. Requires at least 3 samples with
// positive x and y and at least two distinct x values.
inline PowerLawFit fit_powerlaw(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n < 3 || y.size() != n)
    throw InvalidParameterError("fit_powerlaw: need >= 3 matching samples");
  for (std::size_t i = 0; i < n; ++i)
    if (!(x[i] > 0.0) || !(y[i] > 0.0))
      throw InvalidParameterError("fit_powerlaw: samples must be positive");

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  if (!(denom > 0.0) || denom < 1e-12 * n * sxx)
    throw InvalidParameterError("fit_powerlaw: x values are not distinct enough");

  PowerLawFit fit;
  fit.exponent = (n * sxy - sx * sy) / denom;
  const double logc = (sy - fit.exponent * sx) / static_cast<double>(n);
  fit.amplitude = std::exp(logc);

  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = std::log(y[i]) - (logc + fit.exponent * std::log(x[i]));
    ss += r * r;
  }
  fit.rms_log_residual = std::sqrt(ss / static_cast<double>(n));
  return fit;
}

}  // namespace annulus_nls::numerics
