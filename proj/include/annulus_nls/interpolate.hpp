#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "annulus_nls/errors.hpp"

namespace annulus_nls::numerics {

// Monotone cubic Hermite interpolant (Fritsch-Carlson slopes). Shape preserving:
// no overshoot between data points, which matters when transferring positive
// profiles between meshes.
class MonotoneCubic {
 public:
  MonotoneCubic(std::vector<double> x, std::vector<double> y)
      : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n)
      throw InvalidParameterError("MonotoneCubic: need >= 2 matching nodes");
    for (std::size_t i = 1; i < n; ++i)
      if (!(x_[i] > x_[i - 1]))
        throw InvalidParameterError("MonotoneCubic: nodes must be strictly increasing");

    std::vector<double> d(n - 1);  // secant slopes
    for (std::size_t i = 0; i + 1 < n; ++i)
      d[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);

    m_.resize(n);
    m_[0] = d[0];
    m_[n - 1] = d[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (d[i - 1] * d[i] <= 0.0) {
        m_[i] = 0.0;
      } else {
        // weighted harmonic mean keeps the interpolant monotone on both sides
        const double w1 = 2.0 * (x_[i + 1] - x_[i]) + (x_[i] - x_[i - 1]);
        const double w2 = (x_[i + 1] - x_[i]) + 2.0 * (x_[i] - x_[i - 1]);
        m_[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
      }
    }
    // clamp endpoint slopes (Fritsch-Carlson condition at the boundary cells)
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (d[i] == 0.0) {
        m_[i] = m_[i + 1] = 0.0;
      } else {
        const double a = m_[i] / d[i], b = m_[i + 1] / d[i];
        const double s = a * a + b * b;
        if (s > 9.0) {
          const double t = 3.0 / std::sqrt(s);
          m_[i] = t * a * d[i];
          m_[i + 1] = t * b * d[i];
        }
      }
    }
  }

  // Evaluation clamps to the data range: queries outside return the endpoint value.
  double operator()(double xq) const {
    if (xq <= x_.front()) return y_.front();
    if (xq >= x_.back()) return y_.back();
    const auto it = std::upper_bound(x_.begin(), x_.end(), xq);
    const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
    const double h = x_[i + 1] - x_[i];
    const double t = (xq - x_[i]) / h;
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    const double h10 = t3 - 2.0 * t2 + t;
    const double h01 = -2.0 * t3 + 3.0 * t2;
    const double h11 = t3 - t2;
    return h00 * y_[i] + h10 * h * m_[i] + h01 * y_[i + 1] + h11 * h * m_[i + 1];
  }

 private:
  std::vector<double> x_, y_, m_;
};

}  // namespace annulus_nls::numerics
