#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "annulus_nls/errors.hpp"

namespace annulus_nls::numerics {

inline constexpr double kInnerRadius = 1.0;
inline constexpr double kOuterRadius = 2.0;

// Discretization of [1,2]; nodes strictly increasing, endpoints exact.
struct Mesh {
  std::vector<double> nodes;
  std::optional<double> uniform_step;

  std::size_t size() const { return nodes.size(); }
  double operator[](std::size_t i) const { return nodes[i]; }
};

inline Mesh uniform_mesh(std::size_t n_nodes) {
  if (n_nodes < 16) throw InvalidParameterError("mesh needs at least 16 nodes");
  Mesh m;
  m.nodes.resize(n_nodes);
  const double h = (kOuterRadius - kInnerRadius) / static_cast<double>(n_nodes - 1);
  for (std::size_t i = 0; i < n_nodes; ++i)
    m.nodes[i] = kInnerRadius + h * static_cast<double>(i);
  m.nodes.front() = kInnerRadius;
  m.nodes.back() = kOuterRadius;
  m.uniform_step = h;
  return m;
}

// Node count for the boundary-value solves: max(400, 40*ceil(sqrt(lambda))), capped at 2e5,
// bumped to odd so the interval count is even (plain composite Simpson applies).
inline std::size_t bvp_node_count(double lambda) {
  const double s = std::sqrt(std::max(lambda, 1.0));
  std::size_t n = std::max<std::size_t>(400, 40u * static_cast<std::size_t>(std::ceil(s)));
  n = std::min<std::size_t>(n, 200000);
  if (n % 2 == 0) n += (n >= 200000 ? -1 : 1);
  return n;
}

}  // namespace annulus_nls::numerics
