#pragma once

// Seeded generators and small fixtures shared by the unit tests.

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "horolab/core.hpp"
#include "horolab/spaces/metric_tree.hpp"

namespace testkit {

using horolab::Rng;

/// Dyadic rational in [lo, hi] with denominator 2^bits, so sums and
/// products of a few of them stay exact in double precision.
inline double dyadic(Rng& rng, double lo, double hi, int bits = 6) {
  const double scale = std::ldexp(1.0, bits);
  const auto n = static_cast<long>((hi - lo) * scale);
  return lo + static_cast<double>(horolab::uniform_index(rng, static_cast<std::size_t>(n) + 1)) / scale;
}

template <std::size_t N>
std::array<double, N> dyadic_point(Rng& rng, double r, int bits = 4) {
  std::array<double, N> p;
  for (auto& c : p) c = dyadic(rng, -r, r, bits);
  return p;
}

// 0 -1- 1 -2- 2, 1 -4- 3, 0 -3- 4 (five vertices, dyadic weights)
inline horolab::FiniteMetricTree small_tree() {
  return horolab::FiniteMetricTree(5, {{0, 1, 1.0}, {1, 2, 2.0}, {1, 3, 4.0}, {0, 4, 3.0}}, 0);
}

/// Vertices plus edge midpoints.
inline std::vector<horolab::TreePoint> tree_nodes(const horolab::FiniteMetricTree& t) {
  std::vector<horolab::TreePoint> out;
  for (std::size_t v = 0; v < t.vertex_count(); ++v) out.push_back(t.vertex(v));
  for (std::size_t v = 0; v < t.vertex_count(); ++v)
    if (v != t.root()) out.push_back(t.point_on_edge(v, t.edge_weight(v) / 2.0));
  return out;
}

}  // namespace testkit
