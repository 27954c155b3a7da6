#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "horolab/core.hpp"

namespace horolab {

/// R^N with the l^p norm, p in [1, inf]. Bicombed by affine segments.
template <std::size_t N>
class LpSpace {
 public:
  using Point = std::array<double, N>;
  static constexpr std::size_t dimension = N;

  explicit LpSpace(double p, Point base = {}) : p_(p), base_(base) {
    if (!(p >= 1.0)) throw std::invalid_argument("l^p exponent must satisfy p >= 1");
  }

  double p() const { return p_; }
  const Point& base_point() const { return base_; }

  LpSpace rebased(const Point& o) const { return LpSpace(p_, o); }

  double distance(const Point& a, const Point& b) const {
    if (std::isinf(p_)) {
      double m = 0.0;
      for (std::size_t i = 0; i < N; ++i) m = std::max(m, std::abs(a[i] - b[i]));
      return m;
    }
    if (p_ == 1.0) {
      double s = 0.0;
      for (std::size_t i = 0; i < N; ++i) s += std::abs(a[i] - b[i]);
      return s;
    }
    if (p_ == 2.0) {
      double s = 0.0;
      for (std::size_t i = 0; i < N; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
      return std::sqrt(s);
    }
    // scale by the max component to avoid under/overflow in pow
    double m = 0.0;
    for (std::size_t i = 0; i < N; ++i) m = std::max(m, std::abs(a[i] - b[i]));
    if (m == 0.0) return 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < N; ++i) s += std::pow(std::abs(a[i] - b[i]) / m, p_);
    return m * std::pow(s, 1.0 / p_);
  }

  Point geodesic(const Point& a, const Point& b, double t) const {
    Point out;
    for (std::size_t i = 0; i < N; ++i) out[i] = a[i] + t * (b[i] - a[i]);
    return out;
  }

  std::vector<double> coordinates(const Point& a) const { return {a.begin(), a.end()}; }

  /// Uniform in the axis-aligned cube of half-width `radius` about the base point.
  Point random_point(Rng& rng, double radius) const {
    Point out;
    for (std::size_t i = 0; i < N; ++i) out[i] = base_[i] + uniform(rng, -radius, radius);
    return out;
  }

  /// Coordinate rounding to the delta-lattice, half away from zero.
  Point snap(const Point& a, double delta) const {
    if (delta <= 0.0) return a;
    Point out;
    for (std::size_t i = 0; i < N; ++i) out[i] = delta * std::round(a[i] / delta);
    return out;
  }

  /// Supremum of d(snap(q), q) over all q: the norm of (delta/2, ..., delta/2).
  double snap_radius(double delta) const {
    if (delta <= 0.0) return 0.0;
    const double h = delta / 2.0;
    if (std::isinf(p_)) return h;
    return h * std::pow(static_cast<double>(N), 1.0 / p_);
  }

 private:
  double p_;
  Point base_;
};

}  // namespace horolab
