#pragma once

#include <cmath>
#include <stdexcept>

#include "horolab/bicombing.hpp"

namespace horolab {

enum class ConeVariant { floor, geodesic };

inline const char* to_string(ConeVariant v) { return v == ConeVariant::floor ? "floor" : "geodesic"; }

/// Floor with radii within 1e-12 of an integer rounded onto it first.
inline double stable_floor(double r) {
  const double n = std::round(r);
  if (std::abs(r - n) <= 1e-12) return n;
  return std::floor(r);
}

/// d_c(x, y) = |d(o,x) - d(o,y)| + d(rp(o,x,m), rp(o,y,m)), where m is the
/// smaller radius, floored in the floor variant.
template <MetricSpace S, BicombingFor<S> B>
class ConeMetric {
 public:
  using Point = typename S::Point;

  ConeMetric(const S& space, const B& gamma, ConeVariant variant = ConeVariant::floor)
      : space_(&space), gamma_(gamma), variant_(variant), o_(space.base_point()) {
    if (variant == ConeVariant::geodesic && !gamma.params().is_geodesic())
      throw std::invalid_argument("geodesic cone variant requires lambda = 1, k = 0");
  }

  const S& space() const { return *space_; }
  const B& bicombing() const { return gamma_; }
  ConeVariant variant() const { return variant_; }
  const Point& base_point() const { return o_; }

  double radius_transform(double m) const {
    return variant_ == ConeVariant::floor ? stable_floor(m) : m;
  }

  double operator()(const Point& x, const Point& y) const {
    const double rx = space_->distance(o_, x);
    const double ry = space_->distance(o_, y);
    const double m = radius_transform(std::min(rx, ry));
    return std::abs(rx - ry) +
           space_->distance(ray_point(gamma_, o_, x, rx, m), ray_point(gamma_, o_, y, ry, m));
  }

 private:
  const S* space_;
  B gamma_;
  ConeVariant variant_;
  Point o_;
};

template <MetricSpace S, BicombingFor<S> B>
double cone_metric(const ConeMetric<S, B>& ctx, const typename S::Point& x,
                   const typename S::Point& y) {
  return ctx(x, y);
}

/// d_c(x,z) <= lambda E d_c(x,y) + lambda E d_c(y,z) + 4 lambda + 2k + C
template <MetricSpace S, BicombingFor<S> B>
VerificationReport check_quasi_triangle(const ConeMetric<S, B>& ctx,
                                        std::span<const std::array<typename S::Point, 3>> triples,
                                        const CoarseParams& p, double tol = kDefaultTolerance) {
  const double lE = p.lambda * p.E;
  const double additive = 4.0 * p.lambda + 2.0 * p.k + p.C;
  return run_sharded("quasi_triangle", triples.size(), [&](std::size_t b, std::size_t e) {
    VerificationReport r;
    for (std::size_t i = b; i < e; ++i) {
      const auto& [x, y, z] = triples[i];
      const double lhs = ctx(x, z);
      const double rhs = lE * ctx(x, y) + lE * ctx(y, z) + additive;
      r.record(lhs, rhs, tol, "quasi_triangle",
               [&] { return flatten(ctx.space(), {&x, &y, &z}); });
    }
    return r;
  });
}

/// d_c(x,y) <= (lambda + 2) d(x,y) + 2 lambda + 2k
template <MetricSpace S, BicombingFor<S> B>
VerificationReport check_lipschitz_bound(const ConeMetric<S, B>& ctx,
                                         std::span<const PointPair<typename S::Point>> pairs,
                                         const CoarseParams& p, double tol = kDefaultTolerance) {
  return run_sharded("lipschitz_bound", pairs.size(), [&](std::size_t b, std::size_t e) {
    VerificationReport r;
    for (std::size_t i = b; i < e; ++i) {
      const auto& [x, y] = pairs[i];
      const double lhs = ctx(x, y);
      const double rhs =
          (p.lambda + 2.0) * ctx.space().distance(x, y) + 2.0 * p.lambda + 2.0 * p.k;
      r.record(lhs, rhs, tol, "lipschitz_bound", [&] { return flatten(ctx.space(), {&x, &y}); });
    }
    return r;
  });
}

}  // namespace horolab
