#pragma once

// Bicombings, their arc-length reparametrisation, and checkers for the
// quasi-geodesic bound and the two coarse-convexity conditions.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "horolab/core.hpp"

namespace horolab {

/// Discretisation of a closed interval. Always contains both endpoints.
struct ParamGrid {
  double step = 1.0 / 64.0;
  double lo = 0.0;
  double hi = 1.0;

  ParamGrid() = default;
  ParamGrid(double step_, double lo_ = 0.0, double hi_ = 1.0) : step(step_), lo(lo_), hi(hi_) {
    if (!(step > 0.0)) throw std::invalid_argument("grid step must be > 0");
    if (!(hi >= lo)) throw std::invalid_argument("grid range must satisfy lo <= hi");
  }

  std::vector<double> points() const {
    std::vector<double> out;
    const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / step - 1e-9));
    out.reserve(n + 1);
    for (std::size_t i = 0; i < n; ++i) out.push_back(lo + static_cast<double>(i) * step);
    out.push_back(hi);
    return out;
  }
};

/// The canonical geodesic bicombing a space ships (`space.geodesic`).
template <class S>
class GeodesicBicombing {
 public:
  using Point = typename S::Point;

  explicit GeodesicBicombing(const S& space, CoarseParams claimed = CoarseParams::geodesic())
      : space_(&space), params_(std::move(claimed)) {}

  Point operator()(const Point& x, const Point& y, double t) const {
    if (t <= 0.0) return x;
    if (t >= 1.0) return y;
    return space_->geodesic(x, y, t);
  }

  const CoarseParams& params() const { return params_; }
  const S& space() const { return *space_; }

 private:
  const S* space_;
  CoarseParams params_;
};

/// rpGamma(x, y, t): Gamma(x, y, t / d(x, y)) for t <= d(x, y), otherwise y.
template <MetricSpace S, BicombingFor<S> B>
typename S::Point reparametrize(const S& space, const B& gamma, const typename S::Point& x,
                                const typename S::Point& y, double t) {
  if (t < 0.0) throw std::invalid_argument("reparametrize: t must be >= 0");
  const double d = space.distance(x, y);
  if (d == 0.0 || t > d) return y;
  return gamma(x, y, t / d);
}

/// Same as reparametrize with d(x, y) supplied by the caller.
template <class B, class P>
P ray_point(const B& gamma, const P& x, const P& y, double dxy, double t) {
  if (dxy == 0.0 || t > dxy) return y;
  return gamma(x, y, t / dxy);
}

template <class P>
struct PointPair {
  P x;
  P y;
};

/// (x1, x2, y1, y2, a, b) as quantified in the convexity conditions.
template <class P>
struct Quad {
  P x1;
  P x2;
  P y1;
  P y2;
  double a = 1.0;
  double b = 1.0;
};

template <MetricSpace S, BicombingFor<S> B>
VerificationReport check_quasi_geodesic(const S& space, const B& gamma,
                                        std::span<const PointPair<typename S::Point>> pairs,
                                        const ParamGrid& grid, const CoarseParams& p,
                                        double tol = kDefaultTolerance) {
  if (grid.lo > 0.0 || grid.hi < 1.0) throw std::invalid_argument("grid must cover [0, 1]");
  const auto ts = grid.points();
  using P = typename S::Point;
  return run_sharded("quasi_geodesic", pairs.size(), [&](std::size_t b, std::size_t e) {
    VerificationReport r;
    std::vector<P> path(ts.size());
    for (std::size_t n = b; n < e; ++n) {
      const auto& [x, y] = pairs[n];
      const double dxy = space.distance(x, y);
      for (std::size_t i = 0; i < ts.size(); ++i) path[i] = gamma(x, y, ts[i]);
      for (std::size_t i = 0; i < ts.size(); ++i) {
        for (std::size_t j = i + 1; j < ts.size(); ++j) {
          const double gap = std::abs(ts[j] - ts[i]) * dxy;
          const double dist = space.distance(path[i], path[j]);
          auto in = [&] { return flatten(space, {&x, &y}, {ts[i], ts[j]}); };
          r.record(gap / p.lambda - p.k, dist, tol, "quasi_geodesic_lower", in);
          r.record(dist, p.lambda * gap + p.k, tol, "quasi_geodesic_upper", in);
        }
      }
    }
    return r;
  });
}

template <MetricSpace S, BicombingFor<S> B>
VerificationReport check_convexity_i(const S& space, const B& gamma,
                                     std::span<const Quad<typename S::Point>> quads,
                                     const ParamGrid& c_grid, double E, double C,
                                     double tol = kDefaultTolerance) {
  const auto cs = c_grid.points();
  return run_sharded("convexity_i", quads.size(), [&](std::size_t b, std::size_t e) {
    VerificationReport r;
    for (std::size_t n = b; n < e; ++n) {
      const auto& q = quads[n];
      if (q.a < 0.0 || q.a > 1.0 || q.b < 0.0 || q.b > 1.0)
        throw std::invalid_argument("convexity_i: a, b must lie in [0, 1]");
      const auto y1p = gamma(q.x1, q.y1, q.a);
      const auto y2p = gamma(q.x2, q.y2, q.b);
      const double dx = space.distance(q.x1, q.x2);
      const double dy = space.distance(y1p, y2p);
      for (double c : cs) {
        const double lhs = space.distance(gamma(q.x1, q.y1, c * q.a), gamma(q.x2, q.y2, c * q.b));
        const double rhs = (1.0 - c) * E * dx + c * E * dy + C;
        r.record(lhs, rhs, tol, "convexity_i", [&] {
          return flatten(space, {&q.x1, &q.x2, &q.y1, &q.y2}, {q.a, q.b, c});
        });
      }
    }
    return r;
  });
}

template <MetricSpace S, BicombingFor<S> B, class Theta>
VerificationReport check_theta_ii(const S& space, const B& gamma,
                                  std::span<const Quad<typename S::Point>> quads,
                                  const ParamGrid& ts_grid, const Theta& theta,
                                  double tol = kDefaultTolerance) {
  const auto ts = ts_grid.points();
  using P = typename S::Point;
  return run_sharded("theta_ii", quads.size(), [&](std::size_t b, std::size_t e) {
    VerificationReport r;
    std::vector<P> path1(ts.size()), path2(ts.size());
    for (std::size_t n = b; n < e; ++n) {
      const auto& q = quads[n];
      const double d1 = space.distance(q.x1, q.y1);
      const double d2 = space.distance(q.x2, q.y2);
      const double dx = space.distance(q.x1, q.x2);
      for (std::size_t i = 0; i < ts.size(); ++i) {
        path1[i] = gamma(q.x1, q.y1, ts[i]);
        path2[i] = gamma(q.x2, q.y2, ts[i]);
      }
      for (std::size_t i = 0; i < ts.size(); ++i) {
        for (std::size_t j = 0; j < ts.size(); ++j) {
          const double lhs = std::abs(ts[i] * d1 - ts[j] * d2);
          const double rhs = theta(dx + space.distance(path1[i], path2[j]));
          r.record(lhs, rhs, tol, "theta_ii", [&] {
            return flatten(space, {&q.x1, &q.x2, &q.y1, &q.y2}, {ts[i], ts[j]});
          });
        }
      }
    }
    return r;
  });
}

// Seeded tuple generators shared by the checkers' callers.

template <SampledSpace S>
std::vector<PointPair<typename S::Point>> random_pairs(const S& space, std::size_t n, Rng& rng,
                                                       double radius) {
  std::vector<PointPair<typename S::Point>> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto x = space.random_point(rng, radius);
    auto y = space.random_point(rng, radius);
    out.push_back({std::move(x), std::move(y)});
  }
  return out;
}

template <SampledSpace S>
std::vector<Quad<typename S::Point>> random_quads(const S& space, std::size_t n, Rng& rng,
                                                  double radius) {
  std::vector<Quad<typename S::Point>> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Quad<typename S::Point> q{space.random_point(rng, radius), space.random_point(rng, radius),
                              space.random_point(rng, radius), space.random_point(rng, radius),
                              uniform(rng, 0.0, 1.0), uniform(rng, 0.0, 1.0)};
    out.push_back(std::move(q));
  }
  return out;
}

template <SampledSpace S>
std::vector<std::array<typename S::Point, 3>> random_triples(const S& space, std::size_t n,
                                                             Rng& rng, double radius) {
  std::vector<std::array<typename S::Point, 3>> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto x = space.random_point(rng, radius);
    auto y = space.random_point(rng, radius);
    auto z = space.random_point(rng, radius);
    out.push_back({std::move(x), std::move(y), std::move(z)});
  }
  return out;
}

}  // namespace horolab
