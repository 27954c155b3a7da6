#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "horolab/core.hpp"

namespace horolab {

struct HalfPlanePoint {
  double x = 0.0;
  double y = 1.0;

  friend bool operator==(const HalfPlanePoint&, const HalfPlanePoint&) = default;
};

/// Upper half-plane model of the hyperbolic plane (curvature -1).
class HyperbolicHalfPlane {
 public:
  using Point = HalfPlanePoint;

  explicit HyperbolicHalfPlane(Point base = {0.0, 1.0}) : base_(base) { require_valid(base); }

  const Point& base_point() const { return base_; }
  HyperbolicHalfPlane rebased(const Point& o) const { return HyperbolicHalfPlane(o); }

  static void require_valid(const Point& p) {
    if (!(p.y > 0.0)) throw std::domain_error("half-plane point needs y > 0");
  }

  /// 2 asinh(|p - q| / (2 sqrt(y_p y_q))), the arcosh form rewritten to stay
  /// accurate for nearby points.
  double distance(const Point& p, const Point& q) const {
    require_valid(p);
    require_valid(q);
    const double chord = std::hypot(p.x - q.x, p.y - q.y);
    return 2.0 * std::asinh(chord / (2.0 * std::sqrt(p.y * q.y)));
  }

  /// Constant-speed geodesic. Walks from whichever endpoint is nearer the
  /// target so the disc-model radius stays well inside the unit disc.
  Point geodesic(const Point& p, const Point& q, double t) const {
    if (t <= 0.0 || p == q) return p;
    if (t >= 1.0) return q;
    const double d = distance(p, q);
    if (t <= 0.5) return walk(p, q, t * d);
    return walk(q, p, (1.0 - t) * d);
  }

  std::vector<double> coordinates(const Point& p) const { return {p.x, p.y}; }

  /// Uniform hyperbolic radius in [0, radius] and uniform angle about the base.
  Point random_point(Rng& rng, double radius) const {
    const double r = uniform(rng, 0.0, radius);
    const double phi = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    return exp_at_base(r, phi);
  }

  /// Point at hyperbolic distance r from the base in the direction phi.
  Point exp_at_base(double r, double phi) const {
    const std::complex<double> zeta = std::tanh(r / 2.0) * std::polar(1.0, phi);
    return from_disc(base_, zeta);
  }

 private:
  using cplx = std::complex<double>;

  static cplx as_complex(const Point& p) { return {p.x, p.y}; }

  // Cayley map centred at a: a -> 0.
  static cplx to_disc(const Point& a, const Point& z) {
    const cplx ca = as_complex(a);
    const cplx cz = as_complex(z);
    return (cz - ca) / (cz - std::conj(ca));
  }

  static Point from_disc(const Point& a, cplx zeta) {
    const cplx ca = as_complex(a);
    const cplx z = (ca - zeta * std::conj(ca)) / (1.0 - zeta);
    return {z.real(), std::max(z.imag(), std::numeric_limits<double>::min())};
  }

  Point walk(const Point& from, const Point& to, double s) const {
    cplx w = to_disc(from, to);
    const double mod = std::abs(w);
    if (mod == 0.0) return from;
    const cplx zeta = std::tanh(s / 2.0) * (w / mod);
    return from_disc(from, zeta);
  }

  Point base_;
};

}  // namespace horolab
