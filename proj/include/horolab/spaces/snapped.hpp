#pragma once

#include <string>

#include "horolab/bicombing.hpp"

namespace horolab {

template <class S>
concept SnappableSpace = MetricSpace<S> && requires(const S& s, const typename S::Point& p,
                                                    double delta) {
  { s.snap(p, delta) } -> std::convertible_to<typename S::Point>;
  { s.snap_radius(delta) } -> std::convertible_to<double>;
};

/// Wraps a bicombing and rounds its interior outputs to the space's
/// delta-lattice. Endpoints are left exact.
///
/// With delta_max the largest displacement snapping can cause, the wrapper
/// claims lambda = 1, k = 2 delta_max, C = C_inner + 4 delta_max and
/// theta(t) = t + 4 delta_max.
template <SnappableSpace S, BicombingFor<S> Inner>
class SnappedBicombing {
 public:
  using Point = typename S::Point;

  SnappedBicombing(const S& space, Inner inner, double delta)
      : space_(&space), inner_(std::move(inner)), delta_(delta) {
    if (!(delta >= 0.0)) throw std::invalid_argument("snap delta must be >= 0");
    delta_max_ = space.snap_radius(delta);
    const CoarseParams& base = inner_.params();
    params_.lambda = base.lambda;
    params_.k = base.k + 2.0 * delta_max_;
    params_.E = base.E;
    params_.C = base.C + 4.0 * delta_max_;
    const double shift = 4.0 * delta_max_;
    auto inner_theta = base.theta;
    params_.theta = [inner_theta, shift](double t) { return inner_theta(t) + shift; };
    params_.theta_desc = "(" + base.theta_desc + ")+" + std::to_string(shift);
  }

  Point operator()(const Point& x, const Point& y, double t) const {
    if (t <= 0.0) return x;
    if (t >= 1.0) return y;
    return space_->snap(inner_(x, y, t), delta_);
  }

  const CoarseParams& params() const { return params_; }
  double delta() const { return delta_; }
  double delta_max() const { return delta_max_; }
  const Inner& inner() const { return inner_; }

 private:
  const S* space_;
  Inner inner_;
  double delta_;
  double delta_max_ = 0.0;
  CoarseParams params_;
};

template <SnappableSpace S, BicombingFor<S> Inner>
SnappedBicombing<S, Inner> snap_bicombing(const S& space, Inner gamma, double delta) {
  return SnappedBicombing<S, Inner>(space, std::move(gamma), delta);
}

/// Largest observed d(snap(p), p) over the given sample.
template <SnappableSpace S>
double measured_snap_displacement(const S& space, std::span<const typename S::Point> pts,
                                  double delta) {
  double m = 0.0;
  for (const auto& p : pts) m = std::max(m, space.distance(space.snap(p, delta), p));
  return m;
}

}  // namespace horolab
