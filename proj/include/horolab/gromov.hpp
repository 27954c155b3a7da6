#pragma once

// The bicombing-based product (x|y)_o, escaping sequences as finite stand-ins
// for ideal points, ray witnesses and the visual quasi-metric.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "horolab/bicombing.hpp"

namespace horolab {

/// (x|y)_o = min{d(o,x), d(o,y), sup{t >= 0 : d(rp(o,x,t), rp(o,y,t)) <= D1}}
/// with the sup taken over the grid 0, step, 2 step, ... The last grid point
/// satisfying the bound wins; the scan never stops early at a failure.
template <MetricSpace S, BicombingFor<S> B>
double gromov_product(const S& space, const B& gamma, const typename S::Point& x,
                      const typename S::Point& y, double D1, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("gromov_product: step must be > 0");
  const auto o = space.base_point();
  const double rx = space.distance(o, x);
  const double ry = space.distance(o, y);
  const double m = std::min(rx, ry);
  const double far = std::max(rx, ry);
  auto close_at = [&](double t) {
    return space.distance(ray_point(gamma, o, x, rx, t), ray_point(gamma, o, y, ry, t)) <= D1;
  };
  // beyond both radii the rays sit at x and y forever
  if (space.distance(x, y) <= D1) return m;
  if (close_at(m)) return m;
  double last = -1.0;
  const auto n = static_cast<std::size_t>(std::floor(m / step));
  for (std::size_t i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) * step;
    if (t >= m) break;
    if (close_at(t)) last = t;
  }
  // any satisfying t past m caps the product at m
  for (double t = (static_cast<double>(n) + 1.0) * step; t <= far; t += step)
    if (close_at(t)) return m;
  return std::max(last, 0.0);
}

template <MetricSpace S, BicombingFor<S> B>
double gromov_product(const S& space, const B& gamma, const typename S::Point& x,
                      const typename S::Point& y, double D1, const ParamGrid& grid) {
  return gromov_product(space, gamma, x, y, D1, grid.step);
}

/// (x|z) >= min{(x|y), (y|z)} / D2, checked with `slack` (grid resolution)
/// added to the tolerance.
template <MetricSpace S, BicombingFor<S> B>
VerificationReport check_d2_inequality(const S& space, const B& gamma,
                                       std::span<const std::array<typename S::Point, 3>> triples,
                                       double D1, double D2, double step, double slack,
                                       double tol = kDefaultTolerance) {
  if (!(D2 > 0.0)) throw std::invalid_argument("D2 must be > 0");
  return run_sharded("d2_inequality", triples.size(), [&](std::size_t b, std::size_t e) {
    VerificationReport r;
    for (std::size_t i = b; i < e; ++i) {
      const auto& [x, y, z] = triples[i];
      const double xz = gromov_product(space, gamma, x, z, D1, step);
      const double xy = gromov_product(space, gamma, x, y, D1, step);
      const double yz = gromov_product(space, gamma, y, z, D1, step);
      r.record(std::min(xy, yz) / D2, xz, tol + slack, "d2_inequality",
               [&] { return flatten(space, {&x, &y, &z}); });
    }
    return r;
  });
}

/// Finite list of points standing in for a sequence escaping to infinity.
template <class P>
struct EscapingSequence {
  std::vector<P> points;
};

template <MetricSpace S>
std::vector<double> radii(const S& space, const EscapingSequence<typename S::Point>& seq) {
  std::vector<double> out;
  out.reserve(seq.points.size());
  for (const auto& p : seq.points) out.push_back(space.distance(space.base_point(), p));
  return out;
}

template <MetricSpace S>
bool radii_strictly_increasing(const S& space, const EscapingSequence<typename S::Point>& seq) {
  const auto r = radii(space, seq);
  for (std::size_t i = 1; i < r.size(); ++i)
    if (!(r[i] > r[i - 1])) return false;
  return true;
}

/// Tail quantification needs at least this many points after the tail index.
inline constexpr std::size_t kMinTail = 3;

inline void require_increasing(std::span<const double> thresholds) {
  for (std::size_t i = 1; i < thresholds.size(); ++i)
    if (!(thresholds[i] > thresholds[i - 1]))
      throw std::invalid_argument("thresholds must be strictly increasing");
}

/// True iff the radii increase and, for every threshold tau, some tail of at
/// least kMinTail points has all pairwise products above tau.
template <MetricSpace S, BicombingFor<S> B>
bool is_escaping(const S& space, const B& gamma, const EscapingSequence<typename S::Point>& seq,
                 std::span<const double> thresholds, double D1, double step) {
  const std::size_t n = seq.points.size();
  if (n < kMinTail) throw std::invalid_argument("escaping sequence needs at least 3 points");
  require_increasing(thresholds);
  if (!radii_strictly_increasing(space, seq)) return false;
  // tail_min[i] = min over pairs i <= a < b < n of (x_a | x_b)
  std::vector<double> tail_min(n, std::numeric_limits<double>::infinity());
  for (std::size_t i = n - 1; i-- > 0;) {
    double m = tail_min[i + 1];
    for (std::size_t j = i + 1; j < n; ++j)
      m = std::min(m, gromov_product(space, gamma, seq.points[i], seq.points[j], D1, step));
    tail_min[i] = m;
  }
  for (double tau : thresholds) {
    bool ok = false;
    for (std::size_t i = 0; i + kMinTail <= n; ++i)
      if (tail_min[i] > tau) {
        ok = true;
        break;
      }
    if (!ok) return false;
  }
  return true;
}

/// Paired-product test: for every threshold some tail of at least kMinTail
/// indices has (x_n | y_n) above it. Both inputs must be escaping.
template <MetricSpace S, BicombingFor<S> B>
bool same_ideal_point(const S& space, const B& gamma,
                      const EscapingSequence<typename S::Point>& s1,
                      const EscapingSequence<typename S::Point>& s2,
                      std::span<const double> thresholds, double D1, double step) {
  if (!is_escaping(space, gamma, s1, thresholds, D1, step) ||
      !is_escaping(space, gamma, s2, thresholds, D1, step))
    throw std::invalid_argument("same_ideal_point: inputs must be escaping");
  const std::size_t n = std::min(s1.points.size(), s2.points.size());
  std::vector<double> tail_min(n + 1, std::numeric_limits<double>::infinity());
  for (std::size_t i = n; i-- > 0;)
    tail_min[i] = std::min(tail_min[i + 1],
                           gromov_product(space, gamma, s1.points[i], s2.points[i], D1, step));
  for (double tau : thresholds) {
    bool ok = false;
    for (std::size_t i = 0; i + kMinTail <= n; ++i)
      if (tail_min[i] > tau) {
        ok = true;
        break;
      }
    if (!ok) return false;
  }
  return true;
}

/// rp(o, x_N, t) for the last stored point x_N.
template <MetricSpace S, BicombingFor<S> B>
typename S::Point ray_witness(const S& space, const B& gamma,
                              const EscapingSequence<typename S::Point>& seq, double t) {
  if (seq.points.empty()) throw std::invalid_argument("ray_witness: empty sequence");
  const auto o = space.base_point();
  const auto& last = seq.points.back();
  const double cap = space.distance(o, last);
  if (t < 0.0 || t > cap) throw std::out_of_range("ray_witness: t beyond the witness cap");
  return ray_point(gamma, o, last, cap, t);
}

/// Approximation of the ray toward an ideal point by the ray to a far member
/// of a representative sequence.
template <class P>
struct DirectionWitness {
  EscapingSequence<P> sequence;
  std::size_t index = 0;
  double cap = 0.0;
};

template <MetricSpace S>
DirectionWitness<typename S::Point> make_witness(const S& space,
                                                 EscapingSequence<typename S::Point> seq) {
  if (seq.points.empty()) throw std::invalid_argument("witness needs a nonempty sequence");
  DirectionWitness<typename S::Point> w;
  w.index = seq.points.size() - 1;
  w.cap = space.distance(space.base_point(), seq.points.back());
  w.sequence = std::move(seq);
  return w;
}

template <MetricSpace S, BicombingFor<S> B>
typename S::Point ray_witness(const S& space, const B& gamma,
                              const DirectionWitness<typename S::Point>& dir, double t) {
  if (t < 0.0 || t > dir.cap) throw std::out_of_range("ray_witness: t beyond the witness cap");
  const auto o = space.base_point();
  const auto& x = dir.sequence.points.at(dir.index);
  return ray_point(gamma, o, x, dir.cap, t);
}

/// e^{-epsilon (x|y)_o}, in (0, 1].
template <MetricSpace S, BicombingFor<S> B>
double visual_quasimetric(const S& space, const B& gamma, const typename S::Point& x,
                          const typename S::Point& y, double epsilon, double D1, double step) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  return std::exp(-epsilon * gromov_product(space, gamma, x, y, D1, step));
}

}  // namespace horolab
