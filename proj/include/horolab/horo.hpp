#pragma once

// Horofunction machinery on finite sample windows: normalised distance
// functions phi and psi, tail limits, sup-distances, base-point change,
// bounded-difference classification, Busemann functions for the cone metric
// and the one-sided exclusion certificate.

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "horolab/cone_metric.hpp"
#include "horolab/gromov.hpp"
#include "horolab/spaces/half_plane.hpp"
#include "horolab/spaces/lp_space.hpp"
#include "horolab/spaces/metric_tree.hpp"
#include "horolab/spaces/open_cone.hpp"

namespace horolab {

/// Finite sample of the closed ball of `radius` about the base point. The
/// base point is always entry 0.
template <class P>
struct SampleWindow {
  std::vector<P> points;
  std::vector<double> base_distance;
  double radius = 0.0;
  std::string rule;

  std::size_t size() const { return points.size(); }

  std::size_t index_of(const P& p) const {
    auto it = std::find(points.begin(), points.end(), p);
    if (it == points.end()) throw std::out_of_range("point not sampled in window");
    return static_cast<std::size_t>(it - points.begin());
  }
};

template <class P>
using WindowPtr = std::shared_ptr<const SampleWindow<P>>;

/// Keeps candidates within `radius` of the base (deduplicated, base first).
template <MetricSpace S>
WindowPtr<typename S::Point> make_window(const S& space,
                                         const std::vector<typename S::Point>& candidates,
                                         double radius, std::string rule) {
  if (!(radius >= 0.0)) throw std::invalid_argument("window radius must be >= 0");
  auto w = std::make_shared<SampleWindow<typename S::Point>>();
  w->radius = radius;
  w->rule = std::move(rule);
  const auto o = space.base_point();
  w->points.push_back(o);
  w->base_distance.push_back(0.0);
  for (const auto& c : candidates) {
    const double d = space.distance(o, c);
    if (d > radius + 1e-12) continue;
    if (std::find(w->points.begin(), w->points.end(), c) != w->points.end()) continue;
    w->points.push_back(c);
    w->base_distance.push_back(d);
  }
  return w;
}

/// Lattice of the given spacing about the base point, intersected with the ball.
template <std::size_t N>
WindowPtr<std::array<double, N>> lattice_window(const LpSpace<N>& space, double radius,
                                                double spacing) {
  if (!(spacing > 0.0)) throw std::invalid_argument("lattice spacing must be > 0");
  const auto m = static_cast<long>(std::floor(radius / spacing + 1e-9));
  std::vector<std::array<double, N>> cand;
  std::array<long, N> idx;
  idx.fill(-m);
  const auto o = space.base_point();
  for (;;) {
    std::array<double, N> p;
    for (std::size_t i = 0; i < N; ++i) p[i] = o[i] + static_cast<double>(idx[i]) * spacing;
    cand.push_back(p);
    std::size_t k = 0;
    while (k < N && idx[k] == m) idx[k++] = -m;
    if (k == N) break;
    ++idx[k];
  }
  return make_window(space, cand,
                     radius, "lattice spacing=" + std::to_string(spacing));
}

/// Vertices, edge midpoints and offsets on a `spacing` lattice along every
/// edge, within the ball.
inline WindowPtr<TreePoint> tree_window(const FiniteMetricTree& tree, double radius,
                                        double spacing) {
  if (!(spacing > 0.0)) throw std::invalid_argument("tree window spacing must be > 0");
  std::vector<TreePoint> cand;
  for (std::size_t v = 0; v < tree.vertex_count(); ++v) cand.push_back(tree.vertex(v));
  for (std::size_t v = 0; v < tree.vertex_count(); ++v) {
    if (v == tree.root()) continue;
    const double w = tree.edge_weight(v);
    cand.push_back(tree.point_on_edge(v, w / 2.0));
    const auto [lo, hi] = tree.in_ball_span(v, radius);
    if (lo > hi) continue;
    const double first = std::ceil(lo / spacing) * spacing;
    for (double off = first; off <= hi + 1e-12 && off <= w; off += spacing)
      if (off > 0.0) cand.push_back(tree.point_on_edge(v, std::min(off, w)));
  }
  return make_window(tree, cand, radius, "tree vertices+midpoints+spacing=" + std::to_string(spacing));
}

/// Apex plus radius grid k*step (k >= 1) in every direction.
inline WindowPtr<OpenConePoint> cone_window(const OpenCone& cone, double radius, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("cone window step must be > 0");
  std::vector<OpenConePoint> cand;
  const auto n = static_cast<std::size_t>(std::floor(radius / step + 1e-9));
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t y = 0; y < cone.directions().size(); ++y)
      cand.push_back(cone.point(static_cast<double>(i) * step, y));
  return make_window(cone, cand, radius, "cone radial step=" + std::to_string(step));
}

/// Hyperbolic polar grid about the base point.
inline WindowPtr<HalfPlanePoint> polar_window(const HyperbolicHalfPlane& hp, double radius,
                                              std::size_t rings, std::size_t spokes) {
  std::vector<HalfPlanePoint> cand;
  for (std::size_t i = 1; i <= rings; ++i)
    for (std::size_t j = 0; j < spokes; ++j)
      cand.push_back(hp.exp_at_base(radius * static_cast<double>(i) / static_cast<double>(rings),
                                    2.0 * std::numbers::pi * static_cast<double>(j) /
                                        static_cast<double>(spokes)));
  return make_window(hp, cand, radius, "polar rings=" + std::to_string(rings));
}

enum class Provenance { phi, psi, limit, busemann, opencone, rebased, difference };

inline const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::phi: return "phi";
    case Provenance::psi: return "psi";
    case Provenance::limit: return "limit";
    case Provenance::busemann: return "busemann";
    case Provenance::opencone: return "opencone";
    case Provenance::rebased: return "rebased";
    case Provenance::difference: return "difference";
  }
  return "unknown";
}

/// Real-valued function sampled on a window. `base_index` is the window
/// entry where the function is normalised to vanish.
template <class P>
struct WindowFunction {
  WindowPtr<P> window;
  std::vector<double> values;
  Provenance provenance = Provenance::phi;
  std::size_t base_index = 0;
};

template <class P>
bool same_window(const WindowFunction<P>& f, const WindowFunction<P>& g) {
  if (f.window == g.window) return true;
  return f.window && g.window && f.window->points == g.window->points;
}

template <class P>
void require_same_window(const WindowFunction<P>& f, const WindowFunction<P>& g) {
  if (!same_window(f, g)) throw std::invalid_argument("window functions on different windows");
}

/// phi_x(u) = d(u, x) - d(o, x)
template <MetricSpace S>
WindowFunction<typename S::Point> phi_window(const S& space, const typename S::Point& x,
                                             const WindowPtr<typename S::Point>& w) {
  WindowFunction<typename S::Point> f{w, {}, Provenance::phi, 0};
  const double r = space.distance(space.base_point(), x);
  f.values.reserve(w->size());
  for (const auto& u : w->points) f.values.push_back(space.distance(u, x) - r);
  f.base_index = w->index_of(space.base_point());
  return f;
}

/// psi_x(u) = d_c(u, x) - d(o, x)
template <MetricSpace S, BicombingFor<S> B>
WindowFunction<typename S::Point> psi_window(const ConeMetric<S, B>& ctx,
                                             const typename S::Point& x,
                                             const WindowPtr<typename S::Point>& w) {
  WindowFunction<typename S::Point> f{w, {}, Provenance::psi, 0};
  const double r = ctx.space().distance(ctx.base_point(), x);
  f.values.reserve(w->size());
  for (const auto& u : w->points) f.values.push_back(ctx(u, x) - r);
  f.base_index = w->index_of(ctx.base_point());
  return f;
}

template <class P>
double sup_distance_on_window(const WindowFunction<P>& f, const WindowFunction<P>& g) {
  require_same_window(f, g);
  double m = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i)
    m = std::max(m, std::abs(f.values[i] - g.values[i]));
  return m;
}

/// Sup of |f - g| over the window points within `radius` of the base.
template <class P>
double sup_distance_within(const WindowFunction<P>& f, const WindowFunction<P>& g, double radius) {
  require_same_window(f, g);
  double m = 0.0;
  const auto& bd = f.window->base_distance;
  for (std::size_t i = 0; i < f.values.size(); ++i)
    if (bd[i] <= radius + 1e-12) m = std::max(m, std::abs(f.values[i] - g.values[i]));
  return m;
}

struct ConvergenceReport {
  double cauchy_gap = 0.0;
  std::size_t pairs = 0;
  double tol = 1e-6;
  bool converged = true;
};

/// Returns the last function of the list with a Cauchy report over the last
/// half of the list (max sup-distance between tail pairs).
template <class P>
std::pair<WindowFunction<P>, ConvergenceReport> limit_on_window(
    const std::vector<WindowFunction<P>>& fs, double tol = 1e-6) {
  if (fs.empty()) throw std::invalid_argument("limit_on_window: empty list");
  for (const auto& f : fs) require_same_window(fs.front(), f);
  ConvergenceReport rep;
  rep.tol = tol;
  const std::size_t start = fs.size() / 2;
  for (std::size_t i = start; i < fs.size(); ++i)
    for (std::size_t j = i + 1; j < fs.size(); ++j) {
      rep.cauchy_gap = std::max(rep.cauchy_gap, sup_distance_on_window(fs[i], fs[j]));
      ++rep.pairs;
    }
  rep.converged = rep.cauchy_gap <= tol;
  WindowFunction<P> out = fs.back();
  out.provenance = Provenance::limit;
  return {std::move(out), rep};
}

/// xi -> xi - xi(o')
template <class P>
WindowFunction<P> rebase(const WindowFunction<P>& f, const P& o_prime) {
  const std::size_t idx = f.window->index_of(o_prime);
  WindowFunction<P> out = f;
  const double shift = f.values[idx];
  for (auto& v : out.values) v -= shift;
  out.base_index = idx;
  out.provenance = Provenance::rebased;
  return out;
}

enum class Verdict { bounded, growing, inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::bounded: return "bounded";
    case Verdict::growing: return "growing";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "unknown";
}

struct ReducedClassVerdict {
  Verdict verdict = Verdict::inconclusive;
  double plateau = 0.0;
  double slope = 0.0;
  double slope_gate = 0.0;
  std::vector<double> radii;
  std::vector<double> sup_values;
};

/// max(1e-3, (E D1 + C) / R_max)
inline double default_slope_gate(const CoarseParams& p, double r_max) {
  const auto c = derive_constants(p);
  return std::max(1e-3, (p.E * c.D1 + p.C) / r_max);
}

/// Least-squares slope of sup|f - g| over nested sub-windows against radius.
template <class P>
ReducedClassVerdict classify_bounded_difference(const WindowFunction<P>& f,
                                                const WindowFunction<P>& g,
                                                std::span<const double> radii, double slope_gate) {
  if (radii.size() < 3) throw std::invalid_argument("classification needs at least 3 windows");
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i] > radii[i - 1])) throw std::invalid_argument("window radii must increase");
  if (radii.back() > f.window->radius + 1e-9)
    throw std::invalid_argument("window radius exceeds the sampled window");
  ReducedClassVerdict v;
  v.slope_gate = slope_gate;
  v.radii.assign(radii.begin(), radii.end());
  for (double r : radii) v.sup_values.push_back(sup_distance_within(f, g, r));
  const double n = static_cast<double>(radii.size());
  double mr = 0.0, ms = 0.0;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    mr += radii[i] / n;
    ms += v.sup_values[i] / n;
  }
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    num += (radii[i] - mr) * (v.sup_values[i] - ms);
    den += (radii[i] - mr) * (radii[i] - mr);
  }
  v.slope = num / den;
  v.plateau = v.sup_values.back();
  if (v.slope < slope_gate)
    v.verdict = Verdict::bounded;
  else if (v.slope > slope_gate)
    v.verdict = Verdict::growing;
  return v;
}

/// b(u) = -d(o,u) + d(rp(o,u,m), gamma_x(m)) with m = floor(d(o,u)) in the
/// floor variant (d(o,u) itself in the geodesic variant); gamma_x is replaced
/// by the ray witness.
template <MetricSpace S, BicombingFor<S> B>
double busemann_cone(const ConeMetric<S, B>& ctx, const DirectionWitness<typename S::Point>& dir,
                     const typename S::Point& u) {
  const auto& space = ctx.space();
  const auto& o = ctx.base_point();
  const double r = space.distance(o, u);
  const double m = ctx.radius_transform(r);
  if (m > dir.cap) throw std::out_of_range("busemann_cone: radius beyond the witness cap");
  return -r + space.distance(ray_point(ctx.bicombing(), o, u, r, m),
                             ray_witness(space, ctx.bicombing(), dir, m));
}

template <MetricSpace S, BicombingFor<S> B>
WindowFunction<typename S::Point> busemann_window(const ConeMetric<S, B>& ctx,
                                                  const DirectionWitness<typename S::Point>& dir,
                                                  const WindowPtr<typename S::Point>& w) {
  WindowFunction<typename S::Point> f{w, {}, Provenance::busemann, 0};
  f.values.reserve(w->size());
  for (const auto& u : w->points) f.values.push_back(busemann_cone(ctx, dir, u));
  f.base_index = w->index_of(ctx.base_point());
  return f;
}

/// F(y)(s x) = -s + s d_Y(x, y)
inline WindowFunction<OpenConePoint> open_cone_limit_function(const OpenCone& cone,
                                                              const std::string& label,
                                                              const WindowPtr<OpenConePoint>& w) {
  const std::size_t y = cone.directions().index_of(label);
  WindowFunction<OpenConePoint> f{w, {}, Provenance::opencone, 0};
  f.values.reserve(w->size());
  for (const auto& p : w->points) {
    const double s = p.t;
    f.values.push_back(s == 0.0 ? 0.0 : -s + s * cone.directions().distance(p.dir, y));
  }
  f.base_index = w->index_of(cone.base_point());
  return f;
}

struct ExclusionRow {
  double R = 0.0;
  double window_radius = 0.0;
  double sup = 0.0;
  double bound = 0.0;
  bool applicable = true;
};

struct ExclusionCertificate {
  bool certified = false;
  double growth_slope = 0.0;
  std::vector<ExclusionRow> rows;
  std::string note =
      "one-sided: refutes the sandwich only for the sampled y and radii; "
      "not a decision of membership";
};

/// For each R, compares sup over the (lambda R + k)-ball of
/// psi_y / (lambda E) - xi with
/// (1/(lambda E) + 1)(R/lambda - k) - 2 d(o,y)/(lambda E) - lambda(theta(0)+2) - 3k.
/// Certified iff every applicable R (d(o,y) <= R/lambda - k) meets the bound
/// and at least two radii were applicable.
template <MetricSpace S, BicombingFor<S> B>
ExclusionCertificate exclusion_certificate(const ConeMetric<S, B>& ctx,
                                           const WindowFunction<typename S::Point>& xi,
                                           const typename S::Point& y, const CoarseParams& p,
                                           std::span<const double> Rs,
                                           double tol = kDefaultTolerance) {
  if (Rs.size() < 2) throw std::invalid_argument("exclusion certificate needs at least 2 windows");
  const double lE = p.lambda * p.E;
  const double dy = ctx.space().distance(ctx.base_point(), y);
  const auto psi = psi_window(ctx, y, xi.window);
  ExclusionCertificate cert;
  std::size_t applicable = 0;
  bool all_ok = true;
  std::vector<double> xs, ys;
  for (double R : Rs) {
    ExclusionRow row;
    row.R = R;
    row.window_radius = p.lambda * R + p.k;
    if (row.window_radius > xi.window->radius + 1e-9)
      throw std::invalid_argument("window too small for requested radius");
    row.bound = (1.0 / lE + 1.0) * (R / p.lambda - p.k) - 2.0 / lE * dy -
                p.lambda * (p.theta(0.0) + 2.0) - 3.0 * p.k;
    row.sup = -std::numeric_limits<double>::infinity();
    const auto& bd = xi.window->base_distance;
    for (std::size_t i = 0; i < xi.values.size(); ++i)
      if (bd[i] <= row.window_radius + 1e-12)
        row.sup = std::max(row.sup, psi.values[i] / lE - xi.values[i]);
    row.applicable = dy <= R / p.lambda - p.k;
    if (row.applicable) {
      ++applicable;
      if (row.sup < row.bound - tol) all_ok = false;
    }
    xs.push_back(R);
    ys.push_back(row.sup);
    cert.rows.push_back(row);
  }
  if (xs.size() >= 2) {
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      mx += xs[i];
      my += ys[i];
    }
    mx /= static_cast<double>(xs.size());
    my /= static_cast<double>(xs.size());
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      num += (xs[i] - mx) * (ys[i] - my);
      den += (xs[i] - mx) * (xs[i] - mx);
    }
    cert.growth_slope = den > 0.0 ? num / den : 0.0;
  }
  cert.certified = all_ok && applicable >= 2;
  return cert;
}

}  // namespace horolab
