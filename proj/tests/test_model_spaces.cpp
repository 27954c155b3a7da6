#include <gtest/gtest.h>

#include <numbers>

#include "horolab/bicombing.hpp"
#include "horolab/spaces/half_plane.hpp"
#include "horolab/spaces/lp_space.hpp"
#include "horolab/spaces/metric_tree.hpp"
#include "horolab/spaces/open_cone.hpp"
#include "horolab/spaces/snapped.hpp"
#include "support.hpp"

using namespace horolab;
using P2 = std::array<double, 2>;

namespace {

template <class F>
double simpson(F f, double a, double b, int n = 20000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

OpenCone two_point_cone() { return OpenCone(FiniteMetricSpace({"a", "b"}, {{0, 1}, {1, 0}})); }

// Walks from p to the root and back down to q, returning the point at arc
// length s. Independent of the tree's own geodesic code.
TreePoint path_walk(const FiniteMetricTree& t, std::size_t from_vertex, std::size_t to_vertex, double s) {
  std::vector<std::size_t> up, down;
  for (std::size_t v = from_vertex; v != t.root(); v = t.parent(v)) up.push_back(v);
  for (std::size_t v = to_vertex; v != t.root(); v = t.parent(v)) down.push_back(v);
  while (!up.empty() && !down.empty() && up.back() == down.back()) {
    up.pop_back();
    down.pop_back();
  }
  for (std::size_t v : up) {
    if (s <= t.edge_weight(v)) return t.point_on_edge(v, t.edge_weight(v) - s);
    s -= t.edge_weight(v);
  }
  for (auto it = down.rbegin(); it != down.rend(); ++it) {
    if (s <= t.edge_weight(*it)) return t.point_on_edge(*it, s);
    s -= t.edge_weight(*it);
  }
  return t.vertex(to_vertex);
}

}  // namespace

TEST(OpenCone, SameDirectionIsRadialGap) {
  const auto cone = two_point_cone();
  EXPECT_EQ(cone.distance(cone.point(3, "a"), cone.point(1.25, "a")), 1.75);
}

TEST(OpenCone, TwoPointUnitDistance) {
  const auto cone = two_point_cone();
  EXPECT_EQ(open_cone_distance(cone, cone.point(1, "a"), cone.point(1, "b")), 1.0);
}

TEST(OpenCone, ApexIdentification) {
  const auto cone = two_point_cone();
  EXPECT_EQ(cone.distance(cone.point(0, "a"), cone.point(2.5, "b")), 2.5);
  EXPECT_EQ(cone.point(0, "a"), cone.point(0, "b"));
  EXPECT_EQ(cone.point(0, "b"), cone.base_point());
}

TEST(OpenCone, UnknownLabelThrows) {
  const auto cone = two_point_cone();
  EXPECT_THROW(cone.point(1, "c"), std::out_of_range);
}

TEST(OpenCone, ExhaustiveGridIsMetric) {
  const OpenCone cone(FiniteMetricSpace::cycle(6));
  std::vector<OpenConePoint> pts{cone.base_point()};
  for (int i = 1; i <= 8; ++i)
    for (std::size_t y = 0; y < 6; ++y) pts.push_back(cone.point(0.5 * i, y));
  EXPECT_TRUE(check_metric_axioms_on(cone, std::span<const OpenConePoint>(pts)).pass());
}

TEST(OpenCone, TwoPointConeHasNoApproximateMidpoint) {
  const auto cone = two_point_cone();
  const auto a = cone.point(1, "a"), b = cone.point(1, "b");
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 300; ++i)
    for (std::size_t y = 0; y < 2; ++y) {
      const auto z = cone.point(0.01 * i, y);
      best = std::min(best, std::max(cone.distance(a, z), cone.distance(b, z)));
    }
  EXPECT_EQ(cone.distance(a, b), 1.0);
  EXPECT_GE(best, 0.99);
}

TEST(FiniteMetricSpace, Validation) {
  using M = std::vector<std::vector<double>>;
  EXPECT_THROW(FiniteMetricSpace({"a", "b"}, M{{0, 1}, {0.5, 0}}), std::invalid_argument);
  EXPECT_THROW(FiniteMetricSpace({"a", "b"}, M{{0, 2}, {2, 0}}), std::invalid_argument);
  EXPECT_THROW(FiniteMetricSpace({"a", "a"}, M{{0, 1}, {1, 0}}), std::invalid_argument);
  EXPECT_THROW(FiniteMetricSpace({"a", "b"}, M{{0, 0}, {0, 0}}), std::invalid_argument);
  EXPECT_THROW(FiniteMetricSpace({"a", "b", "c"}, M{{0, 0.1, 1}, {0.1, 0, 0.1}, {1, 0.1, 0}}),
               std::invalid_argument);
  const auto c = FiniteMetricSpace::cycle(8);
  EXPECT_EQ(c.distance(0, 4), 1.0);
  EXPECT_EQ(c.distance(1, 7), 0.5);
}

TEST(HalfPlane, VerticalDistanceMatchesIntegral) {
  const HyperbolicHalfPlane h;
  const double oracle = simpson([](double y) { return 1.0 / y; }, 1.0, std::exp(1.0));
  EXPECT_NEAR(h.distance({0, 1}, {0, std::exp(1.0)}), 1.0, 1e-12);
  EXPECT_NEAR(oracle, 1.0, 1e-10);
}

TEST(HalfPlane, SamePointIsZero) {
  const HyperbolicHalfPlane h;
  EXPECT_EQ(h.distance({0.3, 2.0}, {0.3, 2.0}), 0.0);
}

TEST(HalfPlane, SemicircleDistanceMatchesIntegral) {
  const HyperbolicHalfPlane h;
  // semicircle |z| = sqrt 2 through (-1,1) and (1,1): ds / y = dphi / sin(phi)
  const double oracle = simpson([](double phi) { return 1.0 / std::sin(phi); },
                                std::numbers::pi / 4, 3 * std::numbers::pi / 4);
  const double d = h.distance({-1, 1}, {1, 1});
  EXPECT_NEAR(d, oracle, 1e-9);
  EXPECT_NEAR(d, 1.7627471740390861, 1e-12);
}

TEST(HalfPlane, NonPositiveHeightThrows) {
  const HyperbolicHalfPlane h;
  EXPECT_THROW(h.distance({0, 0}, {0, 1}), std::domain_error);
  EXPECT_THROW(h.distance({0, 1}, {0, -1}), std::domain_error);
  EXPECT_THROW(HyperbolicHalfPlane({0, 0}), std::domain_error);
}

TEST(HalfPlane, VerticalMidpoint) {
  const HyperbolicHalfPlane h;
  const auto m = h.geodesic({0, 1}, {0, std::exp(2.0)}, 0.5);
  EXPECT_NEAR(m.x, 0.0, 1e-12);
  EXPECT_NEAR(m.y, std::exp(1.0), 1e-12);
}

TEST(HalfPlane, GeodesicStartsAtP) {
  const HyperbolicHalfPlane h;
  const GeodesicBicombing g(h);
  EXPECT_EQ(g({0.5, 2}, {-3, 1}, 0.0), (HalfPlanePoint{0.5, 2}));
  const auto p = h.geodesic({0.5, 2}, {-3, 1}, 0.0);
  EXPECT_NEAR(h.distance(p, {0.5, 2}), 0.0, 1e-12);
}

TEST(HalfPlane, SemicircleMidpoint) {
  const HyperbolicHalfPlane h;
  const auto m = h.geodesic({-1, 1}, {1, 1}, 0.5);
  EXPECT_NEAR(m.x, 0.0, 1e-12);
  EXPECT_NEAR(m.y, std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(h.distance(m, {-1, 1}), h.distance(m, {1, 1}), 1e-12);
}

TEST(HalfPlane, ConstantSpeed) {
  const HyperbolicHalfPlane h;
  Rng rng(12);
  for (int i = 0; i < 2000; ++i) {
    const auto p = h.random_point(rng, 6), q = h.random_point(rng, 6);
    const double t = uniform(rng, 0, 1);
    const double d = h.distance(p, q);
    EXPECT_NEAR(h.distance(p, h.geodesic(p, q, t)), t * d, 1e-7 * (1 + d));
  }
}

TEST(Tree, RootToLeafArcPoint) {
  // 0 -2- 1 -5- 2: leaf at distance 7
  const FiniteMetricTree t(3, {{0, 1, 2.0}, {1, 2, 5.0}}, 0);
  const GeodesicBicombing g(t);
  const auto p = g(t.vertex(0), t.vertex(2), 3.0 / 7.0);
  EXPECT_NEAR(t.distance(t.vertex(0), p), 3.0, 1e-12);
  const auto oracle = path_walk(t, 0, 2, 3.0);
  EXPECT_NEAR(t.distance(p, oracle), 0.0, 1e-12);
  EXPECT_EQ(p.child, 2u);
}

TEST(Tree, ZeroReturnsStart) {
  const auto t = testkit::small_tree();
  const GeodesicBicombing g(t);
  for (const auto& p : testkit::tree_nodes(t))
    for (const auto& q : testkit::tree_nodes(t)) EXPECT_EQ(g(p, q, 0.0), p);
}

TEST(Tree, MidpointOfTwoLeavesLiesOnRootArcs) {
  // branch point (vertex 1) at distance 3 from the root, leaves 2 and 3 below it
  const FiniteMetricTree t(4, {{0, 1, 3.0}, {1, 2, 2.0}, {1, 3, 4.0}}, 0);
  const auto m = t.geodesic(t.vertex(2), t.vertex(3), 0.5);
  EXPECT_NEAR(t.distance(m, t.vertex(2)), 3.0, 1e-12);
  // on the root arc of leaf 3, since that leaf is farther from the branch point
  EXPECT_NEAR(t.distance(t.vertex(0), m) + t.distance(m, t.vertex(3)), 7.0, 1e-12);
  EXPECT_NEAR(t.distance(m, path_walk(t, 2, 3, 3.0)), 0.0, 1e-12);
}

TEST(Tree, GeodesicMatchesPathWalk) {
  const auto t = testkit::small_tree();
  for (std::size_t a = 0; a < t.vertex_count(); ++a)
    for (std::size_t b = 0; b < t.vertex_count(); ++b) {
      const double d = t.distance(t.vertex(a), t.vertex(b));
      for (double s = 0; s <= d; s += 0.5) {
        const auto p = t.geodesic(t.vertex(a), t.vertex(b), d == 0 ? 0 : s / d);
        EXPECT_NEAR(t.distance(p, path_walk(t, a, b, s)), 0.0, 1e-12);
      }
    }
}

TEST(Tree, ArcAdditivityIsExact) {
  const auto t = testkit::small_tree();
  const auto nodes = testkit::tree_nodes(t);
  for (const auto& p : nodes)
    for (const auto& r : nodes)
      for (double s : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        const auto q = t.geodesic(p, r, s);
        EXPECT_EQ(t.distance(p, q) + t.distance(q, r), t.distance(p, r));
      }
}

TEST(Tree, Validation) {
  EXPECT_THROW(FiniteMetricTree(3, {{0, 1, 1.0}}, 0), std::invalid_argument);
  EXPECT_THROW(FiniteMetricTree(3, {{0, 1, 1.0}, {0, 1, 1.0}}, 0), std::invalid_argument);
  EXPECT_THROW(FiniteMetricTree(2, {{0, 1, 0.0}}, 0), std::invalid_argument);
  EXPECT_THROW(FiniteMetricTree(2, {{0, 1, 1.0}}, 2), std::invalid_argument);
  const auto t = testkit::small_tree();
  EXPECT_THROW(t.point_on_edge(0, 0.5), std::out_of_range);
  EXPECT_THROW(t.point_on_edge(2, 3.0), std::out_of_range);
}

TEST(Tree, RandomPointsStayInBall) {
  const FiniteMetricTree t(4, {{0, 1, 1.0}, {1, 2, 1000.0}, {0, 3, 0.5}}, 0);
  Rng rng(13);
  for (int i = 0; i < 5000; ++i) EXPECT_LE(t.distance(t.base_point(), t.random_point(rng, 7.5)), 7.5 + 1e-12);
}

TEST(LpSpace, NormsAndValidation) {
  EXPECT_THROW(LpSpace<2>(0.5), std::invalid_argument);
  EXPECT_EQ(LpSpace<2>(1.0).distance({0, 0}, {3, -4}), 7.0);
  EXPECT_EQ(LpSpace<2>(2.0).distance({0, 0}, {3, -4}), 5.0);
  EXPECT_EQ(LpSpace<2>(std::numeric_limits<double>::infinity()).distance({0, 0}, {3, -4}), 4.0);
  EXPECT_NEAR(LpSpace<2>(3.0).distance({0, 0}, {3, -4}), std::cbrt(27.0 + 64.0), 1e-12);
  EXPECT_EQ(LpSpace<3>(2.0).distance({1, 2, 2}, {0, 0, 0}), 3.0);
}

TEST(LpSpace, GeodesicBicombingsAreConvexAndGeodesic) {
  Rng rng(14);
  for (double p : {1.0, 2.0, 3.0, std::numeric_limits<double>::infinity()}) {
    const LpSpace<3> s(p);
    const GeodesicBicombing g(s);
    const auto quads = random_quads(s, 10000, rng, 10);
    EXPECT_TRUE(check_convexity_i(s, g, std::span(quads), ParamGrid(0.125), 1.0, 0.0).pass()) << p;
    const auto pairs = random_pairs(s, 10000, rng, 10);
    EXPECT_TRUE(check_quasi_geodesic(s, g, std::span(pairs), ParamGrid(0.125), CoarseParams{}).pass()) << p;
  }
}

TEST(ShippedGeodesics, TreeAndHalfPlaneAreConvexAndGeodesic) {
  Rng rng(15);
  const auto t = testkit::small_tree();
  const GeodesicBicombing gt(t);
  const auto tq = random_quads(t, 10000, rng, 10);
  EXPECT_TRUE(check_convexity_i(t, gt, std::span(tq), ParamGrid(0.125), 1.0, 0.0).pass());
  const auto tp = random_pairs(t, 10000, rng, 10);
  EXPECT_TRUE(check_quasi_geodesic(t, gt, std::span(tp), ParamGrid(0.125), CoarseParams{}).pass());
  const HyperbolicHalfPlane h;
  const GeodesicBicombing gh(h);
  const auto hq = random_quads(h, 10000, rng, 5);
  EXPECT_TRUE(check_convexity_i(h, gh, std::span(hq), ParamGrid(0.125), 1.0, 0.0).pass());
  const auto hp = random_pairs(h, 10000, rng, 5);
  EXPECT_TRUE(check_quasi_geodesic(h, gh, std::span(hp), ParamGrid(0.125), CoarseParams{}).pass());
}

TEST(Snap, ZeroDeltaIsIdentity) {
  const LpSpace<2> l2(2.0);
  const GeodesicBicombing g(l2);
  const auto s = snap_bicombing(l2, g, 0.0);
  Rng rng(16);
  for (int i = 0; i < 1000; ++i) {
    const auto x = l2.random_point(rng, 10), y = l2.random_point(rng, 10);
    const double t = uniform(rng, 0, 1);
    EXPECT_EQ(s(x, y, t), g(x, y, t));
  }
  EXPECT_EQ(s.params().k, 0.0);
}

TEST(Snap, RoundsInteriorPoint) {
  const LpSpace<2> l2(2.0);
  const auto s = snap_bicombing(l2, GeodesicBicombing(l2), 0.5);
  EXPECT_EQ(s(P2{0, 0}, P2{3, 0}, 1.0 / 3.0), (P2{1, 0}));
  // endpoints stay exact even off the lattice
  EXPECT_EQ(s(P2{0.1, 0.2}, P2{3.3, 0}, 0.0), (P2{0.1, 0.2}));
  EXPECT_EQ(s(P2{0.1, 0.2}, P2{3.3, 0}, 1.0), (P2{3.3, 0}));
}

TEST(Snap, HalfAwayFromZero) {
  const LpSpace<2> l2(2.0);
  EXPECT_EQ(l2.snap({0.25, -0.25}, 0.5), (P2{0.5, -0.5}));
  EXPECT_EQ(l2.snap({0.75, -1.25}, 0.5), (P2{1.0, -1.5}));
}

TEST(Snap, MeasuredDisplacementWithinAnalyticRadius) {
  for (double p : {1.0, 2.0, std::numeric_limits<double>::infinity()}) {
    const LpSpace<2> s(p);
    Rng rng(17);
    std::vector<P2> pts;
    for (int i = 0; i < 20000; ++i) pts.push_back(s.random_point(rng, 10));
    const double measured = measured_snap_displacement(s, std::span<const P2>(pts), 0.5);
    EXPECT_LE(measured, s.snap_radius(0.5));
    EXPECT_GT(measured, 0.9 * s.snap_radius(0.5));
  }
  const auto t = testkit::small_tree();
  const auto nodes = testkit::tree_nodes(t);
  EXPECT_LE(measured_snap_displacement(t, std::span<const TreePoint>(nodes), 0.75), t.snap_radius(0.75));
}

TEST(Snap, SnappedTreeIsQuasiGeodesic) {
  const auto t = testkit::small_tree();
  const auto s = snap_bicombing(t, GeodesicBicombing(t), 0.5);
  Rng rng(18);
  const auto pairs = random_pairs(t, 5000, rng, 10);
  EXPECT_TRUE(check_quasi_geodesic(t, s, std::span(pairs), ParamGrid(), s.params()).pass());
}
