#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "horolab/core.hpp"

namespace horolab {

/// A point of a rooted metric tree: it sits on the edge joining `child` to
/// its parent, at distance `offset` from the parent, offset in (0, w(child)].
/// The root is {root, 0}. A vertex v != root is {v, w(v)}.
struct TreePoint {
  std::size_t child = 0;
  double offset = 0.0;

  friend bool operator==(const TreePoint&, const TreePoint&) = default;
};

struct TreeEdge {
  std::size_t u = 0;
  std::size_t v = 0;
  double weight = 0.0;
};

/// Finite tree with positive edge weights. Points live on edges; the
/// distance is the length of the unique arc.
class FiniteMetricTree {
 public:
  using Point = TreePoint;

  FiniteMetricTree(std::size_t vertex_count, const std::vector<TreeEdge>& edges,
                   std::size_t root = 0)
      : root_(root),
        parent_(vertex_count, kNone),
        weight_(vertex_count, 0.0),
        depth_(vertex_count, 0.0),
        level_(vertex_count, 0) {
    if (vertex_count == 0) throw std::invalid_argument("tree needs at least one vertex");
    if (root >= vertex_count) throw std::invalid_argument("root out of range");
    if (edges.size() + 1 != vertex_count)
      throw std::invalid_argument("a tree on n vertices has n - 1 edges");
    std::vector<std::vector<std::pair<std::size_t, double>>> adj(vertex_count);
    for (const auto& e : edges) {
      if (e.u >= vertex_count || e.v >= vertex_count || e.u == e.v)
        throw std::invalid_argument("edge endpoint out of range");
      if (!(e.weight > 0.0)) throw std::invalid_argument("edge weights must be positive");
      adj[e.u].push_back({e.v, e.weight});
      adj[e.v].push_back({e.u, e.weight});
    }
    std::vector<bool> seen(vertex_count, false);
    std::vector<std::size_t> stack{root};
    seen[root] = true;
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      order_.push_back(v);
      for (auto [w, len] : adj[v]) {
        if (seen[w]) continue;
        seen[w] = true;
        parent_[w] = v;
        weight_[w] = len;
        depth_[w] = depth_[v] + len;
        level_[w] = level_[v] + 1;
        stack.push_back(w);
      }
    }
    if (order_.size() != vertex_count) throw std::invalid_argument("edges do not form a tree");
    base_ = vertex(root);
  }

  std::size_t vertex_count() const { return parent_.size(); }
  std::size_t root() const { return root_; }
  std::size_t parent(std::size_t v) const { return parent_[v]; }
  double edge_weight(std::size_t v) const { return weight_[v]; }
  double vertex_depth(std::size_t v) const { return depth_[v]; }

  bool is_leaf(std::size_t v) const {
    if (v == root_) return false;
    return std::none_of(parent_.begin(), parent_.end(), [&](std::size_t p) { return p == v; });
  }

  const Point& base_point() const { return base_; }

  FiniteMetricTree rebased(const Point& o) const {
    FiniteMetricTree t = *this;
    t.base_ = canonical(o);
    return t;
  }

  Point vertex(std::size_t v) const {
    if (v >= vertex_count()) throw std::out_of_range("vertex out of range");
    if (v == root_) return {root_, 0.0};
    return {v, weight_[v]};
  }

  /// Point on the edge above `child` at distance `offset` from the parent end.
  Point point_on_edge(std::size_t child, double offset) const {
    if (child >= vertex_count() || child == root_) throw std::out_of_range("not an edge");
    if (offset < 0.0 || offset > weight_[child]) throw std::out_of_range("offset off the edge");
    return canonical({child, offset});
  }

  /// Distance from the root.
  double depth(const Point& p) const {
    if (p.child == root_) return 0.0;
    return depth_[parent_[p.child]] + p.offset;
  }

  double distance(const Point& a, const Point& b) const {
    if (a.child == b.child) return std::abs(a.offset - b.offset);
    const double da = depth(a);
    const double db = depth(b);
    if (is_ancestor(a.child, b.child)) return db - da;
    if (is_ancestor(b.child, a.child)) return da - db;
    return da + db - 2.0 * depth_[lca(a.child, b.child)];
  }

  /// Point at distance t * d(a, b) from a along the arc to b.
  Point geodesic(const Point& a, const Point& b, double t) const {
    const double d = distance(a, b);
    const double s = t * d;
    const double da = depth(a);
    double meet;
    if (a.child == b.child)
      meet = std::min(da, depth(b));
    else if (is_ancestor(a.child, b.child))
      meet = da;
    else if (is_ancestor(b.child, a.child))
      meet = depth(b);
    else
      meet = depth_[lca(a.child, b.child)];
    const double up = da - meet;
    if (s <= up) return ancestor_at_depth(a, da - s);
    return ancestor_at_depth(b, std::min(depth(b), meet + (s - up)));
  }

  /// The point on the root arc of p at the given depth (0 <= depth <= depth(p)).
  Point ancestor_at_depth(const Point& p, double target) const {
    if (target <= 0.0) return vertex(root_);
    std::size_t c = p.child;
    if (c == root_) return vertex(root_);
    while (depth_[parent_[c]] >= target && parent_[c] != root_) c = parent_[c];
    if (depth_[parent_[c]] >= target) return vertex(root_);
    return canonical({c, std::min(target - depth_[parent_[c]], weight_[c])});
  }

  std::vector<double> coordinates(const Point& p) const {
    return {static_cast<double>(p.child), p.offset};
  }

  /// Uniform edge among those meeting the closed ball of `radius` about the
  /// base, then a uniform offset within the part of that edge inside the ball.
  Point random_point(Rng& rng, double radius) const {
    if (vertex_count() == 1) return base_;
    std::vector<std::pair<std::size_t, std::pair<double, double>>> spans;
    for (std::size_t i = 1; i < order_.size(); ++i) {
      const std::size_t c = order_[i];
      auto span = in_ball_span(c, radius);
      if (span.first <= span.second) spans.push_back({c, span});
    }
    if (spans.empty()) return base_;
    const auto& [c, span] = spans[uniform_index(rng, spans.size())];
    return canonical({c, uniform(rng, span.first, span.second)});
  }

  /// Offsets of the edge above `c` within `radius` of the base point.
  std::pair<double, double> in_ball_span(std::size_t c, double radius) const {
    const double w = weight_[c];
    if (base_.child == c) {
      return {std::max(0.0, base_.offset - radius), std::min(w, base_.offset + radius)};
    }
    if (is_ancestor(c, base_.child)) {
      // base lies below this edge: distance decreases toward the child end
      const double d1 = distance(base_, vertex(c));
      return {std::max(0.0, w - (radius - d1)), radius >= d1 ? w : -1.0};
    }
    const double d0 = distance(base_, vertex(parent_[c]));
    return {0.0, std::min(w, radius - d0)};
  }

  /// Offset rounding to the delta-lattice on the edge, half away from zero.
  Point snap(const Point& p, double delta) const {
    if (delta <= 0.0 || p.child == root_) return p;
    const double off = std::min(weight_[p.child], delta * std::round(p.offset / delta));
    return canonical({p.child, off});
  }

  double snap_radius(double delta) const { return delta <= 0.0 ? 0.0 : delta / 2.0; }

  Point canonical(Point p) const {
    if (p.child == root_) return {root_, 0.0};
    if (p.offset <= 0.0) {
      const std::size_t par = parent_[p.child];
      return vertex(par);
    }
    return p;
  }

 private:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  bool is_ancestor(std::size_t a, std::size_t b) const {
    // true when vertex a lies on the root path of vertex b (a != b)
    if (a == root_) return b != root_;
    std::size_t c = b;
    while (c != root_ && level_[c] > level_[a]) c = parent_[c];
    return c == a && a != b;
  }

  std::size_t lca(std::size_t a, std::size_t b) const {
    while (level_[a] > level_[b]) a = parent_[a];
    while (level_[b] > level_[a]) b = parent_[b];
    while (a != b) {
      a = parent_[a];
      b = parent_[b];
    }
    return a;
  }

  std::size_t root_;
  std::vector<std::size_t> parent_;
  std::vector<double> weight_;
  std::vector<double> depth_;
  std::vector<std::size_t> level_;
  std::vector<std::size_t> order_;
  Point base_;
};

}  // namespace horolab
