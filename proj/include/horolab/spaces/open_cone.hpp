#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "horolab/core.hpp"

namespace horolab {

/// Finite metric space with diameter at most 1, given by a distance matrix.
class FiniteMetricSpace {
 public:
  FiniteMetricSpace(std::vector<std::string> labels, std::vector<std::vector<double>> dist,
                    double tol = kDefaultTolerance)
      : labels_(std::move(labels)), dist_(std::move(dist)) {
    const std::size_t n = labels_.size();
    if (n == 0) throw std::invalid_argument("finite metric space needs at least one point");
    if (dist_.size() != n) throw std::invalid_argument("distance matrix size mismatch");
    for (const auto& row : dist_)
      if (row.size() != n) throw std::invalid_argument("distance matrix must be square");
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j)
        if (labels_[i] == labels_[j]) throw std::invalid_argument("duplicate label " + labels_[i]);
      if (dist_[i][i] != 0.0) throw std::invalid_argument("diagonal must be zero");
      for (std::size_t j = 0; j < n; ++j) {
        const double d = dist_[i][j];
        if (d != dist_[j][i]) throw std::invalid_argument("distance matrix must be symmetric");
        if (i != j && !(d > 0.0)) throw std::invalid_argument("off-diagonal distances must be > 0");
        if (d > 1.0) throw std::invalid_argument("diameter must be <= 1");
        for (std::size_t k = 0; k < n; ++k)
          if (dist_[i][k] > d + dist_[j][k] + tol)
            throw std::invalid_argument("distance matrix violates the triangle inequality");
      }
    }
  }

  /// Cyclic graph metric on n points scaled to diameter 1: d(i, j) = min(|i-j|, n-|i-j|) / floor(n/2).
  static FiniteMetricSpace cycle(std::size_t n) {
    if (n < 2) throw std::invalid_argument("cycle needs at least two points");
    std::vector<std::string> labels;
    std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
    const double scale = static_cast<double>(n / 2);
    for (std::size_t i = 0; i < n; ++i) {
      labels.push_back("y" + std::to_string(i));
      for (std::size_t j = 0; j < n; ++j) {
        const std::size_t g = i > j ? i - j : j - i;
        d[i][j] = static_cast<double>(std::min(g, n - g)) / scale;
      }
    }
    return FiniteMetricSpace(std::move(labels), std::move(d));
  }

  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  double distance(std::size_t i, std::size_t j) const { return dist_.at(i).at(j); }

  std::size_t index_of(const std::string& label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) throw std::out_of_range("unknown direction label " + label);
    return static_cast<std::size_t>(it - labels_.begin());
  }

 private:
  std::vector<std::string> labels_;
  std::vector<std::vector<double>> dist_;
};

/// t*y in the open cone; all points with t == 0 are the apex.
struct OpenConePoint {
  double t = 0.0;
  std::size_t dir = 0;

  friend bool operator==(const OpenConePoint& a, const OpenConePoint& b) {
    if (a.t == 0.0 && b.t == 0.0) return true;
    return a.t == b.t && a.dir == b.dir;
  }
};

/// Open cone over a finite metric space with metric
/// |t - s| + min(t, s) d_Y(x, y). Not geodesic in general.
class OpenCone {
 public:
  using Point = OpenConePoint;

  explicit OpenCone(FiniteMetricSpace directions) : y_(std::move(directions)) {}

  const FiniteMetricSpace& directions() const { return y_; }
  Point base_point() const { return {0.0, 0}; }

  Point point(double t, const std::string& label) const { return point(t, y_.index_of(label)); }

  Point point(double t, std::size_t dir) const {
    if (!(t >= 0.0)) throw std::invalid_argument("cone radius must be >= 0");
    if (dir >= y_.size()) throw std::out_of_range("unknown direction index");
    return {t, t == 0.0 ? 0 : dir};
  }

  double distance(const Point& a, const Point& b) const {
    if (a.dir >= y_.size() || b.dir >= y_.size())
      throw std::out_of_range("unknown direction index");
    const double m = std::min(a.t, b.t);
    const double radial = std::abs(a.t - b.t);
    if (m == 0.0) return radial;
    return radial + m * y_.distance(a.dir, b.dir);
  }

  std::vector<double> coordinates(const Point& p) const {
    return {p.t, static_cast<double>(p.t == 0.0 ? 0 : p.dir)};
  }

  Point random_point(Rng& rng, double radius) const {
    return point(uniform(rng, 0.0, radius), uniform_index(rng, y_.size()));
  }

 private:
  FiniteMetricSpace y_;
};

inline double open_cone_distance(const OpenCone& cone, const OpenConePoint& a,
                                 const OpenConePoint& b) {
  return cone.distance(a, b);
}

}  // namespace horolab
