#pragma once

// Shared vocabulary: coarse-convexity parameters, the constants derived from
// them, verification reports, seeded sampling and the sharded check runner.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace horolab {

inline constexpr double kDefaultTolerance = 1e-9;

using Rng = std::mt19937_64;

/// Uniform real in [lo, hi) built from the top 53 bits of the engine output,
/// so results are identical across standard library implementations.
inline double uniform(Rng& rng, double lo, double hi) {
  const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * unit;
}

inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  return static_cast<std::size_t>(uniform(rng, 0.0, static_cast<double>(n)));
}

// ---------------------------------------------------------------------------
// Parameters

/// The tuple (lambda, k, E, C, theta) a bicombing claims to satisfy.
struct CoarseParams {
  double lambda = 1.0;
  double k = 0.0;
  double E = 1.0;
  double C = 0.0;
  std::function<double(double)> theta = [](double t) { return t; };
  std::string theta_desc = "t";

  static CoarseParams geodesic(double E = 1.0, double C = 0.0) {
    CoarseParams p;
    p.E = E;
    p.C = C;
    return p;
  }

  bool is_geodesic() const { return lambda == 1.0 && k == 0.0; }
};

inline void validate(const CoarseParams& p) {
  if (!(p.lambda >= 1.0)) throw std::invalid_argument("lambda must be >= 1");
  if (!(p.k >= 0.0)) throw std::invalid_argument("k must be >= 0");
  if (!(p.E >= 1.0)) throw std::invalid_argument("E must be >= 1");
  if (!(p.C >= 0.0)) throw std::invalid_argument("C must be >= 0");
  if (!p.theta) throw std::invalid_argument("theta must be set");
}

/// Sampled monotonicity check of theta on a caller-supplied grid.
inline bool theta_monotone_on(const CoarseParams& p, std::span<const double> grid) {
  double prev = -std::numeric_limits<double>::infinity();
  double prev_t = -std::numeric_limits<double>::infinity();
  for (double t : grid) {
    if (t < prev_t) throw std::invalid_argument("theta grid must be sorted");
    const double v = p.theta(t);
    if (v < prev) return false;
    prev = v;
    prev_t = t;
  }
  return true;
}

struct DerivedConstants {
  double k1 = 0.0;
  double D = 0.0;
  double D1 = 0.0;
  double D2 = 0.0;
};

inline DerivedConstants derive_constants(const CoarseParams& p) {
  validate(p);
  DerivedConstants c;
  c.k1 = p.lambda + p.k;
  c.D = 2.0 * (1.0 + p.E) * c.k1 + p.C;
  c.D1 = 2.0 * c.D + 2.0;
  c.D2 = p.E * (c.D1 + 2.0 * p.k);
  return c;
}

// ---------------------------------------------------------------------------
// Reports

struct Violation {
  std::string relation;
  std::vector<double> inputs;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  // rhs - lhs; negative beyond tolerance means violated
};

/// Outcome of an inequality checker. Only the first kMaxWitnesses violations
/// are stored; `violation_count` counts all of them.
struct VerificationReport {
  static constexpr std::size_t kMaxWitnesses = 16;

  std::string name;
  std::size_t checked = 0;
  std::size_t violation_count = 0;
  std::vector<Violation> violations;
  double worst_slack = std::numeric_limits<double>::infinity();

  bool pass() const { return violation_count == 0; }

  /// Records one evaluated inequality lhs <= rhs (within tol).
  template <class Inputs>
  void record(double lhs, double rhs, double tol, const char* relation, Inputs&& inputs) {
    ++checked;
    const double slack = rhs - lhs;
    worst_slack = std::min(worst_slack, slack);
    if (slack < -tol || std::isnan(slack)) {
      ++violation_count;
      if (violations.size() < kMaxWitnesses)
        violations.push_back(Violation{relation, inputs(), lhs, rhs, slack});
    }
  }

  void merge(const VerificationReport& other) {
    checked += other.checked;
    violation_count += other.violation_count;
    worst_slack = std::min(worst_slack, other.worst_slack);
    for (const auto& v : other.violations) {
      if (violations.size() >= kMaxWitnesses) break;
      violations.push_back(v);
    }
  }
};

// ---------------------------------------------------------------------------
// Sharded execution

namespace detail {
inline std::atomic<unsigned>& worker_setting() {
  static std::atomic<unsigned> workers{1};
  return workers;
}
}  // namespace detail

inline void set_worker_count(unsigned n) { detail::worker_setting() = std::max(1u, n); }
inline unsigned worker_count() { return detail::worker_setting().load(); }

/// Splits [0, n) into contiguous shards, runs `fn(begin, end)` per shard and
/// merges the reports in shard order. The merged report does not depend on
/// the worker count.
template <class Fn>
  requires std::invocable<Fn&, std::size_t, std::size_t>
VerificationReport run_sharded(std::string name, std::size_t n, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(worker_count(), std::max<std::size_t>(n, 1));
  std::vector<VerificationReport> parts(workers);
  auto bounds = [&](std::size_t w) { return std::pair{n * w / workers, n * (w + 1) / workers}; };
  if (workers == 1) {
    parts[0] = fn(std::size_t{0}, n);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      threads.emplace_back([&, w] {
        auto [b, e] = bounds(w);
        parts[w] = fn(b, e);
      });
    }
    for (auto& t : threads) t.join();
  }
  VerificationReport out;
  out.name = std::move(name);
  for (const auto& p : parts) out.merge(p);
  return out;
}

// ---------------------------------------------------------------------------
// Space concepts

template <class S>
concept MetricSpace = requires(const S& s, const typename S::Point& p) {
  typename S::Point;
  { s.distance(p, p) } -> std::convertible_to<double>;
  { s.base_point() } -> std::convertible_to<typename S::Point>;
  { s.coordinates(p) } -> std::convertible_to<std::vector<double>>;
};

template <class S>
concept SampledSpace = MetricSpace<S> && requires(const S& s, Rng& rng, double r) {
  { s.random_point(rng, r) } -> std::convertible_to<typename S::Point>;
};

template <class B, class S>
concept BicombingFor = MetricSpace<S> &&
    requires(const B& b, const typename S::Point& x, double t) {
      { b(x, x, t) } -> std::convertible_to<typename S::Point>;
      { b.params() } -> std::convertible_to<CoarseParams>;
    };

template <class S>
std::vector<double> flatten(const S& space, std::initializer_list<const typename S::Point*> pts,
                            std::initializer_list<double> scalars = {}) {
  std::vector<double> out;
  for (const auto* p : pts) {
    auto c = space.coordinates(*p);
    out.insert(out.end(), c.begin(), c.end());
  }
  out.insert(out.end(), scalars.begin(), scalars.end());
  return out;
}

// ---------------------------------------------------------------------------
// Metric axioms

/// Checks non-negativity, symmetry, identity of indiscernibles and the
/// triangle inequality on every ordered triple drawn from `points`.
template <MetricSpace S>
VerificationReport check_metric_axioms_on(const S& space,
                                          std::span<const typename S::Point> points,
                                          double tol = kDefaultTolerance) {
  const std::size_t n = points.size();
  return run_sharded("metric_axioms", n, [&](std::size_t b, std::size_t e) {
    VerificationReport r;
    std::vector<double> row(n);
    for (std::size_t i = b; i < e; ++i) {
      const auto& x = points[i];
      for (std::size_t j = 0; j < n; ++j) row[j] = space.distance(x, points[j]);
      for (std::size_t j = 0; j < n; ++j) {
        const auto& y = points[j];
        const double dxy = row[j];
        r.record(0.0, dxy, tol, "nonnegative", [&] { return flatten(space, {&x, &y}); });
        const double dyx = space.distance(y, x);
        r.record(std::abs(dxy - dyx), 0.0, tol, "symmetric",
                 [&] { return flatten(space, {&x, &y}); });
        if (x == y)
          r.record(dxy, 0.0, tol, "identity", [&] { return flatten(space, {&x, &y}); });
        else
          r.record(tol, dxy, 0.0, "distinct", [&] { return flatten(space, {&x, &y}); });
        for (std::size_t m = 0; m < n; ++m) {
          const double dyz = space.distance(y, points[m]);
          r.record(row[m], dxy + dyz, tol, "triangle",
                   [&] { return flatten(space, {&x, &y, &points[m]}); });
        }
      }
    }
    return r;
  });
}

/// Sampled variant: `sample_count` random triples from the space's sampler.
template <SampledSpace S>
VerificationReport check_metric_axioms(const S& space, std::size_t sample_count, std::uint64_t seed,
                                       double tol = kDefaultTolerance, double radius = 10.0) {
  Rng rng(seed);
  using P = typename S::Point;
  std::vector<std::array<P, 3>> triples;
  triples.reserve(sample_count);
  for (std::size_t i = 0; i < sample_count; ++i) {
    P x = space.random_point(rng, radius);
    P y = (i % 7 == 0) ? x : space.random_point(rng, radius);
    P z = space.random_point(rng, radius);
    triples.push_back({x, y, z});
  }
  return run_sharded("metric_axioms", sample_count, [&](std::size_t b, std::size_t e) {
    VerificationReport r;
    for (std::size_t i = b; i < e; ++i) {
      const auto& [x, y, z] = triples[i];
      const double dxy = space.distance(x, y);
      const double dyx = space.distance(y, x);
      auto in = [&] { return flatten(space, {&x, &y, &z}); };
      r.record(0.0, dxy, tol, "nonnegative", in);
      r.record(std::abs(dxy - dyx), 0.0, tol, "symmetric", in);
      r.record(space.distance(x, x), 0.0, tol, "identity", in);
      if (x == y)
        r.record(dxy, 0.0, tol, "identity", in);
      else
        r.record(tol, dxy, 0.0, "distinct", in);
      r.record(space.distance(x, z), dxy + space.distance(y, z), tol, "triangle", in);
    }
    return r;
  });
}

}  // namespace horolab
