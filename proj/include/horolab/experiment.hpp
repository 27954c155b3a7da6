#pragma once

// Config-driven experiment runner. A config is one JSON document; see
// configs/README.md for the schema. run_experiment never throws: invalid
// configs come back with exit status 2.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "horolab/cone_metric.hpp"
#include "horolab/gromov.hpp"
#include "horolab/horo.hpp"
#include "horolab/io.hpp"
#include "horolab/spaces/half_plane.hpp"
#include "horolab/spaces/lp_space.hpp"
#include "horolab/spaces/metric_tree.hpp"
#include "horolab/spaces/open_cone.hpp"
#include "horolab/spaces/snapped.hpp"

namespace horolab {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string experiment;
  Json space;
  Json claimed;  // overrides of the bicombing's claimed constants
  std::uint64_t seed = 1;
  std::size_t samples = 10000;
  double sample_radius = 10.0;
  double grid_step = 1.0 / 64.0;
  double product_step = 0.01;
  double sequence_step = 0.25;
  double tol = kDefaultTolerance;
  std::vector<double> radii;
  double window_spacing = 1.0;
  std::vector<double> thresholds;
  std::vector<std::string> variants{"floor"};
  Json raw;
};

inline const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> kinds{"axioms",      "gromov",
                                              "cone_table",  "horoboundary",
                                              "open_cone_boundary", "reduced_vs_ideal"};
  return kinds;
}

namespace detail {

inline std::vector<double> number_list(const Json& j, const char* key) {
  std::vector<double> out;
  if (!j.contains(key)) return out;
  if (!j.at(key).is_array()) throw ConfigError(std::string(key) + " must be a list");
  for (const auto& v : j.at(key)) out.push_back(v.get<double>());
  return out;
}

inline void require_strictly_increasing(const std::vector<double>& v, const char* what) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1])) throw ConfigError(std::string(what) + " must be strictly increasing");
}

}  // namespace detail

inline ExperimentConfig parse_config(const Json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig c;
  c.raw = j;
  c.experiment = j.at("experiment").get<std::string>();
  const auto& kinds = experiment_kinds();
  if (std::find(kinds.begin(), kinds.end(), c.experiment) == kinds.end())
    throw ConfigError("unknown experiment kind " + c.experiment);
  c.space = j.at("space");
  if (!c.space.is_object()) throw ConfigError("space must be an object");
  c.claimed = j.value("claimed", Json::object());
  for (const char* key : {"seed", "samples"})
    if (j.contains(key) && !(j.at(key).is_number_unsigned() ||
                             (j.at(key).is_number_integer() && j.at(key).get<std::int64_t>() >= 0)))
      throw ConfigError(std::string(key) + " must be a non-negative integer");
  c.seed = j.value("seed", std::uint64_t{1});
  c.samples = j.value("samples", std::size_t{10000});
  c.sample_radius = j.value("sample_radius", 10.0);
  c.grid_step = j.value("grid_step", 1.0 / 64.0);
  c.product_step = j.value("product_step", 0.01);
  c.sequence_step = j.value("sequence_step", 0.25);
  c.tol = j.value("tol", kDefaultTolerance);
  c.window_spacing = j.value("window_spacing", 1.0);
  c.radii = detail::number_list(j, "radii");
  c.thresholds = detail::number_list(j, "thresholds");
  if (j.contains("variants")) c.variants = j.at("variants").get<std::vector<std::string>>();
  for (const auto& v : c.variants)
    if (v != "floor" && v != "geodesic") throw ConfigError("unknown cone variant " + v);
  detail::require_strictly_increasing(c.radii, "radii");
  detail::require_strictly_increasing(c.thresholds, "thresholds");
  if (!(c.grid_step > 0.0) || !(c.product_step > 0.0) || !(c.sequence_step > 0.0) ||
      !(c.window_spacing > 0.0))
    throw ConfigError("steps must be > 0");
  if (!(c.sample_radius > 0.0)) throw ConfigError("sample_radius must be > 0");
  if (!(c.tol >= 0.0)) throw ConfigError("tol must be >= 0");
  for (double r : c.radii)
    if (!(r > 0.0)) throw ConfigError("radii must be > 0");
  return c;
}

/// Starts from the bicombing's claim and replaces the fields present in
/// `overrides`. `theta_shift` s sets theta(t) = t + s.
inline CoarseParams apply_overrides(CoarseParams p, const Json& overrides) {
  if (!overrides.is_object()) throw ConfigError("claimed must be an object");
  for (const auto& [key, value] : overrides.items())
    if (key != "lambda" && key != "k" && key != "E" && key != "C" && key != "theta_shift")
      throw ConfigError("unknown claimed constant " + key);
  p.lambda = overrides.value("lambda", p.lambda);
  p.k = overrides.value("k", p.k);
  p.E = overrides.value("E", p.E);
  p.C = overrides.value("C", p.C);
  if (overrides.contains("theta_shift")) {
    const double s = overrides.at("theta_shift").get<double>();
    p.theta = [s](double t) { return t + s; };
    p.theta_desc = "t+" + format_double(s);
  }
  validate(p);
  return p;
}

struct RunOptions {
  std::optional<std::uint64_t> seed;
  unsigned workers = 1;
  int verbosity = 0;
};

struct RunReport {
  Json report;
  std::map<std::string, std::string> tables;  // file name -> CSV text
  int exit_status = 0;
  double wall_seconds = 0.0;
};

// ---------------------------------------------------------------------------
// Points and sequences from JSON

template <std::size_t N>
std::array<double, N> parse_point(const LpSpace<N>&, const Json& j) {
  if (!j.is_array() || j.size() != N)
    throw ConfigError("lp point must be a list of " + std::to_string(N) + " numbers");
  std::array<double, N> p;
  for (std::size_t i = 0; i < N; ++i) p[i] = j[i].get<double>();
  return p;
}

inline TreePoint parse_point(const FiniteMetricTree& t, const Json& j) {
  if (j.contains("vertex")) return t.vertex(j.at("vertex").get<std::size_t>());
  return t.point_on_edge(j.at("edge").get<std::size_t>(), j.at("offset").get<double>());
}

inline HalfPlanePoint parse_point(const HyperbolicHalfPlane&, const Json& j) {
  if (!j.is_array() || j.size() != 2) throw ConfigError("half-plane point must be [x, y]");
  HalfPlanePoint p{j[0].get<double>(), j[1].get<double>()};
  HyperbolicHalfPlane::require_valid(p);
  return p;
}

inline OpenConePoint parse_point(const OpenCone& c, const Json& j) {
  return c.point(j.at("t").get<double>(), j.at("label").get<std::string>());
}

template <std::size_t N>
std::array<double, N> sequence_point(const LpSpace<N>& s, const Json& spec, double n) {
  std::array<double, N> start{};
  if (spec.contains("start")) start = parse_point(s, spec.at("start"));
  const auto dir = parse_point(s, spec.at("direction"));
  for (std::size_t i = 0; i < N; ++i) start[i] += n * dir[i];
  return start;
}

inline TreePoint sequence_point(const FiniteMetricTree& t, const Json& spec, double n) {
  return t.point_on_edge(spec.at("edge").get<std::size_t>(), spec.value("offset", 0.0) + n);
}

inline HalfPlanePoint sequence_point(const HyperbolicHalfPlane& h, const Json& spec, double n) {
  return h.exp_at_base(n, spec.at("angle").get<double>());
}

inline OpenConePoint sequence_point(const OpenCone& c, const Json& spec, double n) {
  return c.point(n, spec.at("label").get<std::string>());
}

/// Multipliers: "ns" (explicit list), "range" {first, last, step} or
/// "geometric" {first, factor, count}.
inline std::vector<double> sequence_multipliers(const Json& spec) {
  if (spec.contains("ns")) return spec.at("ns").get<std::vector<double>>();
  if (spec.contains("range")) {
    const auto& g = spec.at("range");
    const double first = g.at("first").get<double>();
    const double last = g.at("last").get<double>();
    const double step = g.value("step", 1.0);
    if (!(step > 0.0)) throw ConfigError("range step must be > 0");
    std::vector<double> out;
    const auto n = static_cast<std::size_t>(std::floor((last - first) / step + 1e-9));
    for (std::size_t i = 0; i <= n; ++i) out.push_back(first + static_cast<double>(i) * step);
    return out;
  }
  if (spec.contains("geometric")) {
    const auto& g = spec.at("geometric");
    const double first = g.at("first").get<double>();
    const double factor = g.at("factor").get<double>();
    const auto count = g.at("count").get<std::size_t>();
    std::vector<double> out;
    double v = first;
    for (std::size_t i = 0; i < count; ++i, v *= factor) out.push_back(v);
    return out;
  }
  throw ConfigError("sequence needs ns, geometric or points");
}

template <MetricSpace S>
EscapingSequence<typename S::Point> parse_sequence(const S& space, const Json& spec) {
  EscapingSequence<typename S::Point> seq;
  if (spec.contains("points")) {
    for (const auto& p : spec.at("points")) seq.points.push_back(parse_point(space, p));
    return seq;
  }
  for (double n : sequence_multipliers(spec)) seq.points.push_back(sequence_point(space, spec, n));
  return seq;
}

template <MetricSpace S>
struct NamedSequence {
  std::string name;
  EscapingSequence<typename S::Point> seq;
  Json spec;
};

template <MetricSpace S>
std::vector<NamedSequence<S>> parse_sequences(const S& space, const Json& raw) {
  std::vector<NamedSequence<S>> out;
  if (!raw.contains("sequences")) return out;
  for (const auto& spec : raw.at("sequences")) {
    NamedSequence<S> ns{spec.at("name").get<std::string>(), parse_sequence(space, spec), spec};
    for (const auto& o : out)
      if (o.name == ns.name) throw ConfigError("duplicate sequence name " + ns.name);
    out.push_back(std::move(ns));
  }
  return out;
}

template <std::size_t N>
WindowPtr<std::array<double, N>> default_window(const LpSpace<N>& s, double r, double spacing) {
  return lattice_window(s, r, spacing);
}

inline WindowPtr<TreePoint> default_window(const FiniteMetricTree& t, double r, double spacing) {
  return tree_window(t, r, spacing);
}

inline WindowPtr<HalfPlanePoint> default_window(const HyperbolicHalfPlane& h, double r,
                                                double spacing) {
  const auto rings = static_cast<std::size_t>(std::max(1.0, std::floor(r / spacing)));
  return polar_window(h, r, rings, 16);
}

inline WindowPtr<OpenConePoint> default_window(const OpenCone& c, double r, double spacing) {
  return cone_window(c, r, spacing);
}

/// Same points as `w`, measured from the base point of `space`.
template <MetricSpace S>
WindowPtr<typename S::Point> reframe_window(const S& space, const WindowPtr<typename S::Point>& w) {
  auto out = std::make_shared<SampleWindow<typename S::Point>>();
  out->points = w->points;
  out->rule = w->rule + " (reframed)";
  const auto o = space.base_point();
  for (const auto& p : w->points) {
    out->base_distance.push_back(space.distance(o, p));
    out->radius = std::max(out->radius, out->base_distance.back());
  }
  out->index_of(o);
  return out;
}

// ---------------------------------------------------------------------------
// Suites

struct NoBicombing {};

struct SuiteOutput {
  std::vector<VerificationReport> checks;
  Json data = Json::object();
  std::vector<std::string> notes;
  std::map<std::string, std::string> tables;
};

template <MetricSpace S, class G>
void suite_axioms(const S& space, const G& gamma, const CoarseParams& claimed,
                  const ExperimentConfig& cfg, SuiteOutput& out) {
  const auto& raw = cfg.raw;
  if (raw.contains("exhaustive_grid")) {
    if constexpr (std::is_same_v<S, OpenCone>) {
      const auto& g = raw.at("exhaustive_grid");
      const double step = g.at("radius_step").get<double>();
      const double rmax = g.at("radius_max").get<double>();
      if (!(step > 0.0)) throw ConfigError("radius_step must be > 0");
      std::vector<OpenConePoint> pts{space.base_point()};
      for (double t = step; t <= rmax + 1e-12; t += step)
        for (std::size_t y = 0; y < space.directions().size(); ++y) pts.push_back(space.point(t, y));
      out.checks.push_back(check_metric_axioms_on(space, std::span<const OpenConePoint>(pts), cfg.tol));
    } else {
      throw ConfigError("exhaustive_grid is only supported for open_cone");
    }
  }
  out.checks.push_back(check_metric_axioms(space, cfg.samples, cfg.seed, cfg.tol, cfg.sample_radius));
  if constexpr (BicombingFor<G, S>) {
    Rng rng(cfg.seed);
    const ParamGrid grid(cfg.grid_step);
    const auto pairs = random_pairs(space, cfg.samples, rng, cfg.sample_radius);
    out.checks.push_back(check_quasi_geodesic(space, gamma, std::span(pairs), grid, claimed, cfg.tol));
    const auto quads = random_quads(space, cfg.samples, rng, cfg.sample_radius);
    out.checks.push_back(
        check_convexity_i(space, gamma, std::span(quads), grid, claimed.E, claimed.C, cfg.tol));
    out.checks.push_back(check_theta_ii(space, gamma, std::span(quads), grid, claimed.theta, cfg.tol));
  }
  if (raw.contains("midpoint_probe")) {
    if constexpr (std::is_same_v<S, OpenCone>) {
      const auto& m = raw.at("midpoint_probe");
      const auto a = space.point(1.0, m.at("a").get<std::string>());
      const auto b = space.point(1.0, m.at("b").get<std::string>());
      const double step = m.value("step", 0.01);
      const double tmax = m.value("t_max", 2.0);
      const double bound = m.value("bound", 0.99);
      double best = std::numeric_limits<double>::infinity();
      const auto n = static_cast<std::size_t>(std::floor(tmax / step + 1e-9));
      for (std::size_t i = 0; i <= n; ++i)
        for (std::size_t y = 0; y < space.directions().size(); ++y) {
          const auto z = space.point(static_cast<double>(i) * step, y);
          best = std::min(best, std::max(space.distance(a, z), space.distance(b, z)));
        }
      VerificationReport r;
      r.name = "no_approximate_midpoint";
      r.record(bound, best, cfg.tol, "min_max_distance", [&] { return std::vector<double>{step, tmax}; });
      out.checks.push_back(r);
      out.data["midpoint_probe"] = {{"min_max_distance", best}, {"endpoint_distance", space.distance(a, b)}};
    } else {
      throw ConfigError("midpoint_probe is only supported for open_cone");
    }
  }
}

template <MetricSpace S, BicombingFor<S> G>
void suite_gromov(const S& space, const G& gamma, const DerivedConstants& dc,
                  const ExperimentConfig& cfg, SuiteOutput& out) {
  const auto& raw = cfg.raw;
  const double D1 = raw.value("D1", dc.D1);
  const double D2 = raw.value("D2", dc.D2);
  Rng rng(cfg.seed);
  const auto triples = random_triples(space, cfg.samples, rng, cfg.sample_radius);
  out.checks.push_back(check_d2_inequality(space, gamma, std::span(triples), D1, D2,
                                           cfg.product_step, 2.0 * cfg.product_step, cfg.tol));
  if (raw.contains("pairs")) {
    const double eps = raw.value("epsilon", 0.1);
    std::string csv = "pair,product,visual\n";
    Json rows = Json::array();
    std::size_t i = 0;
    for (const auto& pr : raw.at("pairs")) {
      const auto x = parse_point(space, pr.at(0));
      const auto y = parse_point(space, pr.at(1));
      const double g = gromov_product(space, gamma, x, y, D1, cfg.product_step);
      const double v = visual_quasimetric(space, gamma, x, y, eps, D1, cfg.product_step);
      rows.push_back({{"pair", i}, {"product", g}, {"visual", v}});
      csv += std::to_string(i) + "," + format_double(g) + "," + format_double(v) + "\n";
      ++i;
    }
    out.data["products"] = std::move(rows);
    out.tables["products.csv"] = std::move(csv);
  }
  const auto seqs = parse_sequences(space, raw);
  if (!seqs.empty()) {
    Json info = Json::object();
    std::vector<bool> esc;
    for (const auto& s : seqs) {
      const bool e = is_escaping(space, gamma, s.seq, cfg.thresholds, D1, cfg.sequence_step);
      esc.push_back(e);
      info[s.name] = {{"escaping", e}};
    }
    for (std::size_t a = 0; a < seqs.size(); ++a) {
      Json same = Json::object();
      for (std::size_t b = 0; b < seqs.size(); ++b)
        if (esc[a] && esc[b])
          same[seqs[b].name] = same_ideal_point(space, gamma, seqs[a].seq, seqs[b].seq,
                                                cfg.thresholds, D1, cfg.sequence_step);
      info[seqs[a].name]["same_ideal_point"] = std::move(same);
    }
    out.data["sequences"] = std::move(info);
  }
}

inline ConeVariant parse_variant(const std::string& v) {
  return v == "geodesic" ? ConeVariant::geodesic : ConeVariant::floor;
}

template <MetricSpace S, BicombingFor<S> G>
void suite_cone_table(const S& space, const G& gamma, const CoarseParams& claimed,
                      const ExperimentConfig& cfg, SuiteOutput& out) {
  std::string csv = "variant,pair,distance,cone_distance\n";
  for (const auto& vname : cfg.variants) {
    ConeMetric<S, G> ctx(space, gamma, parse_variant(vname));
    Rng rng(cfg.seed);
    const auto triples = random_triples(space, cfg.samples, rng, cfg.sample_radius);
    auto qt = check_quasi_triangle(ctx, std::span(triples), claimed, cfg.tol);
    qt.name += "_" + vname;
    out.checks.push_back(std::move(qt));
    const auto pairs = random_pairs(space, cfg.samples, rng, cfg.sample_radius);
    auto lb = check_lipschitz_bound(ctx, std::span(pairs), claimed, cfg.tol);
    lb.name += "_" + vname;
    out.checks.push_back(std::move(lb));
    if (cfg.raw.contains("pairs")) {
      std::size_t i = 0;
      for (const auto& pr : cfg.raw.at("pairs")) {
        const auto x = parse_point(space, pr.at(0));
        const auto y = parse_point(space, pr.at(1));
        csv += vname + "," + std::to_string(i++) + "," + format_double(space.distance(x, y)) + "," +
               format_double(ctx(x, y)) + "\n";
      }
    }
  }
  out.tables["cone_table.csv"] = std::move(csv);
}

template <MetricSpace S>
WindowFunction<typename S::Point> phi_limit(const S& space, const EscapingSequence<typename S::Point>& seq,
                                            const WindowPtr<typename S::Point>& w, double tol,
                                            ConvergenceReport* rep) {
  std::vector<WindowFunction<typename S::Point>> fs;
  for (const auto& x : seq.points) fs.push_back(phi_window(space, x, w));
  auto [f, r] = limit_on_window(fs, tol);
  if (rep) *rep = r;
  return f;
}

template <MetricSpace S, BicombingFor<S> G>
WindowFunction<typename S::Point> psi_limit(const ConeMetric<S, G>& ctx,
                                            const EscapingSequence<typename S::Point>& seq,
                                            const WindowPtr<typename S::Point>& w, double tol,
                                            ConvergenceReport* rep) {
  std::vector<WindowFunction<typename S::Point>> fs;
  for (const auto& x : seq.points) fs.push_back(psi_window(ctx, x, w));
  auto [f, r] = limit_on_window(fs, tol);
  if (rep) *rep = r;
  return f;
}

inline Json to_json(const ConvergenceReport& r) {
  return {{"cauchy_gap", r.cauchy_gap}, {"pairs", r.pairs}, {"tol", r.tol}, {"converged", r.converged}};
}

template <MetricSpace S, class G>
void suite_horoboundary(const S& space, const G& gamma, const CoarseParams& claimed,
                        const DerivedConstants& dc, const ExperimentConfig& cfg, SuiteOutput& out) {
  const auto& raw = cfg.raw;
  const double R = raw.value("window_radius", cfg.radii.empty() ? 32.0 : cfg.radii.back());
  const auto w = default_window(space, R, cfg.window_spacing);
  const double limit_tol = raw.value("limit_tol", 1e-6);
  const auto seqs = parse_sequences(space, raw);
  out.data["window"] = {{"radius", R}, {"size", w->size()}, {"rule", w->rule}};
  Json per = Json::object();

  if constexpr (BicombingFor<G, S>) {
    ConeMetric<S, G> ctx(space, gamma, ConeVariant::floor);
    VerificationReport close;
    close.name = "busemann_closeness";
    const double bound = claimed.E * dc.D1 + claimed.C;
    for (const auto& s : seqs) {
      ConvergenceReport phi_rep, psi_rep;
      const auto phi = phi_limit(space, s.seq, w, limit_tol, &phi_rep);
      const auto psi = psi_limit(ctx, s.seq, w, limit_tol, &psi_rep);
      out.tables["phi_limit_" + s.name + ".csv"] = window_function_csv(space, phi);
      out.tables["psi_limit_" + s.name + ".csv"] = window_function_csv(space, psi);
      Json entry{{"phi_convergence", to_json(phi_rep)}, {"psi_convergence", to_json(psi_rep)}};
      std::string wname = s.spec.value("busemann_witness", s.name);
      const NamedSequence<S>* ws = nullptr;
      for (const auto& o : seqs)
        if (o.name == wname) ws = &o;
      if (!ws) throw ConfigError("unknown busemann_witness " + wname);
      const auto dir = make_witness(space, ws->seq);
      const auto b = busemann_window(ctx, dir, w);
      out.tables["busemann_" + s.name + ".csv"] = window_function_csv(space, b);
      const double sup = sup_distance_on_window(psi, b);
      close.record(sup, bound, cfg.tol, "busemann_closeness", [&] { return std::vector<double>{R}; });
      entry["busemann_sup"] = sup;
      entry["busemann_witness"] = wname;
      if (raw.contains("exclusion")) {
        const auto& ex = raw.at("exclusion");
        const auto y = parse_point(space, ex.at("y"));
        const auto Rs = ex.at("radii").get<std::vector<double>>();
        const auto cert = exclusion_certificate(ctx, psi, y, claimed, std::span<const double>(Rs), cfg.tol);
        Json rows = Json::array();
        for (const auto& r : cert.rows)
          rows.push_back({{"R", r.R}, {"window_radius", r.window_radius}, {"sup", r.sup},
                          {"bound", r.bound}, {"applicable", r.applicable}});
        entry["exclusion"] = {{"certified", cert.certified}, {"growth_slope", cert.growth_slope},
                              {"rows", rows}, {"note", cert.note}};
      }
      per[s.name] = std::move(entry);
    }
    if (!seqs.empty()) out.checks.push_back(close);
  } else {
    for (const auto& s : seqs) {
      ConvergenceReport phi_rep;
      const auto phi = phi_limit(space, s.seq, w, limit_tol, &phi_rep);
      out.tables["phi_limit_" + s.name + ".csv"] = window_function_csv(space, phi);
      per[s.name] = {{"phi_convergence", to_json(phi_rep)}};
    }
  }

  if (raw.contains("rebase_point")) {
    if constexpr (!requires { space.rebased(space.base_point()); }) {
      throw ConfigError("rebase_point is not supported for this space");
    } else {
      const auto o2 = parse_point(space, raw.at("rebase_point"));
      const S moved = space.rebased(o2);
      const auto w2 = reframe_window(moved, w);
      VerificationReport rb;
      rb.name = "rebase_consistency";
      const double rtol = raw.value("rebase_tol", cfg.tol);
      for (const auto& s : seqs) {
        const auto from_o = rebase(phi_limit(space, s.seq, w, limit_tol, nullptr), o2);
        const auto from_o2 = phi_limit(moved, s.seq, w2, limit_tol, nullptr);
        for (std::size_t i = 0; i < w->size(); ++i)
          rb.record(std::abs(from_o.values[i] - from_o2.values[i]), 0.0, rtol, "rebase",
                    [&] { return space.coordinates(w->points[i]); });
      }
      out.checks.push_back(rb);
    }
  }

  if (raw.contains("separation")) {
    const auto& sp = raw.at("separation");
    const double Rs = sp.value("radius", 16.0);
    const auto count = sp.value("pairs", std::size_t{1000});
    const auto sw = default_window(space, Rs, sp.value("spacing", cfg.window_spacing));
    if (sw->size() < 2) throw ConfigError("separation window too small");
    Rng rng(cfg.seed);
    std::vector<std::pair<std::size_t, std::size_t>> idx;
    while (idx.size() < count) {
      const auto a = uniform_index(rng, sw->size());
      const auto b = uniform_index(rng, sw->size());
      if (a != b) idx.push_back({a, b});
    }
    std::vector<WindowFunction<typename S::Point>> phis(sw->size());
    std::vector<bool> have(sw->size(), false);
    for (auto [a, b] : idx)
      for (auto i : {a, b})
        if (!have[i]) {
          phis[i] = phi_window(space, sw->points[i], sw);
          have[i] = true;
        }
    VerificationReport lo, hi;
    lo.name = "separation_lower";
    hi.name = "separation_upper";
    for (auto [a, b] : idx) {
      const auto& x = sw->points[a];
      const auto& y = sw->points[b];
      const double d = space.distance(x, y);
      const double sup = sup_distance_on_window(phis[a], phis[b]);
      auto in = [&] { return flatten(space, {&x, &y}); };
      lo.record(d, sup, cfg.tol, "sup_ge_distance", in);
      hi.record(sup, 2.0 * d, cfg.tol, "sup_le_twice_distance", in);
    }
    out.checks.push_back(lo);
    out.checks.push_back(hi);
    out.data["separation"] = {{"radius", Rs}, {"window_size", sw->size()}, {"pairs", count}};
  }
  out.data["sequences"] = std::move(per);
}

template <MetricSpace S, BicombingFor<S> G>
void suite_reduced_vs_ideal(const S& space, const G& gamma, const CoarseParams& claimed,
                            const DerivedConstants& dc, const ExperimentConfig& cfg,
                            SuiteOutput& out) {
  if (cfg.radii.size() < 3) throw ConfigError("reduced_vs_ideal needs at least 3 radii");
  if (cfg.thresholds.empty()) throw ConfigError("reduced_vs_ideal needs thresholds");
  const auto& raw = cfg.raw;
  const double R = cfg.radii.back();
  const auto w = default_window(space, R, cfg.window_spacing);
  const double gate = raw.value("slope_gate", default_slope_gate(claimed, R));
  const double bound = claimed.E * dc.D1 + claimed.C;
  const auto seqs = parse_sequences(space, raw);
  if (seqs.size() < 2) throw ConfigError("reduced_vs_ideal needs at least 2 sequences");
  ConeMetric<S, G> ctx(space, gamma, ConeVariant::floor);

  VerificationReport esc;
  esc.name = "escaping";
  std::vector<bool> escaping;
  std::vector<WindowFunction<typename S::Point>> limits;
  for (const auto& s : seqs) {
    const bool e = is_escaping(space, gamma, s.seq, cfg.thresholds, dc.D1, cfg.sequence_step);
    escaping.push_back(e);
    esc.record(e ? 0.0 : 1.0, 0.0, 0.0, "is_escaping", [] { return std::vector<double>{}; });
    limits.push_back(psi_limit(ctx, s.seq, w, 1e-6, nullptr));
  }
  out.checks.push_back(esc);

  VerificationReport agree, plateau;
  agree.name = "classification_agreement";
  plateau.name = "plateau_bound";
  std::string csv = "a,b,verdict,slope,plateau,same_ideal_point\n";
  Json rows = Json::array();
  for (std::size_t a = 0; a < seqs.size(); ++a)
    for (std::size_t b = a + 1; b < seqs.size(); ++b) {
      if (!escaping[a] || !escaping[b]) continue;
      const auto v = classify_bounded_difference(limits[a], limits[b],
                                                 std::span<const double>(cfg.radii), gate);
      const bool same = same_ideal_point(space, gamma, seqs[a].seq, seqs[b].seq, cfg.thresholds,
                                         dc.D1, cfg.sequence_step);
      const bool ok = (v.verdict == Verdict::bounded) == same && v.verdict != Verdict::inconclusive;
      auto in = [&] { return std::vector<double>{double(a), double(b), v.slope, v.plateau}; };
      agree.record(ok ? 0.0 : 1.0, 0.0, 0.0, "bounded_iff_same_ideal_point", in);
      if (v.verdict == Verdict::bounded) plateau.record(v.plateau, bound, cfg.tol, "plateau_le_ED1_plus_C", in);
      rows.push_back({{"a", seqs[a].name}, {"b", seqs[b].name}, {"verdict", to_string(v.verdict)},
                      {"slope", v.slope}, {"plateau", v.plateau}, {"sup_values", v.sup_values},
                      {"same_ideal_point", same}});
      csv += seqs[a].name + "," + seqs[b].name + "," + to_string(v.verdict) + "," +
             format_double(v.slope) + "," + format_double(v.plateau) + "," +
             (same ? "true" : "false") + "\n";
    }
  out.checks.push_back(agree);
  out.checks.push_back(plateau);
  out.data["slope_gate"] = gate;
  out.data["window"] = {{"radius", R}, {"size", w->size()}, {"rule", w->rule}};
  out.data["pairs"] = std::move(rows);
  out.tables["classification.csv"] = std::move(csv);
}

inline void suite_open_cone_boundary(const OpenCone& cone, const ExperimentConfig& cfg,
                                     SuiteOutput& out) {
  const auto& raw = cfg.raw;
  const double step = raw.value("radial_step", 0.25);
  const auto exact_radii = raw.contains("exact_radii")
                               ? raw.at("exact_radii").get<std::vector<double>>()
                               : std::vector<double>{5.0, 10.0};
  const auto& Y = cone.directions();
  VerificationReport exact, pairwise;
  exact.name = "limit_exactness";
  pairwise.name = "limit_separation";
  Json data = Json::object();
  for (double R : exact_radii) {
    const auto w = cone_window(cone, R, step);
    std::vector<WindowFunction<OpenConePoint>> F;
    for (std::size_t y = 0; y < Y.size(); ++y) {
      F.push_back(open_cone_limit_function(cone, Y.labels()[y], w));
      // phi along n*y for integers n just beyond R
      const double n0 = std::floor(R) + 1.0;
      for (double n = n0; n < n0 + 4.0; n += 1.0) {
        const auto phi = phi_window(cone, cone.point(n, y), w);
        exact.record(sup_distance_on_window(phi, F.back()), 0.0, 0.0, "phi_equals_F",
                     [&] { return std::vector<double>{R, double(y), n}; });
      }
    }
    for (std::size_t a = 0; a < Y.size(); ++a)
      for (std::size_t b = a + 1; b < Y.size(); ++b) {
        const double sup = sup_distance_on_window(F[a], F[b]);
        pairwise.record(std::abs(sup - R * Y.distance(a, b)), 0.0, 1e-12, "sup_equals_R_dY",
                        [&] { return std::vector<double>{R, double(a), double(b)}; });
      }
    data["window_size_R" + format_double(R)] = w->size();
  }
  out.checks.push_back(exact);
  out.checks.push_back(pairwise);

  if (cfg.radii.size() >= 3) {
    const double Rmax = cfg.radii.back();
    const auto w = cone_window(cone, Rmax, step);
    const double gate = raw.value("slope_gate", default_slope_gate(CoarseParams{}, Rmax));
    VerificationReport cls;
    cls.name = "limits_distinct";
    Json rows = Json::array();
    std::string csv = "a,b,verdict,slope,plateau,expected_plateau\n";
    std::vector<WindowFunction<OpenConePoint>> F;
    for (const auto& l : Y.labels()) {
      F.push_back(open_cone_limit_function(cone, l, w));
      out.tables["F_" + l + ".csv"] = window_function_csv(cone, F.back());
    }
    for (std::size_t a = 0; a < Y.size(); ++a)
      for (std::size_t b = a + 1; b < Y.size(); ++b) {
        const auto v = classify_bounded_difference(F[a], F[b], std::span<const double>(cfg.radii), gate);
        const double expected = Rmax * Y.distance(a, b);
        auto in = [&] { return std::vector<double>{double(a), double(b), v.slope, v.plateau}; };
        cls.record(v.verdict == Verdict::growing ? 0.0 : 1.0, 0.0, 0.0, "growing", in);
        cls.record(std::abs(v.plateau - expected), 0.0, 1e-12, "plateau_equals_R_dY", in);
        rows.push_back({{"a", Y.labels()[a]}, {"b", Y.labels()[b]}, {"verdict", to_string(v.verdict)},
                        {"slope", v.slope}, {"plateau", v.plateau}, {"expected_plateau", expected}});
        csv += Y.labels()[a] + "," + Y.labels()[b] + "," + to_string(v.verdict) + "," +
               format_double(v.slope) + "," + format_double(v.plateau) + "," +
               format_double(expected) + "\n";
      }
    out.checks.push_back(cls);
    data["slope_gate"] = gate;
    data["classification"] = std::move(rows);
    out.tables["open_cone_classification.csv"] = std::move(csv);
  }
  out.data = std::move(data);
}

// ---------------------------------------------------------------------------
// Space construction and dispatch

inline FiniteMetricSpace parse_finite_space(const Json& spec) {
  if (spec.contains("cycle")) return FiniteMetricSpace::cycle(spec.at("cycle").get<std::size_t>());
  return FiniteMetricSpace(spec.at("labels").get<std::vector<std::string>>(),
                           spec.at("distances").get<std::vector<std::vector<double>>>());
}

inline FiniteMetricTree parse_tree(const Json& spec) {
  std::vector<TreeEdge> edges;
  for (const auto& e : spec.at("edges")) {
    if (!e.is_array() || e.size() != 3) throw ConfigError("tree edge must be [u, v, weight]");
    edges.push_back({e[0].get<std::size_t>(), e[1].get<std::size_t>(), e[2].get<double>()});
  }
  FiniteMetricTree t(spec.at("vertices").get<std::size_t>(), edges, spec.value("root", std::size_t{0}));
  if (spec.contains("base")) t = t.rebased(parse_point(t, spec.at("base")));
  return t;
}

template <std::size_t N>
LpSpace<N> parse_lp(const Json& spec) {
  const Json& pj = spec.at("p");
  double p = 0.0;
  if (pj.is_string()) {
    if (pj.get<std::string>() != "inf") throw ConfigError("p must be a number >= 1 or \"inf\"");
    p = std::numeric_limits<double>::infinity();
  } else {
    p = pj.get<double>();
  }
  std::array<double, N> base{};
  LpSpace<N> s(p, base);
  if (spec.contains("base")) base = parse_point(s, spec.at("base"));
  return LpSpace<N>(p, base);
}

/// Calls fn(space, gamma, description) with the space described by `spec`.
/// gamma is NoBicombing for spaces without one.
template <class Fn>
void with_space(const Json& spec, Fn&& fn) {
  const std::string kind = spec.at("kind").get<std::string>();
  if (kind == "lp") {
    const auto dim = spec.at("dimension").get<std::size_t>();
    auto go = [&]<std::size_t N>() {
      const auto s = parse_lp<N>(spec);
      fn(s, GeodesicBicombing<LpSpace<N>>(s), Json{{"kind", "lp"}, {"dimension", N}});
    };
    switch (dim) {
      case 1: go.template operator()<1>(); return;
      case 2: go.template operator()<2>(); return;
      case 3: go.template operator()<3>(); return;
      case 4: go.template operator()<4>(); return;
      default: throw ConfigError("lp dimension must be 1..4");
    }
  }
  if (kind == "tree") {
    const auto t = parse_tree(spec);
    fn(t, GeodesicBicombing<FiniteMetricTree>(t), Json{{"kind", "tree"}});
    return;
  }
  if (kind == "halfplane") {
    HyperbolicHalfPlane h;
    if (spec.contains("base")) h = HyperbolicHalfPlane(parse_point(h, spec.at("base")));
    fn(h, GeodesicBicombing<HyperbolicHalfPlane>(h), Json{{"kind", "halfplane"}});
    return;
  }
  if (kind == "open_cone") {
    const OpenCone c(parse_finite_space(spec));
    fn(c, NoBicombing{}, Json{{"kind", "open_cone"}, {"directions", c.directions().size()}});
    return;
  }
  if (kind == "snapped") {
    const double delta = spec.at("delta").get<double>();
    const Json& inner = spec.at("inner");
    const std::string ik = inner.at("kind").get<std::string>();
    auto wrap = [&](const auto& s) {
      using S = std::decay_t<decltype(s)>;
      const auto g = snap_bicombing(s, GeodesicBicombing<S>(s), delta);
      fn(s, g, Json{{"kind", "snapped"}, {"inner", ik}, {"delta", delta}, {"delta_max", g.delta_max()}});
    };
    if (ik == "lp") {
      const auto dim = inner.at("dimension").get<std::size_t>();
      if (dim == 2) return wrap(parse_lp<2>(inner));
      if (dim == 3) return wrap(parse_lp<3>(inner));
      throw ConfigError("snapped lp supports dimension 2 or 3");
    }
    if (ik == "tree") return wrap(parse_tree(inner));
    throw ConfigError("snapped inner space must be lp or tree");
  }
  throw ConfigError("unknown space kind " + kind);
}

inline Json suite_json(const SuiteOutput& out) {
  Json checks = Json::array();
  for (const auto& c : out.checks) checks.push_back(to_json(c));
  return checks;
}

inline RunReport run_experiment(const Json& config, const RunOptions& opts = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  RunReport rr;
  Json cfg_echo = config;
  try {
    if (opts.seed && cfg_echo.is_object()) cfg_echo["seed"] = *opts.seed;
    const ExperimentConfig cfg = parse_config(cfg_echo);
    set_worker_count(std::max(1u, opts.workers));
    SuiteOutput out;
    Json space_desc, claimed_json, constants_json;
    with_space(cfg.space, [&](const auto& space, const auto& gamma, Json desc) {
      using S = std::decay_t<decltype(space)>;
      using G = std::decay_t<decltype(gamma)>;
      space_desc = std::move(desc);
      CoarseParams claimed;
      if constexpr (BicombingFor<G, S>) claimed = apply_overrides(gamma.params(), cfg.claimed);
      else claimed = apply_overrides(CoarseParams{}, cfg.claimed);
      const auto dc = derive_constants(claimed);
      claimed_json = to_json(claimed);
      constants_json = to_json(dc);
      const std::string& ex = cfg.experiment;
      if (ex == "axioms") {
        suite_axioms(space, gamma, claimed, cfg, out);
      } else if (ex == "horoboundary") {
        suite_horoboundary(space, gamma, claimed, dc, cfg, out);
      } else if (ex == "open_cone_boundary") {
        if constexpr (std::is_same_v<S, OpenCone>) suite_open_cone_boundary(space, cfg, out);
        else throw ConfigError("open_cone_boundary needs an open_cone space");
      } else if constexpr (BicombingFor<G, S>) {
        if (ex == "gromov") suite_gromov(space, gamma, dc, cfg, out);
        else if (ex == "cone_table") suite_cone_table(space, gamma, claimed, cfg, out);
        else if (ex == "reduced_vs_ideal") suite_reduced_vs_ideal(space, gamma, claimed, dc, cfg, out);
      } else {
        throw ConfigError(ex + " needs a space with a bicombing");
      }
    });
    bool pass = true;
    for (const auto& c : out.checks) pass = pass && c.pass();
    rr.exit_status = pass ? 0 : 1;
    Json notes = Json::array();
    for (const auto& n : out.notes) notes.push_back(n);
    rr.report = Json{{"config", cfg_echo},
                     {"experiment", cfg.experiment},
                     {"space", space_desc},
                     {"claimed", claimed_json},
                     {"constants", constants_json},
                     {"checks", suite_json(out)},
                     {"data", out.data},
                     {"notes", notes},
                     {"pass", pass},
                     {"exit_status", rr.exit_status}};
    rr.tables = std::move(out.tables);
  } catch (const std::exception& e) {
    rr.exit_status = 2;
    rr.report = Json{{"config", cfg_echo}, {"error", e.what()}, {"pass", false}, {"exit_status", 2}};
    rr.tables.clear();
  }
  rr.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rr;
}

inline RunReport run_experiment_file(const std::string& path, const RunOptions& opts = {}) {
  std::ifstream f(path);
  if (!f) {
    RunReport rr;
    rr.exit_status = 2;
    rr.report = Json{{"error", "cannot read config " + path}, {"pass", false}, {"exit_status", 2}};
    return rr;
  }
  Json j;
  try {
    j = Json::parse(f);
  } catch (const std::exception& e) {
    RunReport rr;
    rr.exit_status = 2;
    rr.report = Json{{"error", std::string("config parse error: ") + e.what()}, {"pass", false},
                     {"exit_status", 2}};
    return rr;
  }
  return run_experiment(j, opts);
}

/// Writes report.json, every CSV table, and timing.json (wall-clock kept
/// apart so report.json stays byte-identical across runs).
inline void emit_report(const RunReport& r, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path base(dir);
  write_text_file((base / "report.json").string(), to_json_text(r.report));
  for (const auto& [name, text] : r.tables) write_text_file((base / name).string(), text);
  write_text_file((base / "timing.json").string(),
                  to_json_text(Json{{"wall_seconds", r.wall_seconds}}));
}

}  // namespace horolab
