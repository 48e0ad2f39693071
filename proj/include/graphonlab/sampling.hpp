#pragma once

// Graphon processes, the sequential arrival model, dense W-random graphs and
// the box counts of the edge birth-time measure xi.
//
// Vertices of a process are drawn one unit time window at a time: window
// [w, w+1) gets its own RNG stream, a Poisson(mass) count and uniform births
// inside the window. Births past the horizon are discarded, so raising the
// horizon only appends vertices. Edges are decided by one uniform per
// unordered label pair (rng::pair_uniform), so history never changes either.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "graphonlab/error.hpp"
#include "graphonlab/graph.hpp"
#include "graphonlab/graphon.hpp"
#include "graphonlab/matrix.hpp"
#include "graphonlab/rng.hpp"
#include "graphonlab/spec_io.hpp"

namespace graphonlab::sampling {

struct VertexRecord {
  std::uint64_t label = 0;
  double birth = 0.0;
  Feature feature;
  bool operator==(const VertexRecord&) const = default;
};

using LabelEdge = std::pair<std::uint64_t, std::uint64_t>;

/// Full history of a graphon process up to the horizon. Vertices are sorted by
/// birth and labelled 1, 2, ... in that order; edges are label pairs (lo, hi).
struct ProcessTrace {
  Graphon graphon;
  double horizon = 0.0;
  std::uint64_t seed = 0;
  bool keep_isolated = false;
  std::vector<VertexRecord> vertices;
  std::vector<LabelEdge> edges;
  std::size_t tie_events = 0;

  /// An edge appears when its younger endpoint is born.
  double edge_time(const LabelEdge& e) const {
    return std::max(vertices.at(e.first - 1).birth, vertices.at(e.second - 1).birth);
  }

  /// Vertices with no edge by the horizon (present in G~_T, absent from G_T).
  std::vector<bool> isolated() const {
    std::vector<bool> iso(vertices.size(), true);
    for (const auto& [u, v] : edges) iso[u - 1] = iso[v - 1] = false;
    return iso;
  }
};

/// Finite mass of the region vertices are drawn from: the blocks of a step
/// graphon or [0, x_max] (times the probability simplex) for analytic ones.
inline double region_mass(const Graphon& w) {
  if (const auto* s = std::get_if<StepGraphon>(&w)) return s->total_mass();
  return std::get<AnalyticGraphon>(w).x_max();
}

namespace internal {

/// Uniform point of the sampling region, scaled so the position lies in [0, extent].
inline Feature draw_feature(const Graphon& w, double extent, rng::Engine& eng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const std::size_t k = feature_dim(w) - 1;
  Feature x;
  if (k > 0) {
    // Dirichlet(1,...,1) via spacings of sorted uniforms.
    std::vector<double> u(k - 1);
    for (double& v : u) v = unif(eng);
    std::sort(u.begin(), u.end());
    double prev = 0.0;
    for (double v : u) {
      x.push_back(v - prev);
      prev = v;
    }
    x.push_back(1.0 - prev);
  }
  x.push_back(unif(eng) * extent);
  return x;
}

inline bool infinite_ambient(const Graphon& w) {
  if (const auto* s = std::get_if<StepGraphon>(&w)) return s->ambient_infinite();
  return true;
}

}  // namespace internal

/// Poisson vertex records on [0, horizon] x region (unlabelled order).
inline std::vector<VertexRecord> sample_vertices(const Graphon& w, double horizon, std::uint64_t seed,
                                                 std::size_t* tie_events = nullptr) {
  const double mass = region_mass(w);
  std::vector<VertexRecord> out;
  const auto windows = static_cast<std::uint64_t>(std::ceil(horizon));
  for (std::uint64_t win = 0; win < windows; ++win) {
    auto eng = rng::stream(seed, rng::Tag::vertex_window, {win});
    if (mass <= 0.0) break;
    std::poisson_distribution<long long> count(mass);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const long long c = count(eng);
    for (long long i = 0; i < c; ++i) {
      VertexRecord v;
      v.birth = static_cast<double>(win) + unif(eng);
      v.feature = internal::draw_feature(w, mass, eng);
      if (v.birth <= horizon) out.push_back(std::move(v));
    }
  }
  // Stable sort keeps generation order for equal births (ties are measure zero).
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.birth < b.birth; });
  std::size_t ties = 0;
  for (std::size_t i = 1; i < out.size(); ++i)
    if (out[i].birth == out[i - 1].birth) ++ties;
  if (tie_events) *tie_events = ties;
  for (std::size_t i = 0; i < out.size(); ++i) out[i].label = i + 1;
  return out;
}

/// Fills edges for labelled records using edge_probability(i, j) on record indices.
inline std::vector<LabelEdge> sample_edges(const std::vector<VertexRecord>& v, std::uint64_t seed,
                                           const std::function<double(std::size_t, std::size_t)>& edge_probability) {
  std::vector<LabelEdge> edges;
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j) {
      const double p = edge_probability(i, j);
      if (p > 0.0 && rng::pair_uniform(seed, v[i].label, v[j].label) < p) edges.emplace_back(v[i].label, v[j].label);
    }
  return edges;
}

/// Samples the graphon process (G~_t) up to time `horizon`.
inline ProcessTrace sample_graphon_process(const Graphon& w, double horizon, std::uint64_t seed, bool keep_isolated) {
  graphonlab::detail::require(std::isfinite(horizon) && horizon >= 0.0, "horizon must be a finite nonnegative time");
  if (const auto* s = std::get_if<StepGraphon>(&w))
    graphonlab::detail::require(s->unit_interval_valued(), "sampling needs a [0,1]-valued graphon");
  if (keep_isolated && internal::infinite_ambient(w))
    throw InvalidArgument(
        "keep_isolated on a space of infinite mass: G~_t would have infinitely many isolated vertices; "
        "sample without it (only G_t is observable)");
  ProcessTrace t;
  t.graphon = w;
  t.horizon = horizon;
  t.seed = seed;
  t.keep_isolated = keep_isolated;
  t.vertices = sample_vertices(w, horizon, seed, &t.tie_events);
  t.edges = sample_edges(t.vertices, seed, [&](std::size_t i, std::size_t j) {
    return evaluate(w, t.vertices[i].feature, t.vertices[j].feature);
  });
  return t;
}

/// G~_s (or G_s when isolated vertices are not kept) as an induced subgraph.
inline SampledGraph snapshot_at(const ProcessTrace& t, double s, std::optional<bool> keep_isolated = std::nullopt) {
  graphonlab::detail::require(s >= 0.0, "snapshot time must be nonnegative");
  if (s > t.horizon) throw InvalidArgument("snapshot time " + std::to_string(s) + " beyond the sampled horizon");
  const bool keep = keep_isolated.value_or(t.keep_isolated);
  std::size_t n = 0;
  while (n < t.vertices.size() && t.vertices[n].birth <= s) ++n;
  std::vector<IndexEdge> e;
  for (const auto& [u, v] : t.edges)
    if (v <= n && u <= n) e.emplace_back(static_cast<VertexIndex>(u - 1), static_cast<VertexIndex>(v - 1));
  std::vector<std::uint64_t> labels;
  std::vector<double> births;
  std::vector<Feature> features;
  for (std::size_t i = 0; i < n; ++i) {
    labels.push_back(t.vertices[i].label);
    births.push_back(t.vertices[i].birth);
    features.push_back(t.vertices[i].feature);
  }
  SampledGraph g(n, std::move(e), std::move(labels), std::move(births), std::move(features));
  return keep ? g : g.without_isolated();
}

// ---------------------------------------------------------------------------
// Sequential arrivals

struct Schedule {
  enum class Kind { linear, exponential, constant };
  Kind kind = Kind::linear;
  double c = 1.0;

  /// s_n, the right end of S_n = [0, s_n]; n starts at 1.
  double size(std::size_t n) const {
    switch (kind) {
      case Kind::linear: return c * static_cast<double>(n);
      case Kind::exponential: return c * std::ldexp(1.0, static_cast<int>(std::min<std::size_t>(n, 4096)));
      default: return c;
    }
  }

  static Schedule parse(const std::string& name, double c = 1.0) {
    if (name == "linear") return {Kind::linear, c};
    if (name == "exponential") return {Kind::exponential, c};
    if (name == "constant") return {Kind::constant, c};
    throw InvalidArgument("unknown schedule \"" + name + "\" (linear, exponential, constant)");
  }
};

/// Vertices 1..N of the sequential model; G_n is the subgraph on the first n.
struct SequentialProcess {
  std::vector<Feature> features;
  std::vector<IndexEdge> edges;          // ordered by the later endpoint's arrival
  std::vector<std::size_t> edges_upto;   // edges_upto[n] = |E(G_n)|

  std::size_t steps() const noexcept { return features.size(); }
  std::size_t num_edges(std::size_t n) const { return edges_upto.at(n); }

  SampledGraph graph(std::size_t n) const {
    graphonlab::detail::require(n <= steps(), "step beyond the sampled sequence");
    std::vector<IndexEdge> e(edges.begin(), edges.begin() + static_cast<std::ptrdiff_t>(edges_upto[n]));
    return SampledGraph(n, std::move(e), {}, {},
                        std::vector<Feature>(features.begin(), features.begin() + static_cast<std::ptrdiff_t>(n)));
  }

  std::vector<SampledGraph> graphs() const {
    std::vector<SampledGraph> out;
    for (std::size_t n = 1; n <= steps(); ++n) out.push_back(graph(n));
    return out;
  }
};

/// At step n a feature is drawn from mu restricted to S_n = [0, s_n] and
/// renormalized; the new vertex links to each earlier one with probability W.
inline SequentialProcess sample_sequential(const Graphon& w, const Schedule& schedule, std::size_t steps,
                                           std::uint64_t seed) {
  SequentialProcess p;
  p.edges_upto.push_back(0);
  const std::uint64_t edge_seed = rng::derive(seed, rng::Tag::sequential_vertex, {~std::uint64_t{0}});
  for (std::size_t n = 1; n <= steps; ++n) {
    const double s = schedule.size(n);
    if (!(s > 0.0) || !std::isfinite(s))
      throw InvalidArgument("S_" + std::to_string(n) + " must have finite positive mass (got " + std::to_string(s) + ")");
    auto eng = rng::stream(seed, rng::Tag::sequential_vertex, {n});
    p.features.push_back(internal::draw_feature(w, s, eng));
    const Feature& x = p.features.back();
    for (std::size_t m = 1; m < n; ++m) {
      const double q = evaluate(w, p.features[m - 1], x);
      if (q > 0.0 && rng::pair_uniform(edge_seed, m, n) < q)
        p.edges.emplace_back(static_cast<VertexIndex>(m - 1), static_cast<VertexIndex>(n - 1));
    }
    p.edges_upto.push_back(p.edges.size());
  }
  return p;
}

// ---------------------------------------------------------------------------
// Dense W-random graphs

inline SampledGraph sample_dense_wrandom(const StepGraphon& w, std::size_t n, std::uint64_t seed) {
  if (w.ambient_infinite())
    throw InvalidArgument("dense W-random graphs need a space of finite total mass (ambient_infinite is set)");
  graphonlab::detail::require(w.total_mass() > 0.0, "dense W-random graphs need positive total mass");
  graphonlab::detail::require(w.unit_interval_valued(), "sampling needs a [0,1]-valued graphon");
  std::vector<Feature> f(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto eng = rng::stream(seed, rng::Tag::dense_vertex, {i});
    f[i] = {std::uniform_real_distribution<double>(0.0, w.total_mass())(eng)};
  }
  const std::uint64_t edge_seed = rng::derive(seed, rng::Tag::dense_vertex, {~std::uint64_t{0}});
  std::vector<IndexEdge> e;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double q = w.evaluate(f[i][0], f[j][0]);
      if (q > 0.0 && rng::pair_uniform(edge_seed, i, j) < q)
        e.emplace_back(static_cast<VertexIndex>(i), static_cast<VertexIndex>(j));
    }
  return SampledGraph(n, std::move(e), {}, {}, std::move(f));
}

// ---------------------------------------------------------------------------
// xi box counts

/// Entry (i, j) counts ordered endpoint pairs (t_u, t_v) of edges with
/// t_u in I_i and t_v in I_j, where I_k = [h(k-1), hk); each edge counts
/// twice. Edges with an endpoint born after T are ignored.
inline Matrix<long long> xi_box_counts(const ProcessTrace& t, double h, double horizon) {
  graphonlab::detail::require(h > 0.0 && h <= horizon, "xi_box_counts needs 0 < h <= T");
  const auto bins = static_cast<std::size_t>(std::ceil(horizon / h - 1e-9));
  Matrix<long long> m(bins, bins, 0);
  auto bin = [&](double s) { return std::min(static_cast<std::size_t>(std::floor(s / h)), bins - 1); };
  for (const auto& e : t.edges) {
    const double a = t.vertices.at(e.first - 1).birth;
    const double b = t.vertices.at(e.second - 1).birth;
    if (a > horizon || b > horizon) continue;
    ++m(bin(a), bin(b));
    ++m(bin(b), bin(a));
  }
  return m;
}

// ---------------------------------------------------------------------------
// Trace files

inline Json trace_to_json(const ProcessTrace& t) {
  Json j;
  j["spec"] = graphon_to_json(t.graphon);
  j["horizon"] = t.horizon;
  j["seed"] = t.seed;
  j["keep_isolated"] = t.keep_isolated;
  Json vs = Json::array();
  for (const auto& v : t.vertices) vs.push_back({{"label", v.label}, {"birth", v.birth}, {"feature", v.feature}});
  j["vertices"] = vs;
  Json es = Json::array();
  for (const auto& [u, v] : t.edges) es.push_back({u, v});
  j["edges"] = es;
  return j;
}

inline ProcessTrace trace_from_json(const Json& j, const std::string& where = "trace") {
  try {
    ProcessTrace t;
    t.graphon = graphon_from_json(graphonlab::detail::field(j, "spec", where), where + ".spec");
    t.horizon = graphonlab::detail::number(graphonlab::detail::field(j, "horizon", where), where + ".horizon");
    t.seed = graphonlab::detail::field(j, "seed", where).get<std::uint64_t>();
    t.keep_isolated = j.value("keep_isolated", false);
    for (const auto& v : graphonlab::detail::field(j, "vertices", where)) {
      VertexRecord r;
      r.label = v.at("label").get<std::uint64_t>();
      r.birth = v.at("birth").get<double>();
      r.feature = v.at("feature").get<Feature>();
      graphonlab::detail::require(r.birth >= 0.0 && r.birth <= t.horizon,
                      where + ": vertex " + std::to_string(r.label) + " born outside [0, horizon]");
      t.vertices.push_back(std::move(r));
    }
    std::stable_sort(t.vertices.begin(), t.vertices.end(),
                     [](const auto& a, const auto& b) { return a.birth < b.birth; });
    for (std::size_t i = 0; i < t.vertices.size(); ++i)
      graphonlab::detail::require(t.vertices[i].label == i + 1, where + ": labels must be 1..n in birth order");
    for (const auto& e : graphonlab::detail::field(j, "edges", where)) {
      auto u = e.at(0).get<std::uint64_t>(), v = e.at(1).get<std::uint64_t>();
      graphonlab::detail::require(u != v, where + ": self-loop at label " + std::to_string(u));
      graphonlab::detail::require(u >= 1 && v >= 1 && u <= t.vertices.size() && v <= t.vertices.size(),
                      where + ": edge references an unknown label");
      t.edges.emplace_back(std::min(u, v), std::max(u, v));
    }
    std::sort(t.edges.begin(), t.edges.end());
    graphonlab::detail::require(std::adjacent_find(t.edges.begin(), t.edges.end()) == t.edges.end(), where + ": duplicate edge");
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(where + ": " + e.what());
  }
}

}  // namespace graphonlab::sampling
