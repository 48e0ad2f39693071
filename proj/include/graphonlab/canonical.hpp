#pragma once

// Canonical and stretched canonical graphons of graphs, the stretched cut
// distance, and the sampled-graph vs generating-graphon distance estimate.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <variant>
#include <vector>

#include "graphonlab/cut_distance.hpp"
#include "graphonlab/cut_norm.hpp"
#include "graphonlab/graph.hpp"
#include "graphonlab/graphon.hpp"
#include "graphonlab/sampling.hpp"
#include "graphonlab/step_graphon.hpp"

namespace graphonlab::metrics {

struct CanonicalGraphons {
  StepGraphon plain;      // W^G on [0,1]: blocks of mass 1/n
  StepGraphon stretched;  // W^{G,s}: blocks of mass 1/sqrt(2|E|)
};

inline CanonicalGraphons canonical_graphons(const SampledGraph& g) {
  const std::size_t n = g.num_vertices();
  CanonicalGraphons out;
  if (n == 0) {
    out.plain = StepGraphon({}, Matrix<double>(0, 0), false);
    out.stretched = StepGraphon({}, Matrix<double>(0, 0), true);
    return out;
  }
  Matrix<double> adj(n, n, 0.0);
  for (const auto& [u, v] : g.edges()) adj(u, v) = adj(v, u) = 1.0;
  out.plain = StepGraphon(std::vector<double>(n, 1.0 / static_cast<double>(n)), adj, false);
  if (g.num_edges() == 0) {
    out.stretched = StepGraphon({}, Matrix<double>(0, 0), true);
  } else {
    const double s = 1.0 / std::sqrt(2.0 * static_cast<double>(g.num_edges()));
    out.stretched = StepGraphon(std::vector<double>(n, s), std::move(adj), true);
  }
  return out;
}

using GraphOrGraphon = std::variant<SampledGraph, StepGraphon>;

/// Unit-L1 form: stretched canonical graphon of a graph (isolated vertices
/// dropped, which leaves the stretched metric unchanged) or stretch(W).
inline StepGraphon stretched_form(const GraphOrGraphon& x) {
  if (const auto* g = std::get_if<SampledGraph>(&x)) return canonical_graphons(g->without_isolated()).stretched;
  const auto& w = std::get<StepGraphon>(x);
  if (l1_norm(w) == 0.0) return StepGraphon({}, Matrix<double>(0, 0), true);
  return stretch(w);
}

inline DistanceReport stretched_cut_distance(const GraphOrGraphon& a, const GraphOrGraphon& b,
                                             const DistanceOptions& opt = {}) {
  return cut_distance(stretched_form(a), stretched_form(b), opt);
}

enum class Alignment { feature_oracle, degree_sort };

struct GraphGraphonEstimate {
  double value = 0.0;  // ||(G^s)_P - W^s||_cut under the interval coupling
  bool exact = true;   // false when the coupled cell count forced the heuristic cut norm
  double averaging_residual_lower = std::numeric_limits<double>::quiet_NaN();  // heuristic ||G^s - (G^s)_P||_cut
  std::size_t vertices = 0;
  std::size_t edges = 0;
  std::size_t cells = 0;
};

namespace detail {

// Cut norm of A - B where A and B are step kernels laid out on R+ from 0,
// coupled by interval overlap (the shorter one extended by its zero tail).
inline CutNormResult coupled_difference_cut_norm(const StepGraphon& a, const StepGraphon& b, std::uint64_t seed,
                                                 bool* exact, std::size_t* cells) {
  std::vector<double> cuts{0.0};
  for (double x : a.boundaries()) cuts.push_back(x);
  for (double x : b.boundaries()) cuts.push_back(x);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  std::vector<double> mass;
  std::vector<std::size_t> ia, ib;
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    const double len = cuts[c + 1] - cuts[c];
    if (len <= 0.0) continue;
    const double mid = 0.5 * (cuts[c] + cuts[c + 1]);
    mass.push_back(len);
    ia.push_back(a.block_of(mid));
    ib.push_back(b.block_of(mid));
  }
  const std::size_t n = mass.size();
  Matrix<double> d(n, n);
  auto val = [](const StepGraphon& w, std::size_t i, std::size_t j) {
    return (i == StepGraphon::npos || j == StepGraphon::npos) ? 0.0 : w.value(i, j);
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) d(i, j) = (val(a, ia[i], ia[j]) - val(b, ib[i], ib[j])) * mass[i] * mass[j];
  *exact = n <= exact_cut_norm_limit;
  *cells = n;
  return *exact ? cut_norm_matrix_exact(d) : cut_norm_matrix_heuristic(d, seed);
}

// Compares the stretched canonical graphon of g, averaged over vertex
// classes, with the step graphon ws (already stretched, blocks in class
// order). class_of[v] == ws.size() marks vertices aligned with the zero tail.
inline GraphGraphonEstimate estimate_from_classes(const SampledGraph& g, const std::vector<std::size_t>& class_of,
                                                  const StepGraphon& ws, std::uint64_t seed) {
  GraphGraphonEstimate est;
  est.vertices = g.num_vertices();
  est.edges = g.num_edges();
  const std::size_t k = ws.size() + 1;
  if (g.num_edges() == 0) {
    est.value = cut_norm(ws).value;
    est.averaging_residual_lower = 0.0;
    est.cells = ws.size();
    return est;
  }
  const double s = 1.0 / std::sqrt(2.0 * static_cast<double>(g.num_edges()));
  std::vector<double> count(k, 0.0);
  for (std::size_t c : class_of) count[c] += 1.0;
  Matrix<double> e(k, k, 0.0);
  for (const auto& [u, v] : g.edges()) {
    e(class_of[u], class_of[v]) += 1.0;
    e(class_of[v], class_of[u]) += 1.0;
  }
  // Averaged graph kernel on the nonempty classes, kept in class order.
  std::vector<std::size_t> nonempty;
  for (std::size_t c = 0; c < k; ++c)
    if (count[c] > 0.0) nonempty.push_back(c);
  std::vector<double> masses;
  Matrix<double> avg(nonempty.size(), nonempty.size());
  for (std::size_t i = 0; i < nonempty.size(); ++i) {
    masses.push_back(count[nonempty[i]] * s);
    for (std::size_t j = 0; j < nonempty.size(); ++j)
      avg(i, j) = e(nonempty[i], nonempty[j]) / (count[nonempty[i]] * count[nonempty[j]]);
  }
  StepGraphon a(masses, avg, true);
  // Both layouts list classes in the same order, so the interval coupling
  // pairs each class with its block up to the mass mismatch.
  bool exact = true;
  est.value = coupled_difference_cut_norm(a, ws, seed, &exact, &est.cells).value;
  est.exact = exact;
  // Heuristic lower bound on the averaging term ||G^s - (G^s)_P||_cut.
  const std::size_t n = g.num_vertices();
  if (n <= 2000) {
    Matrix<double> r(n, n);
    std::vector<std::size_t> pos(k);
    for (std::size_t i = 0; i < nonempty.size(); ++i) pos[nonempty[i]] = i;
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t v = 0; v < n; ++v)
        r(u, v) = ((u != v && g.has_edge(u, v)) ? 1.0 : 0.0) - avg(pos[class_of[u]], pos[class_of[v]]);
    for (double& x : r.data()) x *= s * s;
    est.averaging_residual_lower = cut_norm_matrix_heuristic(r, seed).value;
  }
  return est;
}

}  // namespace detail

/// Distance surrogate between the observed graph G_T of a trace and the
/// generating step graphon: vertices are grouped into classes aligned with
/// the blocks of W (by true block, or by degree rank against blocks sorted by
/// D_W), the stretched canonical graphon is averaged over the classes and
/// compared with stretch(W) under the interval coupling.
inline GraphGraphonEstimate graph_graphon_distance_estimate(const sampling::ProcessTrace& trace, const StepGraphon& w,
                                                            Alignment alignment, std::uint64_t seed = 0) {
  const SampledGraph g = sampling::snapshot_at(trace, trace.horizon, false);
  return [&] {
    if (alignment == Alignment::feature_oracle) {
      if (const auto* tw = std::get_if<StepGraphon>(&trace.graphon))
        if (tw->size() != w.size())
          throw InvalidArgument("feature_oracle: trace graphon has " + std::to_string(tw->size()) +
                                " blocks, comparison graphon has " + std::to_string(w.size()));
      std::vector<std::size_t> cls(g.num_vertices());
      for (std::size_t v = 0; v < g.num_vertices(); ++v) {
        const std::size_t b = w.block_of(g.features().at(v).back());
        cls[v] = b == StepGraphon::npos ? w.size() : b;
      }
      return detail::estimate_from_classes(g, cls, stretch(w), seed);
    }
    // Degree alignment: W blocks sorted by D_W (descending), vertices by degree.
    const auto order = detail::degree_order(w);
    const StepGraphon ws = stretch(permute_blocks(w, order));
    std::vector<std::size_t> verts(g.num_vertices());
    std::iota(verts.begin(), verts.end(), std::size_t{0});
    std::stable_sort(verts.begin(), verts.end(), [&](std::size_t a, std::size_t b) {
      if (g.degree(a) != g.degree(b)) return g.degree(a) > g.degree(b);
      return g.labels()[a] < g.labels()[b];
    });
    std::vector<std::size_t> cls(g.num_vertices(), ws.size());
    if (g.num_edges() > 0) {
      const double s = 1.0 / std::sqrt(2.0 * static_cast<double>(g.num_edges()));
      for (std::size_t r = 0; r < verts.size(); ++r) {
        const std::size_t b = ws.block_of((static_cast<double>(r) + 0.5) * s);
        cls[verts[r]] = b == StepGraphon::npos ? ws.size() : b;
      }
    }
    return detail::estimate_from_classes(g, cls, ws, seed);
  }();
}

}  // namespace graphonlab::metrics
