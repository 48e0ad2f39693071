#pragma once

// Tail-regularity profiles, degree-tail counts and the upper-regularity
// statistic for finite graphs.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <vector>

#include "graphonlab/error.hpp"
#include "graphonlab/graph.hpp"
#include "graphonlab/matrix.hpp"

namespace graphonlab::regularity {

/// Geometric M grid 0.1 * 1.25^j up to 100.
inline std::vector<double> default_m_grid() {
  std::vector<double> g;
  for (int j = 0;; ++j) {
    const double m = 0.1 * std::pow(1.25, j);
    if (m > 100.0 + 1e-9) break;
    g.push_back(m);
  }
  return g;
}

struct TailProfile {
  std::size_t vertices = 0;
  std::size_t edges = 0;
  std::vector<double> m_values;
  std::vector<double> shares;  // top-prefix degree sum / |E|, in [0, 2]
};

namespace detail {

// Degrees sorted descending (ties by label) and their prefix sums.
inline std::vector<std::uint64_t> degree_prefix(const SampledGraph& g) {
  std::vector<std::size_t> v(g.num_vertices());
  std::iota(v.begin(), v.end(), std::size_t{0});
  std::sort(v.begin(), v.end(), [&](std::size_t a, std::size_t b) {
    if (g.degree(a) != g.degree(b)) return g.degree(a) > g.degree(b);
    return g.labels()[a] < g.labels()[b];
  });
  std::vector<std::uint64_t> pre(v.size() + 1, 0);
  for (std::size_t i = 0; i < v.size(); ++i) pre[i + 1] = pre[i] + g.degree(v[i]);
  return pre;
}

inline std::size_t prefix_size(double m, std::size_t edges, std::size_t n) {
  const double c = std::ceil(m * std::sqrt(static_cast<double>(edges)) - 1e-12);
  if (c <= 0.0) return 0;
  return std::min(n, static_cast<std::size_t>(c));
}

}  // namespace detail

inline TailProfile graph_tail_profile(const SampledGraph& g, const std::vector<double>& m_values) {
  graphonlab::detail::require(g.num_edges() >= 1, "tail profile needs at least one edge");
  const auto pre = detail::degree_prefix(g);
  TailProfile p;
  p.vertices = g.num_vertices();
  p.edges = g.num_edges();
  p.m_values = m_values;
  for (double m : m_values) {
    graphonlab::detail::require(m >= 0.0, "tail profile M must be nonnegative");
    const std::size_t k = detail::prefix_size(m, g.num_edges(), g.num_vertices());
    p.shares.push_back(static_cast<double>(pre[k]) / static_cast<double>(g.num_edges()));
  }
  return p;
}

/// Smallest grid M with 2 - share(M) <= eps, if any.
inline std::optional<double> required_m(const SampledGraph& g, double eps,
                                        const std::vector<double>& grid = default_m_grid()) {
  const TailProfile p = graph_tail_profile(g, grid);
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (2.0 - p.shares[i] <= eps) return grid[i];
  return std::nullopt;
}

struct SequenceRegularity {
  bool regular = false;                          // one grid M works for every graph
  double m = 0.0;                                // that M (max over graphs)
  std::vector<std::optional<double>> per_graph;  // smallest grid M per graph
  std::optional<std::size_t> witness;            // first graph with no grid M
  std::optional<TailProfile> witness_profile;
};

inline SequenceRegularity sequence_tail_regularity(const std::vector<SampledGraph>& graphs, double eps,
                                                   const std::vector<double>& grid = default_m_grid()) {
  graphonlab::detail::require(eps > 0.0 && eps < 2.0, "tail regularity needs eps in (0, 2)");
  SequenceRegularity r;
  r.regular = true;
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    const auto m = required_m(graphs[i], eps, grid);
    r.per_graph.push_back(m);
    if (m) {
      r.m = std::max(r.m, *m);
    } else if (!r.witness) {
      r.regular = false;
      r.witness = i;
      r.witness_profile = graph_tail_profile(graphs[i], grid);
    }
  }
  if (!r.regular) r.m = 0.0;
  return r;
}

struct DegreeStats {
  double avg_degree = 0.0;
  std::vector<double> lambdas;
  std::vector<std::size_t> counts;         // |{v : d(v) > lambda sqrt(2|E|)}|
  std::vector<double> normalized_counts;   // counts / sqrt(2|E|)
};

inline DegreeStats graph_degree_stats(const SampledGraph& g, const std::vector<double>& lambdas) {
  graphonlab::detail::require(g.num_edges() >= 1, "degree stats need at least one edge");
  DegreeStats s;
  const double two_e = 2.0 * static_cast<double>(g.num_edges());
  s.avg_degree = two_e / static_cast<double>(g.num_vertices());
  s.lambdas = lambdas;
  const double scale = std::sqrt(two_e);
  for (double lam : lambdas) {
    std::size_t c = 0;
    for (std::size_t v = 0; v < g.num_vertices(); ++v)
      if (static_cast<double>(g.degree(v)) > lam * scale) ++c;
    s.counts.push_back(c);
    s.normalized_counts.push_back(static_cast<double>(c) / scale);
  }
  return s;
}

/// Averages of the rescaled canonical graphon W^G / ||W^G||_1 over q
/// consecutive equal-size vertex classes (sizes differ by at most one).
inline Matrix<double> rescaled_class_averages(const SampledGraph& g, std::size_t q, std::vector<double>* class_mass) {
  const std::size_t n = g.num_vertices();
  graphonlab::detail::require(q >= 1 && q <= n, "upper regularity needs 1 <= q <= |V|");
  graphonlab::detail::require(g.num_edges() >= 1, "upper regularity needs at least one edge");
  std::vector<std::size_t> cls(n), size(q, 0);
  for (std::size_t v = 0; v < n; ++v) {
    cls[v] = v * q / n;
    ++size[cls[v]];
  }
  Matrix<double> e(q, q, 0.0);
  for (const auto& [u, v] : g.edges()) {
    e(cls[u], cls[v]) += 1.0;
    e(cls[v], cls[u]) += 1.0;
  }
  const double nd = static_cast<double>(n);
  const double two_e = 2.0 * static_cast<double>(g.num_edges());
  Matrix<double> avg(q, q);
  for (std::size_t k = 0; k < q; ++k)
    for (std::size_t l = 0; l < q; ++l)
      avg(k, l) = (e(k, l) * nd * nd) / (two_e * static_cast<double>(size[k]) * static_cast<double>(size[l]));
  if (class_mass) {
    class_mass->clear();
    for (std::size_t s : size) class_mass->push_back(static_cast<double>(s) / nd);
  }
  return avg;
}

/// L1 mass of the class-averaged rescaled canonical graphon on cells where it is >= big_k.
inline double upper_regularity_statistic(const SampledGraph& g, std::size_t q, double big_k) {
  std::vector<double> mass;
  const Matrix<double> avg = rescaled_class_averages(g, q, &mass);
  double s = 0.0;
  for (std::size_t k = 0; k < q; ++k)
    for (std::size_t l = 0; l < q; ++l)
      if (avg(k, l) >= big_k) s += avg(k, l) * mass[k] * mass[l];
  return s;
}

}  // namespace graphonlab::regularity
