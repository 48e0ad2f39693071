#pragma once

// Motif counts in sampled graphs, rescaled densities, and graphon densities.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <future>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "graphonlab/error.hpp"
#include "graphonlab/graph.hpp"
#include "graphonlab/graphon.hpp"
#include "graphonlab/rng.hpp"
#include "graphonlab/sampling.hpp"
#include "graphonlab/step_graphon.hpp"

namespace graphonlab::hom {

using Count = unsigned __int128;

inline constexpr std::size_t max_motif_vertices = 8;
inline constexpr double max_assignment_work = 1e8;

/// A simple connected graph on vertices 0..k-1.
class MotifGraph {
 public:
  MotifGraph() = default;
  MotifGraph(std::size_t k, std::vector<std::pair<std::size_t, std::size_t>> edges, std::string name = {})
      : k_(k), edges_(std::move(edges)), name_(std::move(name)) {
    graphonlab::detail::require(k_ >= 2, "motif needs at least two vertices");
    graphonlab::detail::require(k_ <= 64, "motif vertex count out of range");
    adj_.assign(k_, 0);
    for (auto& [u, v] : edges_) {
      graphonlab::detail::require(u < k_ && v < k_, "motif edge endpoint out of range");
      graphonlab::detail::require(u != v, "motif must be simple (no loops)");
      if (u > v) std::swap(u, v);
      graphonlab::detail::require(!(adj_[u] >> v & 1u), "motif must be simple (repeated edge)");
      adj_[u] |= std::uint64_t{1} << v;
      adj_[v] |= std::uint64_t{1} << u;
    }
    // Connected (which also rules out isolated vertices since k >= 2).
    std::uint64_t seen = 1, frontier = 1;
    while (frontier) {
      std::uint64_t next = 0;
      for (std::size_t u = 0; u < k_; ++u)
        if (frontier >> u & 1u) next |= adj_[u];
      frontier = next & ~seen;
      seen |= next;
    }
    const std::uint64_t all = k_ == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << k_) - 1;
    graphonlab::detail::require(seen == all, "motif must be connected");
  }

  std::size_t size() const noexcept { return k_; }
  const std::vector<std::pair<std::size_t, std::size_t>>& edges() const noexcept { return edges_; }
  const std::string& name() const noexcept { return name_; }
  bool adjacent(std::size_t u, std::size_t v) const noexcept { return adj_[u] >> v & 1u; }
  std::size_t degree(std::size_t u) const noexcept { return static_cast<std::size_t>(std::popcount(adj_[u])); }
  std::size_t max_degree() const noexcept {
    std::size_t d = 0;
    for (std::size_t u = 0; u < k_; ++u) d = std::max(d, degree(u));
    return d;
  }

  /// Number of leaves if F is a star (K_2 counts as the 1-leaf star).
  std::optional<std::size_t> star_leaves() const {
    if (edges_.size() != k_ - 1) return std::nullopt;
    for (std::size_t u = 0; u < k_; ++u)
      if (degree(u) == k_ - 1) return k_ - 1;
    return std::nullopt;
  }

  /// Vertices in BFS order from 0 with each vertex's earliest-placed neighbour.
  std::vector<std::size_t> bfs_order(std::vector<std::size_t>* parent = nullptr) const {
    std::vector<std::size_t> order{0}, par(k_, 0);
    std::vector<char> seen(k_, 0);
    seen[0] = 1;
    for (std::size_t i = 0; i < order.size(); ++i)
      for (std::size_t v = 0; v < k_; ++v)
        if (adjacent(order[i], v) && !seen[v]) {
          seen[v] = 1;
          par[v] = order[i];
          order.push_back(v);
        }
    if (parent) *parent = par;
    return order;
  }

 private:
  std::size_t k_ = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges_;
  std::string name_;
  std::vector<std::uint64_t> adj_;
};

inline MotifGraph path_motif(std::size_t k) {
  std::vector<std::pair<std::size_t, std::size_t>> e;
  for (std::size_t i = 0; i + 1 < k; ++i) e.emplace_back(i, i + 1);
  return MotifGraph(k, e, "path" + std::to_string(k));
}

inline MotifGraph star_motif(std::size_t leaves) {
  std::vector<std::pair<std::size_t, std::size_t>> e;
  for (std::size_t i = 1; i <= leaves; ++i) e.emplace_back(0, i);
  return MotifGraph(leaves + 1, e, "star_" + std::to_string(leaves));
}

inline MotifGraph cycle_motif(std::size_t k) {
  std::vector<std::pair<std::size_t, std::size_t>> e;
  for (std::size_t i = 0; i < k; ++i) e.emplace_back(i, (i + 1) % k);
  return MotifGraph(k, e, "C" + std::to_string(k));
}

inline MotifGraph clique_motif(std::size_t k) {
  std::vector<std::pair<std::size_t, std::size_t>> e;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) e.emplace_back(i, j);
  return MotifGraph(k, e, "K" + std::to_string(k));
}

/// Named motif (edge, path3, star_k, triangle, C4, K4) or an inline edge list "0-1,1-2,...".
inline MotifGraph parse_motif(const std::string& s) {
  if (s == "edge" || s == "K2") return MotifGraph(2, {{0, 1}}, "edge");
  if (s == "path3" || s == "P3") return path_motif(3);
  if (s == "triangle" || s == "K3") return MotifGraph(3, {{0, 1}, {1, 2}, {0, 2}}, "triangle");
  if (s == "C4") return cycle_motif(4);
  if (s == "K4") return clique_motif(4);
  if (s.rfind("star_", 0) == 0) {
    std::size_t k = 0;
    try {
      k = std::stoul(s.substr(5));
    } catch (const std::exception&) {
      throw InvalidArgument("bad star motif '" + s + "'");
    }
    graphonlab::detail::require(k >= 1 && k <= 6, "star_k needs 1 <= k <= 6");
    return star_motif(k);
  }
  std::vector<std::pair<std::size_t, std::size_t>> e;
  std::size_t k = 0;
  std::size_t pos = 0;
  while (pos < s.size()) {
    const std::size_t comma = s.find(',', pos);
    const std::string tok = s.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    const std::size_t dash = tok.find('-');
    if (dash == std::string::npos) throw InvalidArgument("unknown motif '" + s + "'");
    std::size_t u = 0, v = 0;
    try {
      std::size_t used = 0;
      u = std::stoul(tok.substr(0, dash), &used);
      if (used != dash) throw InvalidArgument("");
      v = std::stoul(tok.substr(dash + 1), &used);
      if (used != tok.size() - dash - 1) throw InvalidArgument("");
    } catch (const std::exception&) {
      throw InvalidArgument("bad motif edge '" + tok + "' in '" + s + "'");
    }
    e.emplace_back(u, v);
    k = std::max({k, u + 1, v + 1});
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  graphonlab::detail::require(!e.empty(), "empty motif spec");
  return MotifGraph(k, e, s);
}

inline std::string to_string(Count c) {
  if (c == 0) return "0";
  std::string s;
  while (c > 0) {
    s.push_back(static_cast<char>('0' + static_cast<int>(c % 10)));
    c /= 10;
  }
  std::reverse(s.begin(), s.end());
  return s;
}

struct Embeddings {
  Count inj = 0;
  Count hom = 0;
};

namespace detail {

struct Plan {
  std::vector<std::size_t> order;                 // motif vertices in placement order
  std::vector<std::vector<std::size_t>> checks;   // placed neighbours besides the anchor (order positions)
  std::vector<std::size_t> anchor_pos;            // placed neighbour whose G-neighbours are candidates
  std::vector<std::size_t> need_degree;
};

inline Plan make_plan(const MotifGraph& f) {
  Plan p;
  std::vector<std::size_t> parent;
  p.order = f.bfs_order(&parent);
  std::vector<std::size_t> pos(f.size());
  for (std::size_t i = 0; i < p.order.size(); ++i) pos[p.order[i]] = i;
  p.checks.resize(f.size());
  p.anchor_pos.resize(f.size(), 0);
  for (std::size_t i = 0; i < p.order.size(); ++i) {
    const std::size_t u = p.order[i];
    p.need_degree.push_back(f.degree(u));
    if (i == 0) continue;
    p.anchor_pos[i] = pos[parent[u]];
    for (std::size_t j = 0; j < i; ++j)
      if (j != p.anchor_pos[i] && f.adjacent(u, p.order[j])) p.checks[i].push_back(j);
  }
  return p;
}

// Depth-first extension of a partial map. `clashes` counts repeated images so
// injectivity is known at the leaves; with hom off, clashing branches and
// vertices of too small degree are pruned.
class Counter {
 public:
  Counter(const Plan& p, const SampledGraph& g, bool want_hom) : p_(p), g_(g), want_hom_(want_hom) {
    img_.resize(p.order.size());
  }

  Embeddings from_root(std::size_t root) {
    Embeddings e;
    if (!want_hom_ && g_.degree(root) < p_.need_degree[0]) return e;
    img_[0] = root;
    extend(1, 0, e);
    return e;
  }

 private:
  void extend(std::size_t depth, std::size_t clashes, Embeddings& e) {
    if (depth == p_.order.size()) {
      ++e.hom;
      if (clashes == 0) ++e.inj;
      return;
    }
    for (VertexIndex c : g_.neighbors(img_[p_.anchor_pos[depth]])) {
      bool ok = true;
      for (std::size_t j : p_.checks[depth])
        if (!g_.has_edge(img_[j], c)) {
          ok = false;
          break;
        }
      if (!ok) continue;
      std::size_t dup = 0;
      for (std::size_t j = 0; j < depth; ++j)
        if (img_[j] == c) ++dup;
      if (!want_hom_ && (dup > 0 || g_.degree(c) < p_.need_degree[depth])) continue;
      img_[depth] = c;
      extend(depth + 1, clashes + dup, e);
    }
  }

  const Plan& p_;
  const SampledGraph& g_;
  bool want_hom_;
  std::vector<std::size_t> img_;
};

inline double power_estimate(std::size_t n, std::size_t k) {
  return std::pow(static_cast<double>(n), static_cast<double>(k));
}

}  // namespace detail

/// Exact labelled injective and unrestricted homomorphism counts. With
/// want_hom false only inj is computed (hom is left 0) using degree pruning.
inline Embeddings count_embeddings(const MotifGraph& f, const SampledGraph& g, bool want_hom = true,
                                   unsigned threads = 0) {
  if (f.size() > max_motif_vertices)
    throw CostExceeded("motif counting limited to " + std::to_string(max_motif_vertices) + " vertices, got " +
                           std::to_string(f.size()),
                       detail::power_estimate(g.num_vertices(), f.size()));
  const detail::Plan plan = detail::make_plan(f);
  const std::size_t n = g.num_vertices();
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, n / 64)));
  auto run = [&](std::size_t begin, std::size_t stride) {
    detail::Counter c(plan, g, want_hom);
    Embeddings e;
    for (std::size_t v = begin; v < n; v += stride) {
      const Embeddings r = c.from_root(v);
      e.inj += r.inj;
      e.hom += r.hom;
    }
    return e;
  };
  if (threads <= 1) return run(0, 1);
  std::vector<std::future<Embeddings>> parts;
  for (unsigned t = 0; t < threads; ++t) parts.push_back(std::async(std::launch::async, run, t, threads));
  Embeddings total;
  for (auto& p : parts) {
    const Embeddings e = p.get();
    total.inj += e.inj;
    total.hom += e.hom;
  }
  return total;
}

inline Count count_injective(const MotifGraph& f, const SampledGraph& g) { return count_embeddings(f, g, false).inj; }

/// (2|E|)^{k/2}, split so that k = 2 divides by exactly 2|E|.
inline double density_denominator(std::size_t k, std::size_t edges) {
  const double two_e = 2.0 * static_cast<double>(edges);
  double d = std::pow(two_e, static_cast<double>(k / 2));
  if (k % 2 == 1) d *= std::sqrt(two_e);
  return d;
}

struct RescaledDensity {
  double h = 0.0;
  double h_inj = 0.0;
  Count hom = 0;
  Count inj = 0;
};

inline RescaledDensity rescaled_density(const MotifGraph& f, const SampledGraph& g) {
  if (g.num_edges() == 0) throw InvalidArgument("rescaled density undefined for a graph without edges");
  const Embeddings e = count_embeddings(f, g);
  const double d = density_denominator(f.size(), g.num_edges());
  return {static_cast<double>(e.hom) / d, static_cast<double>(e.inj) / d, e.hom, e.inj};
}

// ---------------------------------------------------------------------------
// Graphon densities

enum class Finiteness { finite, infinite, unknown };

inline std::string to_string(Finiteness f) {
  switch (f) {
    case Finiteness::finite: return "finite";
    case Finiteness::infinite: return "infinite";
    default: return "unknown";
  }
}

struct StarMoment {
  Finiteness finiteness = Finiteness::finite;
  double value = 0.0;  // integral of D_W^k (on the truncated region for analytic graphons)
  bool exact = true;
};

/// Integral of D_W^k. Finiteness refers to the untruncated family.
inline StarMoment star_moment(const StepGraphon& w, int k) {
  graphonlab::detail::require(k >= 1, "star_moment needs k >= 1");
  return {Finiteness::finite, degree_profile(w).moment(k), true};
}

inline StarMoment star_moment(const AnalyticGraphon& w, int k) {
  graphonlab::detail::require(k >= 1, "star_moment needs k >= 1");
  StarMoment s;
  const DegreeProfile prof = degree_profile(w);
  s.value = prof.moment(k);
  s.exact = prof.exact();
  if (const auto* r = std::get_if<RegionIndicator>(&w.family())) {
    // D_W(x) = x^{-1/gamma} near 0 and x^{-gamma} at infinity.
    const double kk = static_cast<double>(k);
    s.finiteness = (kk >= r->gamma || kk * r->gamma <= 1.0) ? Finiteness::infinite : Finiteness::finite;
  } else {
    // Caron-Fox: D_W <= f * ||f||_1 with f bounded and integrable. Block and
    // mixed families have bounded degree functions on a finite-measure support.
    s.finiteness = Finiteness::finite;
  }
  return s;
}

inline StarMoment star_moment(const Graphon& w, int k) {
  return std::visit([&](const auto& g) { return star_moment(g, k); }, w);
}

struct HomDensity {
  double value = 0.0;     // h(F, W); +inf when finiteness is infinite
  double integral = 0.0;  // unnormalized integral of the edge product
  double std_error = 0.0;
  bool exact = true;
  Finiteness finiteness = Finiteness::finite;
  std::size_t samples = 0;
};

struct AnalyticOptions {
  std::size_t mc_samples = 200000;
  std::uint64_t seed = 0;
};

namespace detail {

inline double step_integral(const MotifGraph& f, const StepGraphon& w) {
  const std::size_t n = w.size();
  const std::size_t k = f.size();
  const double work = power_estimate(n, k);
  if (work > max_assignment_work)
    throw CostExceeded("exact block-assignment sum over " + std::to_string(n) + "^" + std::to_string(k), work);
  const Plan p = make_plan(f);
  std::vector<std::size_t> img(k);
  // Earlier-placed neighbours of each placement position, including the anchor.
  std::vector<std::vector<std::size_t>> back(k);
  for (std::size_t i = 1; i < k; ++i) {
    back[i] = p.checks[i];
    back[i].push_back(p.anchor_pos[i]);
  }
  auto rec = [&](auto&& self, std::size_t depth, double acc) -> double {
    if (depth == k) return acc;
    double s = 0.0;
    for (std::size_t b = 0; b < n; ++b) {
      double t = acc * w.mass(b);
      for (std::size_t j : back[depth]) t *= w.value(img[j], b);
      if (t == 0.0) continue;
      img[depth] = b;
      s += self(self, depth + 1, t);
    }
    return s;
  };
  return rec(rec, 0, 1.0);
}

}  // namespace detail

inline HomDensity h_analytic(const MotifGraph& f, const StepGraphon& w) {
  const double l1 = l1_norm(w);
  graphonlab::detail::require(l1 > 0.0, "h(F, W) needs ||W||_1 > 0");
  HomDensity h;
  h.integral = detail::step_integral(f, w);
  h.value = h.integral / std::pow(l1, static_cast<double>(f.size()) / 2.0);
  return h;
}

inline HomDensity h_analytic(const MotifGraph& f, const AnalyticGraphon& w, const AnalyticOptions& opt = {}) {
  const quad::Estimate l1 = l1_norm(w);
  graphonlab::detail::require(l1.value > 0.0, "h(F, W) needs ||W||_1 > 0");
  const double norm = std::pow(l1.value, static_cast<double>(f.size()) / 2.0);
  HomDensity h;
  // Divergence pre-check: exact for stars; for other motifs a finite star
  // moment of the maximal degree suffices, a divergent one decides nothing.
  const std::size_t dmax = f.max_degree();
  const StarMoment sm = star_moment(w, static_cast<int>(dmax));
  if (const auto leaves = f.star_leaves()) {
    h.finiteness = sm.finiteness;
  } else {
    h.finiteness = sm.finiteness == Finiteness::finite ? Finiteness::finite : Finiteness::unknown;
  }
  if (f.size() == 2) {
    h.integral = l1.value;
    h.std_error = l1.error;
    h.exact = l1.converged;
  } else if (std::holds_alternative<InfiniteBlock>(w.family())) {
    h.integral = detail::step_integral(f, flatten_to_line(w));
  } else {
    const double edges = static_cast<double>(f.edges().size());
    const double work = static_cast<double>(opt.mc_samples) * edges;
    if (work > 1e10) throw CostExceeded("Monte Carlo motif density", work);
    graphonlab::detail::require(opt.mc_samples >= 2, "Monte Carlo needs at least two samples");
    const Graphon g = w;
    const double vol = std::pow(w.x_max(), static_cast<double>(f.size()));
    auto eng = rng::stream(opt.seed, rng::Tag::generic, {f.size(), f.edges().size()});
    std::vector<Feature> x(f.size());
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t s = 0; s < opt.mc_samples; ++s) {
      for (auto& xi : x) xi = sampling::internal::draw_feature(g, w.x_max(), eng);
      double prod = 1.0;
      for (const auto& [u, v] : f.edges()) {
        prod *= w.evaluate(x[u], x[v]);
        if (prod == 0.0) break;
      }
      sum += prod;
      sum2 += prod * prod;
    }
    const double m = static_cast<double>(opt.mc_samples);
    const double mean = sum / m;
    const double var = std::max(0.0, (sum2 / m - mean * mean) * m / (m - 1.0));
    h.integral = vol * mean;
    h.std_error = vol * std::sqrt(var / m);
    h.exact = false;
    h.samples = opt.mc_samples;
  }
  h.value = h.finiteness == Finiteness::infinite ? std::numeric_limits<double>::infinity() : h.integral / norm;
  if (h.finiteness != Finiteness::infinite) h.std_error /= norm;
  return h;
}

inline HomDensity h_analytic(const MotifGraph& f, const Graphon& w, const AnalyticOptions& opt = {}) {
  if (const auto* s = std::get_if<StepGraphon>(&w)) return h_analytic(f, *s);
  return h_analytic(f, std::get<AnalyticGraphon>(w), opt);
}

}  // namespace graphonlab::hom
