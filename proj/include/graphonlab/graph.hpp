#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "graphonlab/analytic_graphon.hpp"
#include "graphonlab/error.hpp"

namespace graphonlab {

using VertexIndex = std::uint32_t;
using IndexEdge = std::pair<VertexIndex, VertexIndex>;

/// Simple undirected graph on vertices 0..n-1 with optional per-vertex labels,
/// birth times and features. Adjacency is stored as sorted CSR lists.
class SampledGraph {
 public:
  SampledGraph() = default;

  SampledGraph(std::size_t n, std::vector<IndexEdge> edges, std::vector<std::uint64_t> labels = {},
               std::vector<double> births = {}, std::vector<Feature> features = {})
      : n_(n), labels_(std::move(labels)), births_(std::move(births)), features_(std::move(features)) {
    if (labels_.empty()) {
      labels_.resize(n);
      std::iota(labels_.begin(), labels_.end(), std::uint64_t{1});
    }
    detail::require(labels_.size() == n, "label count differs from vertex count");
    detail::require(births_.empty() || births_.size() == n, "birth count differs from vertex count");
    detail::require(features_.empty() || features_.size() == n, "feature count differs from vertex count");
    for (auto& e : edges) {
      detail::require(e.first < n && e.second < n, "edge endpoint out of range");
      detail::require(e.first != e.second, "self-loop at vertex " + std::to_string(e.first));
      if (e.first > e.second) std::swap(e.first, e.second);
    }
    std::sort(edges.begin(), edges.end());
    detail::require(std::adjacent_find(edges.begin(), edges.end()) == edges.end(), "duplicate edge");
    edges_ = std::move(edges);
    build_adjacency();
  }

  std::size_t num_vertices() const noexcept { return n_; }
  std::size_t num_edges() const noexcept { return edges_.size(); }
  const std::vector<IndexEdge>& edges() const noexcept { return edges_; }
  const std::vector<std::uint64_t>& labels() const noexcept { return labels_; }
  const std::vector<double>& births() const noexcept { return births_; }
  const std::vector<Feature>& features() const noexcept { return features_; }

  std::size_t degree(std::size_t v) const noexcept { return offsets_[v + 1] - offsets_[v]; }

  std::span<const VertexIndex> neighbors(std::size_t v) const noexcept {
    return {adjacency_.data() + offsets_[v], degree(v)};
  }

  bool has_edge(std::size_t u, std::size_t v) const noexcept {
    if (degree(u) > degree(v)) std::swap(u, v);
    auto nb = neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), static_cast<VertexIndex>(v));
  }

  std::vector<std::size_t> degrees() const {
    std::vector<std::size_t> d(n_);
    for (std::size_t v = 0; v < n_; ++v) d[v] = degree(v);
    return d;
  }

  /// rho(G) = 2|E| / |V|^2; zero for the graph without vertices.
  double edge_density() const noexcept {
    if (n_ == 0) return 0.0;
    return 2.0 * static_cast<double>(edges_.size()) / (static_cast<double>(n_) * static_cast<double>(n_));
  }

  /// Induced subgraph on the given vertices (kept in the given order).
  SampledGraph induced(const std::vector<std::size_t>& keep) const {
    std::vector<std::int64_t> remap(n_, -1);
    for (std::size_t i = 0; i < keep.size(); ++i) remap[keep[i]] = static_cast<std::int64_t>(i);
    std::vector<IndexEdge> e;
    for (const auto& [u, v] : edges_)
      if (remap[u] >= 0 && remap[v] >= 0)
        e.emplace_back(static_cast<VertexIndex>(remap[u]), static_cast<VertexIndex>(remap[v]));
    std::vector<std::uint64_t> l;
    std::vector<double> b;
    std::vector<Feature> f;
    for (std::size_t v : keep) {
      l.push_back(labels_[v]);
      if (!births_.empty()) b.push_back(births_[v]);
      if (!features_.empty()) f.push_back(features_[v]);
    }
    return SampledGraph(keep.size(), std::move(e), std::move(l), std::move(b), std::move(f));
  }

  SampledGraph without_isolated() const {
    std::vector<std::size_t> keep;
    for (std::size_t v = 0; v < n_; ++v)
      if (degree(v) > 0) keep.push_back(v);
    return induced(keep);
  }

  SampledGraph with_isolated(std::size_t extra) const {
    std::vector<std::uint64_t> l = labels_;
    std::uint64_t next = l.empty() ? 1 : *std::max_element(l.begin(), l.end()) + 1;
    for (std::size_t i = 0; i < extra; ++i) l.push_back(next++);
    return SampledGraph(n_ + extra, edges_, std::move(l));
  }

 private:
  void build_adjacency() {
    offsets_.assign(n_ + 1, 0);
    for (const auto& [u, v] : edges_) {
      ++offsets_[u + 1];
      ++offsets_[v + 1];
    }
    for (std::size_t i = 0; i < n_; ++i) offsets_[i + 1] += offsets_[i];
    adjacency_.resize(offsets_[n_]);
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (const auto& [u, v] : edges_) {
      adjacency_[fill[u]++] = v;
      adjacency_[fill[v]++] = u;
    }
    for (std::size_t v = 0; v < n_; ++v)
      std::sort(adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[v]),
                adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[v + 1]));
  }

  std::size_t n_ = 0;
  std::vector<IndexEdge> edges_;
  std::vector<std::uint64_t> labels_;
  std::vector<double> births_;
  std::vector<Feature> features_;
  std::vector<std::size_t> offsets_{0};
  std::vector<VertexIndex> adjacency_;
};

}  // namespace graphonlab
