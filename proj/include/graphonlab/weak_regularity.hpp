#pragma once

// Greedy Frieze-Kannan style weak regularity partitions of step graphons.
// Classes start as one; each round takes a cut-norm witness (U, V) of
// W - W_P and splits the single class along U or V whose split lowers the
// residual most. The best partition seen with at most k classes is returned,
// so the residual never increases with k for a fixed seed.

#include <cstdint>
#include <limits>
#include <vector>

#include "graphonlab/cut_norm.hpp"
#include "graphonlab/graphon.hpp"
#include "graphonlab/step_graphon.hpp"

namespace graphonlab::metrics {

inline constexpr std::size_t weak_regularity_exact_limit = 20;

struct WeakRegularityResult {
  BlockPartition partition;
  double residual = 0.0;  // cut norm of W - W_P
  bool exact = true;      // residual from the exact cut norm
  long long evaluations = 0;
};

namespace detail {

inline CutNormResult residual_cut(const StepGraphon& w, const BlockPartition& p, std::uint64_t seed) {
  const StepGraphon proj = project_onto_partition(w, p);
  Matrix<double> d(w.size(), w.size());
  for (std::size_t i = 0; i < w.size(); ++i)
    for (std::size_t j = 0; j < w.size(); ++j) d(i, j) = (w.value(i, j) - proj.value(i, j)) * w.mass(i) * w.mass(j);
  if (w.size() <= weak_regularity_exact_limit) return cut_norm_matrix_exact(d);
  return cut_norm_matrix_heuristic(d, seed);
}

inline BlockPartition split(const BlockPartition& p, std::size_t cls, const std::vector<std::size_t>& set) {
  std::vector<char> in(p.class_of.size(), 0);
  for (std::size_t i : set) in[i] = 1;
  std::size_t inside = 0, outside = 0;
  for (std::size_t i = 0; i < p.class_of.size(); ++i)
    if (p.class_of[i] == cls) (in[i] ? inside : outside) += 1;
  if (inside == 0 || outside == 0) return p;
  BlockPartition q = p;
  for (std::size_t i = 0; i < q.class_of.size(); ++i)
    if (q.class_of[i] == cls && in[i]) q.class_of[i] = q.classes;
  ++q.classes;
  return q;
}

}  // namespace detail

inline WeakRegularityResult weak_regularity_partition(const StepGraphon& w, std::size_t k, long long budget = 2000,
                                                      std::uint64_t seed = 0) {
  graphonlab::detail::require(k >= 1, "weak_regularity_partition: need k >= 1");
  WeakRegularityResult best;
  best.exact = w.size() <= weak_regularity_exact_limit;
  if (w.empty()) return best;
  BlockPartition cur = BlockPartition::single(w.size());
  CutNormResult witness = detail::residual_cut(w, cur, seed);
  long long evals = 1;
  best.partition = cur;
  best.residual = witness.value;
  while (cur.classes < k && witness.value > 0.0 && evals < budget) {
    BlockPartition next = cur;
    CutNormResult next_witness;
    double next_value = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < cur.classes && evals < budget; ++c)
      for (const auto* set : {&witness.rows, &witness.cols}) {
        BlockPartition cand = detail::split(cur, c, *set);
        if (cand.classes == cur.classes) continue;
        CutNormResult r = detail::residual_cut(w, cand, seed + static_cast<std::uint64_t>(evals));
        ++evals;
        if (r.value < next_value) {
          next_value = r.value;
          next = cand;
          next_witness = r;
        }
      }
    if (next.classes == cur.classes) break;  // witness splits nothing
    cur = next;
    witness = next_witness;
    if (witness.value < best.residual) {
      best.partition = cur;
      best.residual = witness.value;
    }
  }
  best.evaluations = evals;
  return best;
}

}  // namespace graphonlab::metrics
