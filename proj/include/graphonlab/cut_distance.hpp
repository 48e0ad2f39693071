#pragma once

// Couplings, equal-mass refinements and the permutation search behind the
// cut distance and the invariant L1 distance of step graphons.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "graphonlab/cut_norm.hpp"
#include "graphonlab/error.hpp"
#include "graphonlab/graphon.hpp"
#include "graphonlab/matrix.hpp"
#include "graphonlab/rng.hpp"
#include "graphonlab/step_graphon.hpp"

namespace graphonlab::metrics {

// ---------------------------------------------------------------------------
// Couplings

/// Interval-overlap coupling: c_ij = |I_i cap J_j| for consecutive intervals
/// of lengths masses1 and masses2.
inline Matrix<double> build_coupling(const std::vector<double>& masses1, const std::vector<double>& masses2) {
  const double t1 = std::accumulate(masses1.begin(), masses1.end(), 0.0);
  const double t2 = std::accumulate(masses2.begin(), masses2.end(), 0.0);
  if (std::abs(t1 - t2) > 1e-10 * std::max(1.0, std::max(t1, t2)))
    throw InvalidArgument("build_coupling: total masses differ (" + std::to_string(t1) + " vs " + std::to_string(t2) +
                          "); pad with zero blocks first");
  // Overlaps of [B1_{i-1}, B1_i) and [B2_{j-1}, B2_j); both partitions end at
  // the same point so row and column sums telescope to the masses.
  std::vector<double> b1(masses1.size() + 1, 0.0), b2(masses2.size() + 1, 0.0);
  std::partial_sum(masses1.begin(), masses1.end(), b1.begin() + 1);
  std::partial_sum(masses2.begin(), masses2.end(), b2.begin() + 1);
  b1.back() = b2.back() = std::max(t1, t2);
  Matrix<double> c(masses1.size(), masses2.size(), 0.0);
  for (std::size_t i = 0; i < masses1.size(); ++i)
    for (std::size_t j = 0; j < masses2.size(); ++j)
      c(i, j) = std::max(0.0, std::min(b1[i + 1], b2[j + 1]) - std::max(b1[i], b2[j]));
  return c;
}

// ---------------------------------------------------------------------------
// Equal-mass refinement

struct CommonRefinement {
  StepGraphon first;   // every block has mass q
  StepGraphon second;
  double quantum = 0.0;
  double distortion_first = 0.0;   // max relative mass change per block
  double distortion_second = 0.0;
  double perturbation_bound = 0.0; // certified slack added to distances
};

namespace detail {

struct Quantized {
  StepGraphon graphon;
  double distortion = 0.0;
  double slack = 0.0;
};

// Splits each block into round(m/q) blocks of mass q and returns the
// measure-perturbation slack: 3 eps ||W||_{1,nu} when all masses move the
// same way (nu the smaller measure), twice that otherwise (through the
// blockwise minimum measure).
inline Quantized quantize(const StepGraphon& w, double q, std::size_t pad_to) {
  std::vector<std::size_t> from;
  double eps = 0.0;
  bool up = false, down = false;
  double l1_min = 0.0;
  std::vector<double> nu(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double k = std::round(w.mass(i) / q);
    const double rounded = k * q;
    if (rounded > w.mass(i)) up = true;
    if (rounded < w.mass(i)) down = true;
    nu[i] = std::min(rounded, w.mass(i));
    eps = std::max(eps, std::abs(rounded - w.mass(i)) / nu[i]);
    for (std::size_t c = 0; c < static_cast<std::size_t>(k); ++c) from.push_back(i);
  }
  for (std::size_t i = 0; i < w.size(); ++i)
    for (std::size_t j = 0; j < w.size(); ++j) l1_min += std::abs(w.value(i, j)) * nu[i] * nu[j];
  const std::size_t n = std::max(pad_to, from.size());
  Matrix<double> vals(n, n, 0.0);
  for (std::size_t a = 0; a < from.size(); ++a)
    for (std::size_t b = 0; b < from.size(); ++b) vals(a, b) = w.value(from[a], from[b]);
  Quantized out{StepGraphon(std::vector<double>(n, q), std::move(vals), w.ambient_infinite()), eps, 0.0};
  if (eps > 0.0) out.slack = (up && down ? 6.0 : 3.0) * eps * l1_min;
  return out;
}

inline std::size_t quantized_count(const StepGraphon& w, double q) {
  std::size_t c = 0;
  for (double m : w.masses()) c += static_cast<std::size_t>(std::round(m / q));
  return c;
}

}  // namespace detail

/// Default quantum: the smallest block mass when every mass is (to 1e-12
/// relative) an integer multiple of it; otherwise the gcd of the masses
/// rounded to a 1e-3 grid, capped at the smallest mass.
inline double default_quantum(const StepGraphon& a, const StepGraphon& b) {
  std::vector<double> all = a.masses();
  all.insert(all.end(), b.masses().begin(), b.masses().end());
  if (all.empty()) return 1.0;
  const double smallest = *std::min_element(all.begin(), all.end());
  bool commensurable = true;
  for (double m : all) {
    const double r = m / smallest;
    if (std::abs(r - std::round(r)) > 1e-12 * r) commensurable = false;
  }
  if (commensurable) return smallest;
  long long g = 0;
  for (double m : all) g = std::gcd(g, std::llround(m * 1000.0));
  if (g == 0) return smallest;
  return std::min(static_cast<double>(g) / 1000.0, smallest);
}

/// Re-expresses both graphons on blocks of mass q (masses rounded to the
/// nearest multiple of q) and pads the shorter one with zero blocks.
inline CommonRefinement common_refinement(const StepGraphon& w1, const StepGraphon& w2, double q) {
  graphonlab::detail::require(q > 0.0 && std::isfinite(q), "common_refinement: quantum must be positive");
  for (const auto* w : {&w1, &w2})
    for (std::size_t i = 0; i < w->size(); ++i)
      if (q > w->mass(i) * (1.0 + 1e-12))
        throw InvalidArgument("common_refinement: quantum " + std::to_string(q) + " exceeds block mass " +
                              std::to_string(w->mass(i)) + " (block " + std::to_string(i) + ")");
  const std::size_t n = std::max(detail::quantized_count(w1, q), detail::quantized_count(w2, q));
  auto a = detail::quantize(w1, q, n);
  auto b = detail::quantize(w2, q, n);
  return {std::move(a.graphon), std::move(b.graphon), q, a.distortion, b.distortion, a.slack + b.slack};
}

// ---------------------------------------------------------------------------
// Distances

enum class SearchMode { exact, anneal };

inline constexpr std::size_t exact_permutation_limit = 8;

struct DistanceOptions {
  SearchMode mode = SearchMode::exact;
  long long budget = 20000;  // objective evaluations for anneal
  std::uint64_t seed = 0;
  std::optional<double> quantum;
  int restarts = 4;
};

struct DistanceReport {
  double value = 0.0;            // objective + quantization_error
  double objective = 0.0;        // best norm over the searched permutations
  std::string mode = "exact";    // "exact" or "upper_bound"
  std::vector<std::size_t> witness;  // sigma: W2 block sigma(i) aligned with W1 block i
  double quantization_error = 0.0;
  double quantum = 0.0;
  long long budget_spent = 0;
  std::size_t blocks = 0;
};

enum class Objective { cut, l1 };

namespace detail {

// Weighted difference D_ij = (a_ij - b_{s(i) s(j)}) q^2.
inline Matrix<double> permuted_difference(const StepGraphon& a, const StepGraphon& b,
                                          const std::vector<std::size_t>& s, double q2) {
  const std::size_t n = a.size();
  Matrix<double> d(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) d(i, j) = (a.value(i, j) - b.value(s[i], s[j])) * q2;
  return d;
}

inline double l1_of(const Matrix<double>& d) {
  double s = 0.0;
  for (double v : d.data()) s += std::abs(v);
  return s;
}

inline std::vector<std::size_t> degree_order(const StepGraphon& w) {
  const auto deg = block_degrees(w);
  std::vector<std::size_t> idx(w.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) { return deg[x] > deg[y]; });
  return idx;
}

class Searcher {
 public:
  Searcher(const StepGraphon& a, const StepGraphon& b, double q, Objective obj, std::uint64_t seed)
      : a_(a), b_(b), q2_(q * q), obj_(obj), seed_(seed) {}

  // Objective used during search; cut norms above 14 blocks use the heuristic.
  double search_value(const std::vector<std::size_t>& s) {
    ++spent;
    const auto d = permuted_difference(a_, b_, s, q2_);
    if (obj_ == Objective::l1) return l1_of(d);
    if (a_.size() <= 14) return cut_norm_matrix_exact(d).value;
    return cut_norm_matrix_heuristic(d, seed_ ^ static_cast<std::uint64_t>(spent), 8).value;
  }

  // Certified value for the final witness: exact cut norm when feasible,
  // otherwise the L1 norm (an upper bound on the cut norm).
  double final_value(const std::vector<std::size_t>& s) const {
    const auto d = permuted_difference(a_, b_, s, q2_);
    if (obj_ == Objective::l1) return l1_of(d);
    if (a_.size() <= exact_cut_norm_limit) return cut_norm_matrix_exact(d).value;
    return l1_of(d);
  }

  double bounded_value(const std::vector<std::size_t>& s, double stop_at) {
    ++spent;
    const auto d = permuted_difference(a_, b_, s, q2_);
    if (obj_ == Objective::l1) return l1_of(d);
    return cut_norm_matrix_exact(d, stop_at).value;
  }

  long long spent = 0;

 private:
  const StepGraphon& a_;
  const StepGraphon& b_;
  double q2_;
  Objective obj_;
  std::uint64_t seed_;
};

inline DistanceReport permutation_distance(const StepGraphon& w1, const StepGraphon& w2, const DistanceOptions& opt,
                                           Objective obj) {
  DistanceReport rep;
  if (w1.empty() && w2.empty()) return rep;
  const double q = opt.quantum.value_or(default_quantum(w1, w2));
  const auto ref = common_refinement(w1, w2, q);
  const std::size_t n = ref.first.size();
  rep.blocks = n;
  rep.quantum = q;
  rep.quantization_error = ref.perturbation_bound;
  Searcher search(ref.first, ref.second, q, obj, opt.seed);

  std::vector<std::size_t> best(n);
  std::iota(best.begin(), best.end(), std::size_t{0});

  if (opt.mode == SearchMode::exact) {
    if (n > exact_permutation_limit) {
      double fact = 1.0;
      for (std::size_t i = 2; i <= n; ++i) fact *= static_cast<double>(i);
      throw CostExceeded("exact permutation search limited to " + std::to_string(exact_permutation_limit) +
                             " equal-mass blocks, refinement has " + std::to_string(n),
                         fact * std::ldexp(static_cast<double>(n), static_cast<int>(std::min<std::size_t>(n, 1000))));
    }
    std::vector<std::size_t> s = best;
    double best_value = std::numeric_limits<double>::infinity();
    do {
      const double v = search.bounded_value(s, best_value);
      if (v < best_value) {
        best_value = v;
        best = s;
        if (best_value == 0.0) break;
      }
    } while (std::next_permutation(s.begin(), s.end()));
    rep.objective = best_value;
    rep.mode = "exact";
  } else {
    // Simulated annealing over 2-swaps with geometric cooling; the budget is
    // split evenly over restarts. Restart 0 starts from the degree alignment.
    const long long budget = std::max<long long>(opt.budget, 1);
    const int restarts = std::max(1, opt.restarts);
    const long long per = std::max<long long>(1, budget / restarts);
    double best_value = std::numeric_limits<double>::infinity();
    for (int r = 0; r < restarts && best_value > 0.0; ++r) {
      auto eng = rng::stream(opt.seed, rng::Tag::restart, {static_cast<std::uint64_t>(r)});
      std::vector<std::size_t> s(n);
      if (r == 0) {
        const auto o1 = degree_order(ref.first);
        const auto o2 = degree_order(ref.second);
        for (std::size_t i = 0; i < n; ++i) s[o1[i]] = o2[i];
      } else {
        std::iota(s.begin(), s.end(), std::size_t{0});
        std::shuffle(s.begin(), s.end(), eng);
      }
      double cur = search.search_value(s);
      if (cur < best_value) {
        best_value = cur;
        best = s;
      }
      if (n < 2) break;
      const double t0 = cur > 0.0 ? cur : 1.0;
      const double cooling = std::pow(1e-3, 1.0 / static_cast<double>(per));
      double temp = t0;
      std::uniform_int_distribution<std::size_t> pick(0, n - 1);
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      for (long long step = 1; step < per && best_value > 0.0; ++step) {
        const std::size_t i = pick(eng);
        std::size_t j = pick(eng);
        if (i == j) j = (j + 1) % n;
        std::swap(s[i], s[j]);
        const double v = search.search_value(s);
        if (v <= cur || unif(eng) < std::exp(-(v - cur) / temp)) {
          cur = v;
          if (cur < best_value) {
            best_value = cur;
            best = s;
          }
        } else {
          std::swap(s[i], s[j]);
        }
        temp *= cooling;
      }
    }
    rep.objective = search.final_value(best);
    rep.mode = "upper_bound";
  }
  rep.witness = best;
  rep.budget_spent = search.spent;
  rep.value = rep.objective + rep.quantization_error;
  return rep;
}

}  // namespace detail

/// Minimum over equal-mass block permutations of ||W1 - W2^sigma||_cut plus
/// the quantization slack; a certified upper bound on delta_cut.
inline DistanceReport cut_distance(const StepGraphon& w1, const StepGraphon& w2, const DistanceOptions& opt = {}) {
  return detail::permutation_distance(w1, w2, opt, Objective::cut);
}

/// Same search with the L1 objective.
inline DistanceReport invariant_l1_distance(const StepGraphon& w1, const StepGraphon& w2,
                                            const DistanceOptions& opt = {}) {
  return detail::permutation_distance(w1, w2, opt, Objective::l1);
}

/// W^sigma(i, j) = W(sigma(i), sigma(j)) on equal-mass blocks.
inline StepGraphon permute_blocks(const StepGraphon& w, const std::vector<std::size_t>& sigma) {
  graphonlab::detail::require(sigma.size() == w.size(), "permutation size differs from block count");
  Matrix<double> v(w.size(), w.size());
  std::vector<double> m(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    m[i] = w.mass(sigma[i]);
    for (std::size_t j = 0; j < w.size(); ++j) v(i, j) = w.value(sigma[i], sigma[j]);
  }
  return StepGraphon(std::move(m), std::move(v), w.ambient_infinite());
}

}  // namespace graphonlab::metrics
