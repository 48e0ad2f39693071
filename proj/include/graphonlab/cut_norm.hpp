#pragma once

// Cut norm of step kernels. For a fixed row set U the best column set takes
// every column whose partial sum has the right sign, so the supremum over
// measurable U, V is attained on unions of blocks and an exact answer needs
// only the 2^n row subsets.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "graphonlab/error.hpp"
#include "graphonlab/matrix.hpp"
#include "graphonlab/rng.hpp"
#include "graphonlab/step_graphon.hpp"

namespace graphonlab::metrics {

enum class CutNormMode { exact, heuristic };

inline constexpr std::size_t exact_cut_norm_limit = 26;
inline constexpr int heuristic_starts = 32;

struct CutNormResult {
  double value = 0.0;
  bool exact = true;              // false: heuristic lower bound on the supremum
  std::vector<std::size_t> rows;  // witness U (block indices)
  std::vector<std::size_t> cols;  // witness V
};

/// K_ij = a_ij m_i m_j, the integral of W over block pair (i, j).
inline Matrix<double> block_integrals(const StepGraphon& w) {
  Matrix<double> k(w.size(), w.size());
  for (std::size_t i = 0; i < w.size(); ++i)
    for (std::size_t j = 0; j < w.size(); ++j) k(i, j) = w.value(i, j) * w.mass(i) * w.mass(j);
  return k;
}

namespace detail {

inline double rect_sum(const Matrix<double>& k, const std::vector<std::size_t>& u, const std::vector<std::size_t>& v) {
  double s = 0.0;
  for (std::size_t i : u)
    for (std::size_t j : v) s += k(i, j);
  return s;
}

// Recomputes the witness for row mask `mask` from scratch.
inline CutNormResult witness_for_mask(const Matrix<double>& k, std::uint64_t mask) {
  const std::size_t n = k.rows();
  CutNormResult r;
  std::vector<double> col(k.cols(), 0.0);
  for (std::size_t i = 0; i < n; ++i)
    if (mask >> i & 1u) {
      r.rows.push_back(i);
      for (std::size_t j = 0; j < k.cols(); ++j) col[j] += k(i, j);
    }
  std::vector<std::size_t> pos, neg;
  for (std::size_t j = 0; j < col.size(); ++j) {
    if (col[j] > 0.0) pos.push_back(j);
    if (col[j] < 0.0) neg.push_back(j);
  }
  const double p = rect_sum(k, r.rows, pos);
  const double q = -rect_sum(k, r.rows, neg);
  if (p >= q) {
    r.cols = pos;
    r.value = p;
  } else {
    r.cols = neg;
    r.value = q;
  }
  return r;
}

}  // namespace detail

/// Exact cut norm of the block-integral matrix K (square, n <= 26).
/// Enumerates row subsets in Gray-code order with incremental column sums.
/// Stops early, returning a value >= stop_at, as soon as one is found.
inline CutNormResult cut_norm_matrix_exact(const Matrix<double>& k,
                                           double stop_at = std::numeric_limits<double>::infinity()) {
  const std::size_t n = k.rows();
  if (n > exact_cut_norm_limit)
    throw CostExceeded("exact cut norm limited to " + std::to_string(exact_cut_norm_limit) + " blocks, got " +
                           std::to_string(n),
                       std::ldexp(static_cast<double>(n), static_cast<int>(n)));
  const std::size_t m = k.cols();
  std::vector<double> col(m, 0.0);
  std::uint64_t mask = 0;
  std::uint64_t best_mask = 0;
  double best = 0.0;
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t g = 1; g < total; ++g) {
    const auto i = static_cast<std::size_t>(std::countr_zero(g));
    mask ^= std::uint64_t{1} << i;
    const double* row = &k(i, 0);
    if (mask >> i & 1u) {
      for (std::size_t j = 0; j < m; ++j) col[j] += row[j];
    } else {
      for (std::size_t j = 0; j < m; ++j) col[j] -= row[j];
    }
    double p = 0.0, q = 0.0;
    for (std::size_t j = 0; j < m; ++j) (col[j] > 0.0 ? p : q) += col[j];
    const double v = std::max(p, -q);
    if (v > best) {
      best = v;
      best_mask = mask;
      if (best >= stop_at) break;
    }
  }
  return detail::witness_for_mask(k, best_mask);
}

/// Alternating best-response maximization from random row sets; a lower
/// bound on the supremum.
inline CutNormResult cut_norm_matrix_heuristic(const Matrix<double>& k, std::uint64_t seed,
                                               int starts = heuristic_starts) {
  const std::size_t n = k.rows(), m = k.cols();
  CutNormResult best;
  best.exact = false;
  auto eng = rng::stream(seed, rng::Tag::generic, {n, m});
  std::bernoulli_distribution coin(0.5);
  for (int s = 0; s < starts; ++s) {
    std::vector<char> in_u(n);
    for (auto& b : in_u) b = coin(eng);
    for (double sign : {1.0, -1.0}) {
      std::vector<char> u = in_u, v(m, 0);
      double value = -1.0;
      for (int it = 0; it < 100; ++it) {
        std::vector<double> col(m, 0.0);
        for (std::size_t i = 0; i < n; ++i)
          if (u[i])
            for (std::size_t j = 0; j < m; ++j) col[j] += sign * k(i, j);
        for (std::size_t j = 0; j < m; ++j) v[j] = col[j] > 0.0;
        std::vector<double> row(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < m; ++j)
            if (v[j]) row[i] += sign * k(i, j);
        double next = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          u[i] = row[i] > 0.0;
          if (u[i]) next += row[i];
        }
        if (next <= value) break;
        value = next;
      }
      if (value > best.value) {
        best.value = value;
        best.rows.clear();
        best.cols.clear();
        for (std::size_t i = 0; i < n; ++i)
          if (u[i]) best.rows.push_back(i);
        // Re-derive V against the final U so the witness is consistent.
        std::vector<double> col(m, 0.0);
        for (std::size_t i : best.rows)
          for (std::size_t j = 0; j < m; ++j) col[j] += sign * k(i, j);
        for (std::size_t j = 0; j < m; ++j)
          if (col[j] > 0.0) best.cols.push_back(j);
        best.value = std::abs(detail::rect_sum(k, best.rows, best.cols));
      }
    }
  }
  return best;
}

inline CutNormResult cut_norm_matrix(const Matrix<double>& k, CutNormMode mode, std::uint64_t seed = 0) {
  if (mode == CutNormMode::exact) return cut_norm_matrix_exact(k);
  return cut_norm_matrix_heuristic(k, seed);
}

/// sup over U, V of |integral of W over U x V|.
inline CutNormResult cut_norm(const StepGraphon& w, CutNormMode mode = CutNormMode::exact, std::uint64_t seed = 0) {
  return cut_norm_matrix(block_integrals(w), mode, seed);
}

}  // namespace graphonlab::metrics
