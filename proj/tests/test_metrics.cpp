#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "graphonlab/graphonlab.hpp"
#include "oracles.hpp"

using namespace graphonlab;
using namespace graphonlab::metrics;

namespace {

StepGraphon with_zero_tail(const StepGraphon& w, std::size_t extra) {
  std::vector<double> m = w.masses();
  const double q = w.mass(0);
  for (std::size_t i = 0; i < extra; ++i) m.push_back(q);
  Matrix<double> v(m.size(), m.size(), 0.0);
  for (std::size_t i = 0; i < w.size(); ++i)
    for (std::size_t j = 0; j < w.size(); ++j) v(i, j) = w.value(i, j);
  return StepGraphon(std::move(m), std::move(v), w.ambient_infinite());
}

StepGraphon prefix(const StepGraphon& w, std::size_t k) {
  std::vector<double> m(w.masses().begin(), w.masses().begin() + static_cast<std::ptrdiff_t>(k));
  Matrix<double> v(k, k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) v(i, j) = w.value(i, j);
  return StepGraphon(std::move(m), std::move(v), true);
}

}  // namespace

TEST(CutNorm, Examples) {
  const StepGraphon signed_w({1.0, 1.0}, {{1.0, -1.0}, {-1.0, 1.0}});
  const auto r = cut_norm(signed_w);
  EXPECT_DOUBLE_EQ(r.value, 1.0);
  EXPECT_EQ(r.rows.size(), 1u);
  EXPECT_EQ(r.rows, r.cols);
  EXPECT_EQ(cut_norm(StepGraphon::zero({1.0, 2.0})).value, 0.0);
  const StepGraphon pos({1.0, 2.0}, {{0.5, 0.2}, {0.2, 0.1}});
  EXPECT_DOUBLE_EQ(cut_norm(pos).value, l1_norm(pos));
}

TEST(CutNorm, MatchesSubsetOracle) {
  std::mt19937_64 eng(42);
  for (int rep = 0; rep < 100; ++rep) {
    const auto w = oracle::random_step(eng, 1 + rep % 6, -1.0, 1.0, rep % 2 == 0);
    ASSERT_NEAR(cut_norm(w).value, oracle::subset_cut_norm(w), 1e-12);
  }
}

TEST(CutNorm, WitnessAttainsValue) {
  std::mt19937_64 eng(7);
  for (int rep = 0; rep < 50; ++rep) {
    const auto w = oracle::random_step(eng, 6, -1.0, 1.0, false);
    const auto r = cut_norm(w);
    const auto k = oracle::integrals(w);
    double s = 0.0;
    for (auto i : r.rows)
      for (auto j : r.cols) s += k[i][j];
    EXPECT_NEAR(std::abs(s), r.value, 1e-12);
  }
}

TEST(CutNorm, BoundedByL1) {
  std::mt19937_64 eng(9);
  for (int rep = 0; rep < 100; ++rep) {
    const auto w = oracle::random_step(eng, 1 + rep % 8, -1.0, 1.0, false);
    EXPECT_LE(cut_norm(w).value, l1_norm(w) + 1e-12);
    const auto nonneg = oracle::random_step(eng, 1 + rep % 8, 0.0, 1.0, false);
    EXPECT_NEAR(cut_norm(nonneg).value, l1_norm(nonneg), 1e-12);
  }
}

TEST(CutNorm, HeuristicIsLowerBound) {
  std::mt19937_64 eng(10);
  for (int rep = 0; rep < 30; ++rep) {
    const auto w = oracle::random_step(eng, 10, -1.0, 1.0, false);
    const auto h = cut_norm(w, CutNormMode::heuristic, rep);
    EXPECT_FALSE(h.exact);
    EXPECT_LE(h.value, cut_norm(w).value + 1e-12);
  }
}

TEST(CutNorm, ExactLimit) {
  std::mt19937_64 eng(1);
  const auto w = oracle::random_step(eng, 27, -1.0, 1.0, true);
  EXPECT_THROW(cut_norm(w, CutNormMode::exact), CostExceeded);
  EXPECT_NO_THROW(cut_norm(w, CutNormMode::heuristic));
}

TEST(Coupling, Examples) {
  const auto a = build_coupling({1.0, 1.0}, {2.0});
  EXPECT_EQ(a(0, 0), 1.0);
  EXPECT_EQ(a(1, 0), 1.0);
  const auto b = build_coupling({1.0, 1.0}, {1.0, 1.0});
  EXPECT_EQ(b(0, 0), 1.0);
  EXPECT_EQ(b(0, 1), 0.0);
  EXPECT_EQ(b(1, 1), 1.0);
  const auto c = build_coupling({1.5, 0.5}, {1.0, 1.0});
  EXPECT_EQ(c(0, 0), 1.0);
  EXPECT_EQ(c(0, 1), 0.5);
  EXPECT_EQ(c(1, 0), 0.0);
  EXPECT_EQ(c(1, 1), 0.5);
  EXPECT_THROW(build_coupling({1.0}, {1.5}), InvalidArgument);
}

TEST(Coupling, Marginals) {
  std::mt19937_64 eng(4);
  std::uniform_real_distribution<double> u(0.1, 2.0);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> a(1 + rep % 5), b(1 + rep % 7);
    for (auto& x : a) x = u(eng);
    for (auto& x : b) x = u(eng);
    // Scale b to the same total.
    double ta = 0.0, tb = 0.0;
    for (double x : a) ta += x;
    for (double x : b) tb += x;
    for (auto& x : b) x *= ta / tb;
    const auto c = build_coupling(a, b);
    for (std::size_t i = 0; i < a.size(); ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < b.size(); ++j) {
        ASSERT_GE(c(i, j), 0.0);
        s += c(i, j);
      }
      ASSERT_NEAR(s, a[i], 1e-10);
    }
    for (std::size_t j = 0; j < b.size(); ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) s += c(i, j);
      ASSERT_NEAR(s, b[j], 1e-10);
    }
  }
}

TEST(CommonRefinement, Examples) {
  const StepGraphon a({1.0, 2.0}, {{0.5, 0.2}, {0.2, 0.1}});
  const auto r = common_refinement(a, a, 0.5);
  EXPECT_EQ(r.first.size(), 6u);
  EXPECT_EQ(r.perturbation_bound, 0.0);
  for (double m : r.first.masses()) EXPECT_EQ(m, 0.5);

  // W against itself with one block of mass 1.02: each side moves by
  // eps = 0.02 / 1.00 relative to the rounded measure, slack 3 eps ||W|| per side.
  const StepGraphon one({1.02}, {{1.0}});
  const auto s = common_refinement(one, one, 0.5);
  EXPECT_EQ(s.first.size(), 2u);
  EXPECT_NEAR(s.distortion_first, 0.02, 1e-12);
  EXPECT_NEAR(s.distortion_second, 0.02, 1e-12);
  EXPECT_NEAR(s.perturbation_bound, 0.12, 1e-12);

  EXPECT_THROW(common_refinement(a, a, 1.5), InvalidArgument);
}

TEST(CutDistance, Examples) {
  const StepGraphon a({1.0, 1.0}, {{1.0, 0.0}, {0.0, 0.0}});
  const StepGraphon b({1.0, 1.0}, {{0.0, 0.0}, {0.0, 1.0}});
  const StepGraphon c({1.0, 1.0}, {{0.5, 0.0}, {0.0, 0.0}});
  EXPECT_EQ(cut_distance(a, a).value, 0.0);
  EXPECT_EQ(cut_distance(a, b).value, 0.0);
  EXPECT_DOUBLE_EQ(cut_distance(a, c).value, 0.5);
  EXPECT_DOUBLE_EQ(invariant_l1_distance(a, c).value, 0.5);
  EXPECT_EQ(cut_distance(a, c).mode, "exact");
  EXPECT_DOUBLE_EQ(cut_distance(a, c).value, oracle::permutation_distance(a, c, true));
  EXPECT_DOUBLE_EQ(invariant_l1_distance(a, c).value, oracle::permutation_distance(a, c, false));
}

TEST(CutDistance, ShuffleHasZeroDistanceAndInverseWitness) {
  std::mt19937_64 eng(12);
  for (int rep = 0; rep < 10; ++rep) {
    const auto w = oracle::random_step(eng, 7, 0.0, 1.0, true);
    std::vector<std::size_t> pi(7);
    std::iota(pi.begin(), pi.end(), std::size_t{0});
    std::shuffle(pi.begin(), pi.end(), eng);
    const auto r = cut_distance(w, permute_blocks(w, pi));
    EXPECT_LE(r.value, 1e-12);
    for (std::size_t i = 0; i < 7; ++i) EXPECT_EQ(pi[r.witness[i]], i);
    EXPECT_LE(invariant_l1_distance(w, permute_blocks(w, pi)).value, 1e-12);
  }
}

TEST(CutDistance, MatchesPermutationOracle) {
  std::mt19937_64 eng(14);
  for (int rep = 0; rep < 20; ++rep) {
    const auto a = oracle::random_step(eng, 5, 0.0, 1.0, true);
    const auto b = oracle::random_step(eng, 5, 0.0, 1.0, true);
    EXPECT_NEAR(cut_distance(a, b).value, oracle::permutation_distance(a, b, true), 1e-12);
    EXPECT_NEAR(invariant_l1_distance(a, b).value, oracle::permutation_distance(a, b, false), 1e-12);
  }
}

TEST(CutDistance, SymmetryAndTriangle) {
  std::mt19937_64 eng(15);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t n = 2 + rep % 5;
    const auto a = oracle::random_step(eng, n, 0.0, 1.0, true);
    const auto b = oracle::random_step(eng, n, 0.0, 1.0, true);
    const auto c = oracle::random_step(eng, n, 0.0, 1.0, true);
    const double ab = cut_distance(a, b).value, ba = cut_distance(b, a).value;
    EXPECT_NEAR(ab, ba, 1e-12);
    EXPECT_LE(cut_distance(a, c).value, ab + cut_distance(b, c).value + 1e-9);
  }
}

TEST(CutDistance, TrivialExtensionInvariance) {
  std::mt19937_64 eng(16);
  for (int rep = 0; rep < 20; ++rep) {
    const auto a = oracle::random_step(eng, 4, 0.0, 1.0, true);
    const auto b = oracle::random_step(eng, 4, 0.0, 1.0, true);
    const double d = cut_distance(a, b).value;
    EXPECT_NEAR(cut_distance(with_zero_tail(a, 2), b).value, d, 1e-12);
    EXPECT_NEAR(cut_distance(with_zero_tail(a, 1), with_zero_tail(b, 3)).value, d, 1e-12);
  }
}

TEST(CutDistance, RestrictionLimit) {
  std::mt19937_64 eng(17);
  for (int rep = 0; rep < 10; ++rep) {
    const auto a = oracle::random_step(eng, 6, 0.0, 1.0, true);
    const auto b = oracle::random_step(eng, 6, 0.0, 1.0, true);
    const double full = cut_distance(a, b).value;
    std::vector<double> d;
    for (std::size_t k = 1; k <= 6; ++k) d.push_back(cut_distance(prefix(a, k), prefix(b, k)).value);
    EXPECT_NEAR(d.back(), full, 1e-9);
  }
}

TEST(CutDistance, L1PerturbationBound) {
  std::mt19937_64 eng(18);
  std::uniform_real_distribution<double> noise(-0.1, 0.1);
  for (int rep = 0; rep < 20; ++rep) {
    const auto w1 = oracle::random_step(eng, 5, 0.1, 0.9, true);
    const auto w2 = oracle::random_step(eng, 5, 0.0, 1.0, true);
    Matrix<double> v = w1.values();
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = i; j < 5; ++j) v(i, j) = v(j, i) = v(i, j) + noise(eng);
    const StepGraphon w1p(w1.masses(), v);
    double diff = 0.0;
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = 0; j < 5; ++j) diff += std::abs(w1.value(i, j) - v(i, j)) * 0.04;
    EXPECT_LE(cut_distance(w1, w2).value, cut_distance(w1p, w2).value + diff + 1e-12);
  }
}

TEST(CutDistance, MassScalingBound) {
  std::mt19937_64 eng(19);
  for (double eps : {0.01, 0.05}) {
    for (int rep = 0; rep < 10; ++rep) {
      const auto w = oracle::random_step(eng, 4, 0.0, 1.0, true);
      std::vector<double> m = w.masses();
      for (auto& x : m) x *= 1.0 + eps;
      const StepGraphon inflated(m, w.values());
      const double q = 0.25;  // rounds every inflated block back onto the grid
      DistanceOptions opt;
      opt.quantum = q;
      const auto r = cut_distance(w, inflated, opt);
      EXPECT_LE(r.value, 3.0 * eps * l1_norm(w) + 1e-12);
      EXPECT_LE(r.objective, 3.0 * eps * l1_norm(w) + 1e-12);
    }
  }
}

TEST(CutDistance, ExactLimitAndAnneal) {
  std::mt19937_64 eng(20);
  const auto w = oracle::random_step(eng, 10, 0.0, 1.0, true);
  EXPECT_THROW(cut_distance(w, w), CostExceeded);
  for (int rep = 0; rep < 5; ++rep) {
    const auto x = oracle::random_step(eng, 12, 0.0, 1.0, true);
    std::vector<std::size_t> pi(12);
    std::iota(pi.begin(), pi.end(), std::size_t{0});
    std::shuffle(pi.begin(), pi.end(), eng);
    DistanceOptions opt;
    opt.mode = SearchMode::anneal;
    opt.budget = 200000;
    opt.seed = static_cast<std::uint64_t>(rep);
    const auto r = cut_distance(x, permute_blocks(x, pi), opt);
    EXPECT_EQ(r.mode, "upper_bound");
    EXPECT_LE(r.value, 1e-9);
  }
}

TEST(CutDistance, AnnealNeverBelowExact) {
  std::mt19937_64 eng(22);
  for (int rep = 0; rep < 10; ++rep) {
    const auto a = oracle::random_step(eng, 6, 0.0, 1.0, true);
    const auto b = oracle::random_step(eng, 6, 0.0, 1.0, true);
    DistanceOptions opt;
    opt.mode = SearchMode::anneal;
    opt.budget = 2000;
    EXPECT_GE(cut_distance(a, b, opt).value, cut_distance(a, b).value - 1e-12);
  }
}

TEST(Canonical, K2) {
  const auto c = canonical_graphons(graphs::complete_graph(2));
  EXPECT_EQ(c.plain.masses(), (std::vector<double>{0.5, 0.5}));
  EXPECT_EQ(c.plain.value(0, 1), 1.0);
  EXPECT_EQ(c.plain.value(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(c.stretched.mass(0), 1.0 / std::sqrt(2.0));
  EXPECT_NEAR(l1_norm(c.stretched), 1.0, 1e-15);
}

TEST(Canonical, EmptyGraph) {
  const auto c = canonical_graphons(SampledGraph(3, {}));
  EXPECT_TRUE(c.plain.is_zero());
  EXPECT_TRUE(c.stretched.is_zero());
}

TEST(Canonical, StretchedUnitNorm) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto g = graphs::erdos_renyi(30, 0.2, s);
    if (g.num_edges() == 0) continue;
    EXPECT_NEAR(l1_norm(canonical_graphons(g).stretched), 1.0, 1e-12);
  }
}

TEST(StretchedDistance, IsolatedVerticesInvisible) {
  const auto g = graphs::cycle_graph(5);
  EXPECT_EQ(stretched_cut_distance(g, g.with_isolated(4)).value, 0.0);
  EXPECT_EQ(stretched_cut_distance(StepGraphon::zero({1.0}), SampledGraph(3, {})).value, 0.0);
}

TEST(StretchedDistance, K4VersusConstant) {
  const auto g = graphs::complete_graph(4);
  const auto w = StepGraphon::constant(1.0, 1.0);
  DistanceOptions opt;
  opt.quantum = 1.0 / std::sqrt(12.0);  // one vertex of K4 in stretched measure
  const auto r = stretched_cut_distance(g, w, opt);
  EXPECT_EQ(r.mode, "exact");
  EXPECT_EQ(r.value, cut_distance(canonical_graphons(g).stretched, stretch(w), opt).value);
  EXPECT_GT(r.value, 0.0);
}

TEST(GraphGraphonEstimate, CompleteGraphFromConstantOne) {
  const auto w = StepGraphon::constant(1.0, 1.0);
  double prev = INFINITY;
  for (double t : {10.0, 40.0, 160.0}) {
    const auto trace = sampling::sample_graphon_process(w, t, 3, false);
    const auto e = graph_graphon_distance_estimate(trace, w, Alignment::feature_oracle);
    EXPECT_LT(e.value, prev);
    prev = e.value;
  }
  EXPECT_LT(prev, 0.02);
}

TEST(GraphGraphonEstimate, EmptyTraceGivesUnitNorm) {
  const auto w = StepGraphon({1.0, 1.0}, {{0.5, 0.2}, {0.2, 0.1}});
  sampling::ProcessTrace t;
  t.graphon = w;
  t.horizon = 1.0;
  const auto e = graph_graphon_distance_estimate(t, w, Alignment::feature_oracle);
  EXPECT_NEAR(e.value, l1_norm(stretch(w)), 1e-12);
}

TEST(GraphGraphonEstimate, BlockMismatchRejected) {
  const auto trace = sampling::sample_graphon_process(StepGraphon::constant(1.0, 0.5), 5.0, 1, false);
  EXPECT_THROW(graph_graphon_distance_estimate(trace, StepGraphon({0.5, 0.5}, {{0.5, 0.5}, {0.5, 0.5}}),
                                               Alignment::feature_oracle),
               InvalidArgument);
}

TEST(WeakRegularity, Examples) {
  const auto c = weak_regularity_partition(StepGraphon::constant(1.0, 0.3), 1);
  EXPECT_EQ(c.residual, 0.0);

  const StepGraphon two({0.3, 0.7}, {{0.9, 0.1}, {0.1, 0.5}});
  const auto r = weak_regularity_partition(refine(two, {0.1, 0.2, 0.5, 0.8}), 2);
  EXPECT_NEAR(r.residual, 0.0, 1e-15);

  // Complete bipartite K_{3,3}, vertices interleaved.
  std::vector<IndexEdge> e;
  for (VertexIndex i = 0; i < 6; i += 2)
    for (VertexIndex j = 1; j < 6; j += 2) e.emplace_back(i, j);
  const auto k33 = canonical_graphons(SampledGraph(6, e)).plain;
  EXPECT_NEAR(weak_regularity_partition(k33, 2).residual, 0.0, 1e-15);
}

TEST(WeakRegularity, ResidualNonincreasingInK) {
  std::mt19937_64 eng(23);
  for (int rep = 0; rep < 10; ++rep) {
    const auto w = oracle::random_step(eng, 8, 0.0, 1.0, false);
    double prev = INFINITY;
    for (std::size_t k = 1; k <= 6; ++k) {
      const auto r = weak_regularity_partition(w, k, 2000, 1);
      EXPECT_LE(r.residual, prev + 1e-12);
      EXPECT_LE(r.partition.classes, k);
      prev = r.residual;
    }
  }
}
