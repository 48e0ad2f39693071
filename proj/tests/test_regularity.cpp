#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "graphonlab/graphonlab.hpp"
#include "oracles.hpp"

using namespace graphonlab;
using namespace graphonlab::regularity;

TEST(Grid, Geometric) {
  const auto g = default_m_grid();
  EXPECT_DOUBLE_EQ(g.front(), 0.1);
  EXPECT_LE(g.back(), 100.0 + 1e-9);
  EXPECT_GT(g.back() * 1.25, 100.0);
  for (std::size_t i = 1; i < g.size(); ++i) EXPECT_NEAR(g[i] / g[i - 1], 1.25, 1e-12);
}

TEST(TailProfile, CliqueCoveredAtSqrt2) {
  for (std::size_t m : {3, 10, 40}) {
    const auto p = graph_tail_profile(graphs::complete_graph(m), {std::sqrt(2.0)});
    EXPECT_EQ(p.shares[0], 2.0);
  }
}

TEST(TailProfile, StarCentre) {
  for (std::size_t k : {4, 25, 100}) {
    const auto p = graph_tail_profile(graphs::star_graph(k), {1.0 / std::sqrt(2.0 * k)});
    EXPECT_EQ(p.shares[0], 1.0);
  }
}

TEST(TailProfile, MatchingShareVanishes) {
  double prev = INFINITY;
  for (std::size_t m : {16, 100, 400, 2500}) {
    const auto p = graph_tail_profile(graphs::matching_graph(m), {1.0});
    const double expected = std::ceil(std::sqrt(static_cast<double>(m))) / static_cast<double>(m);
    EXPECT_DOUBLE_EQ(p.shares[0], expected);
    EXPECT_LT(p.shares[0], prev);
    prev = p.shares[0];
  }
}

TEST(TailProfile, MatchesOracleAndIsMonotone) {
  const auto grid = default_m_grid();
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto g = graphs::erdos_renyi(60 + 10 * s, 0.08, s);
    if (g.num_edges() == 0) continue;
    const auto p = graph_tail_profile(g, grid);
    double prev = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      ASSERT_DOUBLE_EQ(p.shares[i], oracle::tail_share(g, grid[i]));
      ASSERT_GE(p.shares[i], prev);
      ASSERT_LE(p.shares[i], 2.0);
      prev = p.shares[i];
    }
    EXPECT_EQ(p.shares.back(), 2.0);
  }
}

TEST(TailProfile, IsolatedVerticesInvariant) {
  const auto grid = default_m_grid();
  const auto g = graphs::erdos_renyi(80, 0.05, 3);
  const auto a = graph_tail_profile(g, grid);
  const auto b = graph_tail_profile(g.with_isolated(500), grid);
  EXPECT_EQ(a.shares, b.shares);
  const auto da = graph_degree_stats(g, {0.1, 0.5});
  const auto db = graph_degree_stats(g.with_isolated(500), {0.1, 0.5});
  EXPECT_EQ(da.normalized_counts, db.normalized_counts);
}

TEST(TailProfile, EmptyGraphRejected) {
  EXPECT_THROW(graph_tail_profile(SampledGraph(5, {}), {1.0}), InvalidArgument);
}

TEST(SequenceRegularity, CliqueSequence) {
  const auto grid = default_m_grid();
  std::vector<SampledGraph> seq(4, graphs::complete_graph(10));
  const auto r = sequence_tail_regularity(seq, 0.1);
  ASSERT_TRUE(r.regular);
  // First grid point whose prefix covers all ten vertices.
  double expected = 0.0;
  for (double m : grid)
    if (oracle::tail_share(seq[0], m) >= 1.9) {
      expected = m;
      break;
    }
  EXPECT_EQ(r.m, expected);
  double first_above_sqrt2 = 0.0;
  for (double m : grid)
    if (m >= std::sqrt(2.0)) {
      first_above_sqrt2 = m;
      break;
    }
  EXPECT_LE(r.m, first_above_sqrt2);
}

TEST(SequenceRegularity, CliquePlusIsolatedBounded) {
  std::vector<SampledGraph> seq;
  for (std::size_t n : {1000, 2000, 4000, 10000}) seq.push_back(graphs::clique_plus_isolated(n, 0.5));
  const auto r = sequence_tail_regularity(seq, 0.1);
  ASSERT_TRUE(r.regular);
  for (const auto& m : r.per_graph) EXPECT_EQ(*m, *r.per_graph.front());
}

TEST(SequenceRegularity, FailureWitness) {
  std::vector<SampledGraph> seq{graphs::complete_graph(5), graphs::matching_graph(20000)};
  const auto r = sequence_tail_regularity(seq, 0.5);
  EXPECT_FALSE(r.regular);
  ASSERT_TRUE(r.witness.has_value());
  EXPECT_EQ(*r.witness, 1u);
  ASSERT_TRUE(r.witness_profile.has_value());
  EXPECT_LT(2.0 - r.witness_profile->shares.back(), 2.0);
}

TEST(SequenceRegularity, MonotoneInEps) {
  std::vector<SampledGraph> seq;
  for (std::uint64_t s = 0; s < 5; ++s) seq.push_back(graphs::erdos_renyi(300, 0.02, s));
  double prev = INFINITY;
  for (double eps : {0.05, 0.1, 0.2, 0.5, 1.0, 1.5}) {
    const auto r = sequence_tail_regularity(seq, eps);
    ASSERT_TRUE(r.regular);
    EXPECT_LE(r.m, prev);
    prev = r.m;
  }
}

TEST(SequenceRegularity, MatchingRequiredMGrows) {
  const auto small = required_m(graphs::matching_graph(400), 0.5);
  const auto large = required_m(graphs::matching_graph(1600), 0.5);
  ASSERT_TRUE(small && large);
  EXPECT_GE(*large / *small, 1.4);
}

TEST(SequenceRegularity, EpsRange) {
  std::vector<SampledGraph> seq{graphs::complete_graph(4)};
  EXPECT_THROW(sequence_tail_regularity(seq, 0.0), InvalidArgument);
  EXPECT_THROW(sequence_tail_regularity(seq, 2.0), InvalidArgument);
}

TEST(DegreeStats, Clique) {
  for (std::size_t m : {3, 10, 50}) {
    const auto s = graph_degree_stats(graphs::complete_graph(m), {0.5});
    EXPECT_EQ(s.counts[0], m);
    const double md = static_cast<double>(m);
    EXPECT_NEAR(s.normalized_counts[0], md / std::sqrt(md * (md - 1.0)), 1e-12);
    EXPECT_DOUBLE_EQ(s.avg_degree, md - 1.0);
  }
  EXPECT_THROW(graph_degree_stats(SampledGraph(3, {}), {0.5}), InvalidArgument);
}

TEST(UpperRegularity, Clique) {
  const auto k = graphs::complete_graph(12);
  EXPECT_DOUBLE_EQ(upper_regularity_statistic(k, 1, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(upper_regularity_statistic(k, 1, 0.5), 1.0);
  EXPECT_EQ(upper_regularity_statistic(k, 1, 1.01), 0.0);
  EXPECT_THROW(upper_regularity_statistic(k, 13, 1.0), InvalidArgument);
  EXPECT_THROW(upper_regularity_statistic(SampledGraph(4, {}), 1, 1.0), InvalidArgument);
}

TEST(UpperRegularity, MatchesDirectAveraging) {
  const auto er = graphs::er_example1(2000, 0.5, 4);
  const double s = upper_regularity_statistic(er, 10, 4.0);
  EXPECT_NEAR(s, oracle::upper_statistic(er, 10, 4.0), 1e-12);
  EXPECT_LT(s, 1e-9);

  const auto clique = graphs::clique_plus_isolated(2000, 0.5);
  for (double big_k : {1.0, 4.0, 50.0})
    EXPECT_NEAR(upper_regularity_statistic(clique, 10, big_k), oracle::upper_statistic(clique, 10, big_k), 1e-12);
  // The 299-vertex clique fills class 0 and half of class 1 (classes of 200).
  // Only cell (0,0) has rescaled average >= 40 (about 44.7); it holds
  // 200*199 of the 299*298 ordered edge pairs.
  EXPECT_NEAR(upper_regularity_statistic(clique, 10, 40.0), 200.0 * 199.0 / (299.0 * 298.0), 1e-12);
}
