#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "graphonlab/graphonlab.hpp"
#include "oracles.hpp"

using namespace graphonlab;

namespace {

StepGraphon two_block() { return StepGraphon({1.0, 2.0}, {{0.5, 0.2}, {0.2, 0.1}}); }

AnalyticGraphon caron_fox(double x_max) {
  return std::get<AnalyticGraphon>(graphon_from_json(Json::parse(
      R"({"type":"caron_fox","f":{"kind":"shifted_power","c":1.0,"gamma":2.0},"truncation":{"x_max":)" +
      std::to_string(x_max) + "}}")));
}

AnalyticGraphon infinite_block() {
  return std::get<AnalyticGraphon>(graphon_from_json(Json::parse(
      R"({"type":"infinite_block","intervals":[[0,1],[1,3]],"probabilities":[[1,0],[0,0]]})")));
}

}  // namespace

TEST(Evaluate, ConstantBlock) {
  const Graphon w = StepGraphon::constant(1.0, 1.0);
  EXPECT_EQ(evaluate(w, {0.3}, {0.7}), 1.0);
  EXPECT_EQ(evaluate(w, {1.5}, {0.2}), 0.0);
}

TEST(Evaluate, CaronFoxAtOrigin) {
  const Graphon w = caron_fox(10.0);
  const double expected = 1.0 - std::exp(-1.0);
  EXPECT_NEAR(evaluate(w, {0.0}, {0.0}), expected, 1e-15);
  EXPECT_NEAR(evaluate(w, {0.0}, {0.0}), 0.632121, 1e-6);
}

TEST(Evaluate, SymmetricOnRandomPairs) {
  std::mt19937_64 eng(11);
  std::uniform_real_distribution<double> x(0.0, 4.0);
  const std::vector<Graphon> ws{two_block(), caron_fox(8.0), infinite_block()};
  for (const auto& w : ws)
    for (int i = 0; i < 1000; ++i) {
      const Feature a{x(eng)}, b{x(eng)};
      ASSERT_EQ(evaluate(w, a, b), evaluate(w, b, a));
    }
}

TEST(L1Norm, Examples) {
  EXPECT_EQ(l1_norm(StepGraphon::zero({1.0, 2.0})), 0.0);
  EXPECT_DOUBLE_EQ(l1_norm(two_block()), 1.7);
  EXPECT_DOUBLE_EQ(l1_norm(two_block()), oracle::l1(two_block()));
  EXPECT_EQ(l1_norm(StepGraphon::constant(1.0, 1.0)), 1.0);
}

TEST(L1Norm, InfiniteBlockExact) {
  const auto w = infinite_block();
  EXPECT_NEAR(l1_norm(w).value, 1.0, 1e-12);
}

TEST(DegreeProfile, Examples) {
  const auto one = degree_profile(StepGraphon::constant(1.0, 1.0));
  EXPECT_EQ(one(0.5), 1.0);
  EXPECT_EQ(one(1.0), 0.0);
  const auto zero = degree_profile(StepGraphon::zero({1.0}));
  EXPECT_EQ(zero(0.0), 0.0);
  const auto d = block_degrees(two_block());
  EXPECT_DOUBLE_EQ(d[0], 0.9);
  EXPECT_DOUBLE_EQ(d[1], 0.4);
  const auto p = degree_profile(two_block());
  EXPECT_EQ(p(0.3), 3.0);
  EXPECT_EQ(p(0.5), 1.0);
}

TEST(DegreeProfile, NonincreasingAndLayerCake) {
  std::mt19937_64 eng(5);
  for (int rep = 0; rep < 50; ++rep) {
    const auto w = oracle::random_step(eng, 1 + rep % 6, 0.0, 1.0, false);
    const auto p = degree_profile(w);
    double prev = INFINITY;
    for (double lam = 0.0; lam < 8.0; lam += 0.01) {
      ASSERT_LE(p(lam), prev);
      prev = p(lam);
    }
    EXPECT_NEAR(p.layer_cake_integral(), l1_norm(w), 1e-12);
  }
}

TEST(DegreeProfile, AnalyticMatchesStepForBlocks) {
  const auto w = infinite_block();
  const auto p = degree_profile(w);
  EXPECT_NEAR(p(0.5), 1.0, 1e-9);
  EXPECT_NEAR(p(1.0), 0.0, 1e-9);
}

TEST(TruncateTail, Examples) {
  const auto a = truncate_tail(StepGraphon({1.0, 1.0}, {{1.0, 0.0}, {0.0, 0.0}}), 0.1);
  EXPECT_EQ(a.mass_bound, 1.0);
  EXPECT_EQ(a.residual, 0.0);

  const auto b = truncate_tail(StepGraphon({1.0, 1.0}, {{0.5, 0.1}, {0.1, 0.01}}), 0.05);
  EXPECT_EQ(b.mass_bound, 2.0);
  EXPECT_EQ(b.truncated.size(), 2u);

  const auto c = truncate_tail(StepGraphon::zero({1.0, 3.0}), 0.2);
  EXPECT_EQ(c.mass_bound, 0.0);
  EXPECT_TRUE(c.truncated.empty());
}

TEST(TruncateTail, ResidualMonotoneInEps) {
  std::mt19937_64 eng(8);
  for (int rep = 0; rep < 30; ++rep) {
    const auto w = oracle::random_step(eng, 6, 0.0, 1.0, false);
    double prev_res = INFINITY, prev_m = -1.0;
    for (double eps = 2.0; eps > 1e-4; eps *= 0.7) {
      const auto t = truncate_tail(w, eps);
      ASSERT_LE(t.residual, prev_res + 1e-15);
      ASSERT_GE(t.mass_bound, prev_m);
      ASSERT_LT(t.residual, eps);
      prev_res = t.residual;
      prev_m = t.mass_bound;
    }
  }
}

TEST(TruncateTail, AnalyticResidualBelowEps) {
  const auto w = caron_fox(200.0);
  const auto t = truncate_tail(w, 0.05, 0.5);
  EXPECT_LT(t.residual, 0.05);
  EXPECT_LE(t.mass_bound, 200.0);
  EXPECT_GT(t.mass_bound, 0.0);
}

TEST(AverageOverPartition, Examples) {
  const auto w = two_block();
  EXPECT_EQ(average_over_partition(w, BlockPartition::identity(2)), w);

  const StepGraphon diag({1.0, 1.0}, {{1.0, 0.0}, {0.0, 1.0}});
  const auto merged = average_over_partition(diag, BlockPartition::single(2));
  ASSERT_EQ(merged.size(), 1u);
  EXPECT_EQ(merged.mass(0), 2.0);
  EXPECT_DOUBLE_EQ(merged.value(0, 0), 0.5);

  EXPECT_TRUE(average_over_partition(StepGraphon::zero({1.0, 2.0}), BlockPartition::single(2)).is_zero());
}

TEST(AverageOverPartition, IntervalForm) {
  const StepGraphon diag({1.0, 1.0}, {{1.0, 0.0}, {0.0, 1.0}});
  const auto avg = average_over_partition(diag, IntervalPartition{{2.0}});
  ASSERT_EQ(avg.size(), 1u);
  EXPECT_DOUBLE_EQ(avg.value(0, 0), 0.5);
  // A cell past the support averages the zero tail.
  const auto ext = average_over_partition(diag, IntervalPartition{{2.0, 3.0}});
  ASSERT_EQ(ext.size(), 2u);
  EXPECT_EQ(ext.value(1, 1), 0.0);
}

TEST(AverageOverPartition, ZeroMassCellRejected) {
  BlockPartition p{{0, 0}, 2};
  EXPECT_THROW(average_over_partition(two_block(), p), InvalidArgument);
}

TEST(AverageOverPartition, L1Contraction) {
  std::mt19937_64 eng(21);
  std::uniform_int_distribution<std::size_t> cls(0, 2);
  for (int rep = 0; rep < 100; ++rep) {
    const auto w = oracle::random_step(eng, 6, -1.0, 1.0, false);
    BlockPartition p;
    p.classes = 3;
    for (std::size_t i = 0; i < 6; ++i) p.class_of.push_back(i < 3 ? i : cls(eng));
    EXPECT_LE(l1_norm(average_over_partition(w, p)), l1_norm(w) + 1e-12);
  }
}

TEST(Stretch, Examples) {
  EXPECT_EQ(stretch(StepGraphon::constant(1.0, 1.0)), StepGraphon::constant(1.0, 1.0));
  const auto s = stretch(StepGraphon::constant(1.0, 0.25));
  EXPECT_DOUBLE_EQ(s.mass(0), 2.0);
  EXPECT_EQ(s.value(0, 0), 0.25);
  EXPECT_DOUBLE_EQ(l1_norm(s), 1.0);
  EXPECT_TRUE(stretch(StepGraphon::zero({1.0})).is_zero());
}

TEST(Stretch, UnitNorm) {
  std::mt19937_64 eng(3);
  for (int rep = 0; rep < 200; ++rep) {
    const auto w = oracle::random_step(eng, 1 + rep % 7, 0.0, 1.0, false);
    if (l1_norm(w) > 0.0) ASSERT_NEAR(l1_norm(stretch(w)), 1.0, 1e-12);
  }
}

TEST(FlattenToLine, InfiniteBlock) {
  const auto s = flatten_to_line(infinite_block());
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s.mass(0), 1.0);
  EXPECT_EQ(s.mass(1), 2.0);
  EXPECT_EQ(s.value(0, 0), 1.0);
  EXPECT_EQ(s.value(0, 1), 0.0);
  EXPECT_EQ(s.value(1, 1), 0.0);
  EXPECT_EQ(l1_norm(s), l1_norm(infinite_block()).value);
}

TEST(FlattenToLine, SingleBlock) {
  const auto w = std::get<AnalyticGraphon>(graphon_from_json(
      Json::parse(R"({"type":"infinite_block","intervals":[[0,2]],"probabilities":[[0.3]]})")));
  const auto s = flatten_to_line(w);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s.mass(0), 2.0);
  EXPECT_EQ(s.value(0, 0), 0.3);
}

TEST(FlattenToLine, MixedMembershipCellFormula) {
  // Two communities; components are 2-block step graphons on [0,1].
  const Json j = Json::parse(R"({"type":"mixed_membership","K":2,"components":[
    [{"type":"step","masses":[0.5,0.5],"values":[[0.8,0.2],[0.2,0.6]]},
     {"type":"step","masses":[0.5,0.5],"values":[[0.1,0.3],[0.3,0.5]]}],
    [{"type":"step","masses":[0.5,0.5],"values":[[0.1,0.3],[0.3,0.5]]},
     {"type":"step","masses":[0.5,0.5],"values":[[0.4,0.4],[0.4,0.9]]}]]})");
  const auto w = std::get<AnalyticGraphon>(graphon_from_json(j));
  const auto s = flatten_to_line(w, 3);
  ASSERT_EQ(s.size(), 6u);
  EXPECT_NEAR(l1_norm(s), l1_norm(w).value, 1e-9);
  // Independent cell formula: weights are cell centroids of the 1-simplex.
  const double wts[3] = {1.0 / 6.0, 0.5, 5.0 / 6.0};
  const double comp[2][2][2][2] = {{{{0.8, 0.2}, {0.2, 0.6}}, {{0.1, 0.3}, {0.3, 0.5}}},
                                   {{{0.1, 0.3}, {0.3, 0.5}}, {{0.4, 0.4}, {0.4, 0.9}}}};
  // Block order is (position block, weight cell); recover it from the masses.
  double total_mass = 0.0;
  for (double m : s.masses()) total_mass += m;
  EXPECT_NEAR(total_mass, 1.0, 1e-12);
  std::vector<double> seen;
  for (std::size_t i = 0; i < 6; ++i) seen.push_back(s.value(i, i));
  std::vector<double> expected;
  for (int pos = 0; pos < 2; ++pos)
    for (double x : wts) {
      const double v[2] = {x, 1.0 - x};
      double d = 0.0;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) d += v[a] * v[b] * comp[a][b][pos][pos];
      expected.push_back(d);
    }
  std::sort(seen.begin(), seen.end());
  std::sort(expected.begin(), expected.end());
  for (std::size_t i = 0; i < 6; ++i) EXPECT_NEAR(seen[i], expected[i], 1e-12);
}

TEST(FlattenToLine, CaronFoxUnsupported) { EXPECT_THROW(flatten_to_line(caron_fox(4.0)), Unsupported); }

TEST(Discretize, ConstantIsExact) {
  const auto w = std::get<AnalyticGraphon>(graphon_from_json(
      Json::parse(R"({"type":"infinite_block","intervals":[[0,1]],"probabilities":[[0.5]]})")));
  const auto d = discretize(w, 0.5);
  ASSERT_EQ(d.graphon.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) EXPECT_NEAR(d.graphon.value(i, j), 0.5, 1e-15);
  EXPECT_NEAR(d.l1_error_estimate, 0.0, 1e-15);
}

TEST(Discretize, CaronFoxErrorIsFinerGridComparison) {
  const auto w = caron_fox(4.0);
  const auto coarse = discretize(w, 0.5);
  const auto fine = discretize(w, 0.25);
  ASSERT_EQ(coarse.graphon.size(), 8u);
  ASSERT_EQ(fine.graphon.size(), 16u);
  // ||W_h - W_{h/2}||_1 recomputed from the two grids.
  double err = 0.0;
  for (std::size_t i = 0; i < 16; ++i)
    for (std::size_t j = 0; j < 16; ++j)
      err += std::abs(fine.graphon.value(i, j) - coarse.graphon.value(i / 2, j / 2)) * 0.25 * 0.25;
  EXPECT_NEAR(coarse.l1_error_estimate, err, 1e-9);
}

TEST(Discretize, ZeroGraphon) {
  const auto w = std::get<AnalyticGraphon>(graphon_from_json(
      Json::parse(R"({"type":"infinite_block","intervals":[[0,1]],"probabilities":[[0]]})")));
  const auto d = discretize(w, 0.5);
  EXPECT_TRUE(d.graphon.is_zero());
  EXPECT_EQ(d.l1_error_estimate, 0.0);
}

TEST(Discretize, TooFineRejected) { EXPECT_THROW(discretize(caron_fox(4.0), 1e-4), InvalidArgument); }

TEST(SpecIo, RoundTrip) {
  const std::vector<Graphon> ws{two_block(), caron_fox(6.0), infinite_block()};
  for (const auto& w : ws) {
    const Json j = graphon_to_json(w);
    EXPECT_EQ(graphon_to_json(graphon_from_json(j)), j);
  }
}

TEST(SpecIo, RejectsAsymmetricAndReportsIndex) {
  try {
    graphon_from_json(Json::parse(R"({"type":"step","masses":[1,1],"values":[[0,0.2],[0.3,0]]})"));
    FAIL();
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("(0,1)"), std::string::npos);
  }
  EXPECT_THROW(graphon_from_json(Json::parse(R"({"type":"step","masses":[1,-1],"values":[[0,0],[0,0]]})")),
               InvalidArgument);
  EXPECT_THROW(graphon_from_json(Json::parse(R"({"type":"spline"})")), InvalidArgument);
}

TEST(SpecIo, TruncationTargetsResidual) {
  const auto w = std::get<AnalyticGraphon>(graphon_from_json(Json::parse(
      R"({"type":"caron_fox","f":{"kind":"shifted_power","c":1.0,"gamma":2.0},"truncation":{"target_l1_residual":0.01}})")));
  EXPECT_LE(w.truncation_residual(), 0.01);
  EXPECT_GT(w.x_max(), 0.0);
}
