#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "graphonlab/graphonlab.hpp"

using namespace graphonlab;
using namespace graphonlab::experiments;

namespace {

ExperimentConfig small(const std::string& name, std::size_t replicas, Json params = Json::object()) {
  ExperimentConfig c = default_config(name);
  c.replicas = replicas;
  for (const auto& [k, v] : params.items()) c.params[k] = v;
  return c;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Catalog, EveryCriterionOnce) {
  std::map<int, int> seen;
  std::set<std::string> names;
  for (const auto& e : catalog()) {
    ++seen[e.criterion];
    EXPECT_TRUE(names.insert(e.name).second) << e.name;
    EXPECT_GE(e.default_replicas, 1u);
    EXPECT_FALSE(e.columns.empty());
  }
  for (int k = 1; k <= 13; ++k) EXPECT_EQ(seen[k], 1) << "criterion " << k;
}

TEST(Catalog, UnknownNames) {
  EXPECT_THROW(find_entry("no_such_experiment"), InvalidArgument);
  ExperimentConfig c;
  c.name = "no_such_experiment";
  EXPECT_THROW(run_experiment(c), InvalidArgument);
  auto bad = small("edge_growth", 2, {{"not_a_param", 1}});
  EXPECT_THROW(run_experiment(bad), InvalidArgument);
}

TEST(Catalog, DescribeMentionsColumns) {
  for (const auto& e : catalog()) {
    const std::string d = describe(e.name);
    EXPECT_NE(d.find(e.name), std::string::npos);
    for (const auto& col : e.columns) EXPECT_NE(d.find(col), std::string::npos) << e.name << " " << col;
  }
}

TEST(Config, RoundTrip) {
  ExperimentConfig c = default_config("metric_convergence");
  c.seed = 12345678901234ull;
  c.out_dir = "somewhere";
  EXPECT_EQ(config_from_json(config_to_json(c)), c);
  ExperimentConfig f;
  f.name = "edge_growth";
  f.graphon_file = "w.json";
  EXPECT_EQ(config_from_json(config_to_json(f)), f);
}

TEST(Config, Rejections) {
  EXPECT_THROW(config_from_json(Json::parse(R"({"experiment":"edge_growth","bogus":1})")), InvalidArgument);
  EXPECT_THROW(config_from_json(Json::parse(R"({"experiment":"edge_growth","replicas":-2})")), InvalidArgument);
  EXPECT_THROW(config_from_json(Json::parse(R"({"experiment":"edge_growth","params":[1]})")), InvalidArgument);
  EXPECT_THROW(config_from_json(Json::parse("[]")), InvalidArgument);
  auto zero = small("edge_growth", 1);
  zero.replicas = 0;
  EXPECT_THROW(run_experiment(zero), InvalidArgument);
}

TEST(Config, GraphonFileRelativeToConfig) {
  const auto dir = std::filesystem::temp_directory_path() / "graphonlab_cfg_test";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "w.json") << constant_graphon_json(0.25).dump();
  std::ofstream(dir / "c.json") << R"({"experiment":"edge_growth","replicas":3,"seed":9,"graphon_file":"w.json","params":{"horizon":5}})";
  const auto c = load_config((dir / "c.json").string());
  EXPECT_EQ(std::filesystem::path(c.graphon_file), dir / "w.json");
  const auto r = run_experiment(c);
  EXPECT_EQ(r.records.size(), 3u);
  std::filesystem::remove_all(dir);
}

TEST(Run, DeterministicBytes) {
  for (const char* name : {"edge_growth", "cutnorm_oracle", "metric_axioms", "k2_identity"}) {
    const auto c = small(name, 4, std::string(name) == "k2_identity" ? Json{{"graphs", 10}, {"graphons", 5}} : Json::object());
    const auto a = run_experiment(c);
    const auto b = run_experiment(c);
    EXPECT_EQ(render_csv(a), render_csv(b)) << name;
    EXPECT_EQ(render_json(a).dump(), render_json(b).dump()) << name;
    auto other = c;
    other.seed = c.seed + 1;
    if (std::string(name) != "k2_identity") EXPECT_NE(render_csv(run_experiment(other)), render_csv(a)) << name;
  }
}

TEST(Run, AggregatesRecomputed) {
  const auto r = run_experiment(small("edge_growth", 17, {{"horizon", 8.0}}));
  ASSERT_EQ(r.records.size(), 17u);
  for (const auto& a : r.aggregates) {
    std::vector<double> xs;
    for (const auto& rec : r.records)
      if (rec.group == a.group) xs.push_back(rec.get(a.metric));
    ASSERT_EQ(a.count, xs.size());
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    var /= static_cast<double>(xs.size() - 1);
    std::sort(xs.begin(), xs.end());
    const double med = (xs[(xs.size() - 1) / 2] + xs[xs.size() / 2]) / 2.0;
    EXPECT_NEAR(a.mean, mean, 1e-12 * std::max(1.0, std::abs(mean)));
    EXPECT_NEAR(a.median, med, 1e-12 * std::max(1.0, std::abs(med)));
    EXPECT_NEAR(a.std_error, std::sqrt(var / static_cast<double>(xs.size())), 1e-12 * std::max(1.0, mean));
  }
}

TEST(Run, EdgeCountMatchesDirectSampling) {
  const auto c = small("edge_growth", 5, {{"horizon", 6.0}});
  const auto r = run_experiment(c);
  const Graphon w = graphon_from_json(c.graphon);
  for (const auto& rec : r.records) {
    const auto trace = sampling::sample_graphon_process(w, 6.0, replica_seed(c.seed, 0, rec.replica), false);
    EXPECT_EQ(rec.get("edges"), static_cast<double>(sampling::snapshot_at(trace, 6.0, false).num_edges()));
  }
}

TEST(Run, ZeroGraphonDensities) {
  auto c = small("density_convergence", 5, {{"horizon", 10.0}});
  c.graphon = constant_graphon_json(0.0);
  const auto r = run_experiment(c);
  for (const auto& rec : r.records) {
    EXPECT_EQ(rec.get("edges"), 0.0);
    EXPECT_EQ(rec.get("h_inj"), 0.0);
  }
  EXPECT_TRUE(r.passed());
}

TEST(Report, JsonRoundTrip) {
  for (const char* name : {"edge_growth", "bounded_degree_null", "tail_dichotomy"}) {
    const auto r = run_experiment(small(name, 2, std::string(name) == "tail_dichotomy" ? Json{{"sizes", {200, 400}}} : Json::object()));
    const auto back = report_from_json(render_json(r));
    EXPECT_EQ(back, r) << name;
    EXPECT_EQ(render_csv(back), render_csv(r));
  }
}

TEST(Report, NonFiniteValuesSurvive) {
  ExperimentReport r;
  r.experiment = "synthetic";
  r.config = Json::object();
  r.environment = Json::object();
  r.records = {Record{0, "g", {{"x", INFINITY}, {"y", 1.5}}}, Record{1, "g", {{"x", 2.0}, {"y", -0.5}}}};
  r.aggregates = compute_aggregates(r.records);
  r.checks = {make_check("x finite", INFINITY, 0, 1)};
  EXPECT_FALSE(r.passed());
  const auto back = report_from_json(Json::parse(render_json(r).dump()));
  EXPECT_TRUE(std::isinf(back.records[0].get("x")));
  EXPECT_EQ(back.records[1].get("y"), -0.5);
  EXPECT_NE(render_csv(r).find("inf"), std::string::npos);
}

TEST(Report, CsvShape) {
  const auto r = run_experiment(small("cutnorm_oracle", 6));
  const std::string csv = render_csv(r);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "replica,group,blocks,exact,brute,abs_diff");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 5);
  }
  EXPECT_EQ(rows, 6u);
}

TEST(Report, SvgShowsAggregatesAndChecks) {
  const auto r = run_experiment(small("avg_degree_growth", 3, {{"horizons", {5, 10}}}));
  const std::string svg = render_svg(r);
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  for (const auto& a : r.aggregates)
    if (a.metric == r.chart_metric) {
      EXPECT_NE(svg.find(format_number(a.mean)), std::string::npos);
      EXPECT_NE(svg.find(a.group), std::string::npos);
    }
  for (const auto& c : r.checks) EXPECT_NE(svg.find(c.passed ? "PASS" : "FAIL"), std::string::npos);
}

TEST(Report, WriteReportFiles) {
  const auto dir = std::filesystem::temp_directory_path() / "graphonlab_report_test";
  std::filesystem::remove_all(dir);
  const auto r = run_experiment(small("permutation_zero", 2, {{"blocks", 4}}));
  const auto paths = write_report(r, dir.string());
  ASSERT_EQ(paths.size(), 3u);
  EXPECT_EQ(slurp(paths[0]), render_csv(r));
  EXPECT_EQ(report_from_json(Json::parse(slurp(paths[1]))), r);
  EXPECT_EQ(slurp(paths[2]), render_svg(r));
  std::filesystem::remove_all(dir);
}

TEST(Harness, ParallelMapOrderAndErrors) {
  const auto v = parallel_map(100, [](std::size_t i) { return i * i; }, 4);
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_EQ(v[i], i * i);
  EXPECT_THROW(parallel_map(10, [](std::size_t i) -> int {
                 if (i == 7) throw InvalidArgument("x");
                 return 0;
               }, 3),
               InvalidArgument);
}

TEST(Harness, ReplicaSeedsDistinct) {
  std::set<std::uint64_t> s;
  for (std::size_t g = 0; g < 4; ++g)
    for (std::size_t r = 0; r < 250; ++r) s.insert(replica_seed(1, g, r));
  EXPECT_EQ(s.size(), 1000u);
}

TEST(Harness, ParamValidation) {
  EXPECT_THROW(run_experiment(small("cutnorm_oracle", 1, {{"max_blocks", 12}})), InvalidArgument);
  EXPECT_THROW(run_experiment(small("permutation_zero", 1, {{"blocks", 9}})), InvalidArgument);
}
