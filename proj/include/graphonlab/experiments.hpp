#pragma once

// Experiment catalog and runner. Each entry reads an ExperimentConfig,
// runs seeded replicas in a worker pool, and returns a report whose checks
// are decided from the recorded numbers only.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <functional>
#include <limits>
#include <mutex>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "graphonlab/canonical.hpp"
#include "graphonlab/cut_distance.hpp"
#include "graphonlab/cut_norm.hpp"
#include "graphonlab/example_graphs.hpp"
#include "graphonlab/graphon.hpp"
#include "graphonlab/homomorphisms.hpp"
#include "graphonlab/regularity.hpp"
#include "graphonlab/report.hpp"
#include "graphonlab/rng.hpp"
#include "graphonlab/sampling.hpp"
#include "graphonlab/spec_io.hpp"

namespace graphonlab::experiments {

struct ExperimentConfig {
  std::string name;
  std::size_t replicas = 1;
  std::uint64_t seed = 0;
  Json graphon;               // inline graphon spec, or null
  std::string graphon_file;   // used when graphon is null; relative to the config file
  Json params = Json::object();
  std::string out_dir;
  bool operator==(const ExperimentConfig&) const = default;
};

inline Json config_to_json(const ExperimentConfig& c) {
  Json j;
  j["experiment"] = c.name;
  j["replicas"] = c.replicas;
  j["seed"] = c.seed;
  if (!c.graphon.is_null()) j["graphon"] = c.graphon;
  if (!c.graphon_file.empty()) j["graphon_file"] = c.graphon_file;
  j["params"] = c.params;
  if (!c.out_dir.empty()) j["out"] = c.out_dir;
  return j;
}

inline ExperimentConfig config_from_json(const Json& j, const std::string& where = "config") {
  if (!j.is_object()) throw InvalidArgument(where + ": expected an object");
  static const std::vector<std::string> known{"experiment", "replicas", "seed", "graphon", "graphon_file", "params", "out"};
  for (const auto& [k, v] : j.items())
    if (std::find(known.begin(), known.end(), k) == known.end())
      throw InvalidArgument(where + ": unknown field \"" + k + "\"");
  ExperimentConfig c;
  try {
    if (j.contains("experiment")) c.name = j["experiment"].get<std::string>();
    if (j.contains("replicas")) {
      if (!j["replicas"].is_number_integer() || j["replicas"].get<long long>() < 0)
        throw InvalidArgument(where + ".replicas: expected a nonnegative integer");
      c.replicas = j["replicas"].get<std::size_t>();
    }
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("graphon")) c.graphon = j["graphon"];
    if (j.contains("graphon_file")) c.graphon_file = j["graphon_file"].get<std::string>();
    if (j.contains("params")) {
      if (!j["params"].is_object()) throw InvalidArgument(where + ".params: expected an object");
      c.params = j["params"];
    }
    if (j.contains("out")) c.out_dir = j["out"].get<std::string>();
  } catch (const Json::exception& e) {
    throw InvalidArgument(where + ": " + e.what());
  }
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  ExperimentConfig c = config_from_json(read_json_file(path), path);
  if (!c.graphon_file.empty() && std::filesystem::path(c.graphon_file).is_relative())
    c.graphon_file = (std::filesystem::path(path).parent_path() / c.graphon_file).string();
  return c;
}

// ---------------------------------------------------------------------------
// Plumbing

/// f(0..count-1) on a pool of threads; results in index order.
template <class F>
auto parallel_map(std::size_t count, F f, unsigned threads = 0) -> std::vector<decltype(f(std::size_t{0}))> {
  using R = decltype(f(std::size_t{0}));
  std::vector<std::optional<R>> slots(count);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < count;) {
      try {
        slots[i].emplace(f(i));
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!err) err = std::current_exception();
        next = count;
      }
    }
  };
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (err) std::rethrow_exception(err);
  std::vector<R> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

inline std::uint64_t replica_seed(std::uint64_t master, std::size_t group, std::size_t replica) {
  return rng::derive(master, rng::Tag::replica, {group, replica});
}

namespace detail {

inline const Json* param(const ExperimentConfig& c, const std::string& key) {
  if (c.params.contains(key)) return &c.params[key];
  return nullptr;
}

inline double param_double(const ExperimentConfig& c, const std::string& key, double def) {
  const Json* j = param(c, key);
  if (!j) return def;
  if (!j->is_number()) throw InvalidArgument("params." + key + ": expected a number");
  return j->get<double>();
}

inline std::size_t param_size(const ExperimentConfig& c, const std::string& key, std::size_t def) {
  const Json* j = param(c, key);
  if (!j) return def;
  if (!j->is_number_integer() || j->get<long long>() < 0)
    throw InvalidArgument("params." + key + ": expected a nonnegative integer");
  return j->get<std::size_t>();
}

inline std::string param_string(const ExperimentConfig& c, const std::string& key, const std::string& def) {
  const Json* j = param(c, key);
  if (!j) return def;
  if (!j->is_string()) throw InvalidArgument("params." + key + ": expected a string");
  return j->get<std::string>();
}

inline std::vector<double> param_list(const ExperimentConfig& c, const std::string& key, std::vector<double> def) {
  const Json* j = param(c, key);
  if (!j) return def;
  return graphonlab::detail::number_list(*j, "params." + key);
}

inline const StepGraphon& need_step(const Graphon& w, const std::string& who) {
  if (const auto* s = std::get_if<StepGraphon>(&w)) return *s;
  throw Unsupported(who + " needs a step graphon");
}

inline std::string group_label(const std::string& key, double v) { return key + "=" + detail::short_number(v); }

inline double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline std::vector<double> column(const std::vector<Record>& recs, const std::string& group, const std::string& key) {
  std::vector<double> out;
  for (const auto& r : recs)
    if (r.group == group) out.push_back(r.get(key));
  return out;
}

inline double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline StepGraphon random_step(rng::Engine& eng, std::size_t n, double lo, double hi, bool equal_mass) {
  std::uniform_real_distribution<double> val(lo, hi), mass(0.2, 1.0);
  Matrix<double> a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) a(i, j) = a(j, i) = val(eng);
  std::vector<double> m(n);
  for (auto& x : m) x = equal_mass ? 1.0 / static_cast<double>(n) : mass(eng);
  return StepGraphon(std::move(m), std::move(a), false);
}

}  // namespace detail

struct RunOutput {
  std::vector<Record> records;
  std::vector<Check> checks;
  std::string chart_metric;
  std::string chart_stat = "mean";
};

using Runner = std::function<RunOutput(const ExperimentConfig&, const Graphon&)>;

struct CatalogEntry {
  std::string name;
  int criterion = 0;  // acceptance criterion number, 0 if none
  std::string summary;
  Json default_graphon;  // null when the experiment draws its own graphons
  std::size_t default_replicas = 1;
  Json default_params = Json::object();
  std::vector<std::string> columns;  // CSV value columns
  Runner run;
};

namespace runners {

using detail::column;
using detail::mean_of;

inline RunOutput edge_growth(const ExperimentConfig& c, const Graphon& w) {
  const double t = detail::param_double(c, "horizon", 30.0);
  const double tol = detail::param_double(c, "tolerance", 0.05);
  const double l1 = l1_norm(w).value;
  RunOutput out;
  out.records = parallel_map(c.replicas, [&](std::size_t r) {
    const auto trace = sampling::sample_graphon_process(w, t, replica_seed(c.seed, 0, r), false);
    const double e = static_cast<double>(trace.edges.size());
    return Record{r, detail::group_label("T", t), {{"edges", e}, {"normalized_edges", 2.0 * e / (t * t)}}};
  });
  const double mean = mean_of(column(out.records, detail::group_label("T", t), "normalized_edges"));
  if (l1 > 0.0)
    out.checks.push_back(make_check("mean 2|E|/T^2 relative to ||W||_1", mean / l1, 1.0 - tol, 1.0 + tol,
                                    "||W||_1 = " + format_number(l1)));
  else
    out.checks.push_back(make_check("mean 2|E|/T^2 for a zero graphon", mean, 0.0, 0.0));
  out.chart_metric = "normalized_edges";
  return out;
}

inline RunOutput density_convergence(const ExperimentConfig& c, const Graphon& w) {
  const double t = detail::param_double(c, "horizon", 60.0);
  const double tol = detail::param_double(c, "tolerance", 0.1);
  const hom::MotifGraph f = hom::parse_motif(detail::param_string(c, "motif", "triangle"));
  const double l1 = l1_norm(w).value;
  const double target = l1 > 0.0 ? hom::h_analytic(f, w, {200000, c.seed}).value : 0.0;
  const std::string g = detail::group_label("T", t);
  RunOutput out;
  out.records = parallel_map(c.replicas, [&](std::size_t r) {
    const auto trace = sampling::sample_graphon_process(w, t, replica_seed(c.seed, 0, r), false);
    const SampledGraph gr = sampling::snapshot_at(trace, t, false);
    double h_inj = 0.0, inj = 0.0;
    if (gr.num_edges() > 0) {
      inj = static_cast<double>(hom::count_injective(f, gr));
      h_inj = inj / hom::density_denominator(f.size(), gr.num_edges());
    }
    return Record{r, g,
                  {{"edges", static_cast<double>(gr.num_edges())},
                   {"inj", inj},
                   {"inj_over_t_k", inj / std::pow(t, static_cast<double>(f.size()))},
                   {"h_inj", h_inj}}};
  });
  const auto h = column(out.records, g, "h_inj");
  if (target > 0.0 && std::isfinite(target))
    out.checks.push_back(make_check("mean h_inj(F, G_T) relative to h(F, W)", mean_of(h) / target, 1.0 - tol, 1.0 + tol,
                                    "h(F, W) = " + format_number(target)));
  else
    out.checks.push_back(make_check("max |h_inj| for a zero graphon", detail::max_abs(h), 0.0, 0.0));
  out.chart_metric = "h_inj";
  return out;
}

// Brute force over all row and column subsets.
inline double subset_cut_norm(const Matrix<double>& k) {
  const std::size_t n = k.rows();
  double best = 0.0;
  for (std::uint64_t u = 0; u < (std::uint64_t{1} << n); ++u)
    for (std::uint64_t v = 0; v < (std::uint64_t{1} << n); ++v) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        if (u >> i & 1u)
          for (std::size_t j = 0; j < n; ++j)
            if (v >> j & 1u) s += k(i, j);
      best = std::max(best, std::abs(s));
    }
  return best;
}

inline RunOutput cutnorm_oracle(const ExperimentConfig& c, const Graphon&) {
  const std::size_t max_blocks = detail::param_size(c, "max_blocks", 6);
  graphonlab::detail::require(max_blocks >= 1 && max_blocks <= 10, "params.max_blocks must lie in [1, 10]");
  RunOutput out;
  out.records = parallel_map(c.replicas, [&](std::size_t r) {
    auto eng = rng::stream(replica_seed(c.seed, 0, r), rng::Tag::generic);
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, max_blocks)(eng);
    const StepGraphon w = detail::random_step(eng, n, -1.0, 1.0, false);
    const double exact = metrics::cut_norm(w).value;
    const double brute = subset_cut_norm(metrics::block_integrals(w));
    return Record{r, "random", {{"blocks", static_cast<double>(n)}, {"exact", exact}, {"brute", brute},
                                {"abs_diff", std::abs(exact - brute)}}};
  });
  out.checks.push_back(make_check("max |exact - brute force|", detail::max_abs(column(out.records, "random", "abs_diff")),
                                  0.0, 1e-12));
  out.chart_metric = "abs_diff";
  return out;
}

inline RunOutput permutation_zero(const ExperimentConfig& c, const Graphon&) {
  const std::size_t n = detail::param_size(c, "blocks", 7);
  graphonlab::detail::require(n >= 1 && n <= metrics::exact_permutation_limit, "params.blocks must lie in [1, 8]");
  RunOutput out;
  out.records = parallel_map(c.replicas, [&](std::size_t r) {
    auto eng = rng::stream(replica_seed(c.seed, 0, r), rng::Tag::generic);
    const StepGraphon a = detail::random_step(eng, n, 0.0, 1.0, true);
    std::vector<std::size_t> pi(n);
    std::iota(pi.begin(), pi.end(), std::size_t{0});
    std::shuffle(pi.begin(), pi.end(), eng);
    const StepGraphon b = metrics::permute_blocks(a, pi);
    const auto d = metrics::cut_distance(a, b);
    std::vector<std::size_t> inv(n);
    for (std::size_t i = 0; i < n; ++i) inv[pi[i]] = i;
    return Record{r, "shuffled",
                  {{"distance", d.value}, {"witness_inverts", d.witness == inv ? 1.0 : 0.0},
                   {"exact", d.mode == "exact" ? 1.0 : 0.0}}};
  });
  out.checks.push_back(make_check("max distance to shuffled copy", detail::max_abs(column(out.records, "shuffled", "distance")),
                                  0.0, 1e-12));
  const auto inv = column(out.records, "shuffled", "witness_inverts");
  out.checks.push_back(make_check("witnesses inverting the shuffle", *std::min_element(inv.begin(), inv.end()), 1.0, 1.0));
  out.chart_metric = "distance";
  return out;
}

inline RunOutput metric_convergence(const ExperimentConfig& c, const Graphon& w) {
  const StepGraphon& ws = detail::need_step(w, "metric_convergence");
  const auto horizons = detail::param_list(c, "horizons", {10, 20, 40});
  const double final_max = detail::param_double(c, "final_median_max", 0.1);
  const std::string align = detail::param_string(c, "alignment", "feature_oracle");
  const auto alignment = align == "degree_sort" ? metrics::Alignment::degree_sort : metrics::Alignment::feature_oracle;
  if (align != "feature_oracle" && align != "degree_sort")
    throw InvalidArgument("params.alignment must be feature_oracle or degree_sort");
  graphonlab::detail::require(!horizons.empty(), "params.horizons must not be empty");
  RunOutput out;
  out.records = parallel_map(horizons.size() * c.replicas, [&](std::size_t k) {
    const std::size_t gi = k / c.replicas, r = k % c.replicas;
    const double t = horizons[gi];
    const std::uint64_t s = replica_seed(c.seed, gi, r);
    const auto trace = sampling::sample_graphon_process(ws, t, s, false);
    const auto est = metrics::graph_graphon_distance_estimate(trace, ws, alignment, s);
    return Record{r, detail::group_label("T", t),
                  {{"distance", est.value},
                   {"averaging_residual_lower", est.averaging_residual_lower},
                   {"vertices", static_cast<double>(est.vertices)},
                   {"edges", static_cast<double>(est.edges)}}};
  });
  std::vector<double> med;
  for (double t : horizons) med.push_back(median_of(column(out.records, detail::group_label("T", t), "distance")));
  for (std::size_t i = 1; i < med.size(); ++i)
    out.checks.push_back(make_check("median ratio " + detail::group_label("T", horizons[i]) + " / " +
                                        detail::group_label("T", horizons[i - 1]),
                                    med[i - 1] > 0.0 ? med[i] / med[i - 1] : 1.0, 0.0, std::nextafter(1.0, 0.0)));
  out.checks.push_back(make_check("final median distance", med.back(), 0.0, std::nextafter(final_max, 0.0)));
  out.chart_metric = "distance";
  out.chart_stat = "median";
  return out;
}

inline RunOutput sequential_dichotomy(const ExperimentConfig& c, const Graphon& w) {
  const std::size_t n_small = detail::param_size(c, "n_small", 100);
  const std::size_t n_large = detail::param_size(c, "n_large", 1000);
  const double growth = detail::param_double(c, "linear_growth_min", 2.0);
  const double change = detail::param_double(c, "exponential_change_max", 0.2);
  graphonlab::detail::require(n_small >= 1 && n_large > n_small, "need 1 <= n_small < n_large");
  const std::vector<std::string> schedules{"linear", "exponential"};
  RunOutput out;
  out.records = parallel_map(schedules.size() * c.replicas, [&](std::size_t k) {
    const std::size_t gi = k / c.replicas, r = k % c.replicas;
    const auto p = sampling::sample_sequential(w, sampling::Schedule::parse(schedules[gi]), n_large,
                                               replica_seed(c.seed, gi, r));
    return Record{r, schedules[gi],
                  {{"edges_small", static_cast<double>(p.num_edges(n_small))},
                   {"edges_large", static_cast<double>(p.num_edges(n_large))}}};
  });
  const double ls = mean_of(column(out.records, "linear", "edges_small"));
  const double ll = mean_of(column(out.records, "linear", "edges_large"));
  const double es = mean_of(column(out.records, "exponential", "edges_small"));
  const double el = mean_of(column(out.records, "exponential", "edges_large"));
  out.checks.push_back(make_check("linear schedule: mean |E(G_large)| / mean |E(G_small)|", ls > 0.0 ? ll / ls : 0.0,
                                  growth, std::numeric_limits<double>::infinity(),
                                  "means " + format_number(ls) + " -> " + format_number(ll)));
  out.checks.push_back(make_check("exponential schedule: |change in mean |E||", std::abs(el - es), 0.0,
                                  std::nextafter(change, 0.0), "means " + format_number(es) + " -> " + format_number(el)));
  out.chart_metric = "edges_large";
  return out;
}

inline RunOutput tail_dichotomy(const ExperimentConfig& c, const Graphon&) {
  const double alpha = detail::param_double(c, "alpha", 0.5);
  const double eps = detail::param_double(c, "eps", 0.1);
  const double growth = detail::param_double(c, "er_growth_min", 1.5);
  const auto sizes = detail::param_list(c, "sizes", {1000, 10000});
  graphonlab::detail::require(sizes.size() >= 2, "params.sizes needs at least two sizes");
  const double inf = std::numeric_limits<double>::infinity();
  RunOutput out;
  std::vector<SampledGraph> cliques;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    cliques.push_back(graphs::clique_plus_isolated(static_cast<std::size_t>(sizes[i]), alpha));
    const auto m = regularity::required_m(cliques.back(), eps);
    out.records.push_back({0, "clique " + detail::group_label("n", sizes[i]),
                           {{"edges", static_cast<double>(cliques.back().num_edges())}, {"required_m", m.value_or(inf)}}});
  }
  auto er = parallel_map(sizes.size() * c.replicas, [&](std::size_t k) {
    const std::size_t gi = k / c.replicas, r = k % c.replicas;
    const auto g = graphs::er_example1(static_cast<std::size_t>(sizes[gi]), alpha, replica_seed(c.seed, gi, r));
    const auto m = regularity::required_m(g, eps);
    return Record{r, "er " + detail::group_label("n", sizes[gi]),
                  {{"edges", static_cast<double>(g.num_edges())}, {"required_m", m.value_or(inf)}}};
  });
  out.records.insert(out.records.end(), er.begin(), er.end());
  const auto seq = regularity::sequence_tail_regularity(cliques, eps);
  const auto m0 = seq.per_graph.front().value_or(inf), m1 = seq.per_graph.back().value_or(inf);
  out.checks.push_back(make_check("clique family: grid M ratio largest / smallest n", seq.regular ? m1 / m0 : inf, 1.0, 1.0,
                                  "M = " + format_number(seq.m)));
  const double e0 = mean_of(column(out.records, "er " + detail::group_label("n", sizes.front()), "required_m"));
  const double e1 = mean_of(column(out.records, "er " + detail::group_label("n", sizes.back()), "required_m"));
  out.checks.push_back(make_check("ER family: mean required M ratio largest / smallest n", e1 / e0, growth, inf,
                                  "M " + format_number(e0) + " -> " + format_number(e1)));
  out.chart_metric = "required_m";
  return out;
}

inline RunOutput degree_tail(const ExperimentConfig& c, const Graphon& w) {
  const StepGraphon& ws = detail::need_step(w, "degree_tail");
  const double t = detail::param_double(c, "horizon", 50.0);
  const double lambda = detail::param_double(c, "lambda", 0.5);
  const double tol = detail::param_double(c, "tolerance", 0.1);
  graphonlab::detail::require(l1_norm(ws) > 0.0, "degree_tail needs ||W||_1 > 0");
  const double target = degree_profile(stretch(ws))(lambda);
  const std::string g = detail::group_label("T", t);
  RunOutput out;
  out.records = parallel_map(c.replicas, [&](std::size_t r) {
    const auto trace = sampling::sample_graphon_process(ws, t, replica_seed(c.seed, 0, r), false);
    const SampledGraph gr = sampling::snapshot_at(trace, t, false);
    double count = 0.0, avg = 0.0;
    if (gr.num_edges() > 0) {
      const auto st = regularity::graph_degree_stats(gr, {lambda});
      count = st.normalized_counts[0];
      avg = st.avg_degree;
    }
    return Record{r, g, {{"normalized_count", count}, {"avg_degree", avg}}};
  });
  out.checks.push_back(make_check("mean normalized tail count relative to stretched profile",
                                  target > 0.0 ? mean_of(column(out.records, g, "normalized_count")) / target : 0.0,
                                  1.0 - tol, 1.0 + tol, "target " + format_number(target)));
  out.chart_metric = "normalized_count";
  return out;
}

// Number of maps from a 3-vertex path into G preserving adjacency, by brute force.
inline double brute_path3_hom(const SampledGraph& g) {
  const std::size_t n = g.num_vertices();
  double c = 0.0;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t d = 0; d < n; ++d)
        if (g.has_edge(a, b) && g.has_edge(b, d)) c += 1.0;
  return c;
}

inline RunOutput bounded_degree_null(const ExperimentConfig& c, const Graphon&) {
  const std::size_t n = detail::param_size(c, "n", 10000);
  const std::size_t small = detail::param_size(c, "brute_n", 6);
  const double h_max = detail::param_double(c, "h_max", 0.02);
  const auto p3 = hom::path_motif(3);
  RunOutput out;
  for (std::size_t m : {small, n}) {
    const SampledGraph g = graphs::cycle_graph(m);
    const auto d = hom::rescaled_density(p3, g);
    const double md = static_cast<double>(m);
    const double closed = 4.0 * md / std::pow(2.0 * md, 1.5);
    Record rec{0, detail::group_label("n", md),
               {{"hom", static_cast<double>(d.hom)}, {"h", d.h}, {"closed_form", closed}, {"abs_diff", std::abs(d.h - closed)}}};
    if (m == small) rec.values.emplace_back("brute_hom", brute_path3_hom(g));
    out.records.push_back(std::move(rec));
  }
  const Record& big = out.records.back();
  const Record& little = out.records.front();
  out.checks.push_back(make_check("|h(P3, C_n) - 4n/(2n)^1.5|", big.get("abs_diff"), 0.0, 1e-9));
  out.checks.push_back(make_check("h(P3, C_n)", big.get("h"), 0.0, std::nextafter(h_max, 0.0)));
  out.checks.push_back(make_check("|hom - brute force| on the small cycle", std::abs(little.get("hom") - little.get("brute_hom")),
                                  0.0, 0.0));
  out.chart_metric = "h";
  return out;
}

inline RunOutput k2_identity(const ExperimentConfig& c, const Graphon&) {
  const std::size_t n_graphs = detail::param_size(c, "graphs", 100);
  const std::size_t n_graphons = detail::param_size(c, "graphons", 50);
  const auto k2 = hom::parse_motif("edge");
  RunOutput out;
  auto recs = parallel_map(n_graphs + n_graphons, [&](std::size_t k) {
    auto eng = rng::stream(replica_seed(c.seed, k < n_graphs ? 0 : 1, k), rng::Tag::generic);
    if (k < n_graphs) {
      const std::size_t n = std::uniform_int_distribution<std::size_t>(2, 40)(eng);
      const double p = std::uniform_real_distribution<double>(0.05, 1.0)(eng);
      SampledGraph g = graphs::erdos_renyi(n, p, eng());
      if (g.num_edges() == 0) g = SampledGraph(n, {{0, 1}});
      return Record{k, "graphs", {{"h", hom::rescaled_density(k2, g).h}, {"abs_dev", 0.0}}};
    }
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 6)(eng);
    StepGraphon w = detail::random_step(eng, n, 0.0, 1.0, false);
    return Record{k - n_graphs, "graphons", {{"h", hom::h_analytic(k2, w).value}, {"abs_dev", 0.0}}};
  });
  for (auto& r : recs) r.values[1].second = std::abs(r.values[0].second - 1.0);
  out.records = std::move(recs);
  out.checks.push_back(make_check("graphs: max |h(K2, G) - 1|", detail::max_abs(column(out.records, "graphs", "abs_dev")), 0.0, 0.0));
  out.checks.push_back(make_check("graphons: max |h(K2, W) - 1|", detail::max_abs(column(out.records, "graphons", "abs_dev")),
                                  0.0, 1e-9));
  out.chart_metric = "h";
  return out;
}

// Two-sample permutation test on box-count vectors. The statistic sums the
// squared standardized mean differences over features.
inline double two_sample_statistic(const std::vector<std::vector<double>>& x, const std::vector<char>& in_a) {
  const std::size_t f = x.front().size();
  double stat = 0.0;
  for (std::size_t k = 0; k < f; ++k) {
    double sa = 0, sb = 0, qa = 0, qb = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double v = x[i][k];
      if (in_a[i]) {
        sa += v;
        qa += v * v;
        na += 1;
      } else {
        sb += v;
        qb += v * v;
        nb += 1;
      }
    }
    const double ma = sa / na, mb = sb / nb;
    const double va = std::max(0.0, (qa - na * ma * ma) / (na - 1)), vb = std::max(0.0, (qb - nb * mb * mb) / (nb - 1));
    const double den = va / na + vb / nb;
    if (den > 0.0) stat += (ma - mb) * (ma - mb) / den;
  }
  return stat;
}

inline double permutation_p_value(const std::vector<std::vector<double>>& x, std::size_t n_a, std::size_t resamples,
                                  std::uint64_t seed) {
  std::vector<char> lab(x.size(), 0);
  for (std::size_t i = 0; i < n_a; ++i) lab[i] = 1;
  const double obs = two_sample_statistic(x, lab);
  auto eng = rng::stream(seed, rng::Tag::generic, {0x7065726dULL});
  std::size_t ge = 0;
  for (std::size_t s = 0; s < resamples; ++s) {
    std::shuffle(lab.begin(), lab.end(), eng);
    if (two_sample_statistic(x, lab) >= obs) ++ge;
  }
  return static_cast<double>(1 + ge) / static_cast<double>(1 + resamples);
}

inline RunOutput exchangeability(const ExperimentConfig& c, const Graphon& w) {
  const double t = detail::param_double(c, "horizon", 40.0);
  const std::size_t b = detail::param_size(c, "bins", 8);
  const std::size_t n_perm = detail::param_size(c, "permutations", 3);
  const std::size_t resamples = detail::param_size(c, "resamples", 2000);
  const double level = detail::param_double(c, "level", 0.01);
  const double p_hi = detail::param_double(c, "control_p_early", 0.9);
  const double p_lo = detail::param_double(c, "control_p_late", 0.1);
  graphonlab::detail::require(c.replicas >= 4, "exchangeability needs at least 4 replicas");
  graphonlab::detail::require(b >= 2, "params.bins must be at least 2");
  const double h = t / static_cast<double>(b);
  const std::vector<std::string> arms{"process", "control"};
  // Box counts per (arm, replica).
  auto counts = parallel_map(arms.size() * c.replicas, [&](std::size_t k) {
    const std::size_t gi = k / c.replicas, r = k % c.replicas;
    const std::uint64_t s = replica_seed(c.seed, gi, r);
    sampling::ProcessTrace trace;
    if (gi == 0) {
      trace = sampling::sample_graphon_process(w, t, s, false);
    } else {
      trace.graphon = w;
      trace.horizon = t;
      trace.seed = s;
      trace.vertices = sampling::sample_vertices(w, t, s);
      trace.edges = sampling::sample_edges(trace.vertices, s, [&](std::size_t i, std::size_t j) {
        return std::max(trace.vertices[i].birth, trace.vertices[j].birth) < t / 2.0 ? p_hi : p_lo;
      });
    }
    return std::make_pair(sampling::xi_box_counts(trace, h, t), static_cast<double>(trace.edges.size()));
  });
  RunOutput out;
  for (std::size_t k = 0; k < counts.size(); ++k)
    out.records.push_back({k % c.replicas, arms[k / c.replicas], {{"edges", counts[k].second}}});
  const std::size_t half = c.replicas / 2;
  for (std::size_t p = 0; p < n_perm; ++p) {
    auto eng = rng::stream(c.seed, rng::Tag::generic, {0x73696761ULL, p});
    std::vector<std::size_t> sigma(b);
    std::iota(sigma.begin(), sigma.end(), std::size_t{0});
    std::shuffle(sigma.begin(), sigma.end(), eng);
    std::string sig;
    for (std::size_t s : sigma) sig += (sig.empty() ? "" : " ") + std::to_string(s);
    for (std::size_t a = 0; a < arms.size(); ++a) {
      // First half raw, second half permuted by sigma; off-diagonal upper entries as features.
      std::vector<std::vector<double>> x;
      for (std::size_t r = 0; r < c.replicas; ++r) {
        const auto& m = counts[a * c.replicas + r].first;
        std::vector<double> v;
        for (std::size_t i = 0; i < b; ++i)
          for (std::size_t j = i + 1; j < b; ++j)
            v.push_back(static_cast<double>(r < half ? m(i, j) : m(sigma[i], sigma[j])));
        x.push_back(std::move(v));
      }
      const double pv = permutation_p_value(x, half, resamples, rng::derive(c.seed, rng::Tag::generic, {a, p}));
      if (a == 0)
        out.checks.push_back(make_check(arms[a] + " p-value, sigma " + std::to_string(p), pv, level, 1.0,
                                        "not rejected at level " + format_number(level) + "; sigma = [" + sig + "]"));
      else
        out.checks.push_back(make_check(arms[a] + " p-value, sigma " + std::to_string(p), pv, 0.0,
                                        std::nextafter(level, 0.0),
                                        "rejected at level " + format_number(level) + "; sigma = [" + sig + "]"));
    }
  }
  out.chart_metric = "edges";
  return out;
}

inline RunOutput metric_axioms(const ExperimentConfig& c, const Graphon&) {
  const std::size_t max_blocks = detail::param_size(c, "max_blocks", 6);
  graphonlab::detail::require(max_blocks >= 1 && max_blocks <= metrics::exact_permutation_limit,
                              "params.max_blocks must lie in [1, 8]");
  RunOutput out;
  out.records = parallel_map(c.replicas, [&](std::size_t r) {
    auto eng = rng::stream(replica_seed(c.seed, 0, r), rng::Tag::generic);
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, max_blocks)(eng);
    std::vector<StepGraphon> w;
    for (int i = 0; i < 3; ++i) w.push_back(detail::random_step(eng, n, 0.0, 1.0, true));
    double d[3][3];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) d[i][j] = i == j ? 0.0 : metrics::cut_distance(w[i], w[j]).value;
    double sym = 0.0, tri = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        sym = std::max(sym, std::abs(d[i][j] - d[j][i]));
        for (int k = 0; k < 3; ++k) tri = std::max(tri, d[i][k] - d[i][j] - d[j][k]);
      }
    return Record{r, "triples", {{"blocks", static_cast<double>(n)}, {"d01", d[0][1]}, {"d12", d[1][2]},
                                 {"d02", d[0][2]}, {"symmetry_error", sym}, {"triangle_excess", tri}}};
  });
  const auto tri = column(out.records, "triples", "triangle_excess");
  out.checks.push_back(make_check("max symmetry error", detail::max_abs(column(out.records, "triples", "symmetry_error")),
                                  0.0, 1e-12));
  out.checks.push_back(make_check("max triangle excess", *std::max_element(tri.begin(), tri.end()),
                                  -std::numeric_limits<double>::infinity(), 1e-9));
  out.chart_metric = "d01";
  return out;
}

/// Cut norm of W - W~ under the coupling that pairs each block of W with the
/// matching part of the inflated block and the extra mass with W's zero tail.
inline double inflation_coupling_cut(const StepGraphon& w, const std::vector<double>& inflated) {
  const std::size_t n = w.size();
  std::vector<double> mass(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    mass[i] = w.mass(i);
    mass[n + i] = inflated[i] - w.mass(i);
  }
  Matrix<double> k(2 * n, 2 * n, 0.0);
  for (std::size_t i = 0; i < 2 * n; ++i)
    for (std::size_t j = 0; j < 2 * n; ++j)
      if (i >= n || j >= n) k(i, j) = -w.value(i % n, j % n) * mass[i] * mass[j];
  return metrics::cut_norm_matrix(k, 2 * n <= metrics::exact_cut_norm_limit ? metrics::CutNormMode::exact
                                                                             : metrics::CutNormMode::heuristic)
      .value;
}

inline RunOutput perturbation_bound(const ExperimentConfig& c, const Graphon&) {
  const auto eps_list = detail::param_list(c, "eps", {0.01, 0.05});
  const std::size_t max_blocks = detail::param_size(c, "max_blocks", 6);
  graphonlab::detail::require(max_blocks >= 1 && 2 * max_blocks <= metrics::exact_cut_norm_limit,
                              "params.max_blocks must lie in [1, 13]");
  RunOutput out;
  out.records = parallel_map(eps_list.size() * c.replicas, [&](std::size_t k) {
    const std::size_t gi = k / c.replicas, r = k % c.replicas;
    const double eps = eps_list[gi];
    graphonlab::detail::require(eps >= 0.0, "params.eps must be nonnegative");
    // Same graphon for every eps: the stream depends on the replica only.
    auto eng = rng::stream(replica_seed(c.seed, 0, r), rng::Tag::generic);
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, max_blocks)(eng);
    const StepGraphon w = detail::random_step(eng, n, 0.0, 1.0, false);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> inflated(n);
    for (std::size_t i = 0; i < n; ++i) inflated[i] = w.mass(i) * (1.0 + eps * u(eng));
    const double dist = inflation_coupling_cut(w, inflated);
    const double bound = 3.0 * eps * l1_norm(w);
    return Record{r, detail::group_label("eps", eps),
                  {{"distance_upper", dist}, {"bound", bound}, {"ratio", bound > 0.0 ? dist / bound : 0.0}}};
  });
  for (double eps : eps_list) {
    const auto ratio = column(out.records, detail::group_label("eps", eps), "ratio");
    out.checks.push_back(make_check("max distance / (3 eps ||W||_1), " + detail::group_label("eps", eps),
                                    *std::max_element(ratio.begin(), ratio.end()), 0.0, 1.0));
  }
  out.chart_metric = "ratio";
  return out;
}

inline RunOutput avg_degree_growth(const ExperimentConfig& c, const Graphon& w) {
  const auto horizons = detail::param_list(c, "horizons", {10, 20, 40, 80});
  graphonlab::detail::require(horizons.size() >= 2, "params.horizons needs at least two values");
  RunOutput out;
  out.records = parallel_map(horizons.size() * c.replicas, [&](std::size_t k) {
    const std::size_t gi = k / c.replicas, r = k % c.replicas;
    const auto trace = sampling::sample_graphon_process(w, horizons[gi], replica_seed(c.seed, gi, r), false);
    const SampledGraph g = sampling::snapshot_at(trace, horizons[gi], false);
    const double avg = g.num_edges() ? 2.0 * static_cast<double>(g.num_edges()) / static_cast<double>(g.num_vertices()) : 0.0;
    return Record{r, detail::group_label("T", horizons[gi]), {{"avg_degree", avg}, {"edges", static_cast<double>(g.num_edges())}}};
  });
  for (std::size_t i = 1; i < horizons.size(); ++i) {
    const double a = mean_of(column(out.records, detail::group_label("T", horizons[i - 1]), "avg_degree"));
    const double b = mean_of(column(out.records, detail::group_label("T", horizons[i]), "avg_degree"));
    out.checks.push_back(make_check("mean average degree ratio " + detail::group_label("T", horizons[i]) + " / " +
                                        detail::group_label("T", horizons[i - 1]),
                                    a > 0.0 ? b / a : 0.0, std::nextafter(1.0, 2.0), std::numeric_limits<double>::infinity()));
  }
  out.chart_metric = "avg_degree";
  return out;
}

}  // namespace runners

inline Json constant_graphon_json(double value, double mass = 1.0) {
  return {{"type", "step"}, {"masses", {mass}}, {"values", {{value}}}, {"ambient_infinite", false}};
}

inline const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> entries = [] {
    std::vector<CatalogEntry> e;
    e.push_back({"edge_growth", 1, "graphon process edge count: mean 2|E(G_T)|/T^2 against ||W||_1",
                 constant_graphon_json(1.0), 200, {{"horizon", 30.0}, {"tolerance", 0.05}},
                 {"edges", "normalized_edges"}, runners::edge_growth});
    e.push_back({"density_convergence", 2, "injective motif density of G_T against h(F, W)",
                 constant_graphon_json(0.5), 50, {{"horizon", 60.0}, {"motif", "triangle"}, {"tolerance", 0.1}},
                 {"edges", "inj", "inj_over_t_k", "h_inj"}, runners::density_convergence});
    e.push_back({"cutnorm_oracle", 3, "exact cut norm against brute force over all row and column subsets", nullptr, 100,
                 {{"max_blocks", 6}}, {"blocks", "exact", "brute", "abs_diff"}, runners::cutnorm_oracle});
    e.push_back({"permutation_zero", 4, "exact cut distance between a graphon and a block-shuffled copy", nullptr, 20,
                 {{"blocks", 7}}, {"distance", "witness_inverts", "exact"}, runners::permutation_zero});
    e.push_back({"metric_convergence", 5, "stretched distance estimate between G_T and W across horizons",
                 constant_graphon_json(0.5), 20,
                 {{"horizons", {10, 20, 40}}, {"alignment", "feature_oracle"}, {"final_median_max", 0.1}},
                 {"distance", "averaging_residual_lower", "vertices", "edges"}, runners::metric_convergence});
    e.push_back({"sequential_dichotomy", 6, "sequential model edge counts under linear and exponential schedules",
                 constant_graphon_json(1.0), 50,
                 {{"n_small", 100}, {"n_large", 1000}, {"linear_growth_min", 2.0}, {"exponential_change_max", 0.2}},
                 {"edges_small", "edges_large"}, runners::sequential_dichotomy});
    e.push_back({"tail_dichotomy", 7, "required tail mass M for clique-plus-isolated and sparse ER families", nullptr, 3,
                 {{"alpha", 0.5}, {"eps", 0.1}, {"sizes", {1000, 10000}}, {"er_growth_min", 1.5}},
                 {"edges", "required_m"}, runners::tail_dichotomy});
    e.push_back({"degree_tail", 8, "normalized count of high-degree vertices against the stretched degree profile",
                 constant_graphon_json(0.5), 50, {{"horizon", 50.0}, {"lambda", 0.5}, {"tolerance", 0.1}},
                 {"normalized_count", "avg_degree"}, runners::degree_tail});
    e.push_back({"bounded_degree_null", 9, "rescaled path density of long cycles", nullptr, 1,
                 {{"n", 10000}, {"brute_n", 6}, {"h_max", 0.02}}, {"hom", "h", "closed_form", "abs_diff", "brute_hom"},
                 runners::bounded_degree_null});
    e.push_back({"k2_identity", 10, "rescaled edge density of random graphs and graphons", nullptr, 1,
                 {{"graphs", 100}, {"graphons", 50}}, {"h", "abs_dev"}, runners::k2_identity});
    e.push_back({"exchangeability", 11, "permutation test of box counts of the edge-time measure", constant_graphon_json(0.5),
                 200,
                 {{"horizon", 40.0}, {"bins", 8}, {"permutations", 3}, {"resamples", 2000}, {"level", 0.01},
                  {"control_p_early", 0.9}, {"control_p_late", 0.1}},
                 {"edges"}, runners::exchangeability});
    e.push_back({"metric_axioms", 12, "symmetry and triangle inequality of exact cut distances", nullptr, 50,
                 {{"max_blocks", 6}},
                 {"blocks", "d01", "d12", "d02", "symmetry_error", "triangle_excess"}, runners::metric_axioms});
    e.push_back({"perturbation_bound", 13, "cut distance between W and a mass-inflated copy against 3 eps ||W||_1", nullptr,
                 20, {{"eps", {0.01, 0.05}}, {"max_blocks", 6}}, {"distance_upper", "bound", "ratio"},
                 runners::perturbation_bound});
    e.push_back({"avg_degree_growth", 0, "average degree of G_T across horizons", constant_graphon_json(0.5), 20,
                 {{"horizons", {10, 20, 40, 80}}}, {"avg_degree", "edges"}, runners::avg_degree_growth});
    return e;
  }();
  return entries;
}

inline const CatalogEntry& find_entry(const std::string& name) {
  for (const auto& e : catalog())
    if (e.name == name) return e;
  std::string known;
  for (const auto& e : catalog()) known += (known.empty() ? "" : ", ") + e.name;
  throw InvalidArgument("unknown experiment \"" + name + "\" (known: " + known + ")");
}

inline ExperimentConfig default_config(const std::string& name) {
  const CatalogEntry& e = find_entry(name);
  ExperimentConfig c;
  c.name = name;
  c.replicas = e.default_replicas;
  c.seed = 1;
  c.graphon = e.default_graphon;
  c.params = e.default_params;
  return c;
}

/// Fills unspecified fields from the catalog defaults.
inline ExperimentConfig with_defaults(ExperimentConfig c) {
  const CatalogEntry& e = find_entry(c.name);
  for (const auto& [k, v] : e.default_params.items())
    if (!c.params.contains(k)) c.params[k] = v;
  for (const auto& [k, v] : c.params.items())
    if (!e.default_params.contains(k)) throw InvalidArgument(c.name + ": unknown parameter \"" + k + "\"");
  if (c.graphon.is_null() && c.graphon_file.empty()) c.graphon = e.default_graphon;
  return c;
}

inline Json environment_stamp(const ExperimentConfig& c) {
  return {{"library", "graphonlab"}, {"version", library_version}, {"seed", c.seed},
#if defined(__VERSION__)
          {"compiler", __VERSION__},
#endif
          {"cxx_standard", static_cast<long long>(__cplusplus)}};
}

inline ExperimentReport run_experiment(const ExperimentConfig& config) {
  const CatalogEntry& e = find_entry(config.name);
  if (config.replicas < 1) throw InvalidArgument(config.name + ": replica count must be at least 1");
  const ExperimentConfig c = with_defaults(config);
  Graphon w = StepGraphon::zero({1.0});
  if (!c.graphon.is_null()) w = graphon_from_json(c.graphon, "graphon");
  else if (!c.graphon_file.empty()) w = load_graphon(c.graphon_file);
  RunOutput out = e.run(c, w);
  ExperimentReport r;
  r.experiment = c.name;
  r.config = config_to_json(c);
  r.environment = environment_stamp(c);
  r.records = std::move(out.records);
  r.aggregates = compute_aggregates(r.records);
  r.checks = std::move(out.checks);
  r.chart_metric = out.chart_metric;
  r.chart_stat = out.chart_stat;
  return r;
}

inline std::string describe(const std::string& name) {
  const CatalogEntry& e = find_entry(name);
  std::ostringstream os;
  os << e.name << ": " << e.summary << "\n";
  if (e.criterion) os << "acceptance criterion: " << e.criterion << "\n";
  os << "default replicas: " << e.default_replicas << "\n";
  os << "default graphon: " << (e.default_graphon.is_null() ? "none (graphons drawn internally)" : e.default_graphon.dump())
     << "\n";
  os << "parameters (defaults): " << e.default_params.dump() << "\n";
  os << "config: {\"experiment\": \"" << e.name
     << "\", \"replicas\": N, \"seed\": S, \"graphon\": {...} | \"graphon_file\": path, \"params\": {...}}\n";
  os << "csv columns: replica, group";
  for (const auto& col : e.columns) os << ", " << col;
  os << "\n";
  return os.str();
}

}  // namespace graphonlab::experiments
