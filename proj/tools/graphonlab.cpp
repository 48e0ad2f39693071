// graphonlab command line: sampling, cut norms and distances, motif
// densities, tail regularity profiles, and the experiment catalog.

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "graphonlab/graphonlab.hpp"

namespace gl = graphonlab;
using gl::Json;

namespace {

gl::StepGraphon load_step(const std::string& path) {
  gl::Graphon w = gl::load_graphon(path);
  if (auto* s = std::get_if<gl::StepGraphon>(&w)) return *s;
  // Analytic families with an exact block form are accepted.
  return gl::flatten_to_line(std::get<gl::AnalyticGraphon>(w));
}

Json witness_json(const std::vector<std::size_t>& v) { return Json(v); }

// "family:key=value:key=v1,v2,..." -> graphs, one per n (or m) value.
std::vector<gl::SampledGraph> parse_family(const std::string& spec, std::uint64_t seed) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.empty()) throw gl::InvalidArgument("empty graph family");
  const std::string family = parts[0];
  std::map<std::string, std::vector<double>> kv;
  for (std::size_t i = 1; i < parts.size(); ++i) {
    const auto eq = parts[i].find('=');
    if (eq == std::string::npos) throw gl::InvalidArgument("expected key=value in '" + parts[i] + "'");
    std::stringstream vs(parts[i].substr(eq + 1));
    for (std::string v; std::getline(vs, v, ',');) {
      try {
        kv[parts[i].substr(0, eq)].push_back(std::stod(v));
      } catch (const std::exception&) {
        throw gl::InvalidArgument("bad number '" + v + "' in '" + parts[i] + "'");
      }
    }
  }
  auto one = [&](const std::string& k, double def) { return kv.count(k) ? kv[k].front() : def; };
  if (!kv.count("n")) throw gl::InvalidArgument("graph family needs n=...");
  std::vector<gl::SampledGraph> out;
  std::size_t idx = 0;
  for (double nd : kv["n"]) {
    const auto n = static_cast<std::size_t>(nd);
    const std::uint64_t s = gl::rng::derive(seed, gl::rng::Tag::generic, {idx++});
    if (family == "er_example1") out.push_back(gl::graphs::er_example1(n, one("alpha", 0.5), s));
    else if (family == "clique_plus_isolated") out.push_back(gl::graphs::clique_plus_isolated(n, one("alpha", 0.5)));
    else if (family == "er") out.push_back(gl::graphs::erdos_renyi(n, one("p", 0.5), s));
    else if (family == "matching") out.push_back(gl::graphs::matching_graph(n / 2));
    else if (family == "cycle") out.push_back(gl::graphs::cycle_graph(n));
    else if (family == "complete") out.push_back(gl::graphs::complete_graph(n));
    else if (family == "star") out.push_back(gl::graphs::star_graph(n - 1));
    else if (family == "path") out.push_back(gl::graphs::path_graph(n));
    else
      throw gl::InvalidArgument("unknown graph family '" + family +
                                "' (er_example1, clique_plus_isolated, er, matching, cycle, complete, star, path)");
  }
  return out;
}

std::string catalog_listing() {
  std::string s = "experiments:\n";
  for (const auto& e : gl::experiments::catalog()) s += "  " + e.name + "  " + e.summary + "\n";
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graphonlab: sparse graphon toolkit"};
  app.require_subcommand(0, 1);
  std::string describe_name;
  app.add_option("--describe", describe_name, "print config schema and CSV columns of a catalog experiment");
  bool list = false;
  app.add_flag("--list", list, "list catalog experiments");

  // sample
  auto* sample = app.add_subcommand("sample", "sample a graphon process (or sequential model) and write a trace");
  std::string s_spec, s_out, s_schedule;
  double s_horizon = 10.0;
  std::uint64_t s_seed = 0;
  bool s_keep = false;
  std::size_t s_steps = 0;
  sample->add_option("--spec", s_spec, "graphon spec JSON")->required();
  sample->add_option("--horizon,--t,-T", s_horizon, "time horizon T");
  sample->add_option("--seed", s_seed, "master seed");
  sample->add_flag("--keep-isolated", s_keep, "keep isolated vertices (finite spaces only)");
  sample->add_option("--sequential", s_schedule, "sequential model schedule: linear, exponential, constant");
  sample->add_option("--steps", s_steps, "sequential model: number of vertices");
  sample->add_option("--out,-o", s_out, "trace JSON output (stdout summary otherwise)");

  // cutnorm
  auto* cutnorm = app.add_subcommand("cutnorm", "cut norm of a step graphon");
  std::string cn_spec, cn_mode = "exact";
  std::uint64_t cn_seed = 0;
  cutnorm->add_option("--spec", cn_spec, "graphon spec JSON")->required();
  cutnorm->add_option("--mode", cn_mode, "exact or heuristic")->check(CLI::IsMember({"exact", "heuristic"}));
  cutnorm->add_option("--seed", cn_seed, "heuristic seed");

  // cutdist
  auto* cutdist = app.add_subcommand("cutdist", "cut (or invariant L1) distance between two step graphons");
  std::string cd_a, cd_b, cd_mode = "exact", cd_obj = "cut";
  long long cd_budget = 20000;
  std::uint64_t cd_seed = 0;
  double cd_quantum = 0.0;
  bool cd_stretched = false;
  cutdist->add_option("--a", cd_a, "first graphon spec")->required();
  cutdist->add_option("--b", cd_b, "second graphon spec")->required();
  cutdist->add_option("--mode", cd_mode, "exact or anneal")->check(CLI::IsMember({"exact", "anneal"}));
  cutdist->add_option("--objective", cd_obj, "cut or l1")->check(CLI::IsMember({"cut", "l1"}));
  cutdist->add_option("--budget", cd_budget, "anneal objective evaluations");
  cutdist->add_option("--seed", cd_seed, "anneal seed");
  cutdist->add_option("--quantum", cd_quantum, "mass quantum for the common refinement");
  cutdist->add_flag("--stretched", cd_stretched, "compare stretched graphons");

  // hom
  auto* homc = app.add_subcommand("hom", "motif counts and densities");
  std::string h_motif = "triangle", h_graph, h_spec;
  double h_at = -1.0, h_mc = 2e5;
  std::uint64_t h_seed = 0;
  bool h_analytic = false;
  homc->add_option("--motif", h_motif, "edge, path3, star_k, triangle, C4, K4 or an edge list like 0-1,1-2");
  homc->add_option("--graph", h_graph, "trace JSON");
  homc->add_option("--at", h_at, "snapshot time (default: trace horizon)");
  homc->add_option("--spec", h_spec, "graphon spec JSON");
  homc->add_flag("--analytic", h_analytic, "compute h(F, W) for the graphon spec");
  homc->add_option("--mc", h_mc, "Monte Carlo samples for analytic families");
  homc->add_option("--seed", h_seed, "Monte Carlo seed");

  // tailreg
  auto* tail = app.add_subcommand("tailreg", "tail regularity profiles of a graph family");
  std::string t_graphs, t_out;
  double t_eps = 0.1;
  std::uint64_t t_seed = 0;
  tail->add_option("--graphs", t_graphs, "family:key=value:n=n1,n2,...")->required();
  tail->add_option("--eps", t_eps, "tail mass tolerance");
  tail->add_option("--seed", t_seed, "seed for random families");
  tail->add_option("--out,-o", t_out, "profile CSV (graph_id, n, num_edges, M_grid, share)");

  // experiment
  auto* exp = app.add_subcommand("experiment", "run a catalog experiment; exit code 0 iff all checks pass");
  std::string e_name, e_config, e_out;
  long long e_replicas = -1;
  long long e_seed = -1;
  exp->add_option("name", e_name, "catalog entry")->required();
  exp->add_option("--config", e_config, "experiment config JSON");
  exp->add_option("--out", e_out, "output directory for csv/json/svg");
  exp->add_option("--replicas", e_replicas, "override replica count");
  exp->add_option("--seed", e_seed, "override master seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (list) {
      std::cout << catalog_listing();
      return 0;
    }
    if (!describe_name.empty()) {
      std::cout << gl::experiments::describe(describe_name);
      return 0;
    }
    if (*sample) {
      const gl::Graphon w = gl::load_graphon(s_spec);
      if (!s_schedule.empty()) {
        if (s_steps == 0) throw gl::InvalidArgument("--sequential needs --steps");
        const auto p = gl::sampling::sample_sequential(w, gl::sampling::Schedule::parse(s_schedule), s_steps, s_seed);
        Json j{{"model", "sequential"}, {"schedule", s_schedule}, {"steps", s_steps}, {"seed", s_seed}};
        Json edges = Json::array();
        for (const auto& [u, v] : p.edges) edges.push_back({u + 1, v + 1});
        j["features"] = p.features;
        j["edges"] = edges;
        if (!s_out.empty()) gl::write_text_file(s_out, j.dump(2) + "\n");
        std::cout << "steps " << s_steps << ", edges " << p.edges.size() << "\n";
        return 0;
      }
      const auto trace = gl::sampling::sample_graphon_process(w, s_horizon, s_seed, s_keep);
      if (!s_out.empty()) gl::write_text_file(s_out, gl::sampling::trace_to_json(trace).dump(2) + "\n");
      const auto g = gl::sampling::snapshot_at(trace, s_horizon, false);
      std::cout << "vertices " << trace.vertices.size() << ", non-isolated " << g.num_vertices() << ", edges "
                << trace.edges.size() << "\n";
      return 0;
    }
    if (*cutnorm) {
      const auto w = load_step(cn_spec);
      const auto mode = cn_mode == "exact" ? gl::metrics::CutNormMode::exact : gl::metrics::CutNormMode::heuristic;
      const auto r = gl::metrics::cut_norm(w, mode, cn_seed);
      Json j{{"value", r.value}, {"exact", r.exact}, {"rows", witness_json(r.rows)}, {"cols", witness_json(r.cols)}};
      std::cout << j.dump(2) << "\n";
      return 0;
    }
    if (*cutdist) {
      auto a = load_step(cd_a), b = load_step(cd_b);
      if (cd_stretched) {
        a = gl::metrics::stretched_form(a);
        b = gl::metrics::stretched_form(b);
      }
      gl::metrics::DistanceOptions opt;
      opt.mode = cd_mode == "exact" ? gl::metrics::SearchMode::exact : gl::metrics::SearchMode::anneal;
      opt.budget = cd_budget;
      opt.seed = cd_seed;
      if (cd_quantum > 0.0) opt.quantum = cd_quantum;
      const auto r = cd_obj == "cut" ? gl::metrics::cut_distance(a, b, opt) : gl::metrics::invariant_l1_distance(a, b, opt);
      Json j{{"value", r.value},
             {"objective", r.objective},
             {"mode", r.mode},
             {"witness", witness_json(r.witness)},
             {"quantization_error", r.quantization_error},
             {"quantum", r.quantum},
             {"blocks", r.blocks},
             {"budget_spent", r.budget_spent}};
      std::cout << j.dump(2) << "\n";
      return 0;
    }
    if (*homc) {
      const auto f = gl::hom::parse_motif(h_motif);
      if (h_analytic || (!h_spec.empty() && h_graph.empty())) {
        if (h_spec.empty()) throw gl::InvalidArgument("--analytic needs --spec");
        const gl::Graphon w = gl::load_graphon(h_spec);
        const auto d = gl::hom::h_analytic(f, w, {static_cast<std::size_t>(h_mc), h_seed});
        const auto k = static_cast<int>(f.max_degree());
        const auto sm = gl::hom::star_moment(w, k);
        Json j{{"motif", f.name()},
               {"h", gl::experiments::detail::number_json(d.value)},
               {"integral", d.integral},
               {"std_error", d.std_error},
               {"exact", d.exact},
               {"finiteness", gl::hom::to_string(d.finiteness)},
               {"samples", d.samples},
               {"max_degree_star_moment", {{"k", k}, {"value", sm.value}, {"finiteness", gl::hom::to_string(sm.finiteness)}}}};
        std::cout << j.dump(2) << "\n";
        return 0;
      }
      if (h_graph.empty()) throw gl::InvalidArgument("hom needs --graph or --spec");
      const auto trace = gl::sampling::trace_from_json(gl::read_json_file(h_graph), h_graph);
      const auto g = gl::sampling::snapshot_at(trace, h_at < 0.0 ? trace.horizon : h_at, false);
      const auto e = gl::hom::count_embeddings(f, g);
      Json j{{"motif", f.name()}, {"vertices", g.num_vertices()}, {"edges", g.num_edges()},
             {"hom", gl::hom::to_string(e.hom)}, {"inj", gl::hom::to_string(e.inj)}};
      if (g.num_edges() > 0) {
        const double d = gl::hom::density_denominator(f.size(), g.num_edges());
        j["h"] = static_cast<double>(e.hom) / d;
        j["h_inj"] = static_cast<double>(e.inj) / d;
      }
      std::cout << j.dump(2) << "\n";
      return 0;
    }
    if (*tail) {
      const auto graphs = parse_family(t_graphs, t_seed);
      const auto grid = gl::regularity::default_m_grid();
      std::ostringstream csv;
      csv << "graph_id,n,num_edges,M_grid,share\n";
      for (std::size_t i = 0; i < graphs.size(); ++i) {
        const auto p = gl::regularity::graph_tail_profile(graphs[i], grid);
        for (std::size_t k = 0; k < grid.size(); ++k)
          csv << i << ',' << p.vertices << ',' << p.edges << ',' << gl::experiments::format_number(grid[k]) << ','
              << gl::experiments::format_number(p.shares[k]) << '\n';
      }
      if (!t_out.empty()) gl::write_text_file(t_out, csv.str());
      const auto r = gl::regularity::sequence_tail_regularity(graphs, t_eps);
      for (std::size_t i = 0; i < graphs.size(); ++i)
        std::cout << "graph " << i << ": n " << graphs[i].num_vertices() << ", edges " << graphs[i].num_edges()
                  << ", required M "
                  << (r.per_graph[i] ? gl::experiments::format_number(*r.per_graph[i]) : std::string("> 100")) << "\n";
      if (r.regular) std::cout << "uniform M = " << gl::experiments::format_number(r.m) << " at eps " << t_eps << "\n";
      else std::cout << "no grid M up to 100; witness graph " << *r.witness << "\n";
      return 0;
    }
    if (*exp) {
      gl::experiments::ExperimentConfig c = e_config.empty() ? gl::experiments::default_config(e_name)
                                                             : gl::experiments::load_config(e_config);
      if (c.name.empty()) c.name = e_name;
      if (c.name != e_name)
        throw gl::InvalidArgument("config is for experiment '" + c.name + "', not '" + e_name + "'");
      if (e_replicas >= 0) c.replicas = static_cast<std::size_t>(e_replicas);
      if (e_seed >= 0) c.seed = static_cast<std::uint64_t>(e_seed);
      if (!e_out.empty()) c.out_dir = e_out;
      const auto report = gl::experiments::run_experiment(c);
      if (!c.out_dir.empty())
        for (const auto& p : gl::experiments::write_report(report, c.out_dir)) std::cout << "wrote " << p << "\n";
      for (const auto& ch : report.checks)
        std::cout << (ch.passed ? "PASS " : "FAIL ") << ch.name << ": " << gl::experiments::format_number(ch.observed)
                  << " in [" << gl::experiments::format_number(ch.lo) << ", " << gl::experiments::format_number(ch.hi)
                  << "]" << (ch.detail.empty() ? "" : "  (" + ch.detail + ")") << "\n";
      return report.passed() ? 0 : 1;
    }
    std::cout << app.help() << catalog_listing();
    return 0;
  } catch (const gl::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
