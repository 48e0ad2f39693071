#pragma once

// Experiment reports: per-replica records, aggregates, checks, and the
// CSV / JSON / SVG renderings.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "graphonlab/error.hpp"
#include "graphonlab/spec_io.hpp"

namespace graphonlab::experiments {

inline constexpr const char* library_version = "0.1.0";

struct Record {
  std::size_t replica = 0;
  std::string group;
  std::vector<std::pair<std::string, double>> values;

  double get(const std::string& key) const {
    for (const auto& [k, v] : values)
      if (k == key) return v;
    throw InvalidArgument("record has no value \"" + key + "\"");
  }
  bool operator==(const Record&) const = default;
};

struct Aggregate {
  std::string group;
  std::string metric;
  std::size_t count = 0;
  double mean = 0.0;
  double median = 0.0;
  double std_error = 0.0;
  bool operator==(const Aggregate&) const = default;
};

struct Check {
  std::string name;
  double observed = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  bool passed = false;
  std::string detail;
  bool operator==(const Check&) const = default;
};

struct ExperimentReport {
  std::string experiment;
  Json config;
  std::vector<Record> records;
  std::vector<Aggregate> aggregates;
  std::vector<Check> checks;
  Json environment;
  std::string chart_metric;
  std::string chart_stat = "mean";  // "mean" or "median"

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
  }
  const Aggregate& aggregate(const std::string& group, const std::string& metric) const {
    for (const auto& a : aggregates)
      if (a.group == group && a.metric == metric) return a;
    throw InvalidArgument("no aggregate for " + group + "/" + metric);
  }
  bool operator==(const ExperimentReport&) const = default;
};

inline double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Groups and metrics in first-seen order.
inline std::vector<Aggregate> compute_aggregates(const std::vector<Record>& records) {
  std::vector<std::string> groups, metrics;
  for (const auto& r : records) {
    if (std::find(groups.begin(), groups.end(), r.group) == groups.end()) groups.push_back(r.group);
    for (const auto& [k, v] : r.values)
      if (std::find(metrics.begin(), metrics.end(), k) == metrics.end()) metrics.push_back(k);
  }
  std::vector<Aggregate> out;
  for (const auto& g : groups)
    for (const auto& m : metrics) {
      std::vector<double> xs;
      for (const auto& r : records)
        if (r.group == g)
          for (const auto& [k, v] : r.values)
            if (k == m) xs.push_back(v);
      if (xs.empty()) continue;
      Aggregate a;
      a.group = g;
      a.metric = m;
      a.count = xs.size();
      double s = 0.0;
      for (double x : xs) s += x;
      a.mean = s / static_cast<double>(xs.size());
      double ss = 0.0;
      for (double x : xs) ss += (x - a.mean) * (x - a.mean);
      a.std_error = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size())) : 0.0;
      a.median = median_of(xs);
      out.push_back(a);
    }
  return out;
}

inline Check make_check(std::string name, double observed, double lo, double hi, std::string detail = {}) {
  const bool ok = std::isfinite(observed) && observed >= lo && observed <= hi;
  return {std::move(name), observed, lo, hi, ok, std::move(detail)};
}

// ---------------------------------------------------------------------------
// Rendering

inline std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::vector<std::string> record_columns(const ExperimentReport& r) {
  std::vector<std::string> cols;
  for (const auto& rec : r.records)
    for (const auto& [k, v] : rec.values)
      if (std::find(cols.begin(), cols.end(), k) == cols.end()) cols.push_back(k);
  return cols;
}

/// One row per replica record: replica, group, then every value column.
inline std::string render_csv(const ExperimentReport& r) {
  const auto cols = record_columns(r);
  std::ostringstream os;
  os << "replica,group";
  for (const auto& c : cols) os << ',' << c;
  os << '\n';
  for (const auto& rec : r.records) {
    os << rec.replica << ',' << rec.group;
    for (const auto& c : cols) {
      os << ',';
      for (const auto& [k, v] : rec.values)
        if (k == c) {
          os << format_number(v);
          break;
        }
    }
    os << '\n';
  }
  return os.str();
}

namespace detail {

// Non-finite doubles are stored as strings so the JSON stays standard.
inline Json number_json(double x) {
  if (std::isfinite(x)) return x;
  return format_number(x);
}

inline double number_from(const Json& j) {
  if (j.is_number()) return j.get<double>();
  const std::string s = j.get<std::string>();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  throw InvalidArgument("report: bad number \"" + s + "\"");
}

}  // namespace detail

inline Json render_json(const ExperimentReport& r) {
  Json j;
  j["experiment"] = r.experiment;
  j["config"] = r.config;
  j["environment"] = r.environment;
  j["passed"] = r.passed();
  j["chart"] = {{"metric", r.chart_metric}, {"stat", r.chart_stat}};
  Json recs = Json::array();
  for (const auto& rec : r.records) {
    Json v = Json::array();
    for (const auto& [k, x] : rec.values) v.push_back({k, detail::number_json(x)});
    recs.push_back({{"replica", rec.replica}, {"group", rec.group}, {"values", v}});
  }
  j["records"] = recs;
  Json aggs = Json::array();
  for (const auto& a : r.aggregates)
    aggs.push_back({{"group", a.group},
                    {"metric", a.metric},
                    {"count", a.count},
                    {"mean", detail::number_json(a.mean)},
                    {"median", detail::number_json(a.median)},
                    {"std_error", detail::number_json(a.std_error)}});
  j["aggregates"] = aggs;
  Json checks = Json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name},
                      {"observed", detail::number_json(c.observed)},
                      {"lo", detail::number_json(c.lo)},
                      {"hi", detail::number_json(c.hi)},
                      {"passed", c.passed},
                      {"detail", c.detail}});
  j["checks"] = checks;
  return j;
}

inline ExperimentReport report_from_json(const Json& j) {
  ExperimentReport r;
  try {
    r.experiment = j.at("experiment").get<std::string>();
    r.config = j.at("config");
    r.environment = j.at("environment");
    r.chart_metric = j.at("chart").at("metric").get<std::string>();
    r.chart_stat = j.at("chart").at("stat").get<std::string>();
    for (const auto& rec : j.at("records")) {
      Record x;
      x.replica = rec.at("replica").get<std::size_t>();
      x.group = rec.at("group").get<std::string>();
      for (const auto& kv : rec.at("values")) x.values.emplace_back(kv.at(0).get<std::string>(), detail::number_from(kv.at(1)));
      r.records.push_back(std::move(x));
    }
    for (const auto& a : j.at("aggregates"))
      r.aggregates.push_back({a.at("group").get<std::string>(), a.at("metric").get<std::string>(),
                              a.at("count").get<std::size_t>(), detail::number_from(a.at("mean")),
                              detail::number_from(a.at("median")), detail::number_from(a.at("std_error"))});
    for (const auto& c : j.at("checks"))
      r.checks.push_back({c.at("name").get<std::string>(), detail::number_from(c.at("observed")),
                          detail::number_from(c.at("lo")), detail::number_from(c.at("hi")),
                          c.at("passed").get<bool>(), c.at("detail").get<std::string>()});
  } catch (const Json::exception& e) {
    throw InvalidArgument(std::string("report json: ") + e.what());
  }
  return r;
}

namespace detail {

inline std::string xml_escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    switch (c) {
      case '<': o += "&lt;"; break;
      case '>': o += "&gt;"; break;
      case '&': o += "&amp;"; break;
      case '"': o += "&quot;"; break;
      default: o += c;
    }
  }
  return o;
}

inline std::string short_number(double x) {
  char buf[32];
  if (std::isfinite(x) && x == std::round(x) && std::abs(x) < 1e12)
    std::snprintf(buf, sizeof buf, "%.0f", x);
  else
    std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

}  // namespace detail

/// Line chart of the chart metric's mean or median across groups, points
/// annotated with their values and the check results listed underneath.
inline std::string render_svg(const ExperimentReport& r) {
  std::string metric = r.chart_metric;
  if (metric.empty() && !r.aggregates.empty()) metric = r.aggregates.front().metric;
  std::vector<std::pair<std::string, double>> pts;
  for (const auto& a : r.aggregates)
    if (a.metric == metric) pts.emplace_back(a.group, r.chart_stat == "median" ? a.median : a.mean);
  const double w = 640, h = 400, left = 70, right = 30, top = 40, bottom = 80;
  const double pw = w - left - right, ph = h - top - bottom;
  double lo = 0.0, hi = 1.0;
  bool first = true;
  for (const auto& [g, v] : pts) {
    if (!std::isfinite(v)) continue;
    if (first) {
      lo = hi = v;
      first = false;
    }
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  lo = std::min(lo, 0.0);
  if (hi <= lo) hi = lo + 1.0;
  hi += 0.05 * (hi - lo);
  auto px = [&](std::size_t i) {
    return left + (pts.size() <= 1 ? pw / 2 : pw * static_cast<double>(i) / static_cast<double>(pts.size() - 1));
  };
  auto py = [&](double v) { return top + ph * (1.0 - (v - lo) / (hi - lo)); };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\""
     << h + 18.0 * static_cast<double>(r.checks.size()) << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<text x=\"" << left << "\" y=\"24\" font-size=\"15\">" << detail::xml_escape(r.experiment) << ": "
     << r.chart_stat << " " << detail::xml_escape(metric) << "</text>\n";
  os << "<line x1=\"" << left << "\" y1=\"" << top + ph << "\" x2=\"" << left + pw << "\" y2=\"" << top + ph
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + ph
     << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double v = lo + (hi - lo) * t / 4.0;
    os << "<text x=\"" << left - 6 << "\" y=\"" << py(v) + 4 << "\" text-anchor=\"end\">" << detail::short_number(v)
       << "</text>\n";
  }
  std::string path;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double v = std::isfinite(pts[i].second) ? pts[i].second : hi;
    path += (i ? " L " : "M ") + detail::short_number(px(i)) + " " + detail::short_number(py(v));
    os << "<circle cx=\"" << px(i) << "\" cy=\"" << py(v) << "\" r=\"4\" fill=\"steelblue\"/>\n";
    os << "<text x=\"" << px(i) << "\" y=\"" << py(v) - 8 << "\" text-anchor=\"middle\">"
       << detail::xml_escape(format_number(pts[i].second)) << "</text>\n";
    os << "<text x=\"" << px(i) << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">"
       << detail::xml_escape(pts[i].first) << "</text>\n";
  }
  if (pts.size() > 1) os << "<path d=\"" << path << "\" fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\"/>\n";
  double y = h - 30;
  for (const auto& c : r.checks) {
    os << "<text x=\"" << left << "\" y=\"" << y << "\" fill=\"" << (c.passed ? "darkgreen" : "firebrick") << "\">"
       << (c.passed ? "PASS " : "FAIL ") << detail::xml_escape(c.name) << ": " << format_number(c.observed) << " in ["
       << format_number(c.lo) << ", " << format_number(c.hi) << "]</text>\n";
    y += 18;
  }
  os << "</svg>\n";
  return os.str();
}

/// Writes <dir>/<experiment>.{csv,json,svg}; returns the paths written.
inline std::vector<std::string> write_report(const ExperimentReport& r, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory " + dir + ": " + ec.message());
  const std::filesystem::path base = std::filesystem::path(dir) / r.experiment;
  std::vector<std::string> paths;
  for (const auto& [ext, text] : std::vector<std::pair<std::string, std::string>>{
           {".csv", render_csv(r)}, {".json", render_json(r).dump(2) + "\n"}, {".svg", render_svg(r)}}) {
    const std::string p = base.string() + ext;
    write_text_file(p, text);
    paths.push_back(p);
  }
  return paths;
}

}  // namespace graphonlab::experiments
