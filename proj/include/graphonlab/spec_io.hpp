#pragma once

// JSON graphon spec files.
//
//   {"type":"step","masses":[...],"values":[[...]],"ambient_infinite":false}
//   {"type":"caron_fox","f":{"kind":"shifted_power","c":1.0,"gamma":2.0},
//    "truncation":{"x_max":10.0,"target_l1_residual":0.01}}
//   {"type":"region_indicator","boundary":{"kind":"self_inverse_power","gamma":2.0},"truncation":{...}}
//   {"type":"infinite_block","intervals":[[0,1],[1,3]],"probabilities":[[1,0],[0,0]]}
//   {"type":"mixed_membership","K":2,"components":[[c11,c12],[c21,c22]],"truncation":{...}}
//
// Mixed-membership components are step or caron_fox objects without a
// truncation of their own.

#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "graphonlab/analytic_graphon.hpp"
#include "graphonlab/error.hpp"
#include "graphonlab/graphon.hpp"
#include "graphonlab/step_graphon.hpp"

namespace graphonlab {

using Json = nlohmann::json;

namespace detail {

inline const Json& field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw InvalidArgument(where + ": missing field \"" + key + "\"");
  return j.at(key);
}

inline double number(const Json& j, const std::string& where) {
  if (!j.is_number()) throw InvalidArgument(where + ": expected a number");
  return j.get<double>();
}

inline std::vector<double> number_list(const Json& j, const std::string& where) {
  if (!j.is_array()) throw InvalidArgument(where + ": expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

inline Matrix<double> number_matrix(const Json& j, const std::string& where) {
  if (!j.is_array()) throw InvalidArgument(where + ": expected an array of rows");
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < j.size(); ++i) rows.push_back(number_list(j[i], where + "[" + std::to_string(i) + "]"));
  return Matrix<double>::from_rows(rows);
}

inline PowerLaw power_law_from_json(const Json& j, const std::string& where) {
  PowerLaw f;
  const std::string kind = field(j, "kind", where).get<std::string>();
  if (kind == "shifted_power") f.kind = PowerLaw::Kind::shifted_power;
  else if (kind == "truncated_power") f.kind = PowerLaw::Kind::truncated_power;
  else throw InvalidArgument(where + ".kind: unknown power law \"" + kind + "\"");
  f.c = number(field(j, "c", where), where + ".c");
  f.gamma = number(field(j, "gamma", where), where + ".gamma");
  f.validate();
  return f;
}

inline Json power_law_to_json(const PowerLaw& f) {
  return {{"kind", f.kind == PowerLaw::Kind::shifted_power ? "shifted_power" : "truncated_power"},
          {"c", f.c},
          {"gamma", f.gamma}};
}

inline StepGraphon step_from_json(const Json& j, const std::string& where) {
  auto masses = number_list(field(j, "masses", where), where + ".masses");
  auto values = number_matrix(field(j, "values", where), where + ".values");
  bool ambient = false;
  if (j.contains("ambient_infinite")) {
    if (!j["ambient_infinite"].is_boolean()) throw InvalidArgument(where + ".ambient_infinite: expected a boolean");
    ambient = j["ambient_infinite"].get<bool>();
  }
  try {
    return StepGraphon(std::move(masses), std::move(values), ambient);
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(where + ": " + e.what());
  }
}

inline Json step_to_json(const StepGraphon& w) {
  return {{"type", "step"},
          {"masses", w.masses()},
          {"values", w.values().to_rows()},
          {"ambient_infinite", w.ambient_infinite()}};
}

inline MembershipComponent component_from_json(const Json& j, const std::string& where) {
  const std::string type = field(j, "type", where).get<std::string>();
  if (type == "step") return step_from_json(j, where);
  if (type == "caron_fox") return CaronFox{power_law_from_json(field(j, "f", where), where + ".f")};
  throw InvalidArgument(where + ": mixed membership components must be step or caron_fox");
}

inline Json component_to_json(const MembershipComponent& c) {
  if (const auto* s = std::get_if<StepGraphon>(&c)) return step_to_json(*s);
  return {{"type", "caron_fox"}, {"f", power_law_to_json(std::get<CaronFox>(c).f)}};
}

}  // namespace detail

inline Graphon graphon_from_json(const Json& j, const std::string& where = "spec") {
  try {
    const std::string type = detail::field(j, "type", where).get<std::string>();
    if (type == "step") return detail::step_from_json(j, where);

    std::optional<double> x_max, target;
    if (j.contains("truncation")) {
      const Json& t = j["truncation"];
      if (t.contains("x_max") && !t["x_max"].is_null()) x_max = detail::number(t["x_max"], where + ".truncation.x_max");
      if (t.contains("target_l1_residual") && !t["target_l1_residual"].is_null())
        target = detail::number(t["target_l1_residual"], where + ".truncation.target_l1_residual");
    }

    AnalyticGraphon::Family family;
    if (type == "caron_fox") {
      family = CaronFox{detail::power_law_from_json(detail::field(j, "f", where), where + ".f")};
    } else if (type == "region_indicator") {
      const Json& b = detail::field(j, "boundary", where);
      const std::string kind = detail::field(b, "kind", where + ".boundary").get<std::string>();
      if (kind != "self_inverse_power")
        throw InvalidArgument(where + ".boundary.kind: unknown boundary \"" + kind + "\"");
      family = RegionIndicator{detail::number(detail::field(b, "gamma", where + ".boundary"), where + ".boundary.gamma")};
    } else if (type == "infinite_block") {
      InfiniteBlock ib;
      const Json& iv = detail::field(j, "intervals", where);
      if (!iv.is_array()) throw InvalidArgument(where + ".intervals: expected an array");
      for (std::size_t i = 0; i < iv.size(); ++i) {
        auto p = detail::number_list(iv[i], where + ".intervals[" + std::to_string(i) + "]");
        if (p.size() != 2) throw InvalidArgument(where + ".intervals[" + std::to_string(i) + "]: expected [lo, hi]");
        ib.intervals.push_back({p[0], p[1]});
      }
      ib.probabilities = detail::number_matrix(detail::field(j, "probabilities", where), where + ".probabilities");
      family = std::move(ib);
    } else if (type == "mixed_membership") {
      MixedMembership m;
      const Json& kj = detail::field(j, "K", where);
      if (!kj.is_number_integer() || kj.get<long long>() < 1)
        throw InvalidArgument(where + ".K: expected a positive integer");
      m.communities = kj.get<std::size_t>();
      const Json& comps = detail::field(j, "components", where);
      if (!comps.is_array() || comps.size() != m.communities)
        throw InvalidArgument(where + ".components: expected a KxK array");
      for (std::size_t a = 0; a < m.communities; ++a) {
        if (!comps[a].is_array() || comps[a].size() != m.communities)
          throw InvalidArgument(where + ".components[" + std::to_string(a) + "]: expected K entries");
        for (std::size_t b = 0; b < m.communities; ++b)
          m.components.push_back(detail::component_from_json(
              comps[a][b], where + ".components[" + std::to_string(a) + "][" + std::to_string(b) + "]"));
      }
      family = std::move(m);
    } else {
      throw InvalidArgument(where + ".type: unknown graphon type \"" + type + "\"");
    }
    try {
      return AnalyticGraphon::make(std::move(family), x_max, target);
    } catch (const InvalidArgument& e) {
      throw InvalidArgument(where + ": " + e.what());
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(where + ": " + e.what());
  }
}

inline Json graphon_to_json(const Graphon& w) {
  if (const auto* s = std::get_if<StepGraphon>(&w)) return detail::step_to_json(*s);
  const auto& a = std::get<AnalyticGraphon>(w);
  Json j;
  j["type"] = a.family_name();
  const auto& fam = a.family();
  if (const auto* c = std::get_if<CaronFox>(&fam)) {
    j["f"] = detail::power_law_to_json(c->f);
  } else if (const auto* r = std::get_if<RegionIndicator>(&fam)) {
    j["boundary"] = {{"kind", "self_inverse_power"}, {"gamma", r->gamma}};
  } else if (const auto* b = std::get_if<InfiniteBlock>(&fam)) {
    Json iv = Json::array();
    for (const auto& i : b->intervals) iv.push_back({i.lo, i.hi});
    j["intervals"] = iv;
    j["probabilities"] = b->probabilities.to_rows();
  } else {
    const auto& m = std::get<MixedMembership>(fam);
    j["K"] = m.communities;
    Json comps = Json::array();
    for (std::size_t k1 = 0; k1 < m.communities; ++k1) {
      Json row = Json::array();
      for (std::size_t k2 = 0; k2 < m.communities; ++k2) row.push_back(detail::component_to_json(m.component(k1, k2)));
      comps.push_back(row);
    }
    j["components"] = comps;
  }
  j["truncation"] = {{"x_max", a.x_max()}};
  if (a.target_l1_residual() > 0.0) j["truncation"]["target_l1_residual"] = a.target_l1_residual();
  return j;
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgument(path + ": " + e.what());
  }
}

inline Graphon load_graphon(const std::string& path) { return graphon_from_json(read_json_file(path), path); }

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
  if (!out) throw Error("write failed for " + path);
}

inline void save_graphon(const std::string& path, const Graphon& w) { write_text_file(path, graphon_to_json(w).dump(2) + "\n"); }

}  // namespace graphonlab
