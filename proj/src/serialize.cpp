#include "chaos_swr/serialize.hpp"

#include "chaos_swr/format.hpp"

#include <algorithm>
#include <ostream>
#include <vector>

namespace chaos {
namespace {

Json opt(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

void flatten(const Json& j, const std::string& prefix, Json& out) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, out);
  } else {
    out[prefix] = j;
  }
}

std::string csv_cell(const Json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  }
  if (v.is_number_float()) return format_double(v.get<double>());
  if (v.is_array() || v.is_object()) return csv_cell(Json(v.dump()));
  return v.dump();
}

}  // namespace

std::string sign_string(std::span<const Sign> s) {
  std::string out;
  out.reserve(s.size());
  for (Sign v : s) out += v > 0 ? '+' : '-';
  return out;
}

Json to_json(const BoundReport& r) {
  const auto& b = r.breakdown;
  return Json{{"n", r.n},
              {"x", r.x},
              {"delta", r.delta},
              {"kappa", r.kappa},
              {"threshold", r.threshold},
              {"probability", r.probability},
              {"raw_probability", r.raw_probability},
              {"breakdown",
               {{"rademacher_term", b.rademacher_term},
                {"cross_col_term", b.cross_col_term},
                {"cross_row_term", b.cross_row_term},
                {"tail_term", b.tail_term},
                {"y", opt(b.y)},
                {"hoeffding_prob", b.hoeffding_prob},
                {"chaos_prob", b.chaos_prob},
                {"cross_prob", b.cross_prob},
                {"dominant", b.dominant}}},
              {"simplified",
               {{"statement", r.simplified.statement},
                {"proof_assembly", opt(r.simplified.proof_assembly)}}}};
}

Json to_json(const MonteCarloEstimate& e) {
  return Json{{"p_hat", e.p_hat}, {"ci_low", e.ci_low}, {"ci_high", e.ci_high}, {"hits", e.hits},
              {"reps", e.reps},   {"seed", e.seed},     {"conf", e.conf}};
}

Json to_json(const ComparisonRow& row) {
  Json j{{"bound", row.bound},
         {"mode", to_string(row.mode)},
         {"x", row.x},
         {"delta", row.delta ? Json(*row.delta) : Json(nullptr)},
         {"bound_threshold", row.bound_threshold},
         {"bound_prob", row.bound_prob},
         {"empirical_prob", row.empirical_prob},
         {"ci_low", row.estimate ? Json(row.estimate->ci_low) : Json(nullptr)},
         {"ci_high", row.estimate ? Json(row.estimate->ci_high) : Json(nullptr)},
         {"reps", row.estimate ? Json(row.estimate->reps) : Json(nullptr)},
         {"source", row.source},
         {"violation", row.violation},
         {"degenerate_threshold", row.degenerate_threshold}};
  return j;
}

Json to_json(const CalibrationReport& r) {
  Json entries = Json::array();
  for (const auto& e : r.entries)
    entries.push_back(Json{{"instance", e.instance},
                           {"n", e.n},
                           {"x", e.x},
                           {"required", e.required},
                           {"vacuous", e.vacuous}});
  return Json{{"constant_name", r.constant_name}, {"value", r.value},
              {"instances", r.instances},         {"criterion", r.criterion},
              {"entries", entries},               {"warnings", r.warnings}};
}

Json to_json(const PermTestResult& r) {
  Json q = Json::array();
  for (const auto& [alpha, v] : r.mc_quantiles) q.push_back(Json{{"level", alpha}, {"quantile", v}});
  return Json{{"u_obs", r.u_obs},
              {"p_value", r.p_value},
              {"exceed_count", r.exceed_count},
              {"mc_quantiles", q},
              {"bound_critical", opt(r.bound_critical)},
              {"bound_x", opt(r.bound_x)},
              {"reps", r.reps},
              {"seed", r.seed},
              {"stream", r.stream}};
}

Json to_json(const BoundConstants& k) { return Json{{"kappa", k.kappa}, {"c", k.c}, {"C", k.C}}; }

Json to_json(const ValueLaw& law) {
  Json s = Json::array();
  for (const auto& [v, p] : law.support) s.push_back(Json{{"outcome", v}, {"probability", p}});
  return s;
}

Json to_json(const SignLaw& law) {
  Json s = Json::array();
  for (const auto& [v, p] : law.support)
    s.push_back(Json{{"outcome", sign_string(v)}, {"probability", p}});
  return s;
}

Json to_json(const IntLaw& law) {
  Json s = Json::array();
  for (const auto& [v, p] : law.support) s.push_back(Json{{"outcome", v}, {"probability", p}});
  return s;
}

BoundConstants constants_from_json(const Json& j, BoundConstants base) {
  const Json& src = j.contains("constants") ? j.at("constants") : j;
  if (src.contains("kappa")) base.kappa = src.at("kappa").get<double>();
  if (src.contains("c")) base.c = src.at("c").get<double>();
  if (src.contains("C")) base.C = src.at("C").get<double>();
  return base;
}

void write_csv(std::ostream& out, const Json& rows) {
  const Json arr = rows.is_array() ? rows : Json::array({rows});
  std::vector<Json> flat;
  std::vector<std::string> keys;
  for (const auto& r : arr) {
    Json f = Json::object();
    flatten(r, "", f);
    for (const auto& [k, v] : f.items())
      if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
    flat.push_back(std::move(f));
  }
  for (std::size_t k = 0; k < keys.size(); ++k) out << (k ? "," : "") << keys[k];
  out << '\n';
  for (const auto& f : flat) {
    for (std::size_t k = 0; k < keys.size(); ++k) {
      if (k) out << ',';
      if (f.contains(keys[k])) out << csv_cell(f.at(keys[k]));
    }
    out << '\n';
  }
}

}  // namespace chaos
