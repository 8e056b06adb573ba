#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "pacer/map_io.hpp"
#include "pacer/model.hpp"

namespace pacer {

enum class Aggregation { power_law, log_utility, coverage };

struct AggregationSpec {
  Aggregation kind = Aggregation::power_law;
  double alpha = 1.0;  // rank-discount exponent; ignored by log/coverage
};

inline std::string aggregation_name(Aggregation kind) {
  switch (kind) {
    case Aggregation::power_law: return "power_law";
    case Aggregation::log_utility: return "log";
    case Aggregation::coverage: return "coverage";
  }
  return "?";
}

inline Aggregation aggregation_from_name(const std::string& name) {
  if (name == "power_law") return Aggregation::power_law;
  if (name == "log") return Aggregation::log_utility;
  if (name == "coverage") return Aggregation::coverage;
  throw InputError("unknown aggregation type: " + name);
}

struct Query {
  PoiId x = 0;
  PoiId y = 0;
  double b = 0;
  std::vector<std::pair<std::string, double>> weights;  // feature name -> weight
  double theta = 0;
  AggregationSpec agg;
  int k = 1;
  bool count_endpoint_stay = false;
};

inline void validate_query(const Query& q) {
  if (!(q.b > 0)) throw InputError("query: budget must be positive");
  if (q.k < 1) throw InputError("query: k must be at least 1");
  if (!(q.theta >= 0)) throw InputError("query: theta must be nonnegative");
  if (q.weights.empty()) throw InputError("query: weights must be nonempty");
  double sum = 0;
  for (const auto& [name, w] : q.weights) {
    if (!(w >= 0) || w > 1 + kCostEps)
      throw InputError("query: weight for " + name + " outside [0, 1]");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw InputError("query: weights must sum to 1");
  if (q.agg.kind == Aggregation::power_law &&
      (!(q.agg.alpha >= 0) || !std::isfinite(q.agg.alpha)))
    throw InputError("query: alpha must be a nonnegative finite number");
}

inline Query query_from_json(const json& j) {
  if (!j.is_object()) throw InputError("query must be an object");
  Query q;
  q.x = detail::require_id(j.at("x"), "query.x");
  q.y = detail::require_id(j.at("y"), "query.y");
  q.b = detail::require_number(j.at("b"), "query.b");
  if (!j.contains("weights") || !j.at("weights").is_object())
    throw InputError("query.weights must be an object");
  for (const auto& [name, w] : j.at("weights").items())
    q.weights.emplace_back(name, detail::require_number(w, "query.weights." + name));
  if (j.contains("theta")) q.theta = detail::require_number(j.at("theta"), "query.theta");
  if (j.contains("aggregation")) {
    const json& a = j.at("aggregation");
    if (!a.is_object() || !a.contains("type"))
      throw InputError("query.aggregation must be an object with a type");
    q.agg.kind = aggregation_from_name(a.at("type").get<std::string>());
    if (a.contains("alpha"))
      q.agg.alpha = detail::require_number(a.at("alpha"), "query.aggregation.alpha");
  }
  if (j.contains("k")) {
    if (!j.at("k").is_number_integer()) throw InputError("query.k must be an integer");
    q.k = j.at("k").get<int>();
  }
  q.count_endpoint_stay = j.value("count_endpoint_stay", false);
  validate_query(q);
  return q;
}

inline json query_to_json(const Query& q) {
  json j;
  j["x"] = q.x;
  j["y"] = q.y;
  j["b"] = q.b;
  json w = json::object();
  for (const auto& [name, weight] : q.weights) w[name] = weight;
  j["weights"] = std::move(w);
  j["theta"] = q.theta;
  j["aggregation"] = {{"type", aggregation_name(q.agg.kind)}, {"alpha", q.agg.alpha}};
  j["k"] = q.k;
  j["count_endpoint_stay"] = q.count_endpoint_stay;
  return j;
}

// A query file holds either one query object or an array of them.
inline std::vector<Query> load_queries(const std::string& path) {
  json j = detail::load_json_file(path);
  std::vector<Query> out;
  if (j.is_array())
    for (const auto& q : j) out.push_back(query_from_json(q));
  else
    out.push_back(query_from_json(j));
  if (out.empty()) throw InputError("query file contains no queries: " + path);
  return out;
}

inline void save_queries(const std::vector<Query>& queries, const std::string& path) {
  json arr = json::array();
  for (const Query& q : queries) arr.push_back(query_to_json(q));
  detail::write_text_file(path, arr.dump(2) + "\n");
}

}  // namespace pacer
