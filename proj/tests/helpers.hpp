#pragma once

#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "pacer/pacer.hpp"

namespace testutil {

using namespace pacer;

// Hand-built fixtures -------------------------------------------------------

inline MapData triangle_map(double c01, double c12, double c02) {
  MapData d;
  d.features = {"food"};
  for (PoiId i = 0; i < 3; ++i) d.pois.push_back({i, 10, {}, {{"food", 1.0}}});
  d.edges = {{0, 1, c01}, {1, 2, c12}, {0, 2, c02}};
  return d;
}

inline MapData path_map(std::vector<double> costs) {
  MapData d;
  d.features = {"food"};
  for (PoiId i = 0; i <= costs.size(); ++i) d.pois.push_back({i, 1, {}, {{"food", 1.0}}});
  for (std::size_t i = 0; i < costs.size(); ++i)
    d.edges.push_back({static_cast<PoiId>(i), static_cast<PoiId>(i + 1), costs[i]});
  return d;
}

// Randomized instances ------------------------------------------------------

struct Instance {
  PoiMap map;
  FeatureIndex fi;
  HopIndex hi;
  Query q;
  CandidateSet cs;
};

struct InstanceTweaks {
  std::uint32_t pois = 10;
  double density = 2.5;
  std::uint32_t features = 4;
  bool directed = false;
  double b = 450;
  double theta = 0;
  double alpha = 1;
  int k = 1;
  Aggregation agg = Aggregation::power_law;
  bool count_endpoint_stay = false;
  bool same_endpoint = false;
};

inline Instance make_instance(std::uint64_t seed, const InstanceTweaks& t = {}) {
  GeneratorConfig cfg;
  cfg.poi_count = t.pois;
  cfg.edge_density = t.density;
  cfg.feature_count = t.features;
  cfg.directed = t.directed;
  cfg.seed = seed;
  PoiMap map(generate_map(cfg));
  FeatureIndex fi = FeatureIndex::build(map);
  HopIndex hi = HopIndex::build(map);
  AggregationSpec agg{t.agg, t.alpha};
  Query q = generate_queries(map, 1, t.b, t.theta, t.alpha, t.k, seed ^ 0x9e3779b9, agg)[0];
  q.count_endpoint_stay = t.count_endpoint_stay;
  if (t.same_endpoint) q.y = q.x;
  CandidateSet cs = retrieve_subindices(map, fi, hi, q);
  return Instance{std::move(map), std::move(fi), std::move(hi), std::move(q), std::move(cs)};
}

// Result digests -------------------------------------------------------------

using EntryDigest = std::vector<std::tuple<std::vector<std::uint32_t>, double, double>>;

inline EntryDigest digest(const TopK& topk) {
  EntryDigest out;
  for (const auto& e : topk.entries()) out.emplace_back(e.set, e.gain, e.cost);
  return out;
}

inline bool digests_match(const EntryDigest& a, const EntryDigest& b, double tol = 1e-9) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::get<0>(a[i]) != std::get<0>(b[i])) return false;
    if (std::abs(std::get<1>(a[i]) - std::get<1>(b[i])) > tol) return false;
    if (std::abs(std::get<2>(a[i]) - std::get<2>(b[i])) > tol) return false;
  }
  return true;
}

}  // namespace testutil
