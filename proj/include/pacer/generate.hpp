#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "pacer/dijkstra.hpp"
#include "pacer/model.hpp"
#include "pacer/query.hpp"

namespace pacer {

// All generator randomness flows through these helpers so output depends only
// on the seed, not on the standard library's distribution implementations.
namespace detail {

inline double unit_real(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double gaussian(std::mt19937_64& rng, double mean, double stddev) {
  double u1 = unit_real(rng), u2 = unit_real(rng);
  while (u1 <= 0) u1 = unit_real(rng);
  double z = std::sqrt(-2 * std::log(u1)) * std::cos(2 * 3.14159265358979323846 * u2);
  return mean + stddev * z;
}

inline std::uint64_t uniform_int(std::mt19937_64& rng, std::uint64_t lo, std::uint64_t hi) {
  return lo + rng() % (hi - lo + 1);  // spans are tiny here, modulo bias is irrelevant
}

}  // namespace detail

struct GeneratorConfig {
  std::uint32_t poi_count = 50;
  double edge_density = 4;  // average edge count per POI
  std::uint32_t feature_count = 6;
  double stay_mean = 90;
  double stay_stddev = 15;
  double beta = 5;
  bool directed = false;
  std::uint64_t seed = 1;
};

struct CheckinRow {
  PoiId poi;
  std::uint32_t feature;
  std::uint64_t count;
};

struct CheckinTable {
  std::vector<std::string> features;
  std::vector<CheckinRow> rows;
};

struct RatingsResult {
  std::map<PoiId, std::vector<std::pair<std::string, double>>> per_poi;
  std::vector<std::string> kept_features;
  std::vector<std::string> dropped_features;  // all-zero check-in columns
};

// Rating of POI i on feature h: its check-in count relative to the mean count
// among POIs checked in on h, scaled to beta/2 and clamped at beta. A POI at
// exactly the mean scores beta/2.
inline RatingsResult ratings_from_checkins(const CheckinTable& table, double beta) {
  if (!(beta > 0)) throw InputError("beta must be positive");
  RatingsResult out;
  for (std::uint32_t h = 0; h < table.features.size(); ++h) {
    double total = 0;
    std::uint64_t nonzero = 0;
    for (const auto& r : table.rows)
      if (r.feature == h && r.count > 0) {
        total += static_cast<double>(r.count);
        ++nonzero;
      }
    if (nonzero == 0) {
      out.dropped_features.push_back(table.features[h]);
      continue;
    }
    out.kept_features.push_back(table.features[h]);
    double mean = total / static_cast<double>(nonzero);
    for (const auto& r : table.rows)
      if (r.feature == h && r.count > 0) {
        double v = std::min(static_cast<double>(r.count) / mean * beta / 2, beta);
        out.per_poi[r.poi].emplace_back(table.features[h], v);
      }
  }
  return out;
}

inline MapData generate_map(const GeneratorConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  MapData data;
  data.directed = cfg.directed;
  data.beta = cfg.beta;

  CheckinTable table;
  for (std::uint32_t h = 0; h < cfg.feature_count; ++h)
    table.features.push_back("f" + std::to_string(h));

  std::uint32_t n = cfg.poi_count;
  for (std::uint32_t i = 0; i < n; ++i) {
    PoiData p;
    p.id = i;
    p.location = LatLon{40.0 + detail::unit_real(rng), -74.0 + detail::unit_real(rng)};
    p.stay = std::max(1.0, detail::gaussian(rng, cfg.stay_mean, cfg.stay_stddev));
    data.pois.push_back(std::move(p));
  }

  // Check-ins: one to three features per POI with a low-skewed count, every
  // feature guaranteed at least one check-in so none is dropped.
  if (cfg.feature_count > 0) {
    for (std::uint32_t i = 0; i < n; ++i) {
      std::uint64_t picks = detail::uniform_int(rng, 1, std::min<std::uint64_t>(3, cfg.feature_count));
      std::vector<std::uint32_t> chosen;
      while (chosen.size() < picks) {
        auto h = static_cast<std::uint32_t>(detail::uniform_int(rng, 0, cfg.feature_count - 1));
        if (std::find(chosen.begin(), chosen.end(), h) == chosen.end()) chosen.push_back(h);
      }
      for (std::uint32_t h : chosen) {
        double u = detail::unit_real(rng);
        table.rows.push_back({i, h, 1 + static_cast<std::uint64_t>(99 * u * u * u)});
      }
    }
    for (std::uint32_t h = 0; h < cfg.feature_count; ++h) {
      bool seen = false;
      for (const auto& r : table.rows) seen |= r.feature == h;
      if (!seen) table.rows.push_back({h % n, h, 1});
    }
    RatingsResult ratings = ratings_from_checkins(table, cfg.beta);
    data.features = ratings.kept_features;
    for (auto& p : data.pois) {
      auto it = ratings.per_poi.find(p.id);
      if (it != ratings.per_poi.end()) p.ratings = it->second;
    }
  }

  // Random attachment tree for connectivity, then extra random edges up to
  // the density target. Costs uniform in [5, 30].
  auto cost = [&] { return 5 + 25 * detail::unit_real(rng); };
  std::set<std::pair<PoiId, PoiId>> present;
  auto add_edge = [&](PoiId a, PoiId b) {
    data.edges.push_back({a, b, cost()});
    present.insert({a, b});
    if (!cfg.directed) present.insert({b, a});
  };
  for (std::uint32_t i = 1; i < n; ++i)
    add_edge(static_cast<PoiId>(detail::uniform_int(rng, 0, i - 1)), i);
  auto target = static_cast<std::size_t>(cfg.edge_density * n);
  std::size_t attempts = 0;
  while (data.edges.size() < target && attempts < 50 * target + 100) {
    ++attempts;
    auto a = static_cast<PoiId>(detail::uniform_int(rng, 0, n - 1));
    auto b = static_cast<PoiId>(detail::uniform_int(rng, 0, n - 1));
    if (a == b || present.count({a, b})) continue;
    add_edge(a, b);
  }
  if (cfg.directed)  // a directed cycle over all nodes keeps every pair reachable
    for (std::uint32_t i = 0; i < n; ++i)
      if (n > 1 && !present.count({i, (i + 1) % n})) add_edge(i, (i + 1) % n);

  return data;
}

// Feature popularity proxy on synthetic maps: total rating mass per feature.
inline std::vector<double> feature_popularity(const PoiMap& map) {
  std::vector<double> pop(map.features().size(), 0);
  for (std::uint32_t i = 0; i < map.size(); ++i)
    for (const auto& [h, v] : map.ratings(i)) pop[h] += v;
  return pop;
}

// Draws `count` queries: endpoints sampled uniformly (retrying until the
// direct route fits the budget), m in [1,4] preferred features chosen with
// popularity-proportional probability, weights proportional to popularity.
// m_override pins m for distribution tests; 0 keeps it random.
inline std::vector<Query> generate_queries(const PoiMap& map, std::size_t count, double b,
                                           double theta, double alpha, int k, std::uint64_t seed,
                                           AggregationSpec agg = {Aggregation::power_law, 1.0},
                                           std::uint32_t m_override = 0) {
  if (map.features().empty()) throw InputError("map has no features to query");
  agg.alpha = alpha;
  std::mt19937_64 rng(seed);
  std::vector<double> pop = feature_popularity(map);
  double pop_total = 0;
  for (double v : pop) pop_total += v;
  if (!(pop_total > 0)) throw InputError("map has no positive ratings");

  auto draw_feature = [&](const std::vector<char>& taken) {
    while (true) {
      double t = detail::unit_real(rng) * pop_total;
      for (std::uint32_t h = 0; h < pop.size(); ++h) {
        t -= pop[h];
        if (t <= 0) {
          if (taken[h] || pop[h] <= 0) break;  // redraw duplicates
          return h;
        }
      }
    }
  };

  std::uint32_t features_with_mass = 0;
  for (double v : pop) features_with_mass += v > 0;

  std::vector<Query> out;
  for (std::size_t qi = 0; qi < count; ++qi) {
    Query q;
    q.b = b;
    q.theta = theta;
    q.k = k;
    q.agg = agg;

    std::uint32_t m = m_override ? m_override
                                 : static_cast<std::uint32_t>(detail::uniform_int(rng, 1, 4));
    m = std::min({m, features_with_mass});
    std::vector<char> taken(pop.size(), 0);
    std::vector<std::uint32_t> chosen;
    for (std::uint32_t j = 0; j < m; ++j) {
      std::uint32_t h = draw_feature(taken);
      taken[h] = 1;
      chosen.push_back(h);
    }
    std::sort(chosen.begin(), chosen.end());
    double mass = 0;
    for (std::uint32_t h : chosen) mass += pop[h];
    for (std::uint32_t h : chosen) q.weights.emplace_back(map.features()[h], pop[h] / mass);

    bool placed = false;
    for (int attempt = 0; attempt < 64 && !placed; ++attempt) {
      auto xi = static_cast<std::uint32_t>(detail::uniform_int(rng, 0, map.size() - 1));
      auto yi = static_cast<std::uint32_t>(detail::uniform_int(rng, 0, map.size() - 1));
      std::vector<double> dist = dijkstra_all(map, xi);
      if (!(dist[yi] < kInfCost)) continue;
      if (dist[yi] > b) continue;  // endpoint stays excluded by default
      q.x = map.id_at(xi);
      q.y = map.id_at(yi);
      placed = true;
    }
    if (!placed)
      throw InputError("could not sample feasible endpoints within the budget; raise b");
    out.push_back(std::move(q));
  }
  return out;
}

}  // namespace pacer
