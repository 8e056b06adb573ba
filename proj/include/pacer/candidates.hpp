#pragma once

#include <algorithm>
#include <vector>

#include "pacer/feature_index.hpp"
#include "pacer/hop_index.hpp"
#include "pacer/model.hpp"
#include "pacer/query.hpp"

namespace pacer {

// Query-scoped sub-indices: the filtered candidate POIs, their filtered
// ratings, per-feature posting sublists, budget-cut label sublists, a dense
// travel-cost matrix over candidates plus both endpoints, and the relaxed
// per-POI costs used by bound arithmetic. Built once per query.
struct CandidateSet {
  std::uint32_t x = 0, y = 0;  // dense map indices
  PoiId x_id = 0, y_id = 0;
  bool same_endpoint = false;
  double b = 0;
  double sx = 0;          // effective endpoint stays (zero unless counted)
  double s_close = 0;     // stay added when closing at y; zero when x == y
  double theta = 0;
  double beta = 5.0;
  AggregationSpec agg;

  std::vector<std::uint32_t> features;  // preferred feature indices, ascending
  std::vector<double> weights;          // aligned with `features`

  std::vector<std::uint32_t> pois;      // candidate dense indices, ascending id
  std::vector<PoiId> ids;               // aligned poi ids
  std::vector<double> stays;            // aligned staying costs

  // Ratings that survive the preference threshold, as (feature slot, value).
  std::vector<std::vector<std::pair<std::uint32_t, double>>> filtered;
  std::vector<std::pair<std::uint32_t, double>> x_row, y_row;

  // Per-slot posting sublists: (candidate rank, rating), rating descending.
  std::vector<std::vector<std::pair<std::uint32_t, double>>> fi_q;

  // Label sublists cut at d <= b, for candidates then x then y.
  std::vector<std::vector<HopIndex::Label>> hi_q_out, hi_q_in;

  // Relaxed costs: stay plus half the cheapest incident edge on each side.
  std::vector<double> relaxed;        // per candidate
  std::vector<double> half_min_out;   // per candidate
  double half_min_out_x = 0;
  double relaxed_y = 0;               // s_close + half the cheapest edge into y

  double direct_cost = 0;             // cost of the trivial x -> y route

  std::uint32_t n = 0;  // candidate count
  std::uint32_t slot_x() const { return n; }
  std::uint32_t slot_y() const { return n + 1; }
  double travel(std::uint32_t a, std::uint32_t b) const {
    return travel_[static_cast<std::size_t>(a) * (n + 2) + b];
  }

  std::vector<double> travel_;
};

namespace detail {

inline std::vector<HopIndex::RankLabel> cut_rank_labels(
    const std::vector<HopIndex::RankLabel>& src, double b) {
  std::vector<HopIndex::RankLabel> out;
  out.reserve(src.size());
  for (const auto& l : src)
    if (l.d <= b + kCostEps) out.push_back(l);
  return out;
}

inline std::vector<HopIndex::Label> cut_labels(const std::vector<HopIndex::Label>& src,
                                               double b) {
  std::vector<HopIndex::Label> out;
  for (const auto& l : src)
    if (l.d <= b + kCostEps) out.push_back(l);
  return out;
}

}  // namespace detail

// Relaxed visiting cost: stay plus half the cheapest edge on each side. Every
// real route pays at least this much per visited POI, since any leg into or
// out of it costs at least the cheapest incident edge and each leg is shared
// between two endpoints.
inline double relaxed_poi_cost(const PoiMap& map, PoiId id) {
  std::uint32_t i = map.index_of(id);
  double in = map.min_in_edge(i), out = map.min_out_edge(i);
  if (!(in < kInfCost) || !(out < kInfCost))
    throw InputError("poi " + std::to_string(id) + " has no incident edge");
  return map.stay(i) + in / 2 + out / 2;
}

// Destination variant: the route ends there, so only the inbound half counts.
inline double relaxed_destination_cost(const PoiMap& map, PoiId id) {
  std::uint32_t i = map.index_of(id);
  double in = map.min_in_edge(i);
  if (!(in < kInfCost))
    throw InputError("poi " + std::to_string(id) + " has no incident edge");
  return map.stay(i) + in / 2;
}

inline CandidateSet retrieve_subindices(const PoiMap& map, const FeatureIndex& fi,
                                        const HopIndex& hi, const Query& q) {
  validate_query(q);
  if (fi.feature_count() != map.features().size())
    throw InputError("feature index does not match the map");
  if (hi.size() != map.size()) throw InputError("hop index does not match the map");

  CandidateSet cs;
  cs.x = map.index_of(q.x);
  cs.y = map.index_of(q.y);
  cs.x_id = q.x;
  cs.y_id = q.y;
  cs.same_endpoint = cs.x == cs.y;
  cs.b = q.b;
  cs.theta = q.theta;
  cs.beta = map.beta();
  cs.agg = q.agg;
  cs.sx = q.count_endpoint_stay ? map.stay(cs.x) : 0;
  double sy = q.count_endpoint_stay ? map.stay(cs.y) : 0;
  cs.s_close = cs.same_endpoint ? 0 : sy;

  // Preferred features, ascending feature index.
  std::vector<std::pair<std::uint32_t, double>> pref;
  for (const auto& [name, w] : q.weights) {
    if (w <= 0) continue;
    auto it = std::find(map.features().begin(), map.features().end(), name);
    if (it == map.features().end())
      throw InputError("query references unknown feature: " + name);
    pref.emplace_back(static_cast<std::uint32_t>(it - map.features().begin()), w);
  }
  if (pref.empty()) throw InputError("query: no feature has positive weight");
  std::sort(pref.begin(), pref.end());
  for (const auto& [h, w] : pref) {
    cs.features.push_back(h);
    cs.weights.push_back(w);
  }

  double txy = cs.same_endpoint ? 0 : hi.try_least_travel_cost(cs.x, cs.y);
  cs.direct_cost = cs.sx + txy + cs.s_close;
  if (!(cs.direct_cost <= q.b + kCostEps))
    throw InfeasibleQueryError("endpoints cannot be connected within the budget");

  // Feature-eligible POIs: threshold prefix of each preferred posting list.
  std::vector<char> eligible(map.size(), 0);
  for (std::uint32_t h : cs.features)
    for (const auto& e : fi.list(h)) {
      if (e.rating < q.theta) break;
      eligible[e.poi] = 1;
    }
  eligible[cs.x] = 0;
  eligible[cs.y] = 0;

  // Reachability filter: a candidate must fit in a single-visit route.
  for (std::uint32_t i = 0; i < map.size(); ++i) {
    if (!eligible[i]) continue;
    double t_in = hi.try_least_travel_cost(cs.x, i);
    double t_out = hi.try_least_travel_cost(i, cs.y);
    double single = cs.sx + t_in + map.stay(i) + t_out + cs.s_close;
    if (single <= q.b + kCostEps) cs.pois.push_back(i);
  }
  std::sort(cs.pois.begin(), cs.pois.end());  // dense order is id order
  cs.n = static_cast<std::uint32_t>(cs.pois.size());

  std::vector<std::uint32_t> rank_of(map.size(), UINT32_MAX);
  for (std::uint32_t r = 0; r < cs.n; ++r) {
    std::uint32_t i = cs.pois[r];
    rank_of[i] = r;
    cs.ids.push_back(map.id_at(i));
    cs.stays.push_back(map.stay(i));
  }

  auto filtered_row = [&](std::uint32_t poi) {
    std::vector<std::pair<std::uint32_t, double>> row;
    for (std::uint32_t slot = 0; slot < cs.features.size(); ++slot) {
      double v = map.rating(poi, cs.features[slot]);
      if (v >= q.theta && v > 0) row.emplace_back(slot, v);
    }
    return row;
  };
  for (std::uint32_t r = 0; r < cs.n; ++r) cs.filtered.push_back(filtered_row(cs.pois[r]));
  if (q.count_endpoint_stay) {
    cs.x_row = filtered_row(cs.x);
    if (!cs.same_endpoint) cs.y_row = filtered_row(cs.y);
  }

  cs.fi_q.resize(cs.features.size());
  for (std::uint32_t slot = 0; slot < cs.features.size(); ++slot)
    for (const auto& e : fi.list(cs.features[slot])) {
      if (e.rating < q.theta) break;
      if (rank_of[e.poi] != UINT32_MAX) cs.fi_q[slot].emplace_back(rank_of[e.poi], e.rating);
    }

  // Budget-cut label sublists and the dense travel matrix over them. Any leg
  // that fits the budget keeps its exact cost: both summands of its best
  // pivot are at most the leg cost, so neither is cut.
  std::vector<std::uint32_t> nodes(cs.pois);
  nodes.push_back(cs.x);
  nodes.push_back(cs.y);
  std::vector<std::vector<HopIndex::RankLabel>> cut_out, cut_in;
  cut_out.reserve(nodes.size());
  cut_in.reserve(nodes.size());
  for (std::uint32_t node : nodes) {
    cs.hi_q_out.push_back(detail::cut_labels(hi.labels_out(node), q.b));
    cs.hi_q_in.push_back(detail::cut_labels(hi.labels_in(node), q.b));
    cut_out.push_back(detail::cut_rank_labels(hi.merge_out(node), q.b));
    cut_in.push_back(detail::cut_rank_labels(hi.merge_in(node), q.b));
  }
  std::uint32_t m = cs.n + 2;
  cs.travel_.assign(static_cast<std::size_t>(m) * m, kInfCost);
  for (std::uint32_t a = 0; a < m; ++a)
    for (std::uint32_t bslot = 0; bslot < m; ++bslot) {
      double t = nodes[a] == nodes[bslot] ? 0 : HopIndex::merge(cut_out[a], cut_in[bslot]);
      cs.travel_[static_cast<std::size_t>(a) * m + bslot] = t;
    }

  for (std::uint32_t r = 0; r < cs.n; ++r) {
    std::uint32_t i = cs.pois[r];
    cs.relaxed.push_back(map.stay(i) + map.min_in_edge(i) / 2 + map.min_out_edge(i) / 2);
    cs.half_min_out.push_back(map.min_out_edge(i) / 2);
  }
  cs.half_min_out_x = map.min_out_edge(cs.x) / 2;
  cs.relaxed_y = cs.s_close + map.min_in_edge(cs.y) / 2;

  return cs;
}

}  // namespace pacer
