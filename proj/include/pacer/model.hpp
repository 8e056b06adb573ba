#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace pacer {

using PoiId = std::uint32_t;

// Absolute tolerance for all cost comparisons.
inline constexpr double kCostEps = 1e-9;
inline constexpr double kInfCost = std::numeric_limits<double>::infinity();

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnreachableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InfeasibleQueryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CapExceededError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LatLon {
  double lat = 0;
  double lon = 0;
};

// Raw per-POI record as it appears in a map file. Ratings are keyed by
// feature name until validation resolves them against the feature list.
struct PoiData {
  PoiId id = 0;
  double stay = 0;
  std::optional<LatLon> location;  // metadata only; no algorithm reads it
  std::vector<std::pair<std::string, double>> ratings;
};

struct Edge {
  PoiId from = 0;
  PoiId to = 0;
  double cost = 0;
};

// Parsed but not yet validated map. validate_map() reports every violation;
// PoiMap's constructor accepts only violation-free data.
struct MapData {
  bool directed = false;
  double beta = 5.0;
  std::vector<std::string> features;
  std::vector<PoiData> pois;
  std::vector<Edge> edges;
};

struct Violation {
  std::string code;
  std::string message;
};

namespace detail {

inline bool map_connected(const MapData& data,
                          const std::unordered_map<PoiId, std::uint32_t>& index) {
  if (data.pois.empty()) return true;
  std::vector<std::vector<std::uint32_t>> adj(data.pois.size());
  for (const Edge& e : data.edges) {
    auto a = index.find(e.from);
    auto b = index.find(e.to);
    if (a == index.end() || b == index.end()) continue;
    adj[a->second].push_back(b->second);
    adj[b->second].push_back(a->second);  // connectivity over the undirected skeleton
  }
  std::vector<char> seen(data.pois.size(), 0);
  std::vector<std::uint32_t> stack{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    std::uint32_t v = stack.back();
    stack.pop_back();
    for (std::uint32_t w : adj[v]) {
      if (!seen[w]) {
        seen[w] = 1;
        ++reached;
        stack.push_back(w);
      }
    }
  }
  return reached == data.pois.size();
}

}  // namespace detail

inline std::vector<Violation> validate_map(const MapData& data) {
  std::vector<Violation> out;
  auto add = [&out](std::string code, std::string msg) {
    out.push_back({std::move(code), std::move(msg)});
  };

  if (!(data.beta > 0)) add("beta", "beta must be positive");

  std::unordered_map<std::string, std::uint32_t> feature_index;
  for (std::uint32_t h = 0; h < data.features.size(); ++h) {
    if (!feature_index.emplace(data.features[h], h).second)
      add("feature.duplicate", "duplicate feature name: " + data.features[h]);
  }

  std::unordered_map<PoiId, std::uint32_t> index;
  for (std::uint32_t i = 0; i < data.pois.size(); ++i) {
    const PoiData& p = data.pois[i];
    if (!index.emplace(p.id, i).second)
      add("poi.duplicate_id", "duplicate poi id: " + std::to_string(p.id));
    if (!(p.stay >= 0))
      add("poi.stay", "poi " + std::to_string(p.id) + ": stay must be nonnegative");
    for (const auto& [name, value] : p.ratings) {
      if (!feature_index.count(name))
        add("poi.rating_feature", "poi " + std::to_string(p.id) + ": unknown feature " + name);
      if (!(value >= 0) || value > data.beta + kCostEps)
        add("poi.rating_range",
            "poi " + std::to_string(p.id) + ": rating for " + name + " outside [0, beta]");
    }
  }

  for (std::size_t e = 0; e < data.edges.size(); ++e) {
    const Edge& edge = data.edges[e];
    if (!index.count(edge.from) || !index.count(edge.to))
      add("edge.endpoint", "edge " + std::to_string(e) + ": unknown endpoint");
    if (edge.from == edge.to)
      add("edge.self_loop", "edge " + std::to_string(e) + ": self loop");
    if (!(edge.cost > 0))
      add("edge.cost", "edge " + std::to_string(e) + ": cost must be positive");
  }

  if (!detail::map_connected(data, index)) add("graph.disconnected", "graph is not connected");
  return out;
}

// Immutable POI graph. POIs are held sorted by id; algorithms address them by
// dense index and translate back to ids at the boundary.
class PoiMap {
 public:
  explicit PoiMap(MapData data) : directed_(data.directed), beta_(data.beta) {
    auto violations = validate_map(data);
    if (!violations.empty()) {
      std::string msg = "invalid map:";
      for (std::size_t i = 0; i < violations.size() && i < 5; ++i)
        msg += " [" + violations[i].code + "] " + violations[i].message + ";";
      if (violations.size() > 5) msg += " ...";
      throw InputError(msg);
    }
    features_ = std::move(data.features);
    std::unordered_map<std::string, std::uint32_t> fidx;
    for (std::uint32_t h = 0; h < features_.size(); ++h) fidx.emplace(features_[h], h);

    std::sort(data.pois.begin(), data.pois.end(),
              [](const PoiData& a, const PoiData& b) { return a.id < b.id; });
    ids_.reserve(data.pois.size());
    stays_.reserve(data.pois.size());
    ratings_.resize(data.pois.size());
    locations_.resize(data.pois.size());
    for (std::uint32_t i = 0; i < data.pois.size(); ++i) {
      const PoiData& p = data.pois[i];
      ids_.push_back(p.id);
      stays_.push_back(p.stay);
      locations_[i] = p.location;
      index_.emplace(p.id, i);
      auto& row = ratings_[i];
      for (const auto& [name, value] : p.ratings)
        if (value > 0) row.emplace_back(fidx.at(name), value);
      std::sort(row.begin(), row.end());
    }

    out_.resize(ids_.size());
    in_.resize(ids_.size());
    for (const Edge& e : data.edges) {
      std::uint32_t a = index_.at(e.from);
      std::uint32_t b = index_.at(e.to);
      out_[a].emplace_back(b, e.cost);
      in_[b].emplace_back(a, e.cost);
      if (!directed_) {
        out_[b].emplace_back(a, e.cost);
        in_[a].emplace_back(b, e.cost);
      }
      edges_.push_back(e);
    }
    for (auto& v : out_) std::sort(v.begin(), v.end());
    for (auto& v : in_) std::sort(v.begin(), v.end());
  }

  bool directed() const { return directed_; }
  double beta() const { return beta_; }
  std::size_t size() const { return ids_.size(); }
  const std::vector<std::string>& features() const { return features_; }
  const std::vector<Edge>& edges() const { return edges_; }

  std::uint32_t index_of(PoiId id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw InputError("unknown poi id: " + std::to_string(id));
    return it->second;
  }
  std::optional<std::uint32_t> find(PoiId id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  PoiId id_at(std::uint32_t idx) const { return ids_[idx]; }
  double stay(std::uint32_t idx) const { return stays_[idx]; }
  const std::optional<LatLon>& location(std::uint32_t idx) const { return locations_[idx]; }

  // Sparse nonzero ratings, sorted by feature index.
  const std::vector<std::pair<std::uint32_t, double>>& ratings(std::uint32_t idx) const {
    return ratings_[idx];
  }
  double rating(std::uint32_t idx, std::uint32_t feature) const {
    const auto& row = ratings_[idx];
    auto it = std::lower_bound(row.begin(), row.end(),
                               std::make_pair(feature, -kInfCost));
    if (it != row.end() && it->first == feature) return it->second;
    return 0;
  }

  const std::vector<std::pair<std::uint32_t, double>>& out_edges(std::uint32_t idx) const {
    return out_[idx];
  }
  const std::vector<std::pair<std::uint32_t, double>>& in_edges(std::uint32_t idx) const {
    return in_[idx];
  }

  double min_out_edge(std::uint32_t idx) const {
    double m = kInfCost;
    for (const auto& [to, c] : out_[idx]) m = std::min(m, c);
    return m;
  }
  double min_in_edge(std::uint32_t idx) const {
    double m = kInfCost;
    for (const auto& [from, c] : in_[idx]) m = std::min(m, c);
    return m;
  }

 private:
  bool directed_;
  double beta_;
  std::vector<std::string> features_;
  std::vector<PoiId> ids_;
  std::vector<double> stays_;
  std::vector<std::optional<LatLon>> locations_;
  std::vector<std::vector<std::pair<std::uint32_t, double>>> ratings_;
  std::vector<std::vector<std::pair<std::uint32_t, double>>> out_;
  std::vector<std::vector<std::pair<std::uint32_t, double>>> in_;
  std::vector<Edge> edges_;
  std::unordered_map<PoiId, std::uint32_t> index_;
};

struct Route {
  std::vector<PoiId> pois;  // visit order, starts at x; closed routes end at y
  double cost = 0;
  bool open = true;
};

// Total cost of a visit sequence: stays over the distinct POIs plus least
// travel cost between consecutive ones. `dist` maps dense index pairs to a
// travel cost (infinity when unreachable). Repeats are rejected except the
// first element reappearing as the last (closed route with x == y).
template <typename DistFn>
double route_cost(const PoiMap& map, const std::vector<PoiId>& seq, DistFn&& dist) {
  if (seq.empty()) throw InputError("route must contain at least one poi");
  std::vector<std::uint32_t> idx(seq.size());
  for (std::size_t i = 0; i < seq.size(); ++i) idx[i] = map.index_of(seq[i]);

  std::vector<std::uint32_t> uniq(idx);
  std::sort(uniq.begin(), uniq.end());
  auto dup = std::adjacent_find(uniq.begin(), uniq.end());
  if (dup != uniq.end()) {
    bool closed_loop = seq.size() >= 2 && idx.front() == idx.back();
    if (!closed_loop || std::count(idx.begin(), idx.end(), *dup) > 2 || *dup != idx.front())
      throw InputError("route repeats a poi");
    uniq.erase(dup);
    if (std::adjacent_find(uniq.begin(), uniq.end()) != uniq.end())
      throw InputError("route repeats a poi");
  }

  double total = 0;
  for (std::uint32_t u : uniq) total += map.stay(u);
  for (std::size_t i = 0; i + 1 < idx.size(); ++i) {
    double t = dist(idx[i], idx[i + 1]);
    if (!(t < kInfCost))
      throw UnreachableError("no path between consecutive route pois");
    total += t;
  }
  return total;
}

}  // namespace pacer
