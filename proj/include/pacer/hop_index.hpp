#pragma once

#include <algorithm>
#include <cstring>
#include <fstream>
#include <queue>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pacer/map_io.hpp"
#include "pacer/model.hpp"

namespace pacer {

// 2-hop labeling built with pruned landmark labeling over a descending-degree
// vertex order. A query merges the source's outgoing and the target's
// incoming label lists over their common pivots.
class HopIndex {
 public:
  struct Label {
    PoiId pivot = 0;
    double d = 0;
  };
  // Internal merge representation; pivots are order ranks so appends during
  // construction keep lists rank-sorted.
  struct RankLabel {
    std::uint32_t rank = 0;
    double d = 0;
  };

  static HopIndex build(const PoiMap& map) {
    HopIndex hi;
    hi.directed_ = map.directed();
    hi.init_order(map);
    std::size_t n = map.size();
    hi.out_rank_.resize(n);
    hi.in_rank_.resize(n);

    std::vector<double> dist(n, kInfCost);
    std::vector<std::uint32_t> touched;
    using Item = std::pair<double, std::uint32_t>;

    for (std::uint32_t r = 0; r < n; ++r) {
      std::uint32_t v = hi.order_[r];
      for (int pass = 0; pass < (hi.directed_ ? 2 : 1); ++pass) {
        bool backward = pass == 1;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
        dist[v] = 0;
        touched.push_back(v);
        pq.emplace(0.0, v);
        while (!pq.empty()) {
          auto [d, u] = pq.top();
          pq.pop();
          if (d > dist[u]) continue;
          // Forward pass labels u as reachable FROM the pivot (an incoming
          // label of u); backward labels u with its cost TO the pivot.
          // Undirected maps keep a single label set in in_rank_.
          const auto& src = backward ? hi.out_rank_[u]
                            : hi.directed_ ? hi.out_rank_[v]
                                           : hi.in_rank_[v];
          const auto& dstlist = backward ? hi.in_rank_[v] : hi.in_rank_[u];
          double via = merge(src, dstlist);
          if (via <= d + kCostEps) continue;
          (backward ? hi.out_rank_[u] : hi.in_rank_[u]).push_back({r, d});
          const auto& nbrs = backward ? map.in_edges(u) : map.out_edges(u);
          for (const auto& [w, c] : nbrs) {
            double nd = d + c;
            if (nd < dist[w]) {
              dist[w] = nd;
              touched.push_back(w);
              pq.emplace(nd, w);
            }
          }
        }
        for (std::uint32_t t : touched) dist[t] = kInfCost;
        touched.clear();
      }
    }
    if (!hi.directed_)
      for (std::uint32_t i = 0; i < n; ++i) hi.out_rank_[i] = hi.in_rank_[i];
    hi.finalize(map);
    return hi;
  }

  bool directed() const { return directed_; }
  std::size_t size() const { return out_by_d_.size(); }
  const std::vector<PoiId>& vertex_order() const { return order_ids_; }

  // Public label lists, sorted ascending by cost (ties by pivot id); the
  // self-label (i, 0) is always present.
  const std::vector<Label>& labels_out(std::uint32_t idx) const { return out_by_d_[idx]; }
  const std::vector<Label>& labels_in(std::uint32_t idx) const { return in_by_d_[idx]; }

  const std::vector<RankLabel>& merge_out(std::uint32_t idx) const { return out_rank_[idx]; }
  const std::vector<RankLabel>& merge_in(std::uint32_t idx) const { return in_rank_[idx]; }

  // Least travel cost via the label merge; infinity when no common pivot.
  double try_least_travel_cost(std::uint32_t i, std::uint32_t j,
                               std::size_t* visited = nullptr) const {
    if (i == j) return 0;
    return merge(out_rank_[i], in_rank_[j], visited);
  }

  double least_travel_cost(std::uint32_t i, std::uint32_t j) const {
    double d = try_least_travel_cost(i, j);
    if (!(d < kInfCost)) throw UnreachableError("pois share no pivot: unreachable pair");
    return d;
  }

  static double merge(const std::vector<RankLabel>& a, const std::vector<RankLabel>& b,
                      std::size_t* visited = nullptr) {
    double best = kInfCost;
    std::size_t ia = 0, ib = 0, ops = 0;
    while (ia < a.size() && ib < b.size()) {
      if (a[ia].rank == b[ib].rank) {
        best = std::min(best, a[ia].d + b[ib].d);
        ++ia;
        ++ib;
        ops += 2;
      } else if (a[ia].rank < b[ib].rank) {
        ++ia;
        ++ops;
      } else {
        ++ib;
        ++ops;
      }
    }
    if (visited) *visited = ops;
    return best;
  }

  void save(const std::string& path, const PoiMap& map) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write file: " + path);
    json header;
    header["poi_count"] = map.size();
    header["directed"] = directed_;
    header["vertex_order"] = order_ids_;
    std::string htext = header.dump();
    out.write(kMagic, 8);
    write_u64(out, htext.size());
    out.write(htext.data(), static_cast<std::streamsize>(htext.size()));
    for (std::uint32_t i = 0; i < map.size(); ++i) {
      write_list(out, out_rank_[i], map);
      if (directed_) write_list(out, in_rank_[i], map);
    }
    if (!out) throw InputError("short write: " + path);
  }

  static HopIndex load(const std::string& path, const PoiMap& map) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open file: " + path);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kMagic, 8) != 0)
      throw InputError("not a hop index file (bad magic): " + path);
    std::uint64_t hlen = read_u64(in, path);
    std::string htext(hlen, '\0');
    in.read(htext.data(), static_cast<std::streamsize>(hlen));
    if (!in) throw InputError("truncated hop index header: " + path);
    json header;
    try {
      header = json::parse(htext);
    } catch (const json::exception& e) {
      throw InputError("malformed hop index header: " + std::string(e.what()));
    }
    if (header.value("poi_count", std::uint64_t(0)) != map.size())
      throw InputError("hop index poi count does not match the map");
    if (header.value("directed", false) != map.directed())
      throw InputError("hop index direction flag does not match the map");

    HopIndex hi;
    hi.directed_ = map.directed();
    auto order_ids = header.at("vertex_order").get<std::vector<PoiId>>();
    if (order_ids.size() != map.size())
      throw InputError("hop index vertex order does not cover the map");
    hi.order_ids_ = order_ids;
    hi.order_.resize(map.size());
    hi.rank_.assign(map.size(), UINT32_MAX);
    for (std::uint32_t r = 0; r < order_ids.size(); ++r) {
      std::uint32_t idx = map.index_of(order_ids[r]);
      if (hi.rank_[idx] != UINT32_MAX)
        throw InputError("hop index vertex order repeats a poi");
      hi.order_[r] = idx;
      hi.rank_[idx] = r;
    }
    hi.out_rank_.resize(map.size());
    hi.in_rank_.resize(map.size());
    for (std::uint32_t i = 0; i < map.size(); ++i) {
      hi.out_rank_[i] = read_list(in, hi, map, path);
      hi.in_rank_[i] = hi.directed_ ? read_list(in, hi, map, path) : hi.out_rank_[i];
    }
    hi.finalize(map);
    return hi;
  }

 private:
  static constexpr const char kMagic[9] = "PCRIDX1\n";

  void init_order(const PoiMap& map) {
    std::size_t n = map.size();
    order_.resize(n);
    for (std::uint32_t i = 0; i < n; ++i) order_[i] = i;
    std::sort(order_.begin(), order_.end(), [&map](std::uint32_t a, std::uint32_t b) {
      std::size_t da = map.out_edges(a).size() + map.in_edges(a).size();
      std::size_t db = map.out_edges(b).size() + map.in_edges(b).size();
      if (da != db) return da > db;
      return map.id_at(a) < map.id_at(b);
    });
    rank_.resize(n);
    order_ids_.resize(n);
    for (std::uint32_t r = 0; r < n; ++r) {
      rank_[order_[r]] = r;
      order_ids_[r] = map.id_at(order_[r]);
    }
  }

  void finalize(const PoiMap& map) {
    out_by_d_ = to_public(out_rank_, map);
    in_by_d_ = directed_ ? to_public(in_rank_, map) : out_by_d_;
  }

  std::vector<std::vector<Label>> to_public(const std::vector<std::vector<RankLabel>>& src,
                                            const PoiMap& map) const {
    std::vector<std::vector<Label>> out(src.size());
    for (std::size_t i = 0; i < src.size(); ++i) {
      auto& dst = out[i];
      dst.reserve(src[i].size());
      for (const RankLabel& l : src[i]) dst.push_back({map.id_at(order_[l.rank]), l.d});
      std::sort(dst.begin(), dst.end(), [](const Label& a, const Label& b) {
        if (a.d != b.d) return a.d < b.d;
        return a.pivot < b.pivot;
      });
    }
    return out;
  }

  static void write_u64(std::ostream& out, std::uint64_t v) {
    char buf[8];
    std::memcpy(buf, &v, 8);
    out.write(buf, 8);
  }
  static std::uint64_t read_u64(std::istream& in, const std::string& path) {
    char buf[8];
    in.read(buf, 8);
    if (!in) throw InputError("truncated hop index: " + path);
    std::uint64_t v;
    std::memcpy(&v, buf, 8);
    return v;
  }

  void write_list(std::ostream& out, const std::vector<RankLabel>& list,
                  const PoiMap& map) const {
    write_u64(out, list.size());
    for (const RankLabel& l : list) {
      PoiId pivot = map.id_at(order_[l.rank]);
      char buf[12];
      std::memcpy(buf, &pivot, 4);
      std::memcpy(buf + 4, &l.d, 8);
      out.write(buf, 12);
    }
  }

  static std::vector<RankLabel> read_list(std::istream& in, const HopIndex& hi,
                                          const PoiMap& map, const std::string& path) {
    std::uint64_t count = read_u64(in, path);
    if (count > 0x7fffffffull) throw InputError("hop index label list too long: " + path);
    std::vector<RankLabel> list;
    list.reserve(count);
    std::uint32_t prev_rank = 0;
    for (std::uint64_t k = 0; k < count; ++k) {
      char buf[12];
      in.read(buf, 12);
      if (!in) throw InputError("truncated hop index labels: " + path);
      PoiId pivot;
      double d;
      std::memcpy(&pivot, buf, 4);
      std::memcpy(&d, buf + 4, 8);
      std::uint32_t rank = hi.rank_.at(map.index_of(pivot));
      if (k > 0 && rank <= prev_rank)
        throw InputError("hop index labels out of order: " + path);
      if (!(d >= 0) || !(d < kInfCost))
        throw InputError("hop index label cost out of range: " + path);
      prev_rank = rank;
      list.push_back({rank, d});
    }
    return list;
  }

  bool directed_ = false;
  std::vector<std::uint32_t> order_;     // rank -> dense index
  std::vector<std::uint32_t> rank_;      // dense index -> rank
  std::vector<PoiId> order_ids_;         // rank -> poi id
  std::vector<std::vector<RankLabel>> out_rank_, in_rank_;
  std::vector<std::vector<Label>> out_by_d_, in_by_d_;
};

}  // namespace pacer
