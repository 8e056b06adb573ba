#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "pacer/model.hpp"

namespace pacer {

struct TopEntry {
  std::vector<std::uint32_t> set;  // candidate ranks, ascending
  Route route;                     // closed sequence including both endpoints
  double gain = 0;
  double cost = 0;
};

// Ordering: gain descending, cost ascending, then lexicographic set encoding
// so rank-k ties resolve deterministically.
inline bool topk_better(const TopEntry& a, const TopEntry& b) {
  if (a.gain != b.gain) return a.gain > b.gain;
  if (a.cost != b.cost) return a.cost < b.cost;
  return a.set < b.set;
}

// Bounded best-k collection keyed by POI set: one entry per distinct set,
// minimum-cost closed route as its representative.
class TopK {
 public:
  explicit TopK(std::size_t k = 1) : k_(k) {}

  std::size_t capacity() const { return k_; }
  const std::vector<TopEntry>& entries() const { return entries_; }

  // Gain of the k-th entry; -inf while the collection is not full, so early
  // threshold tests reject nothing.
  double threshold() const {
    return entries_.size() < k_ ? -std::numeric_limits<double>::infinity()
                                : entries_.back().gain;
  }

  bool offer(TopEntry entry) {
    for (auto& e : entries_) {
      if (e.set == entry.set) {
        if (entry.cost < e.cost) {
          e = std::move(entry);
          std::sort(entries_.begin(), entries_.end(), topk_better);
          return true;
        }
        return false;
      }
    }
    if (entries_.size() == k_ && !topk_better(entry, entries_.back())) return false;
    entries_.push_back(std::move(entry));
    std::sort(entries_.begin(), entries_.end(), topk_better);
    if (entries_.size() > k_) entries_.pop_back();
    return true;
  }

 private:
  std::size_t k_;
  std::vector<TopEntry> entries_;
};

inline TopK& update_topk(TopK& topk, std::vector<std::uint32_t> poi_set, Route closed_route,
                         double gain, double cost) {
  topk.offer(TopEntry{std::move(poi_set), std::move(closed_route), gain, cost});
  return topk;
}

}  // namespace pacer
