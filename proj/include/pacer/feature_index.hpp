#pragma once

#include <algorithm>
#include <vector>

#include "pacer/map_io.hpp"
#include "pacer/model.hpp"

namespace pacer {

// Per-feature posting lists: (dense poi index, rating), rating descending,
// ties by ascending poi id. Only nonzero ratings appear.
class FeatureIndex {
 public:
  struct Entry {
    std::uint32_t poi = 0;
    double rating = 0;
  };

  static FeatureIndex build(const PoiMap& map) {
    FeatureIndex fi;
    fi.lists_.resize(map.features().size());
    for (std::uint32_t i = 0; i < map.size(); ++i)
      for (const auto& [feature, value] : map.ratings(i))
        fi.lists_[feature].push_back({i, value});
    for (auto& list : fi.lists_) {
      std::sort(list.begin(), list.end(), [&map](const Entry& a, const Entry& b) {
        if (a.rating != b.rating) return a.rating > b.rating;
        return map.id_at(a.poi) < map.id_at(b.poi);
      });
    }
    return fi;
  }

  std::size_t feature_count() const { return lists_.size(); }
  const std::vector<Entry>& list(std::uint32_t feature) const { return lists_.at(feature); }

  json to_json(const PoiMap& map) const {
    json j;
    j["features"] = map.features();
    json lists = json::array();
    for (const auto& list : lists_) {
      json jl = json::array();
      for (const Entry& e : list)
        jl.push_back({{"poi", map.id_at(e.poi)}, {"rating", e.rating}});
      lists.push_back(std::move(jl));
    }
    j["lists"] = std::move(lists);
    return j;
  }

  static FeatureIndex from_json(const json& j, const PoiMap& map) {
    if (!j.is_object() || !j.contains("features") || !j.contains("lists"))
      throw InputError("feature index: expected features and lists");
    if (j.at("features").get<std::vector<std::string>>() != map.features())
      throw InputError("feature index does not match the map's feature list");
    FeatureIndex fi;
    for (const auto& jl : j.at("lists")) {
      std::vector<Entry> list;
      for (const auto& je : jl)
        list.push_back({map.index_of(detail::require_id(je.at("poi"), "feature index poi")),
                        detail::require_number(je.at("rating"), "feature index rating")});
      fi.lists_.push_back(std::move(list));
    }
    if (fi.lists_.size() != map.features().size())
      throw InputError("feature index list count does not match the map");
    return fi;
  }

  void save(const std::string& path, const PoiMap& map) const {
    detail::write_text_file(path, to_json(map).dump() + "\n");
  }
  static FeatureIndex load(const std::string& path, const PoiMap& map) {
    return from_json(detail::load_json_file(path), map);
  }

 private:
  std::vector<std::vector<Entry>> lists_;
};

}  // namespace pacer
