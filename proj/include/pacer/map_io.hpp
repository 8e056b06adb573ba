#pragma once

#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "pacer/model.hpp"

namespace pacer {

using json = nlohmann::ordered_json;

namespace detail {

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InputError("malformed json in " + path + ": " + e.what());
  }
  return j;
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write file: " + path);
  out << text;
}

inline double require_number(const json& j, const std::string& where) {
  if (!j.is_number()) throw InputError(where + " must be a number");
  return j.get<double>();
}

inline PoiId require_id(const json& j, const std::string& where) {
  if (!j.is_number_unsigned())
    throw InputError(where + " must be a nonnegative integer id");
  auto v = j.get<std::uint64_t>();
  if (v > 0xffffffffull) throw InputError(where + " exceeds the id range");
  return static_cast<PoiId>(v);
}

}  // namespace detail

inline MapData map_data_from_json(const json& j) {
  if (!j.is_object()) throw InputError("map: top level must be an object");
  MapData data;
  data.directed = j.value("directed", false);
  if (j.contains("beta")) data.beta = detail::require_number(j.at("beta"), "map.beta");
  if (!j.contains("features") || !j.at("features").is_array())
    throw InputError("map.features must be an array of names");
  for (const auto& f : j.at("features")) {
    if (!f.is_string()) throw InputError("map.features entries must be strings");
    data.features.push_back(f.get<std::string>());
  }
  if (!j.contains("pois") || !j.at("pois").is_array())
    throw InputError("map.pois must be an array");
  for (std::size_t i = 0; i < j.at("pois").size(); ++i) {
    const json& p = j.at("pois")[i];
    const std::string where = "map.pois[" + std::to_string(i) + "]";
    if (!p.is_object()) throw InputError(where + " must be an object");
    PoiData poi;
    poi.id = detail::require_id(p.at("id"), where + ".id");
    poi.stay = detail::require_number(p.at("stay"), where + ".stay");
    if (p.contains("lat") != p.contains("lon"))
      throw InputError(where + ": lat and lon must appear together");
    if (p.contains("lat"))
      poi.location = LatLon{detail::require_number(p.at("lat"), where + ".lat"),
                            detail::require_number(p.at("lon"), where + ".lon")};
    if (p.contains("ratings")) {
      if (!p.at("ratings").is_object())
        throw InputError(where + ".ratings must be an object");
      for (const auto& [name, value] : p.at("ratings").items())
        poi.ratings.emplace_back(name,
                                 detail::require_number(value, where + ".ratings." + name));
    }
    data.pois.push_back(std::move(poi));
  }
  if (!j.contains("edges") || !j.at("edges").is_array())
    throw InputError("map.edges must be an array");
  for (std::size_t i = 0; i < j.at("edges").size(); ++i) {
    const json& e = j.at("edges")[i];
    const std::string where = "map.edges[" + std::to_string(i) + "]";
    if (!e.is_object()) throw InputError(where + " must be an object");
    data.edges.push_back({detail::require_id(e.at("from"), where + ".from"),
                          detail::require_id(e.at("to"), where + ".to"),
                          detail::require_number(e.at("cost"), where + ".cost")});
  }
  return data;
}

inline json map_data_to_json(const MapData& data) {
  json j;
  j["directed"] = data.directed;
  j["beta"] = data.beta;
  j["features"] = data.features;
  json pois = json::array();
  for (const PoiData& p : data.pois) {
    json jp;
    jp["id"] = p.id;
    if (p.location) {
      jp["lat"] = p.location->lat;
      jp["lon"] = p.location->lon;
    }
    jp["stay"] = p.stay;
    json ratings = json::object();
    for (const auto& [name, value] : p.ratings) ratings[name] = value;
    jp["ratings"] = std::move(ratings);
    pois.push_back(std::move(jp));
  }
  j["pois"] = std::move(pois);
  json edges = json::array();
  for (const Edge& e : data.edges)
    edges.push_back({{"from", e.from}, {"to", e.to}, {"cost", e.cost}});
  j["edges"] = std::move(edges);
  return j;
}

inline MapData load_map_data(const std::string& path) {
  return map_data_from_json(detail::load_json_file(path));
}

inline PoiMap load_map(const std::string& path) { return PoiMap(load_map_data(path)); }

inline void save_map(const MapData& data, const std::string& path) {
  detail::write_text_file(path, map_data_to_json(data).dump(2) + "\n");
}

}  // namespace pacer
