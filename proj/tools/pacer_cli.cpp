#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pacer/pacer.hpp"

namespace {

void write_output(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  pacer::detail::write_text_file(path, text);
}

int cmd_validate(const std::string& map_path) {
  pacer::MapData data = pacer::load_map_data(map_path);
  auto violations = pacer::validate_map(data);
  if (violations.empty()) {
    std::cout << "map ok: " << data.pois.size() << " pois, " << data.edges.size() << " edges\n";
    return 0;
  }
  for (const auto& v : violations) std::cout << v.code << ": " << v.message << "\n";
  return 2;
}

void cmd_index(const std::string& map_path, const std::string& out) {
  pacer::PoiMap map = pacer::load_map(map_path);
  pacer::HopIndex hi = pacer::HopIndex::build(map);
  hi.save(out, map);
  pacer::FeatureIndex fi = pacer::FeatureIndex::build(map);
  fi.save(out + ".fi.json", map);
  std::size_t labels = 0;
  for (std::uint32_t i = 0; i < map.size(); ++i) labels += hi.labels_in(i).size();
  std::cout << "index written: " << map.size() << " pois, " << labels << " inbound labels\n";
}

pacer::FeatureIndex load_or_build_fi(const std::string& idx_path, const pacer::PoiMap& map) {
  std::ifstream probe(idx_path + ".fi.json");
  if (probe.good()) return pacer::FeatureIndex::load(idx_path + ".fi.json", map);
  return pacer::FeatureIndex::build(map);
}

void cmd_query(const std::string& map_path, const std::string& idx_path,
               const std::string& query_path, const std::string& algo, int k_override,
               double cap_ms, std::int64_t cap_mem, bool force, const std::string& out) {
  pacer::PoiMap map = pacer::load_map(map_path);
  pacer::HopIndex hi = pacer::HopIndex::load(idx_path, map);
  pacer::FeatureIndex fi = load_or_build_fi(idx_path, map);
  std::vector<pacer::Query> queries = pacer::load_queries(query_path);

  pacer::SearchLimits lim;
  lim.wall_ms = cap_ms;
  lim.mem_bytes = cap_mem;
  lim.force = force;

  pacer::json results = pacer::json::array();
  for (pacer::Query q : queries) {
    if (k_override > 0) q.k = k_override;
    pacer::CandidateSet cs = pacer::retrieve_subindices(map, fi, hi, q);
    pacer::GainContext ctx(cs);
    results.push_back(pacer::run_algorithm(algo, cs, ctx, q, lim).result);
  }
  write_output(out, results.dump(2));
}

void cmd_gen_map(const pacer::GeneratorConfig& cfg, const std::string& out) {
  pacer::MapData data = pacer::generate_map(cfg);
  pacer::save_map(data, out);
  std::cout << "map written: " << data.pois.size() << " pois, " << data.edges.size()
            << " edges\n";
}

void cmd_gen_queries(const std::string& map_path, std::size_t count, double b, double theta,
                     double alpha, int k, std::uint64_t seed, const std::string& agg_name,
                     std::uint32_t m_override, const std::string& out) {
  pacer::PoiMap map = pacer::load_map(map_path);
  pacer::AggregationSpec agg;
  agg.kind = pacer::aggregation_from_name(agg_name);
  auto queries =
      pacer::generate_queries(map, count, b, theta, alpha, k, seed, agg, m_override);
  pacer::save_queries(queries, out);
  std::cout << "queries written: " << queries.size() << "\n";
}

void cmd_bench(const std::string& map_path, const std::string& idx_path,
               const std::string& query_path, std::vector<std::string> algos, double cap_ms,
               std::int64_t cap_mem, const std::string& csv_out, const std::string& json_out) {
  pacer::PoiMap map = pacer::load_map(map_path);
  pacer::HopIndex hi = pacer::HopIndex::load(idx_path, map);
  pacer::FeatureIndex fi = load_or_build_fi(idx_path, map);
  std::vector<pacer::Query> queries = pacer::load_queries(query_path);

  pacer::BenchCaps caps;
  caps.wall_ms = cap_ms;
  caps.mem_bytes = cap_mem;
  pacer::BenchReport report = pacer::run_bench(map, fi, hi, queries, algos, caps);
  if (!json_out.empty()) pacer::detail::write_text_file(json_out, report.to_json().dump(2));
  write_output(csv_out, report.to_csv());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"top-k route search over POI graphs"};
  app.require_subcommand(1);

  std::string map_path, idx_path, query_path, out, algo = "pacer2";
  std::string csv_out, json_out, agg_name = "power_law";
  int k = 0;
  double cap_ms = -1;
  std::int64_t cap_mem = -1;
  bool force = false;

  auto* validate = app.add_subcommand("validate", "check a map file");
  validate->add_option("map", map_path)->required();

  auto* index = app.add_subcommand("index", "build the travel-cost and rating indices");
  index->add_option("map", map_path)->required();
  index->add_option("-o,--out", out)->required();

  auto* query = app.add_subcommand("query", "run one algorithm over a query file");
  query->add_option("map", map_path)->required();
  query->add_option("index", idx_path)->required();
  query->add_option("queries", query_path)->required();
  query->add_option("--algo", algo)->check(CLI::IsMember({"bf", "pacer1", "pacer2", "pacer-sc", "greedy"}));
  query->add_option("-k", k, "override k from the query file");
  query->add_option("--cap-ms", cap_ms);
  query->add_option("--cap-mem", cap_mem);
  query->add_flag("--force", force, "lift the brute-force size guard");
  query->add_option("-o,--out", out);

  auto* gen_map = app.add_subcommand("gen-map", "write a seeded synthetic map");
  pacer::GeneratorConfig cfg;
  gen_map->add_option("--pois", cfg.poi_count);
  gen_map->add_option("--density", cfg.edge_density, "average edges per poi");
  gen_map->add_option("--features", cfg.feature_count);
  gen_map->add_option("--stay-mean", cfg.stay_mean);
  gen_map->add_option("--stay-std", cfg.stay_stddev);
  gen_map->add_option("--beta", cfg.beta);
  gen_map->add_option("--seed", cfg.seed);
  gen_map->add_flag("--directed", cfg.directed);
  gen_map->add_option("-o,--out", out)->required();

  auto* gen_queries = app.add_subcommand("gen-queries", "write a seeded query batch");
  std::size_t count = 50;
  double b = 600, theta = 0, alpha = 1;
  std::uint64_t seed = 1;
  std::uint32_t m_override = 0;
  int qk = 1;
  gen_queries->add_option("map", map_path)->required();
  gen_queries->add_option("--count", count);
  gen_queries->add_option("-b,--budget", b);
  gen_queries->add_option("--theta", theta);
  gen_queries->add_option("--alpha", alpha);
  gen_queries->add_option("--agg", agg_name)
      ->check(CLI::IsMember({"power_law", "log", "coverage"}));
  gen_queries->add_option("-k", qk);
  gen_queries->add_option("--seed", seed);
  gen_queries->add_option("--m", m_override, "pin the preferred-feature count");
  gen_queries->add_option("-o,--out", out)->required();

  auto* bench = app.add_subcommand("bench", "run algorithms over a query batch");
  std::vector<std::string> algos = {"pacer2"};
  bench->add_option("map", map_path)->required();
  bench->add_option("index", idx_path)->required();
  bench->add_option("queries", query_path)->required();
  bench->add_option("--algos", algos)->delimiter(',');
  bench->add_option("--cap-ms", cap_ms)->default_val(60000.0);
  bench->add_option("--cap-mem", cap_mem)->default_val(std::int64_t(2) << 30);
  bench->add_option("--csv", csv_out);
  bench->add_option("--json", json_out);

  try {
    app.parse(argc, argv);
    if (*validate) return cmd_validate(map_path);
    if (*index) cmd_index(map_path, out);
    if (*query) cmd_query(map_path, idx_path, query_path, algo, k, cap_ms, cap_mem, force, out);
    if (*gen_map) cmd_gen_map(cfg, out);
    if (*gen_queries)
      cmd_gen_queries(map_path, count, b, theta, alpha, qk, seed, agg_name, m_override, out);
    if (*bench) cmd_bench(map_path, idx_path, query_path, algos, cap_ms, cap_mem, csv_out, json_out);
    return 0;
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const pacer::InfeasibleQueryError& e) {
    std::cerr << "infeasible query: " << e.what() << "\n";
    return 3;
  } catch (const pacer::CapExceededError& e) {
    std::cerr << "cap exceeded: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
