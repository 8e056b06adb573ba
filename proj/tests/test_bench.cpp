#include <catch2/catch_amalgamated.hpp>
#include <sstream>

#include "helpers.hpp"

using namespace pacer;

namespace {

struct BenchFixture {
  PoiMap map;
  FeatureIndex fi;
  HopIndex hi;
  explicit BenchFixture(std::uint32_t pois = 12)
      : map(generate_map([&] {
          GeneratorConfig cfg;
          cfg.poi_count = pois;
          cfg.edge_density = 2.5;
          cfg.feature_count = 4;
          cfg.seed = 400;
          return cfg;
        }())),
        fi(FeatureIndex::build(map)),
        hi(HopIndex::build(map)) {}
};

std::vector<std::string> csv_lines(const std::string& csv) {
  std::vector<std::string> lines;
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

}  // namespace

TEST_CASE("bench rows cover every algorithm and agree on exact gains", "[bench]") {
  BenchFixture fx;
  auto queries = generate_queries(fx.map, 3, 450, 0, 1, 2, 401);
  BenchReport report = run_bench(fx.map, fx.fi, fx.hi, queries, {"bf", "pacer2", "greedy"});
  REQUIRE(report.rows.size() == 9);

  for (std::size_t qi = 0; qi < queries.size(); ++qi) {
    double bf_gain = 0, p2_gain = 0, greedy_gain = 0;
    for (const auto& r : report.rows) {
      if (r.query_index != qi) continue;
      CHECK(r.completed);
      CHECK(r.error.empty());
      CHECK(r.b == 450);
      CHECK(r.k == 2);
      if (r.algorithm == "bf") bf_gain = r.gain;
      if (r.algorithm == "pacer2") p2_gain = r.gain;
      if (r.algorithm == "greedy") greedy_gain = r.gain;
    }
    CHECK(bf_gain == Catch::Approx(p2_gain).margin(1e-9));
    CHECK(greedy_gain <= bf_gain + 1e-9);
  }
}

TEST_CASE("bench aggregates into one csv line per configuration", "[bench]") {
  BenchFixture fx;
  auto queries = generate_queries(fx.map, 2, 400, 0, 1, 1, 402);
  BenchReport report = run_bench(fx.map, fx.fi, fx.hi, queries, {"pacer2", "pacer-sc"});
  auto lines = csv_lines(report.to_csv());
  REQUIRE(lines.size() == 3);  // header plus one line per algorithm group
  CHECK(lines[0] == "algorithm,b,theta,alpha,k,mean_gain,mean_ms,mean_examined,completion_ratio");
  CHECK(lines[1].substr(0, lines[1].find(',')) == "pacer-sc");
  CHECK(lines[2].substr(0, lines[2].find(',')) == "pacer2");
  for (std::size_t i = 1; i < lines.size(); ++i)
    CHECK(lines[i].substr(lines[i].rfind(',') + 1) == "1");  // every run completed

  json j = report.to_json();
  REQUIRE(j.contains("rows"));
  CHECK(j.at("rows").size() == 4);
  CHECK(j.at("csv") == report.to_csv());
}

TEST_CASE("a zero wall cap marks rows incomplete", "[bench]") {
  BenchFixture fx;
  auto queries = generate_queries(fx.map, 1, 400, 0, 1, 1, 403);
  BenchCaps caps;
  caps.wall_ms = 0;
  BenchReport report = run_bench(fx.map, fx.fi, fx.hi, queries, {"pacer1", "greedy"}, caps);
  REQUIRE(report.rows.size() == 2);
  for (const auto& r : report.rows) {
    CHECK(!r.completed);
    CHECK(!r.error.empty());
    CHECK(r.gain == 0);
  }
  auto lines = csv_lines(report.to_csv());
  for (std::size_t i = 1; i < lines.size(); ++i)
    CHECK(lines[i].substr(lines[i].rfind(',') + 1) == "0");
}

TEST_CASE("infeasible queries produce error rows instead of aborting", "[bench]") {
  BenchFixture fx;
  auto queries = generate_queries(fx.map, 2, 400, 0, 1, 1, 404);
  queries[0].x = fx.map.id_at(0);
  queries[0].y = fx.map.id_at(static_cast<std::uint32_t>(fx.map.size() - 1));
  queries[0].b = 0.001;  // every edge costs at least 5, so this cannot connect
  BenchReport report = run_bench(fx.map, fx.fi, fx.hi, queries, {"pacer2"});
  REQUIRE(report.rows.size() == 2);
  CHECK(!report.rows[0].completed);
  CHECK(report.rows[0].error.find("budget") != std::string::npos);
  CHECK(report.rows[1].completed);
}

TEST_CASE("unknown bench algorithms are rejected up front", "[bench]") {
  BenchFixture fx;
  auto queries = generate_queries(fx.map, 1, 400, 0, 1, 1, 405);
  CHECK_THROWS_AS(run_bench(fx.map, fx.fi, fx.hi, queries, {"pacer2", "astar"}), InputError);
}

TEST_CASE("exact gains grow with the budget", "[bench]") {
  BenchFixture fx;
  auto seed_queries = generate_queries(fx.map, 1, 300, 0, 1, 1, 406);
  std::vector<Query> sweep;
  for (double b : {300.0, 420.0, 540.0}) {
    Query q = seed_queries[0];
    q.b = b;
    sweep.push_back(q);
  }
  BenchReport report = run_bench(fx.map, fx.fi, fx.hi, sweep, {"pacer2"});
  REQUIRE(report.rows.size() == 3);
  for (const auto& r : report.rows) CHECK(r.completed);
  CHECK(report.rows[0].gain <= report.rows[1].gain + 1e-9);
  CHECK(report.rows[1].gain <= report.rows[2].gain + 1e-9);
}
