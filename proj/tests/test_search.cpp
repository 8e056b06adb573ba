#include <catch2/catch_amalgamated.hpp>
#include <map>
#include <random>
#include <unordered_map>

#include "helpers.hpp"

using namespace pacer;
using testutil::digest;
using testutil::digests_match;
using testutil::path_map;

namespace {

double recompute_closed_cost(const CandidateSet& cs, const std::vector<PoiId>& pois) {
  std::unordered_map<PoiId, std::uint32_t> rank;
  for (std::uint32_t r = 0; r < cs.n; ++r) rank.emplace(cs.ids[r], r);
  double c = cs.sx;
  std::uint32_t prev = cs.slot_x();
  for (std::size_t i = 1; i + 1 < pois.size(); ++i) {
    std::uint32_t r = rank.at(pois[i]);
    c += cs.travel(prev, r) + cs.stays[r];
    prev = r;
  }
  if (pois.size() >= 2) c += cs.travel(prev, cs.slot_y()) + cs.s_close;
  return c;
}

void check_entries(const CandidateSet& cs, const GainContext& ctx, const SolveOutput& out) {
  const auto& entries = out.topk.entries();
  REQUIRE(!entries.empty());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const TopEntry& e = entries[i];
    CHECK(!e.route.open);
    CHECK(e.cost <= cs.b + kCostEps);
    REQUIRE(!e.route.pois.empty());
    CHECK(e.route.pois.front() == cs.x_id);
    CHECK(e.route.pois.back() == (e.route.pois.size() > 1 ? cs.y_id : cs.x_id));

    // The interior must be exactly the entry's set, and cost and gain must
    // recompute from the route and the set.
    std::vector<PoiId> interior(e.route.pois.begin() + 1,
                                e.route.pois.end() - (e.route.pois.size() > 1 ? 1 : 0));
    std::vector<PoiId> set_ids;
    for (std::uint32_t r : e.set) set_ids.push_back(cs.ids[r]);
    std::sort(interior.begin(), interior.end());
    CHECK(interior == set_ids);
    CHECK(e.cost == Catch::Approx(recompute_closed_cost(cs, e.route.pois)).margin(1e-9));
    CHECK(e.gain == Catch::Approx(ctx.closed_gain(e.set)).margin(1e-12));
    if (i > 0) CHECK(!topk_better(e, entries[i - 1]));
    for (std::size_t j = 0; j < i; ++j) CHECK(entries[j].set != e.set);
  }
}

std::uint64_t bf_extension_count(std::uint64_t n) {
  std::uint64_t total = 0, perm = 1;
  for (std::uint64_t l = 0; l < n; ++l) {
    total += perm * (n - l);
    perm *= n - l;
  }
  return total;
}

std::uint64_t dominance_consider_count(std::uint64_t n) {
  std::uint64_t total = n, choose = 1;
  for (std::uint64_t l = 1; l <= n; ++l) {
    choose = choose * (n - l + 1) / l;
    if (l >= 2) total += l * (l - 1) * choose;
  }
  return total;
}

}  // namespace

TEST_CASE("top-k collection matches a sort oracle", "[search]") {
  std::mt19937_64 rng(777);
  for (int round = 0; round < 100; ++round) {
    TopK topk(5);
    std::vector<TopEntry> offered;
    for (int i = 0; i < 60; ++i) {
      auto setcode = static_cast<std::uint32_t>(rng() % 12);
      TopEntry e;
      for (std::uint32_t b = 0; b < 4; ++b)
        if (setcode & (1u << b)) e.set.push_back(b);
      e.gain = static_cast<double>((setcode * 7919) % 10);  // gain is set-determined
      e.cost = static_cast<double>(rng() % 100);
      offered.push_back(e);
      topk.offer(e);
    }
    std::map<std::vector<std::uint32_t>, TopEntry> best;
    for (const auto& e : offered) {
      auto it = best.find(e.set);
      if (it == best.end() || e.cost < it->second.cost) best[e.set] = e;
    }
    std::vector<TopEntry> oracle;
    for (const auto& [set, e] : best) oracle.push_back(e);
    std::sort(oracle.begin(), oracle.end(), topk_better);
    if (oracle.size() > 5) oracle.resize(5);

    const auto& got = topk.entries();
    REQUIRE(got.size() == oracle.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].set == oracle[i].set);
      CHECK(got[i].gain == oracle[i].gain);
      CHECK(got[i].cost == oracle[i].cost);
    }
  }
}

TEST_CASE("top-k threshold stays open until the collection fills", "[search]") {
  TopK topk(2);
  CHECK(topk.threshold() == -std::numeric_limits<double>::infinity());
  topk.offer(TopEntry{{0}, {}, 5, 1});
  CHECK(topk.threshold() == -std::numeric_limits<double>::infinity());
  topk.offer(TopEntry{{1}, {}, 3, 1});
  CHECK(topk.threshold() == 3);
  topk.offer(TopEntry{{2}, {}, 4, 1});
  CHECK(topk.threshold() == 4);
  CHECK(topk.entries().size() == 2);
  // A cheaper duplicate of an existing set replaces it without growing the list.
  topk.offer(TopEntry{{2}, {}, 4, 0.5});
  CHECK(topk.entries().size() == 2);
  CHECK(topk.entries().back().cost == 0.5);
}

TEST_CASE("all exact solvers agree on varied instances", "[search]") {
  struct Combo {
    std::uint64_t seed;
    testutil::InstanceTweaks t;
  };
  std::vector<Combo> combos;
  {
    Combo c;
    c.seed = 101;
    c.t.k = 3;
    combos.push_back(c);
    c.seed = 102;
    c.t.agg = Aggregation::coverage;
    c.t.count_endpoint_stay = true;
    combos.push_back(c);
    c = Combo{103, {}};
    c.t.agg = Aggregation::log_utility;
    c.t.directed = true;
    c.t.k = 5;
    combos.push_back(c);
    c = Combo{104, {}};
    c.t.alpha = 0;
    c.t.theta = 2.5;
    c.t.k = 3;
    combos.push_back(c);
    c = Combo{105, {}};
    c.t.alpha = 2;
    c.t.same_endpoint = true;
    c.t.k = 3;
    combos.push_back(c);
    c = Combo{106, {}};
    c.t.agg = Aggregation::coverage;
    c.t.directed = true;
    c.t.b = 300;
    combos.push_back(c);
  }

  for (const auto& combo : combos) {
    auto inst = testutil::make_instance(combo.seed, combo.t);
    const auto& cs = inst.cs;
    GainContext ctx(cs);
    INFO("seed " << combo.seed << " candidates " << cs.n);

    SolveOutput bf = brute_force(cs, ctx, inst.q);
    SolveOutput p1 = pacer::pacer(cs, ctx, inst.q, false);
    SolveOutput p2 = pacer::pacer(cs, ctx, inst.q, true);

    check_entries(cs, ctx, bf);
    check_entries(cs, ctx, p1);
    check_entries(cs, ctx, p2);
    CHECK(digests_match(digest(bf.topk), digest(p1.topk)));
    CHECK(digests_match(digest(bf.topk), digest(p2.topk)));

    CHECK(bf.stats.examined_open_routes >= p1.stats.examined_open_routes);
    CHECK(p1.stats.examined_open_routes >= p2.stats.examined_open_routes);

    SolveOutput sc = pacer_sc(cs, ctx, inst.q);
    check_entries(cs, ctx, sc);
    CHECK(sc.stats.examined_open_routes <= p1.stats.examined_open_routes);
    double exact_top = bf.topk.entries().front().gain;
    CHECK(sc.topk.entries().front().gain <= exact_top + 1e-9);

    GreedyOutput g = greedy(cs, ctx, inst.q);
    CHECK(g.gain <= exact_top + 1e-9);
    CHECK(g.route.cost <= cs.b + kCostEps);
    CHECK(g.route.cost == Catch::Approx(recompute_closed_cost(cs, g.route.pois)).margin(1e-6));
    CHECK(g.gain == Catch::Approx(ctx.closed_gain(g.set)).margin(1e-12));
    CHECK(g.stats.examined_open_routes <= static_cast<std::uint64_t>(cs.n + 1) * (cs.n + 1));
  }
}

TEST_CASE("an unconstrained budget makes counters hit their closed forms", "[search]") {
  testutil::InstanceTweaks t;
  t.pois = 9;
  t.b = 1e6;
  auto inst = testutil::make_instance(110, t);
  const auto& cs = inst.cs;
  REQUIRE(cs.n >= 3);
  GainContext ctx(cs);

  SolveOutput p1 = pacer::pacer(cs, ctx, inst.q, false);
  CHECK(p1.stats.examined_open_routes == dominance_consider_count(cs.n));
  CHECK(estimate_search_space(cs.n, cs.n) == dominance_consider_count(cs.n));

  SolveOutput bf = brute_force(cs, ctx, inst.q);
  CHECK(bf.stats.examined_open_routes == bf_extension_count(cs.n));
  CHECK(digests_match(digest(bf.topk), digest(p1.topk)));
}

TEST_CASE("search space estimate", "[search]") {
  CHECK(estimate_search_space(50, 2) == 2500);  // n + n(n-1)
  CHECK(estimate_search_space(2, 2) == 4);
  CHECK(estimate_search_space(10, 10) == dominance_consider_count(10));
  CHECK(estimate_search_space(12, 5) < estimate_search_space(12, 6));
  CHECK_THROWS_AS(estimate_search_space(10, 1), InputError);
  CHECK_THROWS_AS(estimate_search_space(10, 11), InputError);
  // Large inputs overflow 64-bit math; the result must survive as a bignum.
  CHECK(estimate_search_space(100, 100).str().size() > 20);
}

TEST_CASE("brute force refuses large candidate sets unless forced", "[search]") {
  PoiMap map(path_map(std::vector<double>(19, 1)));
  FeatureIndex fi = FeatureIndex::build(map);
  HopIndex hi = HopIndex::build(map);
  Query q;
  q.x = 0;
  q.y = 19;
  q.b = 20.5;  // every single-visit detour costs exactly 20
  q.weights = {{"food", 1.0}};
  CandidateSet cs = retrieve_subindices(map, fi, hi, q);
  REQUIRE(cs.n == 18);
  GainContext ctx(cs);

  CHECK_THROWS_AS(brute_force(cs, ctx, q), InputError);

  SearchLimits lim;
  lim.force = true;
  SolveOutput out = brute_force(cs, ctx, q, lim);
  CHECK(out.stats.examined_open_routes == 18 + 18 * 17);  // pairs never fit
  const TopEntry& top = out.topk.entries().front();
  CHECK(top.gain == 1.0);
  CHECK(top.route.pois == std::vector<PoiId>{0, 1, 19});  // cost tie broken by set order
  CHECK(top.cost == 20.0);

  SolveOutput p1 = pacer::pacer(cs, ctx, q, false);
  CHECK(digests_match(digest(out.topk), digest(p1.topk)));
}

TEST_CASE("caps stop every solver", "[search]") {
  testutil::InstanceTweaks t;
  t.pois = 9;
  t.b = 1e6;
  auto inst = testutil::make_instance(110, t);
  const auto& cs = inst.cs;
  GainContext ctx(cs);

  SearchLimits wall;
  wall.wall_ms = 0;
  CHECK_THROWS_AS(pacer::pacer(cs, ctx, inst.q, true, wall), CapExceededError);
  CHECK_THROWS_AS(brute_force(cs, ctx, inst.q, wall), CapExceededError);
  CHECK_THROWS_AS(greedy(cs, ctx, inst.q, wall), CapExceededError);

  SearchLimits mem;
  mem.mem_bytes = 16;
  CHECK_THROWS_AS(pacer::pacer(cs, ctx, inst.q, false, mem), CapExceededError);
  CHECK_THROWS_AS(brute_force(cs, ctx, inst.q, mem), CapExceededError);
}

TEST_CASE("smaller k returns a prefix of larger k", "[search]") {
  testutil::InstanceTweaks t;
  t.k = 5;
  auto inst = testutil::make_instance(120, t);
  GainContext ctx(inst.cs);
  SolveOutput wide = pacer::pacer(inst.cs, ctx, inst.q, true);

  Query narrow = inst.q;
  narrow.k = 1;
  SolveOutput one = pacer::pacer(inst.cs, ctx, narrow, true);
  REQUIRE(one.topk.entries().size() == 1);
  auto wide_digest = digest(wide.topk);
  auto one_digest = digest(one.topk);
  wide_digest.resize(1);
  CHECK(digests_match(wide_digest, one_digest));
}

TEST_CASE("empty candidate sets yield only the direct route", "[search]") {
  PoiMap map(path_map({1, 1, 1}));
  FeatureIndex fi = FeatureIndex::build(map);
  HopIndex hi = HopIndex::build(map);
  Query q;
  q.x = 0;
  q.y = 3;
  q.b = 100;
  q.theta = 2.0;  // above every rating, so no poi qualifies
  q.weights = {{"food", 1.0}};
  CandidateSet cs = retrieve_subindices(map, fi, hi, q);
  REQUIRE(cs.n == 0);
  GainContext ctx(cs);

  for (bool pruning2 : {false, true}) {
    SolveOutput out = pacer::pacer(cs, ctx, q, pruning2);
    REQUIRE(out.topk.entries().size() == 1);
    CHECK(out.topk.entries().front().route.pois == std::vector<PoiId>{0, 3});
    CHECK(out.topk.entries().front().cost == Catch::Approx(3));
    CHECK(out.stats.examined_open_routes == 0);
  }
  SolveOutput bf = brute_force(cs, ctx, q);
  CHECK(bf.topk.entries().size() == 1);
  GreedyOutput g = greedy(cs, ctx, q);
  CHECK(g.route.pois == std::vector<PoiId>{0, 3});
  CHECK(g.set.empty());
}

TEST_CASE("named algorithm dispatch", "[search]") {
  auto inst = testutil::make_instance(130, {});
  GainContext ctx(inst.cs);
  for (const std::string name : {"bf", "pacer1", "pacer2", "pacer-sc", "greedy"}) {
    AlgoRun run = run_algorithm(name, inst.cs, ctx, inst.q);
    CHECK(run.result.at("algorithm") == name);
    REQUIRE(!run.result.at("routes").empty());
    CHECK(run.result.at("stats").contains("examined_open_routes"));
    const auto& first = run.result.at("routes")[0];
    CHECK(first.at("pois")[0] == inst.cs.x_id);
    CHECK(run.top_gain == first.at("gain"));
    if (name == "greedy") CHECK(run.result.at("routes").size() == 1);
  }
  CHECK_THROWS_AS(run_algorithm("dijkstra", inst.cs, ctx, inst.q), InputError);
}

TEST_CASE("degenerate loop query returns the bare start", "[search]") {
  testutil::InstanceTweaks t;
  t.same_endpoint = true;
  t.k = 4;
  t.count_endpoint_stay = true;
  auto inst = testutil::make_instance(140, t);
  const auto& cs = inst.cs;
  REQUIRE(cs.same_endpoint);
  GainContext ctx(cs);

  SolveOutput bf = brute_force(cs, ctx, inst.q);
  SolveOutput p2 = pacer::pacer(cs, ctx, inst.q, true);
  CHECK(digests_match(digest(bf.topk), digest(p2.topk)));
  for (const auto& e : bf.topk.entries()) {
    CHECK(e.route.pois.front() == cs.x_id);
    CHECK(e.route.pois.back() == cs.x_id);
    if (e.set.empty()) {
      CHECK(e.route.pois.size() == 1);  // the start alone, stay counted once
      CHECK(e.cost == Catch::Approx(cs.sx));
    }
  }
}
