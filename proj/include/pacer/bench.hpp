#pragma once

#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "pacer/candidates.hpp"
#include "pacer/search.hpp"

namespace pacer {

struct BenchCaps {
  double wall_ms = 60000;
  std::int64_t mem_bytes = std::int64_t(2) << 30;
};

struct BenchRow {
  std::string algorithm;
  std::size_t query_index = 0;
  double b = 0, theta = 0, alpha = 0;
  int k = 1;
  bool completed = false;
  std::string error;  // cap or infeasibility note when not completed
  double gain = 0;
  double ms = 0;
  std::uint64_t examined = 0;
};

struct BenchReport {
  std::vector<BenchRow> rows;

  json to_json() const {
    json jrows = json::array();
    for (const auto& r : rows)
      jrows.push_back({{"algorithm", r.algorithm},
                       {"query", r.query_index},
                       {"b", r.b},
                       {"theta", r.theta},
                       {"alpha", r.alpha},
                       {"k", r.k},
                       {"completed", r.completed},
                       {"error", r.error},
                       {"gain", r.gain},
                       {"ms", r.ms},
                       {"examined", r.examined}});
    return json{{"rows", jrows}, {"csv", to_csv()}};
  }

  // One aggregate line per (algorithm, b, theta, alpha, k); means cover the
  // completed queries of that group only.
  std::string to_csv() const {
    std::map<std::tuple<std::string, double, double, double, int>,
             std::vector<const BenchRow*>>
        groups;
    for (const auto& r : rows)
      groups[{r.algorithm, r.b, r.theta, r.alpha, r.k}].push_back(&r);
    std::ostringstream out;
    out << "algorithm,b,theta,alpha,k,mean_gain,mean_ms,mean_examined,completion_ratio\n";
    for (const auto& [key, group] : groups) {
      double gain = 0, ms = 0, examined = 0;
      std::size_t done = 0;
      for (const BenchRow* r : group) {
        if (!r->completed) continue;
        ++done;
        gain += r->gain;
        ms += r->ms;
        examined += static_cast<double>(r->examined);
      }
      double denom = done ? static_cast<double>(done) : 1;
      out << std::get<0>(key) << ',' << std::get<1>(key) << ',' << std::get<2>(key) << ','
          << std::get<3>(key) << ',' << std::get<4>(key) << ',' << gain / denom << ','
          << ms / denom << ',' << examined / denom << ','
          << static_cast<double>(done) / static_cast<double>(group.size()) << '\n';
    }
    return out.str();
  }
};

// Runs every algorithm on every query under per-query caps. Sub-index
// retrieval happens outside the timed region; reported times cover the
// solver alone.
inline BenchReport run_bench(const PoiMap& map, const FeatureIndex& fi, const HopIndex& hi,
                             const std::vector<Query>& queries,
                             const std::vector<std::string>& algorithms,
                             const BenchCaps& caps = {}) {
  static const std::vector<std::string> known = {"bf", "pacer1", "pacer2", "pacer-sc", "greedy"};
  for (const auto& a : algorithms)
    if (std::find(known.begin(), known.end(), a) == known.end())
      throw InputError("unknown algorithm: " + a);

  BenchReport report;
  for (std::size_t qi = 0; qi < queries.size(); ++qi) {
    const Query& q = queries[qi];
    BenchRow base;
    base.query_index = qi;
    base.b = q.b;
    base.theta = q.theta;
    base.alpha = q.agg.kind == Aggregation::power_law ? q.agg.alpha : 0;
    base.k = q.k;

    bool retrieved = false;
    CandidateSet cs;
    std::string retrieve_error;
    try {
      cs = retrieve_subindices(map, fi, hi, q);
      retrieved = true;
    } catch (const std::exception& e) {
      retrieve_error = e.what();
    }

    for (const auto& algo : algorithms) {
      BenchRow row = base;
      row.algorithm = algo;
      if (!retrieved) {
        row.error = retrieve_error;
        report.rows.push_back(std::move(row));
        continue;
      }
      GainContext ctx(cs);
      SearchLimits lim;
      lim.wall_ms = caps.wall_ms;
      lim.mem_bytes = caps.mem_bytes;
      try {
        AlgoRun run = run_algorithm(algo, cs, ctx, q, lim);
        row.completed = true;
        row.gain = run.top_gain;
        row.ms = run.stats.wall_ms;
        row.examined = run.stats.examined_open_routes;
      } catch (const std::exception& e) {
        row.error = e.what();  // caps, size guards: the row stays incomplete
      }
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

}  // namespace pacer
