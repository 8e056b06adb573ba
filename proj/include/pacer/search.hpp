#pragma once

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <chrono>
#include <cstdint>
#include <deque>
#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

#include "pacer/gain.hpp"
#include "pacer/map_io.hpp"
#include "pacer/topk.hpp"

namespace pacer {

struct SearchStats {
  std::uint64_t examined_open_routes = 0;
  std::uint64_t states_created = 0;
  std::uint64_t pruned_by_dominance = 0;
  std::uint64_t pruned_by_bound = 0;
  double wall_ms = 0;
};

// Caps are off when negative. mem_bytes is checked against an estimate of
// live search structures, not process RSS.
struct SearchLimits {
  double wall_ms = -1;
  std::int64_t mem_bytes = -1;
  bool force = false;  // lifts the brute-force size guard
};

struct SolveOutput {
  TopK topk;
  SearchStats stats;
};

struct GreedyOutput {
  Route route;
  std::vector<std::uint32_t> set;  // candidate ranks, ascending
  double gain = 0;
  SearchStats stats;
};

namespace detail {

class CapGuard {
 public:
  explicit CapGuard(const SearchLimits& lim) : lim_(lim) {}

  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0_).count();
  }

  void check(std::size_t approx_bytes) const {
    if (lim_.wall_ms >= 0 && elapsed_ms() > lim_.wall_ms)
      throw CapExceededError("wall-time cap exceeded");
    if (lim_.mem_bytes >= 0 && static_cast<std::int64_t>(approx_bytes) > lim_.mem_bytes)
      throw CapExceededError("memory cap exceeded");
  }

 private:
  using Clock = std::chrono::steady_clock;
  SearchLimits lim_;
  Clock::time_point t0_ = Clock::now();
};

// POI-set key: one bit per candidate rank, fixed width per query, so equal
// sets hash and compare as plain word sequences.
struct StateKey {
  std::vector<std::uint64_t> w;
  bool operator==(const StateKey&) const = default;
};

struct StateKeyHash {
  std::size_t operator()(const StateKey& k) const {
    std::uint64_t h = 1469598103934665603ull;
    for (std::uint64_t x : k.w) {
      h ^= x;
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

inline StateKey empty_key(std::uint32_t n) {
  return StateKey{std::vector<std::uint64_t>((n + 63) / 64, 0)};
}
inline void set_bit(StateKey& k, std::uint32_t i) { k.w[i >> 6] |= std::uint64_t(1) << (i & 63); }
inline void clear_bit(StateKey& k, std::uint32_t i) {
  k.w[i >> 6] &= ~(std::uint64_t(1) << (i & 63));
}
inline bool test_bit(const StateKey& k, std::uint32_t i) { return (k.w[i >> 6] >> (i & 63)) & 1; }

inline constexpr std::uint32_t kStartPred = UINT32_MAX;

struct OpenRoute {
  std::uint32_t end;       // candidate rank
  std::uint32_t pred_end;  // rank in the predecessor set, kStartPred for x
  double cost;
};

struct State {
  std::vector<OpenRoute> routes;
};

using StateMap = std::unordered_map<StateKey, State, StateKeyHash>;

inline Route closed_route(const CandidateSet& cs, std::vector<PoiId> interior, double cost) {
  Route route;
  route.open = false;
  route.cost = cost;
  route.pois.push_back(cs.x_id);
  for (PoiId id : interior) route.pois.push_back(id);
  if (!(cs.same_endpoint && interior.empty())) route.pois.push_back(cs.y_id);
  return route;
}

// Walk predecessor links back to the start.
inline Route reconstruct(const StateMap& states, const CandidateSet& cs, StateKey key,
                         std::uint32_t end, double closed_cost) {
  std::vector<PoiId> rev;
  while (end != kStartPred) {
    rev.push_back(cs.ids[end]);
    const State& st = states.at(key);
    std::uint32_t pred = kStartPred;
    for (const auto& r : st.routes)
      if (r.end == end) {
        pred = r.pred_end;
        break;
      }
    clear_bit(key, end);
    end = pred;
  }
  return closed_route(cs, {rev.rbegin(), rev.rend()}, closed_cost);
}

inline TopEntry direct_entry(const CandidateSet& cs, const GainContext& ctx) {
  return TopEntry{{}, closed_route(cs, {}, cs.direct_cost), ctx.closed_gain({}), cs.direct_cost};
}

enum class PacerMode { pruning1, pruning2, single_route };

inline SolveOutput run_pacer(const CandidateSet& cs, const GainContext& ctx, const Query& q,
                             PacerMode mode, const SearchLimits& lim) {
  CapGuard guard(lim);
  SearchStats stats;
  TopK topk(static_cast<std::size_t>(q.k));
  topk.offer(direct_entry(cs, ctx));

  const std::uint32_t n = cs.n, sx_slot = cs.slot_x(), sy_slot = cs.slot_y();
  StateMap states;
  std::size_t stored_routes = 0;
  auto approx_bytes = [&] {
    return states.size() * (sizeof(State) + 48) + stored_routes * sizeof(OpenRoute);
  };
  guard.check(approx_bytes());

  struct Frame {
    StateKey key;
    std::uint32_t next, limit;  // children prepend rank in [next, limit)
    double relaxed_sum;
  };
  std::vector<Frame> stack;
  stack.push_back({empty_key(n), 0, n, 0});

  std::vector<std::uint32_t> ranks;
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.next >= f.limit) {
      stack.pop_back();
      continue;
    }
    std::uint32_t i = f.next++;

    // Relaxed completion cost of the child set; it only grows with the set,
    // so exceeding the budget rules out the whole subtree.
    double child_sum = f.relaxed_sum + cs.relaxed[i];
    if (cs.sx + cs.half_min_out_x + child_sum + cs.relaxed_y > q.b + kCostEps) continue;

    StateKey ckey = f.key;
    set_bit(ckey, i);
    ranks.clear();
    for (std::uint32_t r = 0; r < n; ++r)
      if (test_bit(ckey, r)) ranks.push_back(r);

    ++stats.states_created;
    guard.check(approx_bytes());

    double state_gain = ctx.open_gain(ranks);
    SetProfile prof;
    bool prof_ready = false;

    State st;
    for (std::uint32_t j : ranks) {
      double best = kInfCost;
      std::uint32_t best_pred = kStartPred;
      std::uint64_t feasible_seen = 0;
      auto consider = [&](std::uint32_t pred_end, std::uint32_t from_slot, double base_cost) {
        ++stats.examined_open_routes;
        double cost = base_cost + cs.travel(from_slot, j) + cs.stays[j];
        if (cost + cs.travel(j, sy_slot) + cs.s_close > q.b + kCostEps) return;
        ++feasible_seen;
        if (cost < best) {
          best = cost;
          best_pred = pred_end;
        }
      };
      if (ranks.size() == 1) {
        consider(kStartPred, sx_slot, cs.sx);
      } else {
        StateKey pkey = ckey;
        clear_bit(pkey, j);
        auto it = states.find(pkey);
        if (it != states.end())
          for (const auto& pr : it->second.routes) consider(pr.end, pr.end, pr.cost);
      }
      if (feasible_seen == 0) continue;
      stats.pruned_by_dominance += feasible_seen - 1;

      if (mode == PacerMode::pruning2) {
        if (!prof_ready) {
          prof = ctx.profile(ranks, false);
          prof_ready = true;
        }
        double slack = q.b - best;
        std::vector<BoundItem> reach;
        for (std::uint32_t u = 0; u < n; ++u) {
          if (test_bit(ckey, u)) continue;
          if (cs.travel(j, u) + cs.stays[u] + cs.travel(u, sy_slot) + cs.s_close <=
              slack + kCostEps)
            reach.push_back({u, cs.relaxed[u]});
        }
        double up = upper_bound_marginal(ctx, prof, reach, slack - cs.half_min_out[j],
                                         cs.relaxed_y);
        if (!(state_gain + up >= topk.threshold() - kCostEps)) {
          ++stats.pruned_by_bound;
          continue;
        }
      }
      st.routes.push_back({j, best_pred, best});
    }

    if (mode == PacerMode::single_route && st.routes.size() > 1) {
      OpenRoute keep = st.routes.front();
      for (const auto& r : st.routes)
        if (r.cost < keep.cost) keep = r;
      stats.pruned_by_dominance += st.routes.size() - 1;
      st.routes.assign(1, keep);
    }

    bool has_routes = !st.routes.empty();
    if (has_routes) {
      stored_routes += st.routes.size();
      const OpenRoute* close = nullptr;
      double close_cost = kInfCost;
      for (const auto& r : st.routes) {
        double c = r.cost + cs.travel(r.end, sy_slot) + cs.s_close;
        if (c < close_cost) {
          close_cost = c;
          close = &r;
        }
      }
      auto [it, inserted] = states.emplace(std::move(ckey), std::move(st));
      topk.offer(TopEntry{ranks, reconstruct(states, cs, it->first, close->end, close_cost),
                          ctx.closed_gain(ranks), close_cost});
      // With complete route lists an empty list proves the set (and every
      // superset, by leg compression) infeasible, so those subtrees are cut.
      // Bound-filtered lists prove nothing, so pruning2 always recurses.
      if (i > 0) stack.push_back({it->first, 0, i, child_sum});
    } else if (mode == PacerMode::pruning2 && i > 0) {
      stack.push_back({std::move(ckey), 0, i, child_sum});
    }
  }

  stats.wall_ms = guard.elapsed_ms();
  return {std::move(topk), stats};
}

}  // namespace detail

inline SolveOutput pacer(const CandidateSet& cs, const GainContext& ctx, const Query& q,
                         bool pruning2, const SearchLimits& lim = {}) {
  return detail::run_pacer(cs, ctx, q,
                           pruning2 ? detail::PacerMode::pruning2 : detail::PacerMode::pruning1,
                           lim);
}

inline SolveOutput pacer_sc(const CandidateSet& cs, const GainContext& ctx, const Query& q,
                            const SearchLimits& lim = {}) {
  return detail::run_pacer(cs, ctx, q, detail::PacerMode::single_route, lim);
}

inline SolveOutput brute_force(const CandidateSet& cs, const GainContext& ctx, const Query& q,
                               const SearchLimits& lim = {}) {
  if (cs.n > 15 && !lim.force)
    throw InputError("brute force refused: " + std::to_string(cs.n) +
                     " candidates exceed the enumeration guard (15)");
  detail::CapGuard guard(lim);
  SearchStats stats;
  TopK topk(static_cast<std::size_t>(q.k));
  topk.offer(detail::direct_entry(cs, ctx));
  guard.check(0);

  struct Open {
    std::vector<std::uint32_t> seq;  // candidate ranks in visit order
    double cost;
  };
  std::deque<Open> queue;
  queue.push_back({{}, cs.sx});
  std::size_t queue_bytes = 0;

  std::vector<std::uint32_t> sorted;
  while (!queue.empty()) {
    Open cur = std::move(queue.front());
    queue.pop_front();
    std::uint32_t from = cur.seq.empty() ? cs.slot_x() : cur.seq.back();
    for (std::uint32_t u = 0; u < cs.n; ++u) {
      bool visited = false;
      for (std::uint32_t v : cur.seq) visited |= v == u;
      if (visited) continue;
      ++stats.examined_open_routes;
      if ((stats.examined_open_routes & 1023) == 0) guard.check(queue_bytes);
      double cost = cur.cost + cs.travel(from, u) + cs.stays[u];
      double close_cost = cost + cs.travel(u, cs.slot_y()) + cs.s_close;
      if (close_cost > q.b + kCostEps) continue;
      Open ext{cur.seq, cost};
      ext.seq.push_back(u);
      sorted = ext.seq;
      std::sort(sorted.begin(), sorted.end());
      std::vector<PoiId> interior;
      for (std::uint32_t r : ext.seq) interior.push_back(cs.ids[r]);
      topk.offer(TopEntry{sorted, detail::closed_route(cs, std::move(interior), close_cost),
                          ctx.closed_gain(sorted), close_cost});
      ++stats.states_created;
      queue_bytes += ext.seq.size() * sizeof(std::uint32_t) + sizeof(Open);
      queue.push_back(std::move(ext));
    }
  }

  stats.wall_ms = guard.elapsed_ms();
  return {std::move(topk), stats};
}

inline GreedyOutput greedy(const CandidateSet& cs, const GainContext& ctx, const Query& q,
                           const SearchLimits& lim = {}) {
  detail::CapGuard guard(lim);
  SearchStats stats;
  guard.check(0);

  std::vector<std::uint32_t> slots = {cs.slot_x(), cs.slot_y()};
  std::vector<std::uint32_t> ranks;  // ascending, mirrors the visited set
  std::vector<char> in_route(cs.n, 0);
  double cost = cs.direct_cost;

  while (true) {
    guard.check(0);
    SetProfile prof = ctx.profile(ranks, true);
    double best_ratio = -1;
    std::uint32_t best_u = UINT32_MAX;
    std::size_t best_pos = 0;
    double best_dcost = 0;
    for (std::uint32_t u = 0; u < cs.n; ++u) {
      if (in_route[u]) continue;
      ++stats.examined_open_routes;
      double dcost = kInfCost;
      std::size_t pos = 0;
      for (std::size_t p = 0; p + 1 < slots.size(); ++p) {
        double dc = cs.travel(slots[p], u) + cs.stays[u] + cs.travel(u, slots[p + 1]) -
                    cs.travel(slots[p], slots[p + 1]);
        if (cost + dc <= q.b + kCostEps && dc < dcost) {
          dcost = dc;
          pos = p + 1;
        }
      }
      if (!(dcost < kInfCost)) continue;
      double denom = cs.stays[u] + cs.travel(cs.slot_x(), u) + cs.travel(u, cs.slot_y());
      double ratio = ctx.marginal_rank(prof, u) / denom;
      if (ratio > best_ratio ||
          (ratio == best_ratio && best_u != UINT32_MAX && cs.ids[u] < cs.ids[best_u])) {
        best_ratio = ratio;
        best_u = u;
        best_pos = pos;
        best_dcost = dcost;
      }
    }
    if (best_u == UINT32_MAX) break;
    slots.insert(slots.begin() + static_cast<std::ptrdiff_t>(best_pos), best_u);
    in_route[best_u] = 1;
    ranks.insert(std::lower_bound(ranks.begin(), ranks.end(), best_u), best_u);
    cost += best_dcost;
    ++stats.states_created;
  }

  GreedyOutput out;
  std::vector<PoiId> interior;
  for (std::size_t p = 1; p + 1 < slots.size(); ++p) interior.push_back(cs.ids[slots[p]]);
  out.route = detail::closed_route(cs, std::move(interior), cost);
  out.set = ranks;
  out.gain = ctx.closed_gain(ranks);
  stats.wall_ms = guard.elapsed_ms();
  out.stats = stats;
  return out;
}

// Exact count of open routes a dominance-only search can touch: n single
// visits plus, for each set size l up to p, l ends times l-1 predecessor
// ends over all C(n, l) sets.
inline boost::multiprecision::cpp_int estimate_search_space(std::uint64_t n, std::uint64_t p) {
  using boost::multiprecision::cpp_int;
  if (p < 2 || p > n) throw InputError("estimate_search_space requires 2 <= p <= n");
  cpp_int total = n;
  cpp_int choose = cpp_int(n) * (n - 1) / 2;  // C(n, 2), then updated per l
  for (std::uint64_t l = 2; l <= p; ++l) {
    if (l > 2) {
      choose *= n - l + 1;
      choose /= l;
    }
    total += cpp_int(l) * (l - 1) * choose;
  }
  return total;
}

inline json stats_to_json(const SearchStats& s) {
  return json{{"examined_open_routes", s.examined_open_routes},
              {"states_created", s.states_created},
              {"pruned_by_dominance", s.pruned_by_dominance},
              {"pruned_by_bound", s.pruned_by_bound},
              {"wall_time_ms", s.wall_ms}};
}

inline json route_to_json(const std::vector<PoiId>& pois, double cost, double gain) {
  return json{{"pois", pois}, {"cost", cost}, {"gain", gain}};
}

struct AlgoRun {
  json result;
  SearchStats stats;
  double top_gain = 0;
};

inline AlgoRun run_algorithm(const std::string& name, const CandidateSet& cs,
                             const GainContext& ctx, const Query& q,
                             const SearchLimits& lim = {}) {
  AlgoRun run;
  json routes = json::array();
  if (name == "greedy") {
    GreedyOutput g = greedy(cs, ctx, q, lim);
    routes.push_back(route_to_json(g.route.pois, g.route.cost, g.gain));
    run.stats = g.stats;
    run.top_gain = g.gain;
  } else {
    SolveOutput s;
    if (name == "bf")
      s = brute_force(cs, ctx, q, lim);
    else if (name == "pacer1")
      s = pacer(cs, ctx, q, false, lim);
    else if (name == "pacer2")
      s = pacer(cs, ctx, q, true, lim);
    else if (name == "pacer-sc")
      s = pacer_sc(cs, ctx, q, lim);
    else
      throw InputError("unknown algorithm: " + name);
    for (const auto& e : s.topk.entries())
      routes.push_back(route_to_json(e.route.pois, e.cost, e.gain));
    run.stats = s.stats;
    run.top_gain = s.topk.entries().empty() ? 0 : s.topk.entries().front().gain;
  }
  run.result = json{{"algorithm", name}, {"routes", routes}, {"stats", stats_to_json(run.stats)}};
  return run;
}

}  // namespace pacer
