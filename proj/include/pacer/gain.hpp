#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "pacer/candidates.hpp"

namespace pacer {

// Aggregates one feature's ratings into a score. All three kinds are
// nonnegative, monotone and submodular in the rating multiset, which is what
// the bound arithmetic in the solvers relies on.
inline double phi(const AggregationSpec& spec, std::vector<double> ratings, double beta) {
  switch (spec.kind) {
    case Aggregation::power_law: {
      std::sort(ratings.begin(), ratings.end(), std::greater<>());
      double s = 0;
      for (std::size_t r = 0; r < ratings.size(); ++r)
        s += ratings[r] * std::pow(static_cast<double>(r + 1), -spec.alpha);
      return s;
    }
    case Aggregation::log_utility: {
      double s = 0;
      for (double v : ratings) s += v;
      return std::log1p(s);
    }
    case Aggregation::coverage: {
      double prod = 1;
      for (double v : ratings) prod *= 1 - v / beta;
      return 1 - prod;
    }
  }
  return 0;
}

// Per-set evaluation cache: one descending rating list per preferred feature,
// plus the running sum and the coverage product, and the set's total gain.
struct SetProfile {
  std::vector<std::vector<double>> desc;
  std::vector<double> sum;
  std::vector<double> prod;
  double gain = 0;
};

class GainContext {
 public:
  explicit GainContext(const CandidateSet& cs) : cs_(&cs) {}

  const CandidateSet& cands() const { return *cs_; }

  // Gain of a set of candidate ranks. The start's rating row is always in
  // (it is visited from the outset); the destination's row joins only for
  // closed routes; open-route bounds account for it via the forced y term.
  // Every solver scores sets through this one code path, so equal sets get
  // bit-identical gains regardless of which algorithm produced them.
  double open_gain(const std::vector<std::uint32_t>& ranks) const {
    return gain_impl(ranks, false);
  }
  double closed_gain(const std::vector<std::uint32_t>& ranks) const {
    return gain_impl(ranks, true);
  }

  SetProfile profile(const std::vector<std::uint32_t>& ranks, bool with_y) const {
    SetProfile p;
    std::size_t f = cs_->features.size();
    p.desc.resize(f);
    p.sum.assign(f, 0);
    p.prod.assign(f, 1);
    auto add = [&](const std::vector<std::pair<std::uint32_t, double>>& row) {
      for (const auto& [s, v] : row) {
        p.desc[s].push_back(v);
        p.sum[s] += v;
        p.prod[s] *= 1 - v / cs_->beta;
      }
    };
    add(cs_->x_row);
    for (std::uint32_t r : ranks) add(cs_->filtered[r]);
    if (with_y) add(cs_->y_row);
    for (auto& d : p.desc) std::sort(d.begin(), d.end(), std::greater<>());
    p.gain = gain_impl(ranks, with_y);
    return p;
  }

  // Marginal gain of one filtered rating row against a profiled base set.
  double marginal_row(const SetProfile& base,
                      const std::vector<std::pair<std::uint32_t, double>>& row) const {
    double g = 0;
    for (const auto& [s, v] : row) g += cs_->weights[s] * slot_marginal(base, s, v);
    return g;
  }

  double marginal_rank(const SetProfile& base, std::uint32_t rank) const {
    return marginal_row(base, cs_->filtered[rank]);
  }

 private:
  double gain_impl(const std::vector<std::uint32_t>& ranks, bool with_y) const {
    std::vector<std::vector<double>> slot(cs_->features.size());
    auto add = [&](const std::vector<std::pair<std::uint32_t, double>>& row) {
      for (const auto& [s, v] : row) slot[s].push_back(v);
    };
    add(cs_->x_row);
    for (std::uint32_t r : ranks) add(cs_->filtered[r]);
    if (with_y) add(cs_->y_row);
    double g = 0;
    for (std::size_t s = 0; s < slot.size(); ++s)
      g += cs_->weights[s] * phi(cs_->agg, std::move(slot[s]), cs_->beta);
    return g;
  }

  double slot_marginal(const SetProfile& base, std::uint32_t s, double v) const {
    const double alpha = cs_->agg.alpha;
    switch (cs_->agg.kind) {
      case Aggregation::power_law: {
        const auto& d = base.desc[s];
        // v lands after any equal ratings; every displaced item drops a rank.
        std::size_t at = static_cast<std::size_t>(
            std::upper_bound(d.begin(), d.end(), v, std::greater<>()) - d.begin());
        double g = v * std::pow(static_cast<double>(at + 1), -alpha);
        for (std::size_t j = at; j < d.size(); ++j)
          g += d[j] * (std::pow(static_cast<double>(j + 2), -alpha) -
                       std::pow(static_cast<double>(j + 1), -alpha));
        return g;
      }
      case Aggregation::log_utility:
        return std::log1p(base.sum[s] + v) - std::log1p(base.sum[s]);
      case Aggregation::coverage:
        return base.prod[s] * (v / cs_->beta);
    }
    return 0;
  }

  const CandidateSet* cs_;
};

inline double gain(const GainContext& ctx, const std::vector<std::uint32_t>& ranks) {
  return ctx.open_gain(ranks);
}

inline double marginal_gain(const GainContext& ctx, const std::vector<std::uint32_t>& base,
                            const std::vector<std::uint32_t>& addition) {
  for (std::uint32_t r : addition)
    if (std::find(base.begin(), base.end(), r) != base.end())
      throw InputError("marginal_gain: base and addition overlap");
  std::vector<std::uint32_t> both(base);
  both.insert(both.end(), addition.begin(), addition.end());
  std::sort(both.begin(), both.end());
  return ctx.open_gain(both) - ctx.open_gain(base);
}

struct BoundItem {
  std::uint32_t rank;  // candidate rank
  double cost;         // relaxed visiting cost c(i)
};

// Admissible cap on the gain any feasible completion of the current open
// route can still add. Relaxation chain: per-item marginals against the
// current set over-estimate true marginals (submodularity); relaxed costs
// under-estimate true costs; the fractional knapsack optimum dominates the
// integral one. The destination is forced in up front: its marginal is added
// unconditionally and its relaxed cost reduces the budget, which stays
// admissible because every feasible completion ends by paying for y.
inline double upper_bound_marginal(const GainContext& ctx, const SetProfile& base,
                                   const std::vector<BoundItem>& reachable, double budget_B,
                                   double y_cost) {
  const CandidateSet& cs = ctx.cands();
  double up = ctx.marginal_row(base, cs.y_row);
  double rem = budget_B - y_cost;
  if (rem < -kCostEps || reachable.empty()) return up;

  struct Item {
    double delta, cost;
    PoiId id;
  };
  std::vector<Item> items;
  items.reserve(reachable.size());
  for (const auto& bi : reachable)
    items.push_back({ctx.marginal_rank(base, bi.rank), bi.cost, cs.ids[bi.rank]});
  std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
    double lhs = a.delta * b.cost, rhs = b.delta * a.cost;
    if (lhs != rhs) return lhs > rhs;
    return a.id < b.id;
  });
  double used = 0;
  for (const auto& it : items) {
    if (used + it.cost <= rem + kCostEps) {
      up += it.delta;
      used += it.cost;
    } else {
      double lambda = (rem - used) / it.cost;
      if (lambda > 0) up += lambda * it.delta;
      break;
    }
  }
  return up;
}

}  // namespace pacer
