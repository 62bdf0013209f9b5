// Copyright 2026 The transit-offload Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "offload/auction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

namespace offload::auction {

namespace {

constexpr double kE = 2.718281828459045235360287471352662498;

// Per-passenger OD options at time t; choice -1 means "not selected".
struct ChoiceSpace {
  std::vector<int> bidders;             // passengers with >= 1 bid at t
  std::vector<std::vector<int>> ods;    // parallel to bidders
  std::vector<std::vector<double>> qty;  // offered volume per option
  std::vector<std::vector<double>> welfare;  // q - claimed cost per option
};

ChoiceSpace build_choice_space(const BidProfile& bids, int t) {
  ChoiceSpace cs;
  for (int i : bids.bidders_at(t)) {
    std::vector<int> ods = bids.ods_of(i, t);
    std::vector<double> qty, wel;
    qty.reserve(ods.size());
    wel.reserve(ods.size());
    for (int s : ods) {
      const Bid* b = bids.find(i, s, t);
      qty.push_back(b->quantity);
      wel.push_back(b->quantity - b->claimed_cost);
    }
    cs.bidders.push_back(i);
    cs.ods.push_back(std::move(ods));
    cs.qty.push_back(std::move(qty));
    cs.welfare.push_back(std::move(wel));
  }
  return cs;
}

// Visits every assignment (one choice in {-1} + ods per bidder) that covers
// demand at time t. The callback receives per-bidder option indices (-1 for
// unselected) and the assignment's welfare. Coverage is summed afresh per
// assignment; incremental add/remove bookkeeping would leave round-off
// residue that misclassifies boundary cases like zero demand.
template <typename F>
void for_each_feasible(const ChoiceSpace& cs, const Scenario& sc, int t,
                       std::size_t cap, F&& visit) {
  const std::size_t n = cs.bidders.size();
  // guard the total choice space, not just the feasible subset
  std::size_t space = 1;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t options = cs.ods[i].size() + 1;
    if (space > cap / options) {
      throw ExactLimitError("instance too large for exact mode");
    }
    space *= options;
  }

  std::vector<int> choice(n, -1);  // option index per bidder, -1 = none
  std::vector<double> covered(static_cast<std::size_t>(sc.num_od), 0.0);

  // odometer over the mixed-radix choice vector
  while (true) {
    std::fill(covered.begin(), covered.end(), 0.0);
    double welfare = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const int c = choice[i];
      if (c < 0) continue;
      covered[static_cast<std::size_t>(cs.ods[i][static_cast<std::size_t>(c)])] +=
          cs.qty[i][static_cast<std::size_t>(c)];
      welfare += cs.welfare[i][static_cast<std::size_t>(c)];
    }
    bool feasible = true;
    for (int s = 0; s < sc.num_od; ++s) {
      if (covered[static_cast<std::size_t>(s)] < sc.demand_at(s, t)) {
        feasible = false;
        break;
      }
    }
    if (feasible) visit(choice, welfare);

    std::size_t pos = 0;
    while (pos < n) {
      int& c = choice[pos];
      ++c;
      if (c < static_cast<int>(cs.ods[pos].size())) break;
      c = -1;
      ++pos;
    }
    if (pos == n) break;
  }
}

SelectionProfile materialize(const ChoiceSpace& cs, const std::vector<int>& choice,
                             const Scenario& sc, int t) {
  SelectionProfile x(static_cast<int>(sc.population.size()), sc.num_od,
                     sc.horizon);
  for (std::size_t k = 0; k < choice.size(); ++k) {
    if (choice[k] >= 0) {
      x.set(cs.bidders[k], cs.ods[k][static_cast<std::size_t>(choice[k])], t,
            true);
    }
  }
  return x;
}

// Normalized probabilities from log weights, with max subtraction.
std::vector<double> normalize_log_weights(const std::vector<double>& logw) {
  const double top = *std::max_element(logw.begin(), logw.end());
  std::vector<double> p(logw.size());
  double z = 0.0;
  for (std::size_t k = 0; k < logw.size(); ++k) {
    p[k] = std::exp(logw[k] - top);
    z += p[k];
  }
  for (double& v : p) v /= z;
  return p;
}

std::size_t sample_index(const std::vector<double>& prob, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = unif(rng);
  double acc = 0.0;
  for (std::size_t k = 0; k < prob.size(); ++k) {
    acc += prob[k];
    if (u < acc) return k;
  }
  return prob.size() - 1;  // guard against rounding at u ~ 1
}

struct Candidate {
  int passenger;
  double quantity;
  double welfare;  // q - claimed cost
  double claimed;
};

// Shared body of decomposed_select and the per-OD loop of run_two_way.
SelectedSet draw_until_covered(std::vector<Candidate> pool, double demand,
                               const AuctionParams& params, Rng& rng) {
  const double eps_prime = params.eps_prime();
  SelectedSet w;
  auto more_needed = [&]() {
    if (params.strict_cardinality) {
      return static_cast<double>(w.members.size()) <= demand;
    }
    return w.covered < demand;
  };
  while (more_needed() && !pool.empty()) {
    std::vector<double> logw(pool.size());
    for (std::size_t k = 0; k < pool.size(); ++k) {
      logw[k] = eps_prime * pool[k].welfare;
    }
    const std::size_t pick = sample_index(normalize_log_weights(logw), rng);
    w.members.push_back(pool[pick].passenger);
    w.covered += pool[pick].quantity;
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
  }
  w.deficit = w.covered < demand;
  return w;
}

std::vector<Candidate> pool_at(const BidProfile& bids, int s, int t) {
  std::vector<Candidate> pool;
  for (const auto& [i, bid] : bids.at(s, t)) {
    pool.push_back({i, bid.quantity, bid.quantity - bid.claimed_cost,
                    bid.claimed_cost});
  }
  return pool;
}

}  // namespace

double AuctionParams::eps_prime() const {
  return epsilon / (kE * std::log(kE / delta));
}

void AuctionParams::validate() const {
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("AuctionParams: epsilon must be positive");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("AuctionParams: delta must lie in (0, 1)");
  }
  if (welfare_sensitivity && !(*welfare_sensitivity >= 0.0)) {
    throw std::invalid_argument("AuctionParams: sensitivity must be >= 0");
  }
}

std::vector<SelectionProfile> enumerate_feasible(const BidProfile& bids,
                                                 const Scenario& sc, int t,
                                                 std::size_t cap) {
  const ChoiceSpace cs = build_choice_space(bids, t);
  std::vector<SelectionProfile> out;
  for_each_feasible(cs, sc, t, cap, [&](const std::vector<int>& choice, double) {
    out.push_back(materialize(cs, choice, sc, t));
  });
  return out;
}

double sensitivity_delta(const BidProfile& bids, const Scenario& sc, int t,
                         SensitivityMode mode, std::size_t cap) {
  if (mode == SensitivityMode::kBound) {
    double total = 0.0;
    for (int i : bids.bidders_at(t)) {
      double best = 0.0;
      for (int s : bids.ods_of(i, t)) {
        const Bid* b = bids.find(i, s, t);
        best = std::max(best, b->quantity - b->claimed_cost);
      }
      total += best;
    }
    return total;
  }
  const ChoiceSpace cs = build_choice_space(bids, t);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  std::size_t feasible = 0;
  for_each_feasible(cs, sc, t, cap, [&](const std::vector<int>&, double welfare) {
    lo = std::min(lo, welfare);
    hi = std::max(hi, welfare);
    ++feasible;
  });
  if (feasible == 0) {
    throw InfeasibleError("sensitivity_delta: no feasible selection");
  }
  return hi - lo;
}

ExactDistribution exact_distribution(const BidProfile& bids, const Scenario& sc,
                                     int t, const AuctionParams& params) {
  params.validate();
  const ChoiceSpace cs = build_choice_space(bids, t);

  std::vector<std::vector<int>> choices;
  std::vector<double> welfare;
  for_each_feasible(cs, sc, t, params.exact_cap,
                    [&](const std::vector<int>& choice, double w) {
                      choices.push_back(choice);
                      welfare.push_back(w);
                    });
  if (choices.empty()) {
    throw InfeasibleError("exact_distribution: no feasible selection");
  }

  double delta;
  if (params.welfare_sensitivity) {
    delta = *params.welfare_sensitivity;
  } else {
    const auto [lo, hi] =
        std::minmax_element(welfare.begin(), welfare.end());
    delta = *hi - *lo;
  }

  ExactDistribution dist;
  dist.sensitivity = delta;
  std::vector<double> logw(welfare.size());
  if (delta > 0.0) {
    for (std::size_t k = 0; k < welfare.size(); ++k) {
      logw[k] = params.epsilon * welfare[k] / (2.0 * delta);
    }
  }  // delta == 0: all log weights zero -> uniform

  const double top = *std::max_element(logw.begin(), logw.end());
  double z = 0.0;
  for (double lw : logw) z += std::exp(lw - top);
  dist.log_partition = top + std::log(z);
  dist.probability = normalize_log_weights(logw);
  dist.support.reserve(choices.size());
  for (const auto& choice : choices) {
    dist.support.push_back(materialize(cs, choice, sc, t));
  }
  return dist;
}

SelectionProfile exact_select(const BidProfile& bids, const Scenario& sc, int t,
                              const AuctionParams& params, Rng& rng) {
  ExactDistribution dist = exact_distribution(bids, sc, t, params);
  return dist.support[sample_index(dist.probability, rng)];
}

double exact_payment(const BidProfile& bids, const Scenario& sc, int t, int i,
                     const AuctionParams& params) {
  if (bids.ods_of(i, t).empty()) {
    throw std::invalid_argument("exact_payment: passenger has no bid at t");
  }
  const ExactDistribution dist = exact_distribution(bids, sc, t, params);
  const double delta = dist.sensitivity;
  const double scale = 2.0 * delta / params.epsilon;

  // E_X[ sum_j x q - sum_{j != i} x claimed ] and Shannon entropy of D.
  double value_term = 0.0;
  double entropy = 0.0;
  for (std::size_t k = 0; k < dist.support.size(); ++k) {
    const double p = dist.probability[k];
    if (p > 0.0) entropy -= p * std::log(p);
    double v = 0.0;
    for (const auto& e : dist.support[k].selected()) {
      const Bid* b = bids.find(e.i, e.s, e.t);
      v += b->quantity;
      if (e.i != i) v -= b->claimed_cost;
    }
    value_term += p * v;
  }

  // ln partition sum of the instance with passenger i removed, at the same
  // welfare scale.
  const BidProfile reduced = bids.without_passenger(i);
  const ChoiceSpace cs = build_choice_space(reduced, t);
  std::vector<double> logw;
  for_each_feasible(cs, sc, t, params.exact_cap,
                    [&](const std::vector<int>&, double w) {
                      logw.push_back(delta > 0.0
                                         ? params.epsilon * w / (2.0 * delta)
                                         : 0.0);
                    });
  if (logw.empty()) {
    throw InfeasibleError("exact_payment: instance without passenger is infeasible");
  }
  const double top = *std::max_element(logw.begin(), logw.end());
  double z = 0.0;
  for (double lw : logw) z += std::exp(lw - top);
  const double log_partition_reduced = top + std::log(z);

  return value_term + scale * entropy - scale * log_partition_reduced;
}

SelectedSet decomposed_select(const BidProfile& bids, const Scenario& sc, int s,
                              int t, const AuctionParams& params, Rng& rng) {
  params.validate();
  return draw_until_covered(pool_at(bids, s, t), sc.demand_at(s, t), params,
                            rng);
}

double efficient_payment(double quantity, double claimed_cost,
                         double eps_prime) {
  if (quantity == 0.0 && claimed_cost == 0.0) return 0.0;
  const double boost = std::exp(eps_prime * (quantity - claimed_cost));
  const double z = claimed_cost / boost;
  const double upper = quantity + z;
  // integral of exp(eps' y) over [0, upper]
  const double integral = (std::exp(eps_prime * upper) - 1.0) / eps_prime;
  return upper * boost - integral;
}

AuctionOutcome run_two_way(const BidProfile& bids, const Scenario& sc,
                           const AuctionParams& params, Rng& rng) {
  params.validate();
  sc.validate();

  const BidProfile filtered = bids.filtered_nonnegative();
  const double eps_prime = params.eps_prime();

  AuctionOutcome out;
  out.selection = SelectionProfile(static_cast<int>(sc.population.size()),
                                   sc.num_od, sc.horizon);
  out.winners.assign(static_cast<std::size_t>(sc.num_od),
                     std::vector<SelectedSet>(static_cast<std::size_t>(sc.horizon)));
  out.deficit.assign(static_cast<std::size_t>(sc.num_od),
                     std::vector<double>(static_cast<std::size_t>(sc.horizon), 0.0));

  // one child stream per time step; steps are independent sub-auctions
  const std::uint64_t master = rng();
  for (int t = 0; t < sc.horizon; ++t) {
    Rng step_rng = make_rng(mix_seed(master, static_cast<std::uint64_t>(t)));
    std::set<int> taken;
    for (int s = 0; s < sc.num_od; ++s) {
      std::vector<Candidate> pool;
      for (Candidate& c : pool_at(filtered, s, t)) {
        if (!taken.count(c.passenger)) pool.push_back(c);
      }
      SelectedSet w =
          draw_until_covered(std::move(pool), sc.demand_at(s, t), params,
                             step_rng);
      for (int i : w.members) {
        taken.insert(i);
        out.selection.set(i, s, t, true);
        const Bid* b = filtered.find(i, s, t);
        const double pay =
            efficient_payment(b->quantity, b->claimed_cost, eps_prime);
        out.payments[{t, s, i}] = pay;
        out.welfare += b->quantity - b->claimed_cost;
        if (pay < b->claimed_cost) ++out.ir_violations;
      }
      const double q_target = sc.demand_at(s, t);
      const double unmet = std::max(0.0, q_target - w.covered);
      out.deficit[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)] = unmet;
      if (w.deficit) ++out.deficit_count;
      out.winners[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)] =
          std::move(w);
    }
  }
  return out;
}

}  // namespace offload::auction
