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

#include "offload/privacy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace offload::privacy {

namespace {

double log2_of(double v) { return std::log2(v); }

// Odometer over a per-position menu-size vector; returns false after the
// last combination.
bool advance(std::vector<std::size_t>& idx, const std::vector<std::size_t>& radix) {
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (++idx[k] < radix[k]) return true;
    idx[k] = 0;
  }
  return false;
}

}  // namespace

LeakageReport leakage_from_channel(const std::vector<std::vector<double>>& channel) {
  if (channel.empty()) {
    throw std::invalid_argument("leakage_from_channel: empty channel");
  }
  const std::size_t outputs = channel.front().size();
  for (const auto& row : channel) {
    if (row.size() != outputs) {
      throw std::invalid_argument("leakage_from_channel: ragged rows");
    }
  }
  // Under a uniform prior, L = log2 sum_y max_v Pr(y | v).
  double sum_max = 0.0;
  std::size_t seen_outputs = 0;
  for (std::size_t y = 0; y < outputs; ++y) {
    double best = 0.0;
    for (const auto& row : channel) best = std::max(best, row[y]);
    if (best > 0.0) ++seen_outputs;
    sum_max += best;
  }
  LeakageReport rep;
  rep.input_count = channel.size();
  rep.output_count = seen_outputs;
  rep.prior_bits = log2_of(static_cast<double>(channel.size()));
  rep.leakage_bits = std::max(0.0, log2_of(sum_max));
  rep.posterior_bits = rep.prior_bits - rep.leakage_bits;
  return rep;
}

ExactRatioReport max_log_ratio_exact(const std::vector<double>& p1,
                                     const std::vector<double>& p2) {
  if (p1.size() != p2.size()) {
    throw std::invalid_argument("max_log_ratio_exact: size mismatch");
  }
  ExactRatioReport rep;
  // merge all one-sided cells: any probability stranded where the other
  // distribution has none is a hard violation
  double stranded1 = 0.0, stranded2 = 0.0;
  for (std::size_t k = 0; k < p1.size(); ++k) {
    const double a = p1[k], b = p2[k];
    if (a <= 0.0 && b <= 0.0) continue;
    ++rep.cells;
    if (a <= 0.0) {
      stranded2 += b;
      continue;
    }
    if (b <= 0.0) {
      stranded1 += a;
      continue;
    }
    rep.max_log_ratio =
        std::max(rep.max_log_ratio, std::abs(std::log(a) - std::log(b)));
  }
  if (stranded1 > 0.0 || stranded2 > 0.0) {
    rep.disjoint_support = true;
    rep.max_log_ratio = std::numeric_limits<double>::infinity();
  }
  return rep;
}

Interval wilson_bounds(long k, long n, double z) {
  if (n <= 0 || k < 0 || k > n) {
    throw std::invalid_argument("wilson_bounds: bad counts");
  }
  const double nn = static_cast<double>(n);
  const double phat = static_cast<double>(k) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = phat + z2 / (2.0 * nn);
  const double margin =
      z * std::sqrt(phat * (1.0 - phat) / nn + z2 / (4.0 * nn * nn));
  Interval out;
  // the score interval touches the boundary exactly at the degenerate counts
  out.lo = k == 0 ? 0.0 : std::max(0.0, (center - margin) / denom);
  out.hi = k == n ? 1.0 : std::min(1.0, (center + margin) / denom);
  return out;
}

SampledRatioReport dp_ratio_sampled(const std::function<int(Rng&)>& mech1,
                                    const std::function<int(Rng&)>& mech2,
                                    int num_cells, long trials, Rng& rng) {
  if (num_cells <= 0 || trials <= 0) {
    throw std::invalid_argument("dp_ratio_sampled: bad configuration");
  }
  std::vector<long> c1(static_cast<std::size_t>(num_cells), 0);
  std::vector<long> c2(static_cast<std::size_t>(num_cells), 0);
  auto tally = [&](const std::function<int(Rng&)>& mech, std::vector<long>& c) {
    for (long k = 0; k < trials; ++k) {
      const int cell = mech(rng);
      if (cell < 0 || cell >= num_cells) {
        throw std::out_of_range("dp_ratio_sampled: cell out of range");
      }
      ++c[static_cast<std::size_t>(cell)];
    }
  };
  tally(mech1, c1);
  tally(mech2, c2);

  SampledRatioReport rep;
  rep.trials = trials;
  rep.max_lower = -std::numeric_limits<double>::infinity();
  for (int cell = 0; cell < num_cells; ++cell) {
    const long n1 = c1[static_cast<std::size_t>(cell)];
    const long n2 = c2[static_cast<std::size_t>(cell)];
    if (n1 == 0 && n2 == 0) continue;
    SampledCell sc;
    sc.cell = cell;
    sc.n1 = n1;
    sc.n2 = n2;
    sc.p1 = static_cast<double>(n1) / static_cast<double>(trials);
    sc.p2 = static_cast<double>(n2) / static_cast<double>(trials);
    const Interval i1 = wilson_bounds(n1, trials);
    const Interval i2 = wilson_bounds(n2, trials);
    const double point =
        (sc.p1 > 0.0 && sc.p2 > 0.0)
            ? std::abs(std::log(sc.p1) - std::log(sc.p2))
            : std::numeric_limits<double>::infinity();
    // statistically supported lower bound on the two-sided log ratio: each
    // direction compares one side's lower bound against the other's upper
    auto dir_lower = [](const Interval& num, const Interval& den) {
      if (num.lo <= 0.0) return -std::numeric_limits<double>::infinity();
      if (den.hi <= 0.0) return std::numeric_limits<double>::infinity();
      return std::log(num.lo) - std::log(den.hi);
    };
    auto dir_upper = [](const Interval& num, const Interval& den) {
      if (num.hi <= 0.0) return -std::numeric_limits<double>::infinity();
      if (den.lo <= 0.0) return std::numeric_limits<double>::infinity();
      return std::log(num.hi) - std::log(den.lo);
    };
    sc.lower = std::max(dir_lower(i1, i2), dir_lower(i2, i1));
    sc.upper = std::max(dir_upper(i1, i2), dir_upper(i2, i1));
    sc.log_ratio = point;
    rep.max_log_ratio = std::max(rep.max_log_ratio, point);
    rep.max_lower = std::max(rep.max_lower, sc.lower);
    rep.max_upper = std::max(rep.max_upper, sc.upper);
    rep.cells.push_back(sc);
  }
  if (!std::isfinite(rep.max_lower) && rep.max_lower < 0.0) rep.max_lower = 0.0;
  return rep;
}

LeakageReport min_entropy_two_way(const Scenario& sc,
                                  const std::vector<std::vector<Bid>>& menus,
                                  int t, const auction::AuctionParams& params) {
  sc.validate();
  if (menus.size() != sc.population.size()) {
    throw std::invalid_argument("min_entropy_two_way: one menu per passenger");
  }
  std::vector<std::size_t> radix;
  std::size_t space = 1;
  for (const auto& menu : menus) {
    if (menu.empty()) {
      throw std::invalid_argument("min_entropy_two_way: empty menu");
    }
    if (space > 10'000 / menu.size()) {
      throw std::invalid_argument("min_entropy_two_way: bid space too large");
    }
    space *= menu.size();
    radix.push_back(menu.size());
  }

  // Selection outcomes are keyed by each passenger's chosen OD (-1 if not
  // selected); max over bid profiles of Pr(outcome | profile) accumulates.
  std::map<std::vector<int>, double> column_max;
  std::vector<std::size_t> idx(menus.size(), 0);
  do {
    BidProfile bids;
    for (std::size_t k = 0; k < menus.size(); ++k) {
      const Passenger& p = sc.population[k];
      bids.set(static_cast<int>(k), p.od_at(t), t, menus[k][idx[k]]);
    }
    const auto dist = auction::exact_distribution(bids, sc, t, params);
    for (std::size_t j = 0; j < dist.support.size(); ++j) {
      std::vector<int> key(menus.size(), -1);
      for (const auto& e : dist.support[j].selected()) {
        key[static_cast<std::size_t>(e.i)] = e.s;
      }
      double& slot = column_max[key];
      slot = std::max(slot, dist.probability[j]);
    }
  } while (advance(idx, radix));

  double sum_max = 0.0;
  for (const auto& [key, v] : column_max) sum_max += v;

  LeakageReport rep;
  rep.input_count = space;
  rep.output_count = column_max.size();
  rep.prior_bits = log2_of(static_cast<double>(space));
  rep.leakage_bits = std::max(0.0, log2_of(sum_max));
  rep.posterior_bits = rep.prior_bits - rep.leakage_bits;
  return rep;
}

LeakageReport min_entropy_one_way(
    const Scenario& sc, const std::vector<std::vector<CostFunction>>& menus,
    const OneWayLeakageConfig& cfg, int horizon, Rng& rng) {
  sc.validate();
  if (menus.size() != sc.population.size()) {
    throw std::invalid_argument("min_entropy_one_way: one menu per passenger");
  }
  std::vector<std::size_t> radix;
  std::size_t space = 1;
  for (const auto& menu : menus) {
    if (menu.empty()) {
      throw std::invalid_argument("min_entropy_one_way: empty menu");
    }
    if (space > 10'000 / menu.size()) {
      throw std::invalid_argument("min_entropy_one_way: cost space too large");
    }
    space *= menu.size();
    radix.push_back(menu.size());
  }

  LeakageReport rep;
  rep.input_count = space;
  rep.prior_bits = log2_of(static_cast<double>(space));
  if (horizon <= 0) return rep;  // nothing observed, nothing leaked
  if (horizon > sc.horizon) {
    throw std::invalid_argument("min_entropy_one_way: horizon too long");
  }

  // Noise scale from the declared cost space, so it is public: take the
  // largest sensitivity over every full assignment of menu options.
  pricing::OneWayConfig mech = cfg.mechanism;
  mech.dp = true;
  mech.compute_regret = false;
  double worst = mech.delta_p_floor;
  for (std::size_t k = 0; k < menus.size(); ++k) {
    for (const CostFunction& c : menus[k]) {
      const double lip =
          c.family() == CostFamily::kQuadratic ? 2.0 * c.quad_a() : 0.0;
      worst = std::max(worst, std::max(lip, c.gradient(1.0)));
    }
  }
  mech.delta_p_override = std::max(mech.eta.at(1) * worst, mech.delta_p_floor);
  const double bin_width = *mech.delta_p_override / 10.0;

  Scenario trimmed = sc;
  trimmed.horizon = horizon;
  for (auto& row : trimmed.demand) row.resize(static_cast<std::size_t>(horizon));
  for (auto& p : trimmed.population) {
    p.local_od.resize(static_cast<std::size_t>(horizon));
  }

  std::vector<double> estimates;
  for (int rep_idx = 0; rep_idx < cfg.replications; ++rep_idx) {
    // frequency of each binned price sequence under every secret
    std::map<std::vector<long>, std::vector<long>> counts;
    std::vector<std::size_t> idx(menus.size(), 0);
    std::size_t secret = 0;
    do {
      Scenario variant = trimmed;
      for (std::size_t k = 0; k < menus.size(); ++k) {
        Passenger& p = variant.population[k];
        for (auto& [od, cost] : p.costs) cost = menus[k][idx[k]];
      }
      for (int run = 0; run < cfg.samples; ++run) {
        Rng run_rng = make_rng(rng());
        const auto result = pricing::run_one_way(variant, mech, run_rng);
        std::vector<long> key;
        key.reserve(static_cast<std::size_t>(variant.num_od) *
                    static_cast<std::size_t>(horizon));
        for (int t = 0; t < horizon; ++t) {
          for (int s = 0; s < variant.num_od; ++s) {
            key.push_back(static_cast<long>(std::floor(
                result.published.price[static_cast<std::size_t>(s)]
                                      [static_cast<std::size_t>(t)] /
                bin_width)));
          }
        }
        auto& row = counts[key];
        if (row.empty()) row.assign(space, 0);
        ++row[secret];
      }
      ++secret;
    } while (advance(idx, radix));

    double sum_max = 0.0;
    for (const auto& [key, row] : counts) {
      const long best = *std::max_element(row.begin(), row.end());
      sum_max += static_cast<double>(best) / cfg.samples;
    }
    estimates.push_back(std::max(0.0, log2_of(sum_max)));
    rep.output_count = std::max(rep.output_count, counts.size());
  }

  double mean = 0.0;
  for (double e : estimates) mean += e;
  mean /= static_cast<double>(estimates.size());
  double var = 0.0;
  for (double e : estimates) var += (e - mean) * (e - mean);
  if (estimates.size() > 1) {
    var /= static_cast<double>(estimates.size() - 1);
    rep.stderr_bits = std::sqrt(var / static_cast<double>(estimates.size()));
  }
  rep.leakage_bits = mean;
  rep.posterior_bits = rep.prior_bits - rep.leakage_bits;
  return rep;
}

}  // namespace offload::privacy
