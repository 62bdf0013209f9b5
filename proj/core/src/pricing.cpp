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

#include "offload/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "json_io.hpp"
#include "offload/laplace.hpp"

namespace offload::pricing {

namespace {

double clip(double v, double lo, double hi) {
  return std::min(std::max(v, lo), hi);
}

// Response slope dq/dp at the realized response; zero outside the interior
// of a quadratic response and everywhere for the bang-bang linear response.
double response_slope(const CostFunction& c, double q, double capacity) {
  if (c.family() == CostFamily::kQuadratic && q > 0.0 && q < capacity) {
    return 1.0 / (2.0 * c.quad_a());
  }
  return 0.0;
}

}  // namespace

double EtaConfig::at(int t) const {
  if (t < 1) throw std::invalid_argument("EtaConfig::at: t is 1-based");
  if (!(c > 0.0)) throw std::invalid_argument("EtaConfig: c must be positive");
  switch (schedule) {
    case EtaSchedule::kInvSqrt:
      return c / std::sqrt(static_cast<double>(t));
    case EtaSchedule::kConstant:
      return c;
  }
  return c;
}

void PriceSchedule::validate() const {
  if (!(cap > 0.0)) throw std::invalid_argument("PriceSchedule: cap <= 0");
  if (price.empty() || eta.empty()) {
    throw std::invalid_argument("PriceSchedule: empty schedule");
  }
  const std::size_t horizon = price.front().size();
  for (const auto& row : price) {
    if (row.size() != horizon) {
      throw std::invalid_argument("PriceSchedule: ragged price rows");
    }
    for (double p : row) {
      if (p < 0.0 || p > cap) {
        throw std::invalid_argument("PriceSchedule: price outside [0, cap]");
      }
    }
  }
  if (eta.size() != horizon) {
    throw std::invalid_argument("PriceSchedule: eta length != horizon");
  }
  double prev = std::numeric_limits<double>::infinity();
  for (double e : eta) {
    if (!(e > 0.0) || e > prev) {
      throw std::invalid_argument("PriceSchedule: eta must be positive and nonincreasing");
    }
    prev = e;
  }
}

double best_response(const Passenger& p, int s, double price) {
  if (price < 0.0) throw std::domain_error("best_response: negative price");
  const CostFunction* c = p.cost_for(s);
  if (c == nullptr || p.capacity <= 0.0) return 0.0;
  switch (c->family()) {
    case CostFamily::kLinear:
      // ties at price == marginal rate resolve to full effort
      return price >= c->rate() ? p.capacity : 0.0;
    case CostFamily::kQuadratic: {
      const double interior = (price - c->quad_b()) / (2.0 * c->quad_a());
      return clip(interior, 0.0, p.capacity);
    }
  }
  return 0.0;
}

std::vector<OdResponse> aggregate_response(const Scenario& sc, int t,
                                           std::span<const double> prices) {
  if (static_cast<int>(prices.size()) != sc.num_od) {
    throw std::invalid_argument("aggregate_response: price vector size != S");
  }
  std::vector<OdResponse> out(static_cast<std::size_t>(sc.num_od));
  for (const Passenger& p : sc.population) {
    const int s = p.od_at(t);
    const CostFunction* c = p.cost_for(s);
    if (c == nullptr) continue;
    OdResponse& r = out[static_cast<std::size_t>(s)];
    const double price = prices[static_cast<std::size_t>(s)];
    const double q = best_response(p, s, price);
    const double cost = c->cost(q);
    const double grad = c->gradient(q);
    const double slope = response_slope(*c, q, p.capacity);
    r.members += 1;
    r.total_offload += q;
    r.sum_cost += cost;
    r.sum_gradient_all += grad;
    r.max_gradient = std::max(r.max_gradient, grad);
    if (r.members == 1 || grad < r.min_gradient) r.min_gradient = grad;
    const double utility = price * q - cost;
    if (r.members == 1 || utility < r.min_utility) r.min_utility = utility;
    if (q > 0.0) {
      r.participants += 1;
      r.sum_gradient += grad;
      r.grad_dot_slope += grad * slope;
      r.slope_sum += slope;
    }
  }
  return out;
}

double step_cost(const OdResponse& r, double demand, double beta) {
  return r.sum_cost + beta * std::max(0.0, demand - r.total_offload);
}

double ogd_update(double price, const OdResponse& feedback, double demand,
                  double beta, double eta, UpdateMode mode, double cap) {
  if (eta < 0.0) throw std::invalid_argument("ogd_update: negative eta");
  switch (mode) {
    case UpdateMode::kVerbatim:
      return clip(std::max(price - eta * feedback.sum_gradient, 0.0), 0.0, cap);
    case UpdateMode::kSubgradient: {
      const bool deficit = feedback.total_offload < demand;
      const double grad = feedback.grad_dot_slope -
                          (deficit ? beta * feedback.slope_sum : 0.0);
      return clip(price - eta * grad, 0.0, cap);
    }
  }
  return price;
}

double social_cost(const PriceSchedule& schedule, const Scenario& sc) {
  schedule.validate();
  if (static_cast<int>(schedule.price.size()) != sc.num_od ||
      static_cast<int>(schedule.price.front().size()) != sc.horizon) {
    throw std::invalid_argument("social_cost: schedule does not match scenario");
  }
  double total = 0.0;
  std::vector<double> prices(static_cast<std::size_t>(sc.num_od));
  for (int t = 0; t < sc.horizon; ++t) {
    for (int s = 0; s < sc.num_od; ++s) {
      prices[static_cast<std::size_t>(s)] =
          schedule.price[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)];
    }
    const auto responses = aggregate_response(sc, t, prices);
    for (int s = 0; s < sc.num_od; ++s) {
      total += step_cost(responses[static_cast<std::size_t>(s)],
                         sc.demand_at(s, t),
                         sc.penalty[static_cast<std::size_t>(s)]);
    }
  }
  return total;
}

namespace {

// Cost of holding one fixed price on a single OD over the whole horizon.
// Per-passenger responses depend on the price only, so they are computed
// once and reused across time steps.
class OdObjective {
 public:
  OdObjective(const Scenario& sc, int s) : sc_(sc), s_(s) {
    members_.resize(static_cast<std::size_t>(sc.horizon));
    std::vector<char> seen(sc.population.size(), 0);
    for (int t = 0; t < sc.horizon; ++t) {
      members_[static_cast<std::size_t>(t)] = sc.members_at(s, t);
      for (int i : members_[static_cast<std::size_t>(t)]) {
        if (!seen[static_cast<std::size_t>(i)]) {
          seen[static_cast<std::size_t>(i)] = 1;
          unique_.push_back(i);
        }
      }
    }
    q_.resize(sc.population.size(), 0.0);
    c_.resize(sc.population.size(), 0.0);
  }

  double operator()(double price) const {
    for (int i : unique_) {
      const Passenger& p = sc_.population[static_cast<std::size_t>(i)];
      const double q = best_response(p, s_, price);
      q_[static_cast<std::size_t>(i)] = q;
      c_[static_cast<std::size_t>(i)] = p.cost_for(s_)->cost(q);
    }
    const double beta = sc_.penalty[static_cast<std::size_t>(s_)];
    double total = 0.0;
    for (int t = 0; t < sc_.horizon; ++t) {
      double vol = 0.0, cost = 0.0;
      for (int i : members_[static_cast<std::size_t>(t)]) {
        vol += q_[static_cast<std::size_t>(i)];
        cost += c_[static_cast<std::size_t>(i)];
      }
      total += cost + beta * std::max(0.0, sc_.demand_at(s_, t) - vol);
    }
    return total;
  }

 private:
  const Scenario& sc_;
  int s_;
  std::vector<std::vector<int>> members_;
  std::vector<int> unique_;
  mutable std::vector<double> q_;
  mutable std::vector<double> c_;
};

struct ScalarMin {
  double x = 0.0;
  double value = std::numeric_limits<double>::infinity();
};

template <typename F>
void consider(ScalarMin& best, const F& f, double x) {
  const double v = f(x);
  if (v < best.value) {
    best.value = v;
    best.x = x;
  }
}

// Coarse scan, fine grid around the best cell, then golden-section polish.
template <typename F>
ScalarMin minimize_scalar(const F& f, double lo, double hi,
                          const FixedPriceConfig& cfg) {
  ScalarMin best;
  const int n = std::max(cfg.coarse_points, 2);
  const double cell = (hi - lo) / n;
  for (int k = 0; k <= n; ++k) consider(best, f, lo + cell * k);

  double a = std::max(lo, best.x - cell);
  double b = std::min(hi, best.x + cell);
  const double step = std::max(cfg.grid_step, 1e-12);
  for (double x = a; x < b + step / 2; x += step) {
    consider(best, f, std::min(x, b));
  }

  // golden-section inside one grid cell around the incumbent
  a = std::max(lo, best.x - step);
  b = std::min(hi, best.x + step);
  constexpr double kInvPhi = 0.6180339887498949;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 60 && (b - a) > 1e-12; ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = f(x2);
    }
  }
  consider(best, f, x1);
  consider(best, f, x2);
  return best;
}

}  // namespace

FixedPriceResult fixed_price_opt(const Scenario& sc,
                                 const FixedPriceConfig& cfg) {
  sc.validate();
  FixedPriceResult out;
  out.price.resize(static_cast<std::size_t>(sc.num_od), 0.0);
  out.od_cost.resize(static_cast<std::size_t>(sc.num_od), 0.0);
  for (int s = 0; s < sc.num_od; ++s) {
    const OdObjective f(sc, s);
    const ScalarMin best = minimize_scalar(f, 0.0, cfg.cap, cfg);
    out.price[static_cast<std::size_t>(s)] = best.x;
    out.od_cost[static_cast<std::size_t>(s)] = best.value;
    out.cost += best.value;
  }
  return out;
}

RegretReport regret(const PriceSchedule& schedule, const Scenario& sc,
                    const FixedPriceConfig& cfg) {
  schedule.validate();
  RegretReport rep;

  FixedPriceConfig fp = cfg;
  fp.cap = schedule.cap;
  const FixedPriceResult star = fixed_price_opt(sc, fp);
  rep.fixed_price = star.price;
  rep.lambda_star = star.cost;

  const int horizon = sc.horizon;
  const int n_od = sc.num_od;
  const double n_passengers = static_cast<double>(sc.population.size());

  std::vector<double> prices(static_cast<std::size_t>(n_od));
  std::vector<std::vector<OdResponse>> responses(
      static_cast<std::size_t>(horizon));
  std::vector<double> step_costs(static_cast<std::size_t>(horizon), 0.0);
  std::vector<double> star_costs(static_cast<std::size_t>(horizon), 0.0);

  rep.g_under = std::numeric_limits<double>::infinity();
  for (int t = 0; t < horizon; ++t) {
    for (int s = 0; s < n_od; ++s) {
      prices[static_cast<std::size_t>(s)] =
          schedule.price[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)];
    }
    responses[static_cast<std::size_t>(t)] = aggregate_response(sc, t, prices);
    const auto star_resp = aggregate_response(sc, t, star.price);
    for (int s = 0; s < n_od; ++s) {
      const auto& r = responses[static_cast<std::size_t>(t)][static_cast<std::size_t>(s)];
      const double beta = sc.penalty[static_cast<std::size_t>(s)];
      step_costs[static_cast<std::size_t>(t)] +=
          step_cost(r, sc.demand_at(s, t), beta);
      star_costs[static_cast<std::size_t>(t)] +=
          step_cost(star_resp[static_cast<std::size_t>(s)], sc.demand_at(s, t), beta);
      if (r.members > 0) {
        rep.g_bar = std::max(rep.g_bar, r.max_gradient);
        rep.g_under = std::min(rep.g_under, r.min_gradient);
      }
    }
    rep.lambda += step_costs[static_cast<std::size_t>(t)];
  }
  if (!std::isfinite(rep.g_under)) rep.g_under = 0.0;
  rep.regret = rep.lambda - rep.lambda_star;

  rep.avg_regret.resize(static_cast<std::size_t>(horizon));
  double cumulative = 0.0;
  for (int t = 0; t < horizon; ++t) {
    cumulative += step_costs[static_cast<std::size_t>(t)] -
                  star_costs[static_cast<std::size_t>(t)];
    rep.avg_regret[static_cast<std::size_t>(t)] = cumulative / (t + 1);
  }

  // bound terms
  for (int s = 0; s < n_od; ++s) {
    const double beta = sc.penalty[static_cast<std::size_t>(s)];
    for (int t = 0; t < horizon; ++t) {
      const auto& r = responses[static_cast<std::size_t>(t)][static_cast<std::size_t>(s)];
      const double gdot1 = r.sum_gradient_all;
      const double gh = r.grad_dot_slope;
      const double h1 = r.slope_sum;
      const double k_plain = gh + beta * h1;
      const double p_now =
          schedule.price[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)];
      const bool star_above = star.price[static_cast<std::size_t>(s)] >= p_now;
      const double k_ind = (star_above ? beta * h1 : 0.0) - gh;
      rep.k_bar = std::max(rep.k_bar, k_plain);
      if (h1 <= 0.0) {
        ++rep.bound_unresponsive;
        rep.bound_valid = false;
      }
      if (gdot1 <= 0.0) {
        ++rep.bound_skipped;
        rep.bound_valid = false;
        continue;
      }
      const double eta_t = schedule.eta[static_cast<std::size_t>(t)];
      const double common =
          eta_t * rep.g_bar * rep.g_bar * n_passengers * n_passengers / (2.0 * gdot1);
      rep.bound += common * k_plain;
      rep.bound_indicator += common * k_ind;
      if (t == horizon - 1) {
        const double last = schedule.cap * schedule.cap /
                            (2.0 * eta_t * gdot1);
        rep.bound += last * k_plain;
        rep.bound_indicator += last * k_ind;
      }
    }
  }
  return rep;
}

double price_sensitivity(const Scenario& sc, double eta1, double delta_floor) {
  if (sc.population.empty()) {
    throw std::invalid_argument("price_sensitivity: empty population");
  }
  if (eta1 < 0.0) {
    throw std::invalid_argument("price_sensitivity: negative eta");
  }
  double worst = 0.0;
  for (const Passenger& p : sc.population) {
    for (const auto& [od, c] : p.costs) {
      double lipschitz = 0.0;
      switch (c.family()) {
        case CostFamily::kLinear:
          lipschitz = 0.0;
          break;
        case CostFamily::kQuadratic:
          lipschitz = 2.0 * c.quad_a();
          break;
      }
      const double entry = c.gradient(1.0);  // joins with one offload unit
      worst = std::max(worst, std::max(lipschitz, entry));
    }
  }
  return std::max(eta1 * worst, delta_floor);
}

double dp_price(double price, double delta_p, double epsilon, double cap,
                Rng& rng, double* unclipped) {
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("dp_price: epsilon must be positive");
  }
  if (!(delta_p > 0.0)) {
    throw std::invalid_argument("dp_price: delta_p must be positive");
  }
  const double scale = delta_p / epsilon;  // zero when epsilon is infinite
  const double noisy = scale > 0.0 ? price + laplace_sample(scale, rng) : price;
  if (unclipped != nullptr) *unclipped = noisy;
  return clip(noisy, 0.0, cap);
}

OneWayResult run_one_way(const Scenario& sc, const OneWayConfig& cfg, Rng& rng) {
  sc.validate();
  if (cfg.p_init < 0.0 || cfg.p_init > cfg.p_cap) {
    throw std::invalid_argument("run_one_way: p_init outside [0, p_cap]");
  }
  const int n_od = sc.num_od;
  const int horizon = sc.horizon;

  OneWayResult out;
  auto matrix = [&](double v) {
    return std::vector<std::vector<double>>(
        static_cast<std::size_t>(n_od),
        std::vector<double>(static_cast<std::size_t>(horizon), v));
  };
  out.raw = matrix(0.0);
  out.unclipped = matrix(0.0);
  out.offload = matrix(0.0);
  out.deficit = matrix(0.0);
  out.cost = matrix(0.0);
  out.participants.assign(
      static_cast<std::size_t>(n_od),
      std::vector<int>(static_cast<std::size_t>(horizon), 0));
  out.min_step_utility.assign(static_cast<std::size_t>(horizon), 0.0);
  out.published.price = matrix(0.0);
  out.published.cap = cfg.p_cap;
  out.published.eta.resize(static_cast<std::size_t>(horizon));
  for (int t = 0; t < horizon; ++t) {
    out.published.eta[static_cast<std::size_t>(t)] = cfg.eta.at(t + 1);
  }

  out.delta_p = cfg.delta_p_override
                    ? *cfg.delta_p_override
                    : price_sensitivity(sc, cfg.eta.at(1), cfg.delta_p_floor);

  std::vector<double> prices(static_cast<std::size_t>(n_od));
  for (int s = 0; s < n_od; ++s) {
    out.raw[static_cast<std::size_t>(s)][0] = cfg.p_init;
  }
  for (int t = 0; t < horizon; ++t) {
    for (int s = 0; s < n_od; ++s) {
      const double raw = out.raw[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)];
      double unclipped = raw;
      double published = clip(raw, 0.0, cfg.p_cap);
      if (cfg.dp) {
        published = dp_price(raw, out.delta_p, cfg.epsilon, cfg.p_cap, rng,
                             &unclipped);
      }
      out.unclipped[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)] = unclipped;
      out.published.price[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)] =
          published;
      prices[static_cast<std::size_t>(s)] = published;
    }

    const auto responses = aggregate_response(sc, t, prices);
    bool any_member = false;
    double min_utility = std::numeric_limits<double>::infinity();
    for (int s = 0; s < n_od; ++s) {
      const auto& r = responses[static_cast<std::size_t>(s)];
      const double demand = sc.demand_at(s, t);
      const double beta = sc.penalty[static_cast<std::size_t>(s)];
      out.offload[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)] =
          r.total_offload;
      out.deficit[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)] =
          std::max(0.0, demand - r.total_offload);
      out.cost[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)] =
          step_cost(r, demand, beta);
      out.participants[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)] =
          r.participants;
      if (r.members > 0) {
        any_member = true;
        min_utility = std::min(min_utility, r.min_utility);
      }
      if (t + 1 < horizon) {
        out.raw[static_cast<std::size_t>(s)][static_cast<std::size_t>(t) + 1] =
            ogd_update(prices[static_cast<std::size_t>(s)], r, demand, beta,
                       cfg.eta.at(t + 1), cfg.mode, cfg.p_cap);
      }
    }
    out.min_step_utility[static_cast<std::size_t>(t)] =
        any_member ? min_utility : 0.0;
  }

  if (cfg.dp) {
    double eta_sum = 0.0;
    for (int t = 1; t <= horizon - 1; ++t) eta_sum += cfg.eta.at(t);
    out.privacy_budget_raw = (horizon - eta_sum) * cfg.epsilon;
    out.privacy_budget_claimed = std::max(0.0, out.privacy_budget_raw);
  }

  if (cfg.compute_regret) {
    FixedPriceConfig fp = cfg.fixed_price;
    fp.cap = cfg.p_cap;
    out.regret = regret(out.published, sc, fp);
  }
  return out;
}

OneWayRunSpec load_one_way_config(std::istream& in) {
  const detail::json j = detail::json::parse(in);
  OneWayRunSpec spec;
  OneWayConfig& cfg = spec.config;
  if (j.contains("mode")) {
    const auto mode = j.at("mode").get<std::string>();
    if (mode == "verbatim") {
      cfg.mode = UpdateMode::kVerbatim;
    } else if (mode == "subgradient") {
      cfg.mode = UpdateMode::kSubgradient;
    } else {
      throw std::invalid_argument("load_one_way_config: unknown mode " + mode);
    }
  }
  if (j.contains("dp")) {
    const auto dp = j.at("dp").get<std::string>();
    if (dp != "on" && dp != "off") {
      throw std::invalid_argument("load_one_way_config: dp must be on or off");
    }
    cfg.dp = dp == "on";
  }
  if (j.contains("epsilon")) cfg.epsilon = j.at("epsilon").get<double>();
  if (j.contains("p_init")) cfg.p_init = j.at("p_init").get<double>();
  if (j.contains("p_cap")) cfg.p_cap = j.at("p_cap").get<double>();
  if (j.contains("eta")) {
    const auto& je = j.at("eta");
    if (je.contains("schedule")) {
      const auto schedule = je.at("schedule").get<std::string>();
      if (schedule == "inv_sqrt") {
        cfg.eta.schedule = EtaSchedule::kInvSqrt;
      } else if (schedule == "constant") {
        cfg.eta.schedule = EtaSchedule::kConstant;
      } else {
        throw std::invalid_argument("load_one_way_config: unknown schedule " +
                                    schedule);
      }
    }
    if (je.contains("c")) cfg.eta.c = je.at("c").get<double>();
  }
  if (j.contains("seeds")) {
    spec.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  }
  return spec;
}

OneWayRunSpec load_one_way_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("load_one_way_config: cannot open " +
                                path.string());
  }
  return load_one_way_config(in);
}

}  // namespace offload::pricing
