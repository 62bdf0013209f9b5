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

#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "offload/random.hpp"
#include "offload/scenario.hpp"

namespace offload::pricing {

enum class UpdateMode {
  kVerbatim,     // price decreases by the sum of participants' gradients
  kSubgradient,  // full descent on the step cost, deficit penalty included
};

enum class EtaSchedule { kInvSqrt, kConstant };

struct EtaConfig {
  EtaSchedule schedule = EtaSchedule::kInvSqrt;
  double c = 1.0;
  // learning rate for 1-based step t
  double at(int t) const;
};

/// Per-OD posted prices over the horizon plus the learning-rate sequence.
struct PriceSchedule {
  std::vector<std::vector<double>> price;  // [s][t], dollars per offload unit
  std::vector<double> eta;                 // [t], positive nonincreasing
  double cap = 50.0;                       // maximum price the government posts

  void validate() const;
};

// Utility-maximizing offload for a posted price: argmax over q in
// [0, capacity] of p q - C(q). Quadratic costs give the clamped stationary
// point; linear costs contribute zero below the marginal rate and full
// capacity at or above it. No cost function for the OD means no response.
double best_response(const Passenger& p, int s, double price);

/// Aggregate feedback for one (s, t) cell.
struct OdResponse {
  double total_offload = 0.0;
  double sum_cost = 0.0;       // true inconvenience cost incurred
  double sum_gradient = 0.0;   // sum of C'(q*) over participants (q > 0)
  double sum_gradient_all = 0.0;  // over every local passenger
  double grad_dot_slope = 0.0;    // g . h
  double slope_sum = 0.0;         // h . 1
  double max_gradient = 0.0;
  double min_gradient = 0.0;
  double min_utility = 0.0;  // smallest realized p q - C(q) among members
  int participants = 0;
  int members = 0;
};

// Best response of every local passenger per OD at time t; prices has one
// entry per OD.
std::vector<OdResponse> aggregate_response(const Scenario& sc, int t,
                                           std::span<const double> prices);

// Social cost contribution of one (s, t) cell given its response.
double step_cost(const OdResponse& r, double demand, double beta);

// Next price from the current one. Verbatim mode applies
// max(p - eta * sum_grad, 0); subgradient mode descends on the full step
// cost, Clipped to [0, cap]. Throws std::invalid_argument for negative eta.
double ogd_update(double price, const OdResponse& feedback, double demand,
                  double beta, double eta, UpdateMode mode, double cap);

// Total social cost of a full schedule: inconvenience costs plus deficit
// penalties, with responses induced by the posted prices.
double social_cost(const PriceSchedule& schedule, const Scenario& sc);

struct FixedPriceConfig {
  double cap = 50.0;
  int coarse_points = 512;   // first scan over [0, cap]
  double grid_step = 1e-3;   // refinement resolution
};

struct FixedPriceResult {
  std::vector<double> price;    // best fixed price per OD
  std::vector<double> od_cost;  // cost at that price, per OD
  double cost = 0.0;            // total over ODs
};

// Best fixed price per OD in hindsight: coarse scan, golden-section polish
// and a fine grid around the best bracket.
FixedPriceResult fixed_price_opt(const Scenario& sc,
                                 const FixedPriceConfig& cfg = {});

/// Regret accounting for a realized schedule.
struct RegretReport {
  double lambda = 0.0;       // realized social cost
  double lambda_star = 0.0;  // best-fixed-price cost
  double regret = 0.0;       // lambda - lambda_star
  std::vector<double> fixed_price;  // optimizer's per-OD price

  // Upper bound evaluated with k = g.h + beta h.1 (the definition in force
  // where the bound is stated); bound_indicator uses the indicator variant
  // I{p* >= p} beta h.1 - g.h. Cells without participants are skipped and
  // counted; cells where no responder has a price slope (bang-bang
  // responses) void the bound's premises and are counted separately.
  double bound = 0.0;
  double bound_indicator = 0.0;
  bool bound_valid = true;
  int bound_skipped = 0;
  int bound_unresponsive = 0;

  std::vector<double> avg_regret;  // cumulative regret / t, per step
  double g_bar = 0.0;    // largest observed gradient entry
  double g_under = 0.0;  // smallest observed gradient entry
  double k_bar = 0.0;    // largest k value
};

RegretReport regret(const PriceSchedule& schedule, const Scenario& sc,
                    const FixedPriceConfig& cfg = {});

// Largest one-step price change caused by a unit L1 change in one
// passenger's offload: eta1 times the largest of the gradient Lipschitz
// constants and the gradients at entry, floored at delta_floor.
double price_sensitivity(const Scenario& sc, double eta1,
                         double delta_floor = 1e-6);

// Laplace-perturbed price: price + Laplace(delta_p / epsilon), clipped to
// [0, cap] for publication. The pre-clip value is stored in *unclipped when
// given. epsilon = infinity publishes the price unchanged.
double dp_price(double price, double delta_p, double epsilon, double cap,
                Rng& rng, double* unclipped = nullptr);

struct OneWayConfig {
  UpdateMode mode = UpdateMode::kSubgradient;
  bool dp = false;
  double epsilon = 0.015;  // per-step privacy parameter
  double p_init = 0.02;    // first posted price
  double p_cap = 50.0;
  EtaConfig eta{};
  double delta_p_floor = 1e-6;
  // Public override for the price sensitivity; keeps the noise scale
  // independent of the realized cost draw (used by leakage experiments).
  std::optional<double> delta_p_override;
  bool compute_regret = true;
  FixedPriceConfig fixed_price{};
};

struct OneWayResult {
  PriceSchedule published;                     // prices passengers saw
  std::vector<std::vector<double>> raw;        // pre-noise OGD values [s][t]
  std::vector<std::vector<double>> unclipped;  // post-noise, pre-clip [s][t]
  std::vector<std::vector<double>> offload;    // [s][t]
  std::vector<std::vector<double>> deficit;    // [s][t]
  std::vector<std::vector<double>> cost;       // step cost [s][t]
  std::vector<std::vector<int>> participants;  // [s][t]
  std::vector<double> min_step_utility;        // [t], min over passengers
  double delta_p = 0.0;
  double privacy_budget_raw = 0.0;      // (T - sum_{t<T} eta_t) * epsilon
  double privacy_budget_claimed = 0.0;  // clamped at zero
  RegretReport regret;
};

// Closed loop: publish (optionally perturbed) price, observe best responses,
// update. The OGD state advances from the published price, matching what an
// observer of the price sequence can reconstruct.
OneWayResult run_one_way(const Scenario& sc, const OneWayConfig& cfg, Rng& rng);

/// Run configuration file:
///   {mode: "verbatim"|"subgradient", dp: "on"|"off", epsilon, p_init, p_cap,
///    eta: {schedule: "inv_sqrt"|"constant", c}, seeds: [...]}
struct OneWayRunSpec {
  OneWayConfig config;
  std::vector<std::uint64_t> seeds;
};
OneWayRunSpec load_one_way_config(std::istream& in);
OneWayRunSpec load_one_way_config(const std::filesystem::path& path);

}  // namespace offload::pricing
