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

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "offload/auction.hpp"
#include "offload/population.hpp"
#include "offload/pricing.hpp"
#include "offload/privacy.hpp"
#include "offload/scenario.hpp"
#include "offload/traffic_table.hpp"

namespace offload::harness {

enum class Mechanism { kTwoWayExact, kTwoWayEfficient, kOneWay };

/// A scenario plus the baseline traffic it was derived from, for
/// before/after reporting.
struct CaseStudy {
  Scenario scenario;
  std::vector<std::vector<double>> before;  // [s][t] baseline volumes
  std::vector<std::string> od_names;        // "<county> <direction>"
};

// Offload targets are fraction * volume; one OD per distinct road, one time
// step per index. Passengers are drawn from the population spec and assigned
// to ODs round-robin, stationary over the horizon.
Scenario build_scenario(const TrafficVolumeTable& table,
                        const PopulationSpec& population, double fraction,
                        double beta, std::uint64_t seed);
CaseStudy build_case_study(const TrafficVolumeTable& table,
                           const PopulationSpec& population, double fraction,
                           double beta, std::uint64_t seed);

// Truthful full-information bids: every passenger offers effort * capacity
// on its local OD at each step and claims its true cost.
BidProfile truthful_bids(const Scenario& sc, double effort = 1.0);

struct ExperimentConfig {
  Mechanism mechanism = Mechanism::kTwoWayEfficient;
  CaseStudy study;
  auction::AuctionParams auction;
  pricing::OneWayConfig one_way;
  std::vector<std::uint64_t> seeds{1};
  std::filesystem::path out_dir;
  int table_hour = 12;     // hour reported in the per-OD summary table
  double bid_effort = 1.0; // fraction of capacity offered in two-way bids
  // Explicit bid profile for two-way runs; defaults to truthful full bids.
  std::optional<BidProfile> bids;

  void validate() const;
};

struct OdSummary {
  std::string name;
  double improvement_pct = 0.0;  // realized offload / before volume
  double avg_payment = 0.0;      // per selected (or participating) passenger
};

struct RunMetrics {
  double welfare = 0.0;      // two-way, against claimed costs
  double social_cost = 0.0;  // one-way
  double total_offload = 0.0;
  double total_payments = 0.0;
  int deficit_cells = 0;
  int ir_violations = 0;
  double min_passenger_utility = 0.0;  // one-way, over all steps
  std::vector<OdSummary> od_table;     // at table_hour
  std::vector<std::filesystem::path> files;
};

// Runs the configured mechanism once per seed, writing per-run trajectory
// and volume CSVs, a JSON summary and the per-OD summary table; replicated
// runs land in rep<k>/ subdirectories and an aggregate CSV. Outputs are
// byte-identical across reruns with the same config and seeds. Returns the
// first seed's metrics.
RunMetrics run_experiment(const ExperimentConfig& cfg);

/// Canonical small instance for leakage studies: one OD, two passengers,
/// two-point bid and cost menus.
struct LeakageInstance {
  Scenario scenario;
  std::vector<std::vector<Bid>> bid_menus;            // two-way secret space
  std::vector<std::vector<CostFunction>> cost_menus;  // one-way secret space
  int t = 12;                                         // step audited (two-way)
  auction::AuctionParams auction_base;
  pricing::OneWayConfig one_way_base;
};
LeakageInstance small_leakage_instance();

enum class SweepParameter { kEpsilon, kHorizon, kEtaC, kFraction };

struct SweepConfig {
  ExperimentConfig base;
  // Needed to rebuild scenarios for fraction sweeps.
  TrafficVolumeTable table;
  PopulationSpec population;
  double beta = 5.0;
  double fraction = 0.05;
  std::uint64_t scenario_seed = 1;
  // Monte Carlo effort for one-way leakage points.
  int leakage_samples = 1500;
  int leakage_replications = 6;
};

// One run (or leakage evaluation) per value, aggregated into sweep.csv under
// base.out_dir. Epsilon sweeps enumerate the two-way leakage and horizon
// sweeps estimate the one-way leakage, both on the canonical small instance,
// as rows (value, leakage_bits, stderr_bits, instance_id); eta_c and
// fraction sweeps rerun the experiment and report headline metrics per
// value.
std::filesystem::path sweep(const SweepConfig& cfg, SweepParameter parameter,
                            const std::vector<double>& values);

}  // namespace offload::harness
