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

#include "offload/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "json_io.hpp"
#include "offload/welfare.hpp"

namespace offload::harness {

namespace {

using detail::json;

// 17 significant digits keeps reruns diffable at full double precision.
std::string g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::invalid_argument("cannot open output file " + path.string());
  }
  return out;
}

struct SeedOutputs {
  RunMetrics metrics;
  std::filesystem::path dir;
};

// before/offload/after rows; realized offload is capped at the baseline so
// the after volume never goes negative.
void write_volumes(const CaseStudy& study,
                   const std::vector<std::vector<double>>& offload,
                   const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "s,od,t,before,offload,after\n";
  const Scenario& sc = study.scenario;
  for (int s = 0; s < sc.num_od; ++s) {
    for (int t = 0; t < sc.horizon; ++t) {
      const double before =
          study.before[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)];
      const double realized = std::min(
          before, offload[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)]);
      out << s << ',' << study.od_names[static_cast<std::size_t>(s)] << ','
          << t << ',' << g17(before) << ',' << g17(realized) << ','
          << g17(before - realized) << '\n';
    }
  }
}

void write_od_table(const std::vector<OdSummary>& table,
                    const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "od,improvement_pct,avg_payment\n";
  for (const OdSummary& row : table) {
    out << row.name << ',' << g17(row.improvement_pct) << ','
        << g17(row.avg_payment) << '\n';
  }
}

std::vector<OdSummary> od_table_from(
    const CaseStudy& study, int hour,
    const std::vector<std::vector<double>>& offload,
    const std::vector<std::vector<double>>& paid,
    const std::vector<std::vector<int>>& payees) {
  std::vector<OdSummary> table;
  const Scenario& sc = study.scenario;
  if (hour < 0 || hour >= sc.horizon) return table;
  for (int s = 0; s < sc.num_od; ++s) {
    const auto su = static_cast<std::size_t>(s);
    const auto hu = static_cast<std::size_t>(hour);
    OdSummary row;
    row.name = study.od_names[su];
    const double before = study.before[su][hu];
    const double realized = std::min(before, offload[su][hu]);
    row.improvement_pct = before > 0.0 ? 100.0 * realized / before : 0.0;
    row.avg_payment = payees[su][hu] > 0 ? paid[su][hu] / payees[su][hu] : 0.0;
    table.push_back(row);
  }
  return table;
}

SeedOutputs run_two_way_seed(const ExperimentConfig& cfg, std::uint64_t seed,
                             const std::filesystem::path& dir) {
  const Scenario& sc = cfg.study.scenario;
  const BidProfile bids =
      cfg.bids ? *cfg.bids : truthful_bids(sc, cfg.bid_effort);
  Rng rng = make_rng(seed);

  auction::AuctionOutcome outcome;
  if (cfg.mechanism == Mechanism::kTwoWayEfficient) {
    outcome = auction::run_two_way(bids, sc, cfg.auction, rng);
  } else {
    // exact mechanism: enumerate per step; entropy payments for winners
    outcome.selection = SelectionProfile(
        static_cast<int>(sc.population.size()), sc.num_od, sc.horizon);
    outcome.deficit.assign(
        static_cast<std::size_t>(sc.num_od),
        std::vector<double>(static_cast<std::size_t>(sc.horizon), 0.0));
    outcome.winners.assign(
        static_cast<std::size_t>(sc.num_od),
        std::vector<auction::SelectedSet>(static_cast<std::size_t>(sc.horizon)));
    for (int t = 0; t < sc.horizon; ++t) {
      const SelectionProfile x =
          auction::exact_select(bids, sc, t, cfg.auction, rng);
      for (const auto& e : x.selected()) {
        outcome.selection.set(e.i, e.s, e.t, true);
        const Bid* b = bids.find(e.i, e.s, e.t);
        const double pay =
            auction::exact_payment(bids, sc, t, e.i, cfg.auction);
        outcome.payments[{e.t, e.s, e.i}] = pay;
        outcome.welfare += b->quantity - b->claimed_cost;
        if (pay < b->claimed_cost) ++outcome.ir_violations;
        outcome.winners[static_cast<std::size_t>(e.s)][static_cast<std::size_t>(t)]
            .members.push_back(e.i);
        outcome.winners[static_cast<std::size_t>(e.s)][static_cast<std::size_t>(t)]
            .covered += b->quantity;
      }
    }
  }

  // per-(s,t) realized offload, payments and welfare
  std::vector<std::vector<double>> offload(
      static_cast<std::size_t>(sc.num_od),
      std::vector<double>(static_cast<std::size_t>(sc.horizon), 0.0));
  std::vector<std::vector<double>> paid = offload;
  std::vector<std::vector<double>> welfare = offload;
  std::vector<std::vector<int>> payees(
      static_cast<std::size_t>(sc.num_od),
      std::vector<int>(static_cast<std::size_t>(sc.horizon), 0));
  for (const auto& [key, pay] : outcome.payments) {
    const auto [t, s, i] = key;
    const Bid* b = bids.find(i, s, t);
    offload[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)] +=
        b->quantity;
    paid[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)] += pay;
    welfare[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)] +=
        b->quantity - b->claimed_cost;
    ++payees[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)];
  }

  // outcome rows for every submitted bid
  {
    auto out = open_out(dir / "outcome.csv");
    out << "t,s,i,selected,q,payment,welfare_term\n";
    for (const auto& [key, bid] : bids.entries()) {
      const auto [t, s, i] = key;
      const bool sel = outcome.selection.at(i, s, t);
      double payment = 0.0;
      if (sel) {
        auto it = outcome.payments.find({t, s, i});
        if (it != outcome.payments.end()) payment = it->second;
      }
      out << t << ',' << s << ',' << i << ',' << (sel ? 1 : 0) << ','
          << g17(bid.quantity) << ',' << g17(payment) << ','
          << g17(sel ? bid.quantity - bid.claimed_cost : 0.0) << '\n';
    }
  }
  write_volumes(cfg.study, offload, dir / "volumes.csv");
  {
    auto out = open_out(dir / "welfare.csv");
    out << "s,od,t,welfare\n";
    for (int s = 0; s < sc.num_od; ++s) {
      for (int t = 0; t < sc.horizon; ++t) {
        out << s << ',' << cfg.study.od_names[static_cast<std::size_t>(s)]
            << ',' << t << ','
            << g17(welfare[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)])
            << '\n';
      }
    }
  }

  SeedOutputs so;
  so.dir = dir;
  RunMetrics& m = so.metrics;
  m.welfare = outcome.welfare;
  m.ir_violations = outcome.ir_violations;
  m.deficit_cells = outcome.deficit_count;
  for (int s = 0; s < sc.num_od; ++s) {
    for (int t = 0; t < sc.horizon; ++t) {
      m.total_offload +=
          offload[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)];
      m.total_payments +=
          paid[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)];
    }
  }
  m.od_table = od_table_from(cfg.study, cfg.table_hour, offload, paid, payees);
  write_od_table(m.od_table, dir / "table_summary.csv");

  json summary{{"mechanism", cfg.mechanism == Mechanism::kTwoWayEfficient
                                 ? "two-way-efficient"
                                 : "two-way-exact"},
               {"seed", seed},
               {"welfare", m.welfare},
               {"total_offload", m.total_offload},
               {"total_payments", m.total_payments},
               {"deficit_cells", m.deficit_cells},
               {"ir_violations", m.ir_violations},
               {"epsilon", cfg.auction.epsilon},
               {"delta", cfg.auction.delta}};
  auto out = open_out(dir / "summary.json");
  out << summary.dump(2) << "\n";

  m.files = {dir / "outcome.csv", dir / "volumes.csv", dir / "welfare.csv",
             dir / "table_summary.csv", dir / "summary.json"};
  return so;
}

SeedOutputs run_one_way_seed(const ExperimentConfig& cfg, std::uint64_t seed,
                             const std::filesystem::path& dir) {
  const Scenario& sc = cfg.study.scenario;
  Rng rng = make_rng(seed);
  const pricing::OneWayResult result =
      pricing::run_one_way(sc, cfg.one_way, rng);

  {
    auto out = open_out(dir / "trajectory.csv");
    out << "t,s,price_published,price_unclipped,total_offload,deficit,cost,"
           "cumulative_regret\n";
    for (int t = 0; t < sc.horizon; ++t) {
      const double cum =
          result.regret.avg_regret.empty()
              ? 0.0
              : result.regret.avg_regret[static_cast<std::size_t>(t)] * (t + 1);
      for (int s = 0; s < sc.num_od; ++s) {
        const auto su = static_cast<std::size_t>(s);
        const auto tu = static_cast<std::size_t>(t);
        out << t << ',' << s << ',' << g17(result.published.price[su][tu])
            << ',' << g17(result.unclipped[su][tu]) << ','
            << g17(result.offload[su][tu]) << ','
            << g17(result.deficit[su][tu]) << ',' << g17(result.cost[su][tu])
            << ',' << g17(cum) << '\n';
      }
    }
  }
  write_volumes(cfg.study, result.offload, dir / "volumes.csv");

  SeedOutputs so;
  so.dir = dir;
  RunMetrics& m = so.metrics;
  std::vector<std::vector<double>> paid(
      static_cast<std::size_t>(sc.num_od),
      std::vector<double>(static_cast<std::size_t>(sc.horizon), 0.0));
  m.min_passenger_utility = 0.0;
  for (int t = 0; t < sc.horizon; ++t) {
    m.min_passenger_utility =
        std::min(m.min_passenger_utility,
                 result.min_step_utility[static_cast<std::size_t>(t)]);
    for (int s = 0; s < sc.num_od; ++s) {
      const auto su = static_cast<std::size_t>(s);
      const auto tu = static_cast<std::size_t>(t);
      m.total_offload += result.offload[su][tu];
      m.social_cost += result.cost[su][tu];
      paid[su][tu] = result.published.price[su][tu] * result.offload[su][tu];
      m.total_payments += paid[su][tu];
      if (result.deficit[su][tu] > 0.0) ++m.deficit_cells;
    }
  }
  m.od_table = od_table_from(cfg.study, cfg.table_hour, result.offload, paid,
                             result.participants);
  write_od_table(m.od_table, dir / "table_summary.csv");

  json summary{
      {"mechanism", "one-way"},
      {"seed", seed},
      {"mode", cfg.one_way.mode == pricing::UpdateMode::kVerbatim
                   ? "verbatim"
                   : "subgradient"},
      {"dp", cfg.one_way.dp},
      {"epsilon", cfg.one_way.epsilon},
      {"delta_p", result.delta_p},
      {"privacy_budget_raw", result.privacy_budget_raw},
      {"privacy_budget_claimed", result.privacy_budget_claimed},
      {"social_cost", m.social_cost},
      {"lambda_star", result.regret.lambda_star},
      {"regret", result.regret.regret},
      {"regret_bound", result.regret.bound},
      {"regret_bound_valid", result.regret.bound_valid},
      {"total_offload", m.total_offload},
      {"total_payments", m.total_payments},
      {"deficit_cells", m.deficit_cells},
      {"min_passenger_utility", m.min_passenger_utility}};
  auto out = open_out(dir / "summary.json");
  out << summary.dump(2) << "\n";

  m.files = {dir / "trajectory.csv", dir / "volumes.csv",
             dir / "table_summary.csv", dir / "summary.json"};
  return so;
}

}  // namespace

Scenario build_scenario(const TrafficVolumeTable& table,
                        const PopulationSpec& population, double fraction,
                        double beta, std::uint64_t seed) {
  return build_case_study(table, population, fraction, beta, seed).scenario;
}

CaseStudy build_case_study(const TrafficVolumeTable& table,
                           const PopulationSpec& population, double fraction,
                           double beta, std::uint64_t seed) {
  if (fraction < 0.0 || fraction > 1.0) {
    throw std::invalid_argument("build_scenario: fraction outside [0, 1]");
  }
  if (beta < 0.0) throw std::invalid_argument("build_scenario: beta < 0");
  if (table.rows.empty()) {
    throw std::invalid_argument("build_scenario: empty traffic table");
  }

  // (county, direction) -> OD index, in table order
  std::map<std::pair<std::string, std::string>, int> od_index;
  std::vector<std::string> names;
  std::map<int, int> index_pos;  // hour/postmile index -> time step
  for (const auto& r : table.rows) {
    if (!od_index.count({r.county, r.direction})) {
      const int s = static_cast<int>(od_index.size());
      od_index[{r.county, r.direction}] = s;
      names.push_back(r.county + " " + r.direction);
    }
    if (!index_pos.count(r.index)) {
      const int t = static_cast<int>(index_pos.size());
      index_pos[r.index] = t;
    }
  }

  CaseStudy study;
  Scenario& sc = study.scenario;
  sc.num_od = static_cast<int>(od_index.size());
  sc.horizon = static_cast<int>(index_pos.size());
  sc.demand.assign(static_cast<std::size_t>(sc.num_od),
                   std::vector<double>(static_cast<std::size_t>(sc.horizon), 0.0));
  study.before = sc.demand;
  study.od_names = names;
  sc.penalty.assign(static_cast<std::size_t>(sc.num_od), beta);
  for (const auto& r : table.rows) {
    const auto s =
        static_cast<std::size_t>(od_index[{r.county, r.direction}]);
    const auto t = static_cast<std::size_t>(index_pos[r.index]);
    study.before[s][t] = r.volume;
    sc.demand[s][t] = fraction * r.volume;
  }

  sc.population = sample_population(population, seed);
  for (std::size_t k = 0; k < sc.population.size(); ++k) {
    Passenger& p = sc.population[k];
    const int od = static_cast<int>(k % static_cast<std::size_t>(sc.num_od));
    auto node = p.costs.extract(0);
    node.key() = od;
    p.costs.insert(std::move(node));
    p.local_od.assign(static_cast<std::size_t>(sc.horizon), od);
  }
  sc.validate();
  return study;
}

BidProfile truthful_bids(const Scenario& sc, double effort) {
  if (effort < 0.0 || effort > 1.0) {
    throw std::invalid_argument("truthful_bids: effort outside [0, 1]");
  }
  BidProfile bids;
  for (std::size_t k = 0; k < sc.population.size(); ++k) {
    const Passenger& p = sc.population[k];
    for (int t = 0; t < sc.horizon; ++t) {
      const int s = p.od_at(t);
      const CostFunction* c = p.cost_for(s);
      const double q = effort * p.capacity;
      bids.set(static_cast<int>(k), s, t, Bid{q, c->cost(q)});
    }
  }
  return bids;
}

void ExperimentConfig::validate() const {
  if (seeds.empty()) {
    throw std::invalid_argument("ExperimentConfig: seeds must be nonempty");
  }
  if (out_dir.empty()) {
    throw std::invalid_argument("ExperimentConfig: out_dir must be set");
  }
  study.scenario.validate();
}

RunMetrics run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  std::filesystem::create_directories(cfg.out_dir);

  std::vector<SeedOutputs> runs;
  for (std::size_t k = 0; k < cfg.seeds.size(); ++k) {
    std::filesystem::path dir = cfg.out_dir;
    if (cfg.seeds.size() > 1) {
      dir /= "rep" + std::to_string(k);
      std::filesystem::create_directories(dir);
    }
    switch (cfg.mechanism) {
      case Mechanism::kTwoWayExact:
      case Mechanism::kTwoWayEfficient:
        runs.push_back(run_two_way_seed(cfg, cfg.seeds[k], dir));
        break;
      case Mechanism::kOneWay:
        runs.push_back(run_one_way_seed(cfg, cfg.seeds[k], dir));
        break;
    }
  }

  if (cfg.seeds.size() > 1) {
    auto out = open_out(cfg.out_dir / "aggregate.csv");
    out << "rep,seed,welfare,social_cost,total_offload,total_payments,"
           "deficit_cells,ir_violations\n";
    for (std::size_t k = 0; k < runs.size(); ++k) {
      const RunMetrics& m = runs[k].metrics;
      out << k << ',' << cfg.seeds[k] << ',' << g17(m.welfare) << ','
          << g17(m.social_cost) << ',' << g17(m.total_offload) << ','
          << g17(m.total_payments) << ',' << m.deficit_cells << ','
          << m.ir_violations << '\n';
    }
  }
  return runs.front().metrics;
}

LeakageInstance small_leakage_instance() {
  LeakageInstance inst;
  Scenario& sc = inst.scenario;
  sc.num_od = 1;
  sc.horizon = 24;
  sc.demand.assign(1, std::vector<double>(24, 0.5));
  sc.penalty = {3.0};
  for (int i = 0; i < 2; ++i) {
    Passenger p;
    p.id = i;
    p.capacity = 4.0;  // responses stay interior up to the price cap
    p.costs.emplace(0, CostFunction::Quadratic(0.5, 0.25));
    p.local_od.assign(24, 0);
    sc.population.push_back(std::move(p));
  }

  // two cost levels per passenger, as claimed bids and as true costs
  inst.bid_menus = {{Bid{1.0, 0.2}, Bid{1.0, 0.8}},
                    {Bid{1.0, 0.2}, Bid{1.0, 0.8}}};
  inst.cost_menus = {
      {CostFunction::Quadratic(0.5, 0.25), CostFunction::Quadratic(0.5, 0.75)},
      {CostFunction::Quadratic(0.5, 0.25), CostFunction::Quadratic(0.5, 0.75)}};
  inst.t = 12;

  inst.auction_base.epsilon = 0.1;
  inst.auction_base.delta = 0.05;
  // public score scale over the declared bid space: both passengers at their
  // best-welfare option
  inst.auction_base.welfare_sensitivity = 1.6;

  inst.one_way_base.mode = pricing::UpdateMode::kSubgradient;
  inst.one_way_base.dp = true;
  inst.one_way_base.epsilon = 0.015;
  // starting above both participation thresholds with a damped step keeps
  // the price dynamics near the region where the secret cost draw matters
  inst.one_way_base.p_init = 1.0;
  inst.one_way_base.p_cap = 3.0;
  inst.one_way_base.eta = {pricing::EtaSchedule::kInvSqrt, 0.15};
  inst.one_way_base.compute_regret = false;
  return inst;
}

std::filesystem::path sweep(const SweepConfig& cfg, SweepParameter parameter,
                            const std::vector<double>& values) {
  if (values.empty()) {
    throw std::invalid_argument("sweep: value list must be nonempty");
  }
  std::filesystem::create_directories(cfg.base.out_dir);
  const std::filesystem::path path = cfg.base.out_dir / "sweep.csv";
  auto out = open_out(path);

  const bool leakage_sweep = parameter == SweepParameter::kEpsilon ||
                             parameter == SweepParameter::kHorizon;
  if (leakage_sweep) {
    out << (parameter == SweepParameter::kEpsilon ? "epsilon" : "T")
        << ",leakage_bits,stderr_bits,instance_id\n";
    const LeakageInstance inst = small_leakage_instance();
    Rng rng = make_rng(cfg.base.seeds.front());
    for (double v : values) {
      privacy::LeakageReport rep;
      if (parameter == SweepParameter::kEpsilon) {
        // the auction channel is exactly enumerable per epsilon
        auction::AuctionParams params = inst.auction_base;
        params.epsilon = v;
        rep = privacy::min_entropy_two_way(inst.scenario, inst.bid_menus,
                                           inst.t, params);
      } else {
        privacy::OneWayLeakageConfig lc;
        lc.mechanism = inst.one_way_base;
        lc.samples = cfg.leakage_samples;
        lc.replications = cfg.leakage_replications;
        rep = privacy::min_entropy_one_way(inst.scenario, inst.cost_menus, lc,
                                           static_cast<int>(v), rng);
      }
      out << g17(v) << ',' << g17(rep.leakage_bits) << ','
          << g17(rep.stderr_bits) << ",builtin-2x2\n";
    }
    return path;
  }

  out << (parameter == SweepParameter::kEtaC ? "eta_c" : "fraction")
      << ",welfare,social_cost,total_offload,total_payments,deficit_cells\n";
  for (std::size_t k = 0; k < values.size(); ++k) {
    ExperimentConfig point = cfg.base;
    point.out_dir = cfg.base.out_dir / ("value" + std::to_string(k));
    if (parameter == SweepParameter::kEtaC) {
      point.one_way.eta.c = values[k];
    } else {
      point.study = build_case_study(cfg.table, cfg.population, values[k],
                                     cfg.beta, cfg.scenario_seed);
    }
    const RunMetrics m = run_experiment(point);
    out << g17(values[k]) << ',' << g17(m.welfare) << ',' << g17(m.social_cost)
        << ',' << g17(m.total_offload) << ',' << g17(m.total_payments) << ','
        << m.deficit_cells << '\n';
  }
  return path;
}

}  // namespace offload::harness
