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

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>

#include "offload/experiment.hpp"
#include "offload/laplace.hpp"
#include "offload/welfare.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;

using offload::harness::CaseStudy;
using offload::harness::ExperimentConfig;
using offload::harness::Mechanism;

struct CommonOptions {
  std::string scenario_path;
  std::string traffic_path;
  std::string population_path;
  double fraction = 0.05;
  double beta = 5.0;
  std::uint64_t seed = 1;
  std::uint64_t pop_seed = 42;
  int reps = 1;
  std::string out_dir = "out";
  int hour = 12;
};

void add_common(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option("--scenario", opt.scenario_path, "Scenario JSON file");
  cmd->add_option("--traffic", opt.traffic_path, "Traffic volume CSV file");
  cmd->add_option("--population", opt.population_path,
                  "Population spec JSON (with --traffic)");
  cmd->add_option("--fraction", opt.fraction,
                  "Offload fraction of baseline volume (with --traffic)");
  cmd->add_option("--beta", opt.beta, "Deficit penalty per offload unit");
  cmd->add_option("--seed", opt.seed, "Mechanism seed");
  cmd->add_option("--pop-seed", opt.pop_seed, "Population sampling seed");
  cmd->add_option("--reps", opt.reps, "Replication count")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--out", opt.out_dir, "Output directory");
  cmd->add_option("--hour", opt.hour, "Hour for the per-OD summary table");
}

CaseStudy resolve_study(const CommonOptions& opt) {
  namespace harness = offload::harness;
  if (!opt.scenario_path.empty()) {
    CaseStudy study;
    study.scenario = offload::load_scenario(opt.scenario_path);
    // no baseline volumes in a bare scenario; report against the targets
    study.before = study.scenario.demand;
    for (int s = 0; s < study.scenario.num_od; ++s) {
      study.od_names.push_back("od" + std::to_string(s));
    }
    return study;
  }
  if (opt.traffic_path.empty()) {
    throw std::invalid_argument("need --scenario or --traffic");
  }
  offload::PopulationSpec pop;
  pop.count = 500;
  if (!opt.population_path.empty()) {
    pop = offload::load_population_spec(opt.population_path);
  }
  const auto table = harness::load_traffic_csv(opt.traffic_path);
  return harness::build_case_study(table, pop, opt.fraction, opt.beta,
                                   opt.pop_seed);
}

std::vector<std::uint64_t> seed_list(const CommonOptions& opt) {
  std::vector<std::uint64_t> seeds;
  for (int k = 0; k < opt.reps; ++k) seeds.push_back(opt.seed + k);
  return seeds;
}

void print_metrics(const offload::harness::RunMetrics& m) {
  std::cout << "total offload: " << m.total_offload
            << "  payments: " << m.total_payments
            << "  deficit cells: " << m.deficit_cells << "\n";
  for (const auto& row : m.od_table) {
    std::cout << "  " << row.name << ": improvement " << row.improvement_pct
              << "%  avg payment $" << row.avg_payment << "\n";
  }
}

int cmd_gen_data(const std::string& out_path, int roads, int hours,
                 std::uint64_t seed) {
  const auto table = offload::harness::synth_traffic(roads, hours, seed);
  offload::harness::write_traffic_csv(table, std::filesystem::path(out_path));
  std::cout << "wrote " << table.rows.size() << " rows to " << out_path << "\n";
  return kExitOk;
}

int cmd_two_way(const CommonOptions& opt, bool exact, double epsilon,
                double delta, double effort, const std::string& bids_path) {
  ExperimentConfig cfg;
  cfg.mechanism = exact ? Mechanism::kTwoWayExact : Mechanism::kTwoWayEfficient;
  cfg.study = resolve_study(opt);
  cfg.auction.epsilon = epsilon;
  cfg.auction.delta = delta;
  cfg.seeds = seed_list(opt);
  cfg.out_dir = opt.out_dir;
  cfg.table_hour = opt.hour;
  cfg.bid_effort = effort;
  if (!bids_path.empty()) cfg.bids = offload::load_bids(bids_path);
  const auto metrics = offload::harness::run_experiment(cfg);
  std::cout << "two-way welfare: " << metrics.welfare
            << "  IR violations: " << metrics.ir_violations << "\n";
  print_metrics(metrics);
  return kExitOk;
}

struct OneWayFlags {
  std::string mode = "subgradient";
  std::string dp = "off";
  double epsilon = 0.015;
  std::string eta_schedule = "inv_sqrt";
  double eta_c = 1.0;
  double p_init = 0.02;
  double p_cap = 50.0;
  std::string config_path;
  // which flags the user passed explicitly, to override a config file
  bool has_mode = false, has_dp = false, has_epsilon = false,
       has_schedule = false, has_eta_c = false, has_p_init = false,
       has_p_cap = false;
};

int cmd_one_way(const CommonOptions& opt, const OneWayFlags& flags) {
  ExperimentConfig cfg;
  cfg.mechanism = Mechanism::kOneWay;
  cfg.study = resolve_study(opt);
  cfg.seeds = seed_list(opt);
  cfg.out_dir = opt.out_dir;
  cfg.table_hour = opt.hour;

  if (!flags.config_path.empty()) {
    const auto spec = offload::pricing::load_one_way_config(flags.config_path);
    cfg.one_way = spec.config;
    if (!spec.seeds.empty()) cfg.seeds = spec.seeds;
  }
  if (flags.has_mode || flags.config_path.empty()) {
    cfg.one_way.mode = flags.mode == "verbatim"
                           ? offload::pricing::UpdateMode::kVerbatim
                           : offload::pricing::UpdateMode::kSubgradient;
  }
  if (flags.has_dp || flags.config_path.empty()) {
    cfg.one_way.dp = flags.dp == "on";
  }
  if (flags.has_epsilon || flags.config_path.empty()) {
    cfg.one_way.epsilon = flags.epsilon;
  }
  if (flags.has_schedule || flags.config_path.empty()) {
    cfg.one_way.eta.schedule = flags.eta_schedule == "constant"
                                   ? offload::pricing::EtaSchedule::kConstant
                                   : offload::pricing::EtaSchedule::kInvSqrt;
  }
  if (flags.has_eta_c || flags.config_path.empty()) {
    cfg.one_way.eta.c = flags.eta_c;
  }
  if (flags.has_p_init || flags.config_path.empty()) {
    cfg.one_way.p_init = flags.p_init;
  }
  if (flags.has_p_cap || flags.config_path.empty()) {
    cfg.one_way.p_cap = flags.p_cap;
  }
  const auto metrics = offload::harness::run_experiment(cfg);
  std::cout << "one-way social cost: " << metrics.social_cost
            << "  min passenger utility: " << metrics.min_passenger_utility
            << "\n";
  print_metrics(metrics);
  return kExitOk;
}

int cmd_privacy(const std::string& out_dir, double epsilon, std::uint64_t seed,
                long trials) {
  namespace privacy = offload::privacy;
  namespace pricing = offload::pricing;
  using offload::harness::small_leakage_instance;
  using nlohmann::json;

  std::filesystem::create_directories(out_dir);
  const auto inst = small_leakage_instance();
  offload::Rng rng = offload::make_rng(seed);

  // two-way leakage over the default epsilon grid (exact enumeration)
  {
    std::ofstream out(std::filesystem::path(out_dir) / "leakage_epsilon.csv",
                      std::ios::binary);
    out << "epsilon,leakage_bits,stderr_bits,instance_id\n";
    for (double eps : {0.01, 0.05, 0.1, 0.5, 1.0}) {
      auto params = inst.auction_base;
      params.epsilon = eps;
      const auto rep = privacy::min_entropy_two_way(inst.scenario,
                                                    inst.bid_menus, inst.t,
                                                    params);
      out << eps << ',' << rep.leakage_bits << ",0,builtin-2x2\n";
    }
  }

  // one-way leakage over the horizon (Monte Carlo)
  {
    std::ofstream out(std::filesystem::path(out_dir) / "leakage_horizon.csv",
                      std::ios::binary);
    out << "T,leakage_bits,stderr_bits,instance_id\n";
    for (int horizon : {1, 6, 12, 24}) {
      privacy::OneWayLeakageConfig lc;
      lc.mechanism = inst.one_way_base;
      lc.mechanism.epsilon = epsilon;
      const auto rep = privacy::min_entropy_one_way(inst.scenario,
                                                    inst.cost_menus, lc,
                                                    horizon, rng);
      out << horizon << ',' << rep.leakage_bits << ',' << rep.stderr_bits
          << ",builtin-2x2\n";
    }
  }

  // DP ratio report: exact audit of the exponential mechanism on adjacent
  // bids, sampled audit of one Laplace price step
  json report;
  {
    offload::BidProfile b1, b2;
    b1.set(0, 0, inst.t, inst.bid_menus[0][0]);
    b1.set(1, 0, inst.t, inst.bid_menus[1][0]);
    b2 = b1;
    b2.set(0, 0, inst.t, inst.bid_menus[0][1]);
    auto params = inst.auction_base;
    params.epsilon = epsilon;
    const auto d1 = offload::auction::exact_distribution(b1, inst.scenario,
                                                         inst.t, params);
    const auto d2 = offload::auction::exact_distribution(b2, inst.scenario,
                                                         inst.t, params);
    // supports coincide on this instance; compare in support order
    const auto ratio = privacy::max_log_ratio_exact(d1.probability,
                                                    d2.probability);
    json cells = json::array();
    for (std::size_t k = 0; k < d1.probability.size(); ++k) {
      cells.push_back(json{{"p1", d1.probability[k]},
                           {"p2", d2.probability[k]}});
    }
    report["two_way_exact"] = {{"epsilon", epsilon},
                               {"max_log_ratio", ratio.max_log_ratio},
                               {"cells", cells}};
  }
  {
    const double eta1 = inst.one_way_base.eta.at(1);
    const double delta_p = 1.0;  // declared unit sensitivity for the audit
    const double p_prev = 1.0;
    const double shift = (1.0 - eta1 < 0.0 ? 0.0 : 1.0 - eta1) * delta_p;
    const double cap = inst.one_way_base.p_cap;
    const double width = delta_p / 10.0;
    const int cells = static_cast<int>(std::ceil(cap / width)) + 1;
    auto step = [&](double feedback) {
      return [=](offload::Rng& r) {
        double unclipped = 0.0;
        const double p = pricing::dp_price(p_prev - eta1 * feedback, delta_p,
                                           epsilon, cap, r, &unclipped);
        return std::min(cells - 1, static_cast<int>(p / width));
      };
    };
    const auto rep = privacy::dp_ratio_sampled(step(0.0), step(shift / eta1),
                                               cells, trials, rng);
    json jcells = json::array();
    for (const auto& c : rep.cells) {
      jcells.push_back(json{{"cell", c.cell},
                            {"p1", c.p1},
                            {"p2", c.p2},
                            {"log_ratio", std::isfinite(c.log_ratio)
                                              ? c.log_ratio
                                              : -1.0},
                            {"lower", c.lower},
                            {"upper", std::isfinite(c.upper) ? c.upper : -1.0}});
    }
    report["one_way_sampled"] = {{"epsilon", epsilon},
                                 {"claimed_bound", (1.0 - eta1) * epsilon},
                                 {"trials", rep.trials},
                                 {"max_log_ratio", rep.max_log_ratio},
                                 {"max_lower", rep.max_lower},
                                 {"cells", jcells}};
  }
  std::ofstream out(std::filesystem::path(out_dir) / "dp_check.json",
                    std::ios::binary);
  out << report.dump(2) << "\n";
  std::cout << "privacy reports written to " << out_dir << "\n";
  return kExitOk;
}

int cmd_sweep(const CommonOptions& opt, const std::string& mechanism,
              const std::string& param, const std::vector<double>& values,
              double epsilon, double delta) {
  namespace harness = offload::harness;
  harness::SweepConfig cfg;
  cfg.base.mechanism = mechanism == "one-way" ? Mechanism::kOneWay
                       : mechanism == "two-way-exact"
                           ? Mechanism::kTwoWayExact
                           : Mechanism::kTwoWayEfficient;
  harness::SweepParameter parameter;
  if (param == "epsilon") {
    parameter = harness::SweepParameter::kEpsilon;
  } else if (param == "T") {
    parameter = harness::SweepParameter::kHorizon;
  } else if (param == "eta_c") {
    parameter = harness::SweepParameter::kEtaC;
  } else if (param == "fraction") {
    parameter = harness::SweepParameter::kFraction;
  } else {
    throw std::invalid_argument("unknown sweep parameter " + param);
  }

  cfg.base.auction.epsilon = epsilon;
  cfg.base.auction.delta = delta;
  cfg.base.one_way.epsilon = epsilon;
  cfg.base.seeds = seed_list(opt);
  cfg.base.out_dir = opt.out_dir;
  cfg.base.table_hour = opt.hour;
  cfg.beta = opt.beta;
  cfg.fraction = opt.fraction;
  cfg.scenario_seed = opt.pop_seed;

  const bool needs_study = parameter == harness::SweepParameter::kEtaC ||
                           parameter == harness::SweepParameter::kFraction;
  if (needs_study) {
    if (!opt.traffic_path.empty()) {
      cfg.table = harness::load_traffic_csv(opt.traffic_path);
    } else {
      cfg.table = harness::synth_traffic(5, 24, opt.pop_seed);
    }
    cfg.population.count = 500;
    if (!opt.population_path.empty()) {
      cfg.population = offload::load_population_spec(opt.population_path);
    }
    cfg.base.study = harness::build_case_study(cfg.table, cfg.population,
                                               cfg.fraction, cfg.beta,
                                               cfg.scenario_seed);
  }

  const auto path = harness::sweep(cfg, parameter, values);
  std::cout << "sweep written to " << path.string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentially private incentives for shifting car trips to "
               "public transit: reverse-auction and posted-price simulators"};
  app.require_subcommand(1);

  CommonOptions opt;

  // gen-data
  auto* gen = app.add_subcommand("gen-data", "Write a synthetic traffic CSV");
  std::string gen_out = "traffic.csv";
  int gen_roads = 5, gen_hours = 24;
  std::uint64_t gen_seed = 7;
  gen->add_option("--out", gen_out, "Output CSV path");
  gen->add_option("--roads", gen_roads, "Distinct (county, direction) roads");
  gen->add_option("--hours", gen_hours, "Indices per road");
  gen->add_option("--seed", gen_seed, "Generator seed");

  // two-way
  auto* two = app.add_subcommand("two-way", "Run the reverse-auction mechanism");
  add_common(two, opt);
  bool two_exact = false;
  double epsilon = 0.1, delta = 0.05, effort = 1.0;
  std::string bids_path;
  two->add_flag("--exact", two_exact,
                "Exact exponential mechanism (small instances only)");
  two->add_option("--epsilon", epsilon, "Privacy parameter");
  two->add_option("--delta", delta, "Privacy slack of the decomposed scheme");
  two->add_option("--effort", effort, "Fraction of capacity offered in bids");
  two->add_option("--bids", bids_path,
                  "Bid profile JSON (default: truthful full-effort bids)");

  // one-way
  auto* one = app.add_subcommand("one-way", "Run the posted-price mechanism");
  add_common(one, opt);
  OneWayFlags ow;
  auto* o_mode = one->add_option("--mode", ow.mode, "Price update rule")
                     ->check(CLI::IsMember({"verbatim", "subgradient"}));
  auto* o_dp = one->add_option("--dp", ow.dp,
                               "Laplace perturbation of posted prices")
                  ->check(CLI::IsMember({"on", "off"}));
  auto* o_eps = one->add_option("--epsilon", ow.epsilon,
                                "Per-step privacy parameter");
  auto* o_sched =
      one->add_option("--eta-schedule", ow.eta_schedule, "Learning rate schedule")
          ->check(CLI::IsMember({"inv_sqrt", "constant"}));
  auto* o_eta = one->add_option("--eta-c", ow.eta_c, "Learning rate scale");
  auto* o_init = one->add_option("--p-init", ow.p_init, "First posted price");
  auto* o_cap = one->add_option("--p-cap", ow.p_cap, "Maximum posted price");
  one->add_option("--config", ow.config_path,
                  "Run configuration JSON; explicit flags override it");

  // privacy
  auto* priv = app.add_subcommand(
      "privacy", "Leakage sweeps and DP ratio audits on a small instance");
  std::string priv_out = "privacy_out";
  double priv_epsilon = 0.5;
  std::uint64_t priv_seed = 1;
  long priv_trials = 200000;
  priv->add_option("--out", priv_out, "Output directory");
  priv->add_option("--epsilon", priv_epsilon, "Audited privacy parameter");
  priv->add_option("--seed", priv_seed, "Seed");
  priv->add_option("--trials", priv_trials, "Sampled-audit trials");

  // sweep
  auto* sw = app.add_subcommand("sweep", "Run one experiment per value");
  add_common(sw, opt);
  std::string sw_mech = "one-way", sw_param = "epsilon";
  std::vector<double> sw_values;
  sw->add_option("--mechanism", sw_mech, "Mechanism for metric sweeps")
      ->check(CLI::IsMember({"two-way-efficient", "two-way-exact", "one-way"}));
  sw->add_option("--param", sw_param, "Swept parameter")
      ->check(CLI::IsMember({"epsilon", "T", "eta_c", "fraction"}));
  sw->add_option("--values", sw_values, "Values to sweep")->delimiter(',');
  sw->add_option("--epsilon", epsilon, "Base privacy parameter");
  sw->add_option("--delta", delta, "Base privacy slack");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (gen->parsed()) return cmd_gen_data(gen_out, gen_roads, gen_hours, gen_seed);
    if (two->parsed()) {
      return cmd_two_way(opt, two_exact, epsilon, delta, effort, bids_path);
    }
    if (one->parsed()) {
      ow.has_mode = o_mode->count() > 0;
      ow.has_dp = o_dp->count() > 0;
      ow.has_epsilon = o_eps->count() > 0;
      ow.has_schedule = o_sched->count() > 0;
      ow.has_eta_c = o_eta->count() > 0;
      ow.has_p_init = o_init->count() > 0;
      ow.has_p_cap = o_cap->count() > 0;
      return cmd_one_way(opt, ow);
    }
    if (priv->parsed()) {
      return cmd_privacy(priv_out, priv_epsilon, priv_seed, priv_trials);
    }
    if (sw->parsed()) {
      return cmd_sweep(opt, sw_mech, sw_param, sw_values, epsilon, delta);
    }
  } catch (const offload::auction::InfeasibleError& e) {
    std::cerr << "infeasible instance: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const offload::auction::ExactLimitError& e) {
    std::cerr << "infeasible for exact mode: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}
