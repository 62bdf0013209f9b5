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

#include <benchmark/benchmark.h>

#include "offload/experiment.hpp"
#include "offload/laplace.hpp"

namespace {

using namespace offload;

harness::CaseStudy study(int passengers) {
  const auto table = harness::synth_traffic(5, 24, 1);
  PopulationSpec pop;
  pop.count = passengers;
  return harness::build_case_study(table, pop, 0.03, 5.0, 2);
}

void BM_TwoWayEfficient(benchmark::State& state) {
  const auto cs = study(static_cast<int>(state.range(0)));
  const BidProfile bids = harness::truthful_bids(cs.scenario);
  auction::AuctionParams params;
  params.epsilon = 0.5;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    Rng rng = make_rng(++seed);
    benchmark::DoNotOptimize(
        auction::run_two_way(bids, cs.scenario, params, rng));
  }
}
BENCHMARK(BM_TwoWayEfficient)->Arg(100)->Arg(500)->Arg(2000)
    ->Unit(benchmark::kMillisecond);

void BM_ExactDistribution(benchmark::State& state) {
  Scenario sc;
  sc.num_od = 2;
  sc.horizon = 1;
  sc.demand = {{0.0}, {0.0}};
  sc.penalty = {1.0, 1.0};
  BidProfile bids;
  const int n = static_cast<int>(state.range(0));
  for (int i = 0; i < n; ++i) {
    Passenger p;
    p.id = i;
    p.capacity = 2.0;
    p.costs.emplace(0, CostFunction::LinearRate(0.3));
    p.costs.emplace(1, CostFunction::LinearRate(0.3));
    p.local_od.assign(1, 0);
    sc.population.push_back(std::move(p));
    bids.set(i, 0, 0, Bid{1.0, 0.2 + 0.05 * i});
    bids.set(i, 1, 0, Bid{1.0, 0.3});
  }
  auction::AuctionParams params;
  params.epsilon = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(auction::exact_distribution(bids, sc, 0, params));
  }
}
BENCHMARK(BM_ExactDistribution)->Arg(4)->Arg(7)->Arg(10);

void BM_OneWayRun(benchmark::State& state) {
  const auto cs = study(500);
  pricing::OneWayConfig cfg;
  cfg.dp = true;
  cfg.epsilon = 0.5;
  cfg.compute_regret = false;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    Rng rng = make_rng(++seed);
    benchmark::DoNotOptimize(pricing::run_one_way(cs.scenario, cfg, rng));
  }
}
BENCHMARK(BM_OneWayRun)->Unit(benchmark::kMillisecond);

void BM_FixedPriceOpt(benchmark::State& state) {
  const auto cs = study(static_cast<int>(state.range(0)));
  pricing::FixedPriceConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(pricing::fixed_price_opt(cs.scenario, cfg));
  }
}
BENCHMARK(BM_FixedPriceOpt)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_LaplaceSample(benchmark::State& state) {
  Rng rng = make_rng(3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(laplace_sample(1.0, rng));
  }
}
BENCHMARK(BM_LaplaceSample);

}  // namespace

BENCHMARK_MAIN();
