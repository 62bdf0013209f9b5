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

#include <functional>
#include <vector>

#include "offload/auction.hpp"
#include "offload/pricing.hpp"
#include "offload/random.hpp"

namespace offload::privacy {

/// Min-entropy accounting in bits. leakage = prior - posterior; always within
/// [0, min(prior, log2(#outputs))].
struct LeakageReport {
  double prior_bits = 0.0;      // H_inf of the secret
  double posterior_bits = 0.0;  // H_inf given the observation
  double leakage_bits = 0.0;
  double stderr_bits = 0.0;  // Monte Carlo estimates only
  std::size_t input_count = 0;
  std::size_t output_count = 0;
};

// Exact min-entropy leakage of a discrete channel under a uniform prior over
// its rows. channel[v][y] = Pr(output y | secret v); rows must each sum to 1.
LeakageReport leakage_from_channel(const std::vector<std::vector<double>>& channel);

/// Exact per-outcome likelihood-ratio audit of two distributions on a common
/// outcome index. Cells where both probabilities vanish are dropped; mass on
/// one side only makes the ratio infinite (disjoint_support is set).
struct ExactRatioReport {
  double max_log_ratio = 0.0;
  std::size_t cells = 0;
  bool disjoint_support = false;
};
ExactRatioReport max_log_ratio_exact(const std::vector<double>& p1,
                                     const std::vector<double>& p2);

// 95% (default) Wilson score interval for k successes out of n.
struct Interval {
  double lo = 0.0, hi = 0.0;
};
Interval wilson_bounds(long k, long n, double z = 1.959963984540054);

/// Sampled two-sided ratio audit over a finite outcome partition. Reports
/// Wilson-interval bounds, never a point verdict: max_lower is the largest
/// statistically supported log-ratio, max_upper the worst case consistent
/// with the data.
struct SampledCell {
  int cell = 0;
  long n1 = 0, n2 = 0;
  double p1 = 0.0, p2 = 0.0;
  double log_ratio = 0.0;  // of the point estimates (two-sided max)
  double lower = 0.0, upper = 0.0;
};
struct SampledRatioReport {
  std::vector<SampledCell> cells;
  double max_log_ratio = 0.0;
  double max_lower = 0.0;
  double max_upper = 0.0;
  long trials = 0;
};
SampledRatioReport dp_ratio_sampled(const std::function<int(Rng&)>& mech1,
                                    const std::function<int(Rng&)>& mech2,
                                    int num_cells, long trials, Rng& rng);

// Exact two-way leakage: the secret is which bid each passenger submits from
// its menu (uniform prior over the product space); the observation is the
// exact mechanism's selection at time t. menus[k] lists the options of the
// k-th passenger, bid on its local OD. The product space is capped at 10^4.
LeakageReport min_entropy_two_way(const Scenario& sc,
                                  const std::vector<std::vector<Bid>>& menus,
                                  int t, const auction::AuctionParams& params);

/// Monte Carlo one-way leakage: the secret assigns each passenger a cost
/// function from its menu; the observation is the published price sequence
/// over `horizon` steps, binned at delta_p / 10. Estimated from
/// `samples` runs per secret, replicated `replications` times for a standard
/// error. The mechanism's noise scale uses the menu-wide price sensitivity so
/// it does not depend on the secret.
struct OneWayLeakageConfig {
  pricing::OneWayConfig mechanism;  // dp is forced on
  int samples = 2000;
  int replications = 8;
};
LeakageReport min_entropy_one_way(
    const Scenario& sc, const std::vector<std::vector<CostFunction>>& menus,
    const OneWayLeakageConfig& cfg, int horizon, Rng& rng);

}  // namespace offload::privacy
