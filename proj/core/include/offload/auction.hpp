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

#include <map>
#include <optional>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "offload/bid_profile.hpp"
#include "offload/random.hpp"
#include "offload/scenario.hpp"
#include "offload/selection_profile.hpp"

namespace offload::auction {

// Thrown when a sub-auction has no feasible selection at all.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown when the enumeration needed by the exact mechanism would exceed the
// configured cap.
class ExactLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AuctionParams {
  double epsilon = 0.1;
  double delta = 0.05;  // the (eps, delta)-DP slack of the decomposed scheme

  // Fixed sensitivity of the welfare score for the exponential mechanism.
  // When unset, the per-instance welfare range from sensitivity_delta() is
  // used. A value derived from public bid-space bounds keeps the scale
  // independent of any single passenger's report.
  std::optional<double> welfare_sensitivity;

  // Upper bound on the enumeration work of the exact mechanism.
  std::size_t exact_cap = 1'000'000;

  // Run the decomposed selection loop with the literal cardinality guard
  // |W| <= Q instead of volume coverage (fidelity experiments only).
  bool strict_cardinality = false;

  // epsilon / (e ln(e / delta)); the per-draw scale of the decomposed scheme.
  double eps_prime() const;

  void validate() const;  // throws std::invalid_argument
};

// All selection profiles satisfying the assignment constraints at time t:
// selected entries are submitted bids, each passenger takes at most one OD,
// and selected volume covers demand at every OD. Entries at other time steps
// are zero. Throws ExactLimitError when the choice space exceeds `cap`.
std::vector<SelectionProfile> enumerate_feasible(const BidProfile& bids,
                                                 const Scenario& sc, int t,
                                                 std::size_t cap = 1'000'000);

enum class SensitivityMode {
  kExact,  // max - min welfare over the feasible set, by enumeration
  kBound   // sum over bidders of their best nonnegative per-term welfare
};

// Spread of the welfare score used to scale the exponential mechanism.
double sensitivity_delta(const BidProfile& bids, const Scenario& sc, int t,
                         SensitivityMode mode = SensitivityMode::kExact,
                         std::size_t cap = 1'000'000);

/// The exact mechanism's output distribution at time t, computed by full
/// enumeration: Pr(X) proportional to exp(eps * welfare(X) / (2 * delta)).
/// A zero sensitivity (all profiles equal welfare) degenerates to uniform.
struct ExactDistribution {
  std::vector<SelectionProfile> support;
  std::vector<double> probability;
  double sensitivity = 0.0;    // the delta actually used
  double log_partition = 0.0;  // ln sum of exp(eps * welfare / (2 delta))
};
ExactDistribution exact_distribution(const BidProfile& bids, const Scenario& sc,
                                     int t, const AuctionParams& params);

// One draw from exact_distribution. Sampling is done on log weights with the
// maximum subtracted before exponentiation.
SelectionProfile exact_select(const BidProfile& bids, const Scenario& sc, int t,
                              const AuctionParams& params, Rng& rng);

// The entropy payment of the exact mechanism for passenger i at time t,
// evaluated by enumeration:
//   E[offload value of all + claimed costs of i removed]
//   + (2 delta / eps) * Shannon entropy of the selection distribution
//   - (2 delta / eps) * ln(partition sum of the instance without i).
// Natural logarithms throughout. Throws InfeasibleError when the instance
// without passenger i has no feasible selection, std::invalid_argument when
// i has no bid at t.
double exact_payment(const BidProfile& bids, const Scenario& sc, int t, int i,
                     const AuctionParams& params);

/// Result of one decomposed per-OD selection round.
struct SelectedSet {
  std::vector<int> members;  // passenger indices in draw order
  double covered = 0.0;      // total selected offload volume
  bool deficit = false;      // pool exhausted before demand was met
};

// Iterative selection for OD s at time t: repeatedly draws one not-yet-chosen
// candidate with probability proportional to exp(eps' * (q - claimed_cost))
// until the selected volume covers demand (or, in strict_cardinality mode,
// until |W| exceeds Q) or the pool runs dry. A deficit is flagged, not fatal.
SelectedSet decomposed_select(const BidProfile& bids, const Scenario& sc, int s,
                              int t, const AuctionParams& params, Rng& rng);

// Threshold-style payment of the decomposed mechanism:
//   r = (q + z) exp(eps' (q - c)) - (exp(eps' (q + z)) - 1) / eps',
//   z = c / exp(eps' (q - c)).
// Reported as computed; callers count negative values separately.
double efficient_payment(double quantity, double claimed_cost,
                         double eps_prime);

struct AuctionOutcome {
  SelectionProfile selection;
  // payments keyed by (t, s, i); nonzero only for selected passengers
  std::map<std::tuple<int, int, int>, double> payments;
  double welfare = 0.0;  // realized, against claimed costs
  std::vector<std::vector<SelectedSet>> winners;  // [s][t]
  std::vector<std::vector<double>> deficit;       // [s][t], unmet volume
  int ir_violations = 0;   // payments below the claimed cost
  int deficit_count = 0;   // (s,t) cells with unmet demand
};

// Full two-way run: drops negative-welfare bids, then runs the decomposed
// selection OD by OD at each time step, removing earlier winners from later
// pools, and issues efficient_payment to every winner. Per-step randomness
// comes from child streams of `rng`, so results do not depend on the order
// in which time steps are processed.
AuctionOutcome run_two_way(const BidProfile& bids, const Scenario& sc,
                           const AuctionParams& params, Rng& rng);

}  // namespace offload::auction
