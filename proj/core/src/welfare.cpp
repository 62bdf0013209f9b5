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

#include "offload/welfare.hpp"

#include <stdexcept>

namespace offload {

namespace {
void check_shape(const SelectionProfile& x, const Scenario& sc) {
  if (x.ods() != sc.num_od || x.horizon() != sc.horizon ||
      x.passengers() != static_cast<int>(sc.population.size())) {
    throw std::invalid_argument("selection profile does not match scenario");
  }
}
}  // namespace

double social_welfare(const SelectionProfile& x, const BidProfile& bids,
                      const Scenario& sc) {
  check_shape(x, sc);
  double total = 0.0;
  for (const auto& e : x.selected()) {
    const Bid* b = bids.find(e.i, e.s, e.t);
    if (b == nullptr) {
      throw std::invalid_argument("social_welfare: selected entry has no bid");
    }
    total += b->quantity - b->claimed_cost;
  }
  return total;
}

bool check_feasible(const SelectionProfile& x, const BidProfile& bids,
                    const Scenario& sc) {
  check_shape(x, sc);
  const int n = x.passengers();
  // one OD per passenger per step; selected entries must be submitted bids
  for (int t = 0; t < sc.horizon; ++t) {
    for (int i = 0; i < n; ++i) {
      int chosen = 0;
      for (int s = 0; s < sc.num_od; ++s) {
        if (!x.at(i, s, t)) continue;
        ++chosen;
        if (bids.find(i, s, t) == nullptr) return false;
      }
      if (chosen > 1) return false;
    }
  }
  // demand coverage
  for (int s = 0; s < sc.num_od; ++s) {
    for (int t = 0; t < sc.horizon; ++t) {
      double covered = 0.0;
      for (int i = 0; i < n; ++i) {
        if (x.at(i, s, t)) covered += bids.find(i, s, t)->quantity;
      }
      if (covered < sc.demand_at(s, t)) return false;
    }
  }
  return true;
}

}  // namespace offload
