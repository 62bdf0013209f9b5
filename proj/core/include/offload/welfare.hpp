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

#include "offload/bid_profile.hpp"
#include "offload/scenario.hpp"
#include "offload/selection_profile.hpp"

namespace offload {

// Social welfare of a selection against claimed costs:
// sum over selected (i,s,t) of q - claimed_cost. The empty profile has
// welfare 0. Throws std::invalid_argument when the profile dimensions do not
// match the scenario or a selected entry has no bid.
double social_welfare(const SelectionProfile& x, const BidProfile& bids,
                      const Scenario& sc);

// True iff x selects submitted bids only, every passenger is selected for at
// most one OD per time step, and selected volume covers the demand of every
// (s, t). Dimension mismatches throw.
bool check_feasible(const SelectionProfile& x, const BidProfile& bids,
                    const Scenario& sc);

}  // namespace offload
