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
#include <vector>

#include "offload/passenger.hpp"

namespace offload {

/// A demand scenario: S OD pairs over T one-hour steps, per-(s,t) offload
/// targets Q, per-OD deficit penalties beta, and the passenger population.
/// Offload units are vehicle trips; all money is dollars. The trip-to-dollar
/// conversion factor is fixed at 1.
struct Scenario {
  int num_od = 0;   // S
  int horizon = 0;  // T
  std::vector<std::vector<double>> demand;  // [s][t], Q >= 0
  std::vector<double> penalty;              // [s], beta >= 0
  std::vector<Passenger> population;

  double demand_at(int s, int t) const {
    return demand[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)];
  }

  // Indices of passengers local to OD s at time t.
  std::vector<int> members_at(int s, int t) const;

  // Throws std::invalid_argument on dimension or sign violations.
  void validate() const;
};

// JSON round trip. Schema:
//   {S, T, demand[s][t], beta[s],
//    population: [{id, capacity, cost: {family, ...}, local_od[t]}]}
// The on-disk format carries one cost function per passenger, applied to
// every OD listed in its local_od.
Scenario load_scenario(std::istream& in);
Scenario load_scenario(const std::filesystem::path& path);
void save_scenario(const Scenario& sc, std::ostream& out);
void save_scenario(const Scenario& sc, const std::filesystem::path& path);

}  // namespace offload
