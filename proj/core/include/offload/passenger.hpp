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
#include <stdexcept>
#include <vector>

#include "offload/cost_function.hpp"

namespace offload {

/// One passenger. A missing cost function for an OD pair means the passenger
/// is unwilling to shift there (infinite cost); it is never represented by a
/// sentinel numeric value. Non-participation always yields utility 0.
struct Passenger {
  int id = 0;
  double capacity = 0.0;            // max offload units per time step
  std::map<int, CostFunction> costs;  // keyed by OD index
  std::vector<int> local_od;          // OD the passenger is near, per t

  const CostFunction* cost_for(int od) const {
    auto it = costs.find(od);
    return it == costs.end() ? nullptr : &it->second;
  }

  int od_at(int t) const {
    if (t < 0 || t >= static_cast<int>(local_od.size())) {
      throw std::out_of_range("Passenger::od_at: t outside horizon");
    }
    return local_od[static_cast<std::size_t>(t)];
  }
};

}  // namespace offload
