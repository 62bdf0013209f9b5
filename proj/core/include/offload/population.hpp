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

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "offload/passenger.hpp"

namespace offload {

/// Parameters for drawing a synthetic passenger population. Factor weights
/// are multivariate normal with mean weight_mean and covariance
/// weight_cov_scale * I; capacities are normal. Draws below zero are clamped
/// to zero so cost functions stay nondecreasing.
struct PopulationSpec {
  int count = 0;                                   // N
  std::array<double, 4> weight_mean{0.16, 0.27, 0.36, 0.21};
  double weight_cov_scale = 0.3;
  std::array<double, 4> factor_rates{1.0, 1.0, 1.0, 1.0};
  double capacity_mean = 3.5;
  double capacity_var = 0.3;
  std::uint64_t seed = 0;
};

// Draw spec.count passengers with linear cost functions. The sampled cost is
// stored under OD 0 and local_od is left empty; scenario builders assign
// locality. Same (spec, seed) reproduces the population bit for bit.
std::vector<Passenger> sample_population(const PopulationSpec& spec,
                                         std::uint64_t seed);
inline std::vector<Passenger> sample_population(const PopulationSpec& spec) {
  return sample_population(spec, spec.seed);
}

// JSON: {N, weight_mean[4], weight_cov_scale, factor_rates[4],
//        capacity_mean, capacity_var, seed}
PopulationSpec load_population_spec(std::istream& in);
PopulationSpec load_population_spec(const std::filesystem::path& path);

}  // namespace offload
