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

#include "offload/population.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json_io.hpp"
#include "offload/random.hpp"

namespace offload {

std::vector<Passenger> sample_population(const PopulationSpec& spec,
                                         std::uint64_t seed) {
  if (spec.count < 0) {
    throw std::invalid_argument("sample_population: N must be >= 0");
  }
  if (spec.weight_cov_scale < 0.0) {
    throw std::invalid_argument(
        "sample_population: covariance scale must be >= 0 (not PSD otherwise)");
  }
  if (spec.capacity_var < 0.0) {
    throw std::invalid_argument("sample_population: capacity variance < 0");
  }

  Rng rng = make_rng(seed);
  std::normal_distribution<double> unit(0.0, 1.0);
  const double weight_sd = std::sqrt(spec.weight_cov_scale);
  const double cap_sd = std::sqrt(spec.capacity_var);

  std::vector<Passenger> out;
  out.reserve(static_cast<std::size_t>(spec.count));
  for (int i = 0; i < spec.count; ++i) {
    std::array<double, 4> w{};
    for (int k = 0; k < 4; ++k) {
      w[static_cast<std::size_t>(k)] = std::max(
          0.0, spec.weight_mean[static_cast<std::size_t>(k)] + weight_sd * unit(rng));
    }
    const double capacity =
        std::max(0.0, spec.capacity_mean + cap_sd * unit(rng));
    Passenger p;
    p.id = i;
    p.capacity = capacity;
    p.costs.emplace(0, CostFunction::Linear(w, spec.factor_rates));
    out.push_back(std::move(p));
  }
  return out;
}

PopulationSpec load_population_spec(std::istream& in) {
  detail::json j = detail::json::parse(in);
  PopulationSpec spec;
  spec.count = j.at("N").get<int>();
  if (j.contains("weight_mean")) {
    spec.weight_mean = j.at("weight_mean").get<std::array<double, 4>>();
  }
  if (j.contains("weight_cov_scale")) {
    spec.weight_cov_scale = j.at("weight_cov_scale").get<double>();
  }
  if (j.contains("factor_rates")) {
    spec.factor_rates = j.at("factor_rates").get<std::array<double, 4>>();
  }
  if (j.contains("capacity_mean")) {
    spec.capacity_mean = j.at("capacity_mean").get<double>();
  }
  if (j.contains("capacity_var")) {
    spec.capacity_var = j.at("capacity_var").get<double>();
  }
  if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
  return spec;
}

PopulationSpec load_population_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("load_population_spec: cannot open " +
                                path.string());
  }
  return load_population_spec(in);
}

}  // namespace offload
