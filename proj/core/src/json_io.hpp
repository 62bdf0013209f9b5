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

// Internal JSON helpers; not part of the installed interface.

#pragma once

#include <json.hpp>

#include "offload/cost_function.hpp"

namespace offload::detail {

using nlohmann::json;

inline json cost_to_json(const CostFunction& c) {
  if (c.family() == CostFamily::kLinear) {
    return json{{"family", "linear"},
                {"weights", c.weights()},
                {"factor_rates", c.factor_rates()}};
  }
  return json{{"family", "quadratic"}, {"a", c.quad_a()}, {"b", c.quad_b()}};
}

inline CostFunction cost_from_json(const json& j) {
  const std::string family = j.at("family").get<std::string>();
  if (family == "linear") {
    if (j.contains("rate")) {
      return CostFunction::LinearRate(j.at("rate").get<double>());
    }
    return CostFunction::Linear(j.at("weights").get<std::array<double, 4>>(),
                                j.at("factor_rates").get<std::array<double, 4>>());
  }
  if (family == "quadratic") {
    return CostFunction::Quadratic(j.at("a").get<double>(),
                                   j.at("b").get<double>());
  }
  throw std::invalid_argument("cost_from_json: unknown family '" + family + "'");
}

}  // namespace offload::detail
