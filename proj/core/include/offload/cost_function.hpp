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

namespace offload {

enum class CostFamily { kLinear, kQuadratic };

/// A passenger's inconvenience cost of providing q offload units.
///
/// Both families are convex, nondecreasing on q >= 0 and satisfy C(0) = 0:
///   - Linear: C(q) = (w . f) q, where w are factor weights (comfort,
///     reliability, delay, monetary cost) and f the per-factor dollar rates.
///   - Quadratic: C(q) = a q^2 + b q with a > 0, b >= 0.
class CostFunction {
 public:
  // Linear from the four factor weights and rates; requires w . f >= 0.
  static CostFunction Linear(const std::array<double, 4>& weights,
                             const std::array<double, 4>& factor_rates);
  // Linear with an explicit marginal rate in dollars per offload unit.
  static CostFunction LinearRate(double rate);
  static CostFunction Quadratic(double a, double b);

  CostFamily family() const { return family_; }

  // Linear accessors (meaningful only for the linear family).
  double rate() const { return rate_; }
  const std::array<double, 4>& weights() const { return weights_; }
  const std::array<double, 4>& factor_rates() const { return factor_rates_; }

  // Quadratic accessors.
  double quad_a() const { return a_; }
  double quad_b() const { return b_; }

  // C(q). Throws std::domain_error for q < 0.
  double cost(double q) const;

  // C'(q). Throws std::domain_error for q < 0.
  double gradient(double q) const;

 private:
  CostFamily family_ = CostFamily::kLinear;
  std::array<double, 4> weights_{};
  std::array<double, 4> factor_rates_{};
  double rate_ = 0.0;  // cached w . f
  double a_ = 0.0;
  double b_ = 0.0;
};

}  // namespace offload
