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

#include "offload/cost_function.hpp"

#include <stdexcept>

namespace offload {

namespace {
double dot4(const std::array<double, 4>& a, const std::array<double, 4>& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
}
}  // namespace

CostFunction CostFunction::Linear(const std::array<double, 4>& weights,
                                  const std::array<double, 4>& factor_rates) {
  CostFunction c;
  c.family_ = CostFamily::kLinear;
  c.weights_ = weights;
  c.factor_rates_ = factor_rates;
  c.rate_ = dot4(weights, factor_rates);
  if (c.rate_ < 0.0) {
    throw std::invalid_argument("CostFunction::Linear: w . f must be >= 0");
  }
  return c;
}

CostFunction CostFunction::LinearRate(double rate) {
  return Linear({rate, 0.0, 0.0, 0.0}, {1.0, 1.0, 1.0, 1.0});
}

CostFunction CostFunction::Quadratic(double a, double b) {
  if (!(a > 0.0) || b < 0.0) {
    throw std::invalid_argument("CostFunction::Quadratic: need a > 0, b >= 0");
  }
  CostFunction c;
  c.family_ = CostFamily::kQuadratic;
  c.a_ = a;
  c.b_ = b;
  return c;
}

double CostFunction::cost(double q) const {
  if (q < 0.0) throw std::domain_error("CostFunction::cost: q < 0");
  if (q == 0.0) return 0.0;
  switch (family_) {
    case CostFamily::kLinear:
      return rate_ * q;
    case CostFamily::kQuadratic:
      return a_ * q * q + b_ * q;
  }
  return 0.0;
}

double CostFunction::gradient(double q) const {
  if (q < 0.0) throw std::domain_error("CostFunction::gradient: q < 0");
  switch (family_) {
    case CostFamily::kLinear:
      return rate_;
    case CostFamily::kQuadratic:
      return 2.0 * a_ * q + b_;
  }
  return 0.0;
}

}  // namespace offload
