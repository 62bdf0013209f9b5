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

#include "offload/laplace.hpp"

#include <cmath>
#include <stdexcept>

namespace offload {

double laplace_icdf(double u, double scale) {
  if (!(scale > 0.0)) {
    throw std::invalid_argument("laplace_icdf: scale must be positive");
  }
  if (!(u > 0.0 && u < 1.0)) {
    throw std::invalid_argument("laplace_icdf: u must lie in (0, 1)");
  }
  if (u == 0.5) return 0.0;
  if (u < 0.5) return scale * std::log(2.0 * u);
  return -scale * std::log(2.0 * (1.0 - u));
}

double laplace_sample(double scale, Rng& rng) {
  if (!(scale > 0.0)) {
    throw std::invalid_argument("laplace_sample: scale must be positive");
  }
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double u = unif(rng);
  // avoid the open-interval endpoints the icdf rejects
  while (u <= 0.0 || u >= 1.0) u = unif(rng);
  return laplace_icdf(u, scale);
}

}  // namespace offload
