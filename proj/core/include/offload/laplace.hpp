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

#include "offload/random.hpp"

namespace offload {

// Inverse CDF of the zero-mean Laplace distribution with the given scale,
// evaluated at u in (0, 1). u == 0.5 maps to exactly 0.
double laplace_icdf(double u, double scale);

// One Laplace(0, scale) draw via the inverse CDF. scale must be positive.
double laplace_sample(double scale, Rng& rng);

}  // namespace offload
