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

#include "offload/selection_profile.hpp"

#include <numeric>
#include <stdexcept>

namespace offload {

SelectionProfile::SelectionProfile(int passengers, int ods, int horizon)
    : n_(passengers), s_(ods), t_(horizon) {
  if (passengers < 0 || ods <= 0 || horizon <= 0) {
    throw std::invalid_argument("SelectionProfile: bad dimensions");
  }
  x_.assign(static_cast<std::size_t>(n_) * s_ * t_, 0);
}

std::size_t SelectionProfile::index(int i, int s, int t) const {
  if (i < 0 || i >= n_ || s < 0 || s >= s_ || t < 0 || t >= t_) {
    throw std::out_of_range("SelectionProfile: index out of range");
  }
  return (static_cast<std::size_t>(i) * s_ + s) * t_ + t;
}

std::vector<SelectionProfile::Entry> SelectionProfile::selected() const {
  std::vector<Entry> out;
  for (int i = 0; i < n_; ++i) {
    for (int s = 0; s < s_; ++s) {
      for (int t = 0; t < t_; ++t) {
        if (at(i, s, t)) out.push_back({i, s, t});
      }
    }
  }
  return out;
}

std::size_t SelectionProfile::count() const {
  return std::accumulate(x_.begin(), x_.end(), std::size_t{0});
}

}  // namespace offload
