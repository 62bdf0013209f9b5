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

#include <cstdint>
#include <vector>

namespace offload {

/// Binary assignment tensor x[i][s][t]: 1 if passenger i is selected for OD s
/// at time t. The representation can hold arbitrary binary tensors so that
/// feasibility (at most one OD per passenger per step, demand coverage) is a
/// checkable property, not a structural one.
class SelectionProfile {
 public:
  SelectionProfile() = default;
  SelectionProfile(int passengers, int ods, int horizon);

  bool at(int i, int s, int t) const { return x_[index(i, s, t)] != 0; }
  void set(int i, int s, int t, bool v) { x_[index(i, s, t)] = v ? 1 : 0; }

  int passengers() const { return n_; }
  int ods() const { return s_; }
  int horizon() const { return t_; }

  // All selected (i, s, t) triples in lexicographic order.
  struct Entry {
    int i, s, t;
  };
  std::vector<Entry> selected() const;
  std::size_t count() const;

  bool operator==(const SelectionProfile&) const = default;

 private:
  std::size_t index(int i, int s, int t) const;

  int n_ = 0, s_ = 0, t_ = 0;
  std::vector<std::uint8_t> x_;
};

}  // namespace offload
