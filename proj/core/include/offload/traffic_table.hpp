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
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace offload::harness {

/// Peak traffic volumes per (county, direction) road and hour-or-postmile
/// index. Roads appearing multiple times for the same index are averaged on
/// load.
struct TrafficVolumeTable {
  struct Row {
    std::string county;
    std::string direction;
    int index = 0;
    double volume = 0.0;  // vehicles
  };
  std::vector<Row> rows;  // sorted by (county, direction, index), unique

  int distinct_roads() const;
  int index_count() const;  // number of distinct indices
};

// CSV with header "county,direction,index,volume". Malformed rows and
// negative volumes are rejected with the offending line number.
TrafficVolumeTable load_traffic_csv(std::istream& in);
TrafficVolumeTable load_traffic_csv(const std::filesystem::path& path);
void write_traffic_csv(const TrafficVolumeTable& table, std::ostream& out);
void write_traffic_csv(const TrafficVolumeTable& table,
                       const std::filesystem::path& path);

// Synthetic table shaped like hourly peak-volume extracts: `roads` distinct
// (county, direction) pairs with `hours` indices each, volumes following a
// two-peak daily profile plus seeded noise.
TrafficVolumeTable synth_traffic(int roads, int hours, std::uint64_t seed);

}  // namespace offload::harness
