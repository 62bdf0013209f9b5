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

#include "offload/traffic_table.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "offload/random.hpp"

namespace offload::harness {

namespace {

std::string trim(std::string s) {
  const auto issp = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && issp(s.front())) s.erase(s.begin());
  while (!s.empty() && issp(s.back())) s.pop_back();
  return s;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(trim(field));
  return fields;
}

[[noreturn]] void fail_line(int line_no, const std::string& what) {
  throw std::invalid_argument("traffic csv line " + std::to_string(line_no) +
                              ": " + what);
}

}  // namespace

int TrafficVolumeTable::distinct_roads() const {
  std::set<std::pair<std::string, std::string>> roads;
  for (const Row& r : rows) roads.insert({r.county, r.direction});
  return static_cast<int>(roads.size());
}

int TrafficVolumeTable::index_count() const {
  std::set<int> idx;
  for (const Row& r : rows) idx.insert(r.index);
  return static_cast<int>(idx.size());
}

TrafficVolumeTable load_traffic_csv(std::istream& in) {
  std::string line;
  int line_no = 0;
  // header
  if (!std::getline(in, line)) return {};
  ++line_no;
  {
    const auto header = split_csv_line(line);
    if (header.size() != 4 || header[0] != "county" ||
        header[1] != "direction" || header[2] != "index" ||
        header[3] != "volume") {
      fail_line(line_no, "expected header county,direction,index,volume");
    }
  }

  std::map<std::tuple<std::string, std::string, int>, std::pair<double, int>>
      acc;  // key -> (sum, count)
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 4) fail_line(line_no, "expected 4 fields");
    int index = 0;
    double volume = 0.0;
    try {
      std::size_t used = 0;
      index = std::stoi(fields[2], &used);
      if (used != fields[2].size()) throw std::invalid_argument("");
      volume = std::stod(fields[3], &used);
      if (used != fields[3].size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
      fail_line(line_no, "unparseable index or volume");
    }
    if (fields[0].empty() || fields[1].empty()) {
      fail_line(line_no, "empty county or direction");
    }
    if (volume < 0.0) fail_line(line_no, "negative volume");
    auto& slot = acc[{fields[0], fields[1], index}];
    slot.first += volume;
    slot.second += 1;
  }

  TrafficVolumeTable table;
  for (const auto& [key, sum_count] : acc) {
    table.rows.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key),
                          sum_count.first / sum_count.second});
  }
  return table;
}

TrafficVolumeTable load_traffic_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("load_traffic_csv: cannot open " +
                                path.string());
  }
  return load_traffic_csv(in);
}

void write_traffic_csv(const TrafficVolumeTable& table, std::ostream& out) {
  out << "county,direction,index,volume\n";
  char buf[64];
  for (const auto& r : table.rows) {
    std::snprintf(buf, sizeof buf, "%.17g", r.volume);
    out << r.county << ',' << r.direction << ',' << r.index << ',' << buf
        << '\n';
  }
}

void write_traffic_csv(const TrafficVolumeTable& table,
                       const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::invalid_argument("write_traffic_csv: cannot open " +
                                path.string());
  }
  write_traffic_csv(table, out);
}

TrafficVolumeTable synth_traffic(int roads, int hours, std::uint64_t seed) {
  if (roads <= 0 || hours <= 0) {
    throw std::invalid_argument("synth_traffic: roads and hours must be > 0");
  }
  static const char* kCounties[] = {"INY", "LA", "KER", "FRE", "IMP"};
  static const char* kDirections[] = {"S", "N", "W", "S", "S"};
  Rng rng = make_rng(seed);
  std::uniform_real_distribution<double> jitter(-0.08, 0.08);

  TrafficVolumeTable table;
  for (int r = 0; r < roads; ++r) {
    const std::string county =
        std::string(kCounties[r % 5]) + (r >= 5 ? std::to_string(r / 5) : "");
    const std::string direction = kDirections[r % 5];
    const double base = 300.0 + 450.0 * (r % 5);
    for (int h = 0; h < hours; ++h) {
      // morning and evening commute peaks over a daily floor
      const double morning = std::exp(-std::pow(h - 8.0, 2) / 8.0);
      const double evening = std::exp(-std::pow(h - 17.0, 2) / 10.0);
      double v = base * (0.35 + 0.85 * morning + 0.75 * evening);
      v = std::max(0.0, v * (1.0 + jitter(rng)));
      table.rows.push_back({county, direction, h, v});
    }
  }
  std::sort(table.rows.begin(), table.rows.end(), [](const auto& a, const auto& b) {
    return std::tie(a.county, a.direction, a.index) <
           std::tie(b.county, b.direction, b.index);
  });
  return table;
}

}  // namespace offload::harness
