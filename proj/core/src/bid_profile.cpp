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

#include "offload/bid_profile.hpp"

#include <fstream>
#include <limits>
#include <set>
#include <stdexcept>

#include "json_io.hpp"

namespace offload {

using detail::json;

std::vector<std::pair<int, Bid>> BidProfile::at(int s, int t) const {
  std::vector<std::pair<int, Bid>> out;
  auto lo = entries_.lower_bound({t, s, std::numeric_limits<int>::min()});
  auto hi = entries_.upper_bound({t, s, std::numeric_limits<int>::max()});
  for (auto it = lo; it != hi; ++it) {
    out.emplace_back(std::get<2>(it->first), it->second);
  }
  return out;
}

std::vector<int> BidProfile::ods_of(int i, int t) const {
  std::vector<int> out;
  for (const auto& [key, bid] : entries_) {
    if (std::get<0>(key) == t && std::get<2>(key) == i) {
      out.push_back(std::get<1>(key));
    }
  }
  return out;
}

std::vector<int> BidProfile::bidders_at(int t) const {
  std::set<int> ids;
  auto lo = entries_.lower_bound(
      {t, std::numeric_limits<int>::min(), std::numeric_limits<int>::min()});
  auto hi = entries_.upper_bound(
      {t, std::numeric_limits<int>::max(), std::numeric_limits<int>::max()});
  for (auto it = lo; it != hi; ++it) ids.insert(std::get<2>(it->first));
  return {ids.begin(), ids.end()};
}

BidProfile BidProfile::without_passenger(int i) const {
  BidProfile out;
  for (const auto& [key, bid] : entries_) {
    if (std::get<2>(key) != i) out.entries_[key] = bid;
  }
  return out;
}

BidProfile BidProfile::filtered_nonnegative() const {
  BidProfile out;
  for (const auto& [key, bid] : entries_) {
    if (bid.quantity >= 0.0 && bid.claimed_cost >= 0.0 &&
        bid.quantity - bid.claimed_cost >= 0.0) {
      out.entries_[key] = bid;
    }
  }
  return out;
}

BidProfile load_bids(std::istream& in) {
  json j = json::parse(in);
  if (!j.is_array()) {
    throw std::invalid_argument("load_bids: expected a JSON array");
  }
  BidProfile bids;
  for (const json& row : j) {
    bids.set(row.at("i").get<int>(), row.at("s").get<int>(),
             row.at("t").get<int>(),
             Bid{row.at("q").get<double>(), row.at("claimed_cost").get<double>()});
  }
  return bids;
}

BidProfile load_bids(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("load_bids: cannot open " + path.string());
  return load_bids(in);
}

void save_bids(const BidProfile& bids, std::ostream& out) {
  json j = json::array();
  for (const auto& [key, bid] : bids.entries()) {
    j.push_back(json{{"i", std::get<2>(key)},
                     {"s", std::get<1>(key)},
                     {"t", std::get<0>(key)},
                     {"q", bid.quantity},
                     {"claimed_cost", bid.claimed_cost}});
  }
  out << j.dump(2) << "\n";
}

void save_bids(const BidProfile& bids, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("save_bids: cannot open " + path.string());
  save_bids(bids, out);
}

}  // namespace offload
