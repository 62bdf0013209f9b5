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

#include <filesystem>
#include <iosfwd>
#include <map>
#include <tuple>
#include <utility>
#include <vector>

namespace offload {

/// One reverse-auction message: the offered offload volume and the cost the
/// passenger claims for providing it. The claim need not equal the true cost.
struct Bid {
  double quantity = 0.0;      // offload units
  double claimed_cost = 0.0;  // dollars
};

/// Sparse matrix of bids over (passenger, OD, time). An absent entry means
/// the passenger is not bidding for that OD pair at that time; only
/// submitted bids are selectable.
class BidProfile {
 public:
  // Keys are (t, s, i) so that all bids of one sub-auction are contiguous.
  using Key = std::tuple<int, int, int>;
  using Map = std::map<Key, Bid>;

  void set(int i, int s, int t, Bid b) { entries_[{t, s, i}] = b; }
  void erase(int i, int s, int t) { entries_.erase({t, s, i}); }

  const Bid* find(int i, int s, int t) const {
    auto it = entries_.find({t, s, i});
    return it == entries_.end() ? nullptr : &it->second;
  }

  // All (passenger, bid) pairs submitted for OD s at time t, by passenger id.
  std::vector<std::pair<int, Bid>> at(int s, int t) const;

  // OD indices passenger i bids on at time t.
  std::vector<int> ods_of(int i, int t) const;

  // Distinct passengers with at least one bid at time t.
  std::vector<int> bidders_at(int t) const;

  // Copy without any bid from passenger i (the B_{-i} profile).
  BidProfile without_passenger(int i) const;

  // Copy keeping only bids with q >= 0, claimed cost >= 0 and nonnegative
  // per-term welfare q - claimed cost (the pre-selection filter of the
  // decomposed mechanism).
  BidProfile filtered_nonnegative() const;

  const Map& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

 private:
  Map entries_;
};

// JSON array of {i, s, t, q, claimed_cost} rows.
BidProfile load_bids(std::istream& in);
BidProfile load_bids(const std::filesystem::path& path);
void save_bids(const BidProfile& bids, std::ostream& out);
void save_bids(const BidProfile& bids, const std::filesystem::path& path);

}  // namespace offload
