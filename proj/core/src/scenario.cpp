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

#include "offload/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json_io.hpp"

namespace offload {

using detail::json;

std::vector<int> Scenario::members_at(int s, int t) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < population.size(); ++i) {
    const Passenger& p = population[i];
    if (p.od_at(t) == s && p.cost_for(s) != nullptr) {
      out.push_back(static_cast<int>(i));
    }
  }
  return out;
}

void Scenario::validate() const {
  if (num_od <= 0 || horizon <= 0) {
    throw std::invalid_argument("Scenario: S and T must be positive");
  }
  if (static_cast<int>(demand.size()) != num_od) {
    throw std::invalid_argument("Scenario: demand must have S rows");
  }
  for (const auto& row : demand) {
    if (static_cast<int>(row.size()) != horizon) {
      throw std::invalid_argument("Scenario: demand rows must have T entries");
    }
    for (double q : row) {
      if (q < 0.0) throw std::invalid_argument("Scenario: demand must be >= 0");
    }
  }
  if (static_cast<int>(penalty.size()) != num_od) {
    throw std::invalid_argument("Scenario: beta must have S entries");
  }
  for (double b : penalty) {
    if (b < 0.0) throw std::invalid_argument("Scenario: beta must be >= 0");
  }
  if (population.empty()) {
    throw std::invalid_argument("Scenario: population must be nonempty");
  }
  for (const Passenger& p : population) {
    if (p.capacity < 0.0) {
      throw std::invalid_argument("Scenario: capacity must be >= 0");
    }
    if (static_cast<int>(p.local_od.size()) != horizon) {
      throw std::invalid_argument("Scenario: local_od must have T entries");
    }
    for (int s : p.local_od) {
      if (s < 0 || s >= num_od) {
        throw std::invalid_argument("Scenario: local_od index out of range");
      }
      if (p.cost_for(s) == nullptr) {
        throw std::invalid_argument(
            "Scenario: passenger lacks a cost function for its local OD");
      }
    }
  }
}

Scenario load_scenario(std::istream& in) {
  json j = json::parse(in);
  Scenario sc;
  sc.num_od = j.at("S").get<int>();
  sc.horizon = j.at("T").get<int>();
  sc.demand = j.at("demand").get<std::vector<std::vector<double>>>();
  sc.penalty = j.at("beta").get<std::vector<double>>();
  for (const json& jp : j.at("population")) {
    Passenger p;
    p.id = jp.at("id").get<int>();
    p.capacity = jp.at("capacity").get<double>();
    p.local_od = jp.at("local_od").get<std::vector<int>>();
    CostFunction c = detail::cost_from_json(jp.at("cost"));
    std::set<int> ods(p.local_od.begin(), p.local_od.end());
    for (int s : ods) p.costs.emplace(s, c);
    sc.population.push_back(std::move(p));
  }
  sc.validate();
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("load_scenario: cannot open " + path.string());
  }
  return load_scenario(in);
}

void save_scenario(const Scenario& sc, std::ostream& out) {
  json jpop = json::array();
  for (const Passenger& p : sc.population) {
    if (p.costs.empty()) {
      throw std::invalid_argument("save_scenario: passenger without a cost");
    }
    jpop.push_back(json{{"id", p.id},
                        {"capacity", p.capacity},
                        {"cost", detail::cost_to_json(p.costs.begin()->second)},
                        {"local_od", p.local_od}});
  }
  json j{{"S", sc.num_od},
         {"T", sc.horizon},
         {"demand", sc.demand},
         {"beta", sc.penalty},
         {"population", jpop}};
  out << j.dump(2) << "\n";
}

void save_scenario(const Scenario& sc, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::invalid_argument("save_scenario: cannot open " + path.string());
  }
  save_scenario(sc, out);
}

}  // namespace offload
