// Copyright (c) 2026 the tesim authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "tesim/energy_model.hpp"

using namespace tesim;

namespace {

HouseholdParams cost_free_params() {
  HouseholdParams p;
  p.discomfort_ac = 0.0;
  p.discomfort_flex = 0.0;
  p.battery_wear = 0.0;
  p.energy_price = 0.0;
  p.peak_price = 0.0;
  p.temp_ref = 0.0;
  p.temp_min = -100.0;
  p.temp_max = 100.0;
  return p;
}

}  // namespace

TEST_CASE("hvac step at equilibrium holds temperature", "[energy_model]") {
  HouseholdParams p;
  REQUIRE(hvac_step(25.0, 25.0, 0.0, p) == Catch::Approx(25.0).margin(1e-12));
}

TEST_CASE("hvac step with unit constants cancels drive", "[energy_model]") {
  HouseholdParams p;
  p.thermal_capacity = 1.0;
  p.thermal_resistance = 1.0;
  p.hvac_coeff = 1.0;
  // t=20, out=30, p_ac=10: drive (20-30+10) = 0.
  REQUIRE(hvac_step(20.0, 30.0, 10.0, p) == Catch::Approx(20.0).margin(1e-12));
}

TEST_CASE("hvac step direct substitution", "[energy_model]") {
  HouseholdParams p;
  p.thermal_capacity = 2.0;
  p.thermal_resistance = 2.0;
  p.hvac_coeff = 0.5;
  // 22 - 0.25 * (22 - 32 + 0.5*2*4) = 22 - 0.25 * (-6) = 23.5
  REQUIRE(hvac_step(22.0, 32.0, 4.0, p) == Catch::Approx(23.5).margin(1e-12));
}

TEST_CASE("operating cost of an all-reference schedule is zero", "[energy_model]") {
  HouseholdParams p;
  p.flex_ref = {0.0, 0.0, 0.0};
  Schedule s = Schedule::zeros(3);
  for (auto& v : s.indoor_temp) v = p.temp_ref;
  REQUIRE(operating_cost(s, p) == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("operating cost grid tariff hand case", "[energy_model]") {
  HouseholdParams p = cost_free_params();
  p.energy_price = 0.1;
  p.peak_price = 0.5;
  Schedule s = Schedule::zeros(2);
  s.grid = {1.0, 2.0};
  // 0.1 * (1+2) + 0.5 * 2 = 1.3
  REQUIRE(operating_cost(s, p, 1.0) == Catch::Approx(1.3).margin(1e-12));
}

TEST_CASE("operating cost battery wear hand case", "[energy_model]") {
  HouseholdParams p = cost_free_params();
  p.battery_wear = 0.05;
  Schedule s = Schedule::zeros(2);
  s.charge = {1.0, 0.0};
  s.discharge = {0.0, 1.0};
  REQUIRE(operating_cost(s, p, 1.0) == Catch::Approx(0.1).margin(1e-12));
}

TEST_CASE("operating cost scales energy terms with slot duration", "[energy_model]") {
  HouseholdParams p = cost_free_params();
  p.energy_price = 0.1;
  p.peak_price = 0.5;
  Schedule s = Schedule::zeros(2);
  s.grid = {1.0, 2.0};
  // Half-hour slots: energy halves, peak charge does not.
  REQUIRE(operating_cost(s, p, 0.5) == Catch::Approx(0.1 * 3.0 * 0.5 + 0.5 * 2.0).margin(1e-12));
}

TEST_CASE("operating cost rejects mismatched series", "[energy_model]") {
  HouseholdParams p;
  Schedule s = Schedule::zeros(3);
  s.hvac.pop_back();
  REQUIRE_THROWS_AS(operating_cost(s, p), ValidationError);
}

TEST_CASE("balance residuals", "[energy_model]") {
  ExogenousSeries exo;
  exo.horizon = 1;
  exo.outdoor_temp = {25.0};
  exo.renewable_avail = {0.0};
  exo.inflexible_load = {0.0};

  SECTION("all zero") {
    Schedule s = Schedule::zeros(1);
    auto r = check_balance(s, {0.0}, exo);
    REQUIRE(r[0] == Catch::Approx(0.0).margin(1e-12));
  }
  SECTION("grid meets load") {
    exo.inflexible_load = {5.0};
    Schedule s = Schedule::zeros(1);
    s.grid = {5.0};
    auto r = check_balance(s, {0.0}, exo);
    REQUIRE(r[0] == Catch::Approx(0.0).margin(1e-12));
  }
  SECTION("oversupply shows up as positive residual") {
    exo.inflexible_load = {4.0};
    Schedule s = Schedule::zeros(1);
    s.grid = {5.0};
    auto r = check_balance(s, {0.0}, exo);
    REQUIRE(r[0] == Catch::Approx(1.0).margin(1e-12));
  }
}

TEST_CASE("battery telescoping identity", "[energy_model]") {
  std::mt19937 rng(7101);
  std::uniform_real_distribution<double> amount(0.0, 1.5);
  HouseholdParams p;
  p.battery_capacity = 10.0;
  p.soc_min_frac = 0.0;
  p.soc_max_frac = 1.0;
  p.charge_eff = 0.9;
  p.discharge_eff = 0.85;
  p.soc_initial = 5.0;
  const int h = 24;
  for (int trial = 0; trial < 20; ++trial) {
    Schedule s = Schedule::zeros(h);
    double level = p.soc_initial;
    double throughput = 0.0;
    for (int t = 0; t < h; ++t) {
      s.charge[t] = amount(rng);
      s.discharge[t] = amount(rng);
      level += p.charge_eff * s.charge[t] - s.discharge[t] / p.discharge_eff;
      throughput += p.charge_eff * s.charge[t] - s.discharge[t] / p.discharge_eff;
      s.storage[t] = level;
    }
    REQUIRE(s.storage[h - 1] - p.soc_initial == Catch::Approx(throughput).margin(1e-9));
  }
}

TEST_CASE("temperature recursion replay matches stored series", "[energy_model]") {
  std::mt19937 rng(7102);
  std::uniform_real_distribution<double> power(0.0, 3.0);
  std::uniform_real_distribution<double> weather(15.0, 35.0);
  HouseholdParams p;
  ExogenousSeries exo;
  exo.horizon = 24;
  exo.slot_hours = 1.0;
  for (int t = 0; t < 24; ++t) {
    exo.outdoor_temp.push_back(weather(rng));
    exo.renewable_avail.push_back(0.0);
    exo.inflexible_load.push_back(0.0);
  }
  Schedule s = Schedule::zeros(24);
  double temp = initial_indoor_temp(p, exo);
  for (int t = 0; t < 24; ++t) {
    s.hvac[t] = power(rng);
    temp = hvac_step(temp, exo.outdoor_temp[t], s.hvac[t], p);
    s.indoor_temp[t] = temp;
  }
  // Replaying the recursion is exactly what the violation checker does.
  double replay = initial_indoor_temp(p, exo);
  for (int t = 0; t < 24; ++t) {
    replay = hvac_step(replay, exo.outdoor_temp[t], s.hvac[t], p);
    REQUIRE(replay == Catch::Approx(s.indoor_temp[t]).margin(1e-12));
  }
}

TEST_CASE("operating cost is convex along schedule segments", "[energy_model]") {
  std::mt19937 rng(7103);
  std::uniform_real_distribution<double> unit(0.0, 4.0);
  std::uniform_real_distribution<double> mix(0.05, 0.95);
  HouseholdParams p;
  p.flex_ref = std::vector<double>(6, 1.0);
  const int h = 6;
  for (int trial = 0; trial < 50; ++trial) {
    Schedule a = Schedule::zeros(h), b = Schedule::zeros(h);
    for (int t = 0; t < h; ++t) {
      a.grid[t] = unit(rng);
      b.grid[t] = unit(rng);
      a.flex[t] = unit(rng);
      b.flex[t] = unit(rng);
      a.charge[t] = unit(rng);
      b.charge[t] = unit(rng);
      a.indoor_temp[t] = 18.0 + unit(rng);
      b.indoor_temp[t] = 18.0 + unit(rng);
    }
    const double theta = mix(rng);
    Schedule m = Schedule::zeros(h);
    for (int t = 0; t < h; ++t) {
      m.grid[t] = theta * a.grid[t] + (1 - theta) * b.grid[t];
      m.flex[t] = theta * a.flex[t] + (1 - theta) * b.flex[t];
      m.charge[t] = theta * a.charge[t] + (1 - theta) * b.charge[t];
      m.indoor_temp[t] = theta * a.indoor_temp[t] + (1 - theta) * b.indoor_temp[t];
    }
    const double lhs = operating_cost(m, p);
    const double rhs = theta * operating_cost(a, p) + (1 - theta) * operating_cost(b, p);
    REQUIRE(lhs <= rhs + 1e-9);
  }
}

TEST_CASE("parameter validation names the broken field", "[energy_model]") {
  HouseholdParams p;
  SECTION("temperature band") {
    p.temp_min = 25.0;
    p.temp_max = 20.0;
    REQUIRE_THROWS_WITH(validate_params(p, 4), Catch::Matchers::ContainsSubstring("temp_"));
  }
  SECTION("flex series length") {
    p.flex_total = 2.0;
    p.flex_window = {0, 1};
    p.flex_min = {0.0, 0.0};  // wrong length for horizon 4
    p.flex_max = {2.0, 2.0};
    p.flex_ref = {1.0, 1.0};
    REQUIRE_THROWS_WITH(validate_params(p, 4), Catch::Matchers::ContainsSubstring("flex"));
  }
  SECTION("flex demand outside window capacity") {
    p.flex_total = 9.0;
    p.flex_window = {0, 1};
    p.flex_min = std::vector<double>(4, 0.0);
    p.flex_max = std::vector<double>(4, 2.0);
    p.flex_ref = std::vector<double>(4, 1.0);
    REQUIRE_THROWS_WITH(validate_params(p, 4), Catch::Matchers::ContainsSubstring("flex_total"));
  }
  SECTION("initial state of charge outside band") {
    p.battery_capacity = 10.0;
    p.soc_initial = 9.9;
    REQUIRE_THROWS_WITH(validate_params(p, 4), Catch::Matchers::ContainsSubstring("soc_initial"));
  }
}

TEST_CASE("exogenous validation catches negative series", "[energy_model]") {
  ExogenousSeries exo;
  exo.horizon = 2;
  exo.outdoor_temp = {20.0, 21.0};
  exo.renewable_avail = {1.0, -0.5};
  exo.inflexible_load = {0.5, 0.5};
  REQUIRE_THROWS_WITH(validate_exogenous(exo), Catch::Matchers::ContainsSubstring("renewable"));
}

TEST_CASE("schedule violation scan flags broken recursion and balance", "[energy_model]") {
  HouseholdParams p;
  p.battery_capacity = 8.0;
  p.soc_initial = 4.0;
  p.charge_cap = 3.0;
  p.discharge_cap = 3.0;
  ExogenousSeries exo;
  exo.horizon = 2;
  exo.outdoor_temp = {23.0, 23.0};
  exo.renewable_avail = {2.0, 2.0};
  exo.inflexible_load = {1.0, 1.0};

  Schedule s = Schedule::zeros(2);
  s.renewable = {3.0, 1.0};  // above availability, and balance off at slot 0
  s.storage = {4.0, 4.0};
  s.indoor_temp = {p.temp_ref, p.temp_ref};
  auto issues = schedule_violations(s, p, exo, {0.0, 0.0});
  REQUIRE_FALSE(issues.empty());

  Schedule ok = Schedule::zeros(2);
  ok.renewable = {1.0, 1.0};
  ok.storage = {4.0, 4.0};
  double temp = initial_indoor_temp(p, exo);
  for (int t = 0; t < 2; ++t) {
    temp = hvac_step(temp, exo.outdoor_temp[t], 0.0, p);
    ok.indoor_temp[t] = temp;
  }
  auto clean = schedule_violations(ok, p, exo, {0.0, 0.0});
  REQUIRE(clean.empty());
}
