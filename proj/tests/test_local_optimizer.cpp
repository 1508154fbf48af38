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
#include <vector>

#include "support/central_oracle.hpp"
#include "tesim/local_optimizer.hpp"

using tesim::ExogenousSeries;
using tesim::HouseholdParams;
using tesim::LocalBroadcast;
using tesim::LocalOptimizer;

namespace {

// Comfort terms priced at zero and a wide temperature band: the thermal
// rows stay in the problem but never bind, which keeps hand arithmetic exact.
HouseholdParams neutral_params() {
  HouseholdParams p;
  p.discomfort_ac = 0.0;
  p.temp_min = 0.0;
  p.temp_max = 50.0;
  p.temp_ref = 23.0;
  p.grid_cap = 6.0;
  p.energy_price = 0.1;
  p.peak_price = 0.5;
  p.battery_capacity = 0.0;
  return p;
}

ExogenousSeries flat_exo(int h, double load, double renewable) {
  ExogenousSeries e;
  e.horizon = h;
  e.slot_hours = 1.0;
  e.outdoor_temp.assign(static_cast<std::size_t>(h), 25.0);
  e.renewable_avail.assign(static_cast<std::size_t>(h), renewable);
  e.inflexible_load.assign(static_cast<std::size_t>(h), load);
  return e;
}

}  // namespace

TEST_CASE("free renewable covers the whole load", "[local_optimizer]") {
  LocalOptimizer opt(0, 1, neutral_params(), flat_exo(2, 2.0, 5.0));
  auto sol = opt.solve_emp();
  CHECK(std::abs(sol.cost) < 1e-7);
  for (int t = 0; t < 2; ++t) {
    const auto u = static_cast<std::size_t>(t);
    CHECK(std::abs(sol.schedule.grid[u]) < 1e-7);
    // The hvac can soak up free power at zero cost here, so only the net
    // renewable use is pinned down.
    CHECK(sol.schedule.renewable[u] - sol.schedule.hvac[u] == Catch::Approx(2.0).margin(1e-6));
  }
}

TEST_CASE("grid-only schedule prices out to the two-part tariff", "[local_optimizer]") {
  ExogenousSeries exo = flat_exo(2, 0.0, 0.0);
  exo.inflexible_load = {1.0, 2.0};
  LocalOptimizer opt(0, 1, neutral_params(), exo);
  auto sol = opt.solve_emp();
  // energy 0.1 * (1 + 2) plus peak 0.5 * 2
  CHECK(sol.cost == Catch::Approx(1.3).margin(1e-6));
  CHECK(sol.schedule.grid[0] == Catch::Approx(1.0).margin(1e-6));
  CHECK(sol.schedule.grid[1] == Catch::Approx(2.0).margin(1e-6));
  auto bad = tesim::schedule_violations(sol.schedule, opt.params(), exo, {});
  CHECK(bad.empty());
}

TEST_CASE("battery moves cheap energy into the expensive slot", "[local_optimizer]") {
  HouseholdParams p = neutral_params();
  p.battery_capacity = 10.0;
  p.charge_eff = 1.0;
  p.discharge_eff = 1.0;
  p.charge_cap = 5.0;
  p.discharge_cap = 5.0;
  p.soc_initial = 1.0;
  p.battery_wear = 0.01;
  p.energy_price = 1.0;
  p.peak_price = 0.0;
  ExogenousSeries exo = flat_exo(2, 0.0, 0.0);
  exo.inflexible_load = {0.0, 2.0};
  exo.renewable_avail = {2.0, 0.0};
  LocalOptimizer opt(0, 1, p, exo);
  auto sol = opt.solve_emp();
  CHECK(std::abs(sol.schedule.grid[0]) < 1e-6);
  CHECK(std::abs(sol.schedule.grid[1]) < 1e-6);
  CHECK(sol.schedule.charge[0] == Catch::Approx(2.0).margin(1e-6));
  CHECK(sol.schedule.discharge[1] == Catch::Approx(2.0).margin(1e-6));
  CHECK(sol.cost == Catch::Approx(0.04).margin(1e-6));
  auto bad = tesim::schedule_violations(sol.schedule, p, exo, {});
  CHECK(bad.empty());
}

TEST_CASE("standalone infeasibility names the user and slot", "[local_optimizer]") {
  HouseholdParams p = neutral_params();
  p.grid_cap = 1.0;
  LocalOptimizer opt(0, 2, p, flat_exo(1, 3.0, 0.0));
  try {
    opt.solve_emp();
    FAIL("expected the supply floor to reject this instance");
  } catch (const tesim::InfeasibleError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("user 0") != std::string::npos);
    CHECK(msg.find("slot 0") != std::string::npos);
    CHECK(msg.find("exceeds maximum supply") != std::string::npos);
  }
}

TEST_CASE("self-sufficient user leaves trades at zero", "[local_optimizer]") {
  LocalOptimizer opt(0, 2, neutral_params(), flat_exo(2, 2.0, 5.0));
  LocalBroadcast b = LocalBroadcast::zeros(1, 2);
  auto sol = opt.solve_llp1(b);
  for (int t = 0; t < 2; ++t) {
    CHECK(std::abs(sol.trades.at(0, t)) < 1e-6);
  }
  CHECK(std::abs(sol.operating_cost) < 1e-6);
}

TEST_CASE("trade response tracks the dual price exactly", "[local_optimizer]") {
  // A user whose marginal supply is free renewable headroom turns the trade
  // optimality condition into p = dual / rho1, sharp to solver tolerance.
  LocalOptimizer opt(0, 2, neutral_params(), flat_exo(1, 2.0, 5.0));
  LocalBroadcast b = LocalBroadcast::zeros(1, 1);

  b.trade_dual.at(0, 0) = 0.3;
  auto buy = opt.solve_llp1(b);
  CHECK(buy.trades.at(0, 0) == Catch::Approx(0.3).margin(1e-6));
  CHECK(buy.schedule.renewable[0] - buy.schedule.hvac[0] == Catch::Approx(1.7).margin(1e-6));

  b.trade_dual.at(0, 0) = -0.3;
  auto sell = opt.solve_llp1(b);
  CHECK(sell.trades.at(0, 0) == Catch::Approx(-0.3).margin(1e-6));
  CHECK(sell.schedule.renewable[0] - sell.schedule.hvac[0] == Catch::Approx(2.3).margin(1e-6));
}

TEST_CASE("capped grid pushes the deficit into trades", "[local_optimizer]") {
  HouseholdParams p = neutral_params();
  p.grid_cap = 1.0;
  LocalOptimizer opt(0, 2, p, flat_exo(1, 3.0, 0.0));
  LocalBroadcast b = LocalBroadcast::zeros(1, 1);
  auto sol = opt.solve_llp1(b);
  CHECK(sol.schedule.grid[0] == Catch::Approx(1.0).margin(1e-6));
  CHECK(sol.trades.at(0, 0) == Catch::Approx(2.0).margin(1e-6));
  const std::vector<double> inflow = {sol.trades.at(0, 0)};
  auto bad = tesim::schedule_violations(sol.schedule, p, opt.exo(), inflow);
  CHECK(bad.empty());
}

TEST_CASE("trade solution minimizes the penalized objective", "[local_optimizer]") {
  std::mt19937_64 rng(411);
  std::uniform_real_distribution<double> aux(-1.0, 1.0);
  LocalOptimizer opt(1, 3, neutral_params(), flat_exo(3, 2.0, 1.0));
  for (int trial = 0; trial < 5; ++trial) {
    LocalBroadcast b = LocalBroadcast::zeros(2, 3);
    b.rho1 = 0.5;
    for (int pr = 0; pr < 2; ++pr) {
      for (int t = 0; t < 3; ++t) {
        b.trade_aux.at(pr, t) = aux(rng);
        b.trade_dual.at(pr, t) = 0.2 * aux(rng);
      }
    }
    auto sol = opt.solve_llp1(b);
    // Zero trades stay feasible, so the optimum cannot cost more than the
    // standalone schedule plus the full centering penalty.
    double zero_point = opt.solve_emp().cost;
    for (int pr = 0; pr < 2; ++pr) {
      for (int t = 0; t < 3; ++t) {
        zero_point += 0.5 * b.rho1 * b.trade_aux.at(pr, t) * b.trade_aux.at(pr, t);
      }
    }
    CHECK(sol.objective <= zero_point + 1e-7);
  }
}

TEST_CASE("repeat solve with the warm start reproduces the iterate", "[local_optimizer]") {
  LocalOptimizer opt(0, 2, neutral_params(), flat_exo(2, 2.0, 1.0));
  LocalBroadcast b = LocalBroadcast::zeros(1, 2);
  b.trade_aux.at(0, 0) = 0.4;
  b.trade_dual.at(0, 1) = -0.1;
  auto first = opt.solve_llp1(b);
  auto second = opt.solve_llp1(b);
  for (int t = 0; t < 2; ++t) {
    CHECK(second.trades.at(0, t) == Catch::Approx(first.trades.at(0, t)).margin(1e-8));
  }
  CHECK(second.objective == Catch::Approx(first.objective).margin(1e-9));
}

TEST_CASE("payment subproblem solves the barrier optimality condition", "[local_optimizer]") {
  LocalOptimizer opt(0, 2, neutral_params(), flat_exo(1, 1.0, 1.0));
  LocalBroadcast b = LocalBroadcast::zeros(1, 1);
  b.rho2 = 1.0;

  // With one peer and zero aux/dual the optimum satisfies s^2 - 2s - 1 = 0.
  auto pay = opt.solve_llp2(2.0, b);
  REQUIRE(pay.size() == 1);
  CHECK(pay[0] == Catch::Approx(1.0 - std::sqrt(2.0)).margin(1e-9));

  // Zero surplus lands on the clamp floor.
  auto clamped = opt.solve_llp2(0.0, b);
  CHECK(clamped[0] == Catch::Approx(-1.0).margin(1e-5));

  // Negative surplus passes through: s^2 + 0.5 s - 1 = 0 on the s < -0.5 side.
  auto negative = opt.solve_llp2(-0.5, b);
  const double expect = (-0.5 - std::sqrt(0.25 + 4.0)) / 2.0;
  CHECK(negative[0] == Catch::Approx(expect).margin(1e-9));
  CHECK(negative[0] < -0.5);
}

TEST_CASE("surplus clamp only lifts the noise band", "[local_optimizer]") {
  CHECK(tesim::clamp_surplus(0.0) == 1e-6);
  CHECK(tesim::clamp_surplus(5e-7) == 1e-6);
  CHECK(tesim::clamp_surplus(-5e-7) == 1e-6);
  CHECK(tesim::clamp_surplus(2.5) == 2.5);
  CHECK(tesim::clamp_surplus(-2.5) == -2.5);
}

TEST_CASE("single-user community degenerates to the standalone problem", "[local_optimizer]") {
  LocalOptimizer opt(0, 1, neutral_params(), flat_exo(2, 1.0, 0.0));
  LocalBroadcast b = LocalBroadcast::zeros(0, 2);
  auto emp = opt.solve_emp();
  auto sol = opt.solve_llp1(b);
  CHECK(sol.trades.v.empty());
  CHECK(sol.operating_cost == Catch::Approx(emp.cost).margin(1e-8));
  CHECK(opt.solve_llp2(1.0, b).empty());
}

TEST_CASE("standalone builder agrees with the independent joint model", "[local_optimizer]") {
  std::mt19937_64 rng(2026);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int H = 4;
  for (int trial = 0; trial < 10; ++trial) {
    HouseholdParams p;
    p.thermal_capacity = 1.0 + 1.5 * unit(rng);
    p.thermal_resistance = 8.0 + 7.0 * unit(rng);
    p.hvac_coeff = 1.5 + 1.0 * unit(rng);
    p.discomfort_ac = 0.02 + 0.08 * unit(rng);
    p.energy_price = 0.2 + 0.1 * unit(rng);
    p.peak_price = 1.0 + 2.0 * unit(rng);
    p.grid_cap = 6.0;
    if (trial % 2 == 0) {
      p.battery_capacity = 8.0;
      p.charge_cap = 3.0;
      p.discharge_cap = 3.0;
      p.soc_initial = 2.0;
      p.battery_wear = 0.01 + 0.02 * unit(rng);
      p.cyclic_storage = trial % 4 == 0;
    }
    if (trial % 3 == 0) {
      p.flex_window = {1, 2};
      p.flex_min.assign(H, 0.0);
      p.flex_max.assign(H, 2.0);
      p.flex_ref.assign(H, 0.5);
      p.flex_total = 1.5 + unit(rng);
      p.discomfort_flex = 0.01 + 0.04 * unit(rng);
    }
    ExogenousSeries exo;
    exo.horizon = H;
    exo.slot_hours = 1.0;
    for (int t = 0; t < H; ++t) {
      exo.outdoor_temp.push_back(24.0 + 10.0 * unit(rng));
      exo.renewable_avail.push_back(2.0 * unit(rng));
      exo.inflexible_load.push_back(0.5 + 2.5 * unit(rng));
    }

    LocalOptimizer opt(0, 1, p, exo);
    auto sol = opt.solve_emp();
    auto central = tesim_tests::solve_central({{p, exo}});
    REQUIRE(central.feasible);
    CHECK(sol.cost == Catch::Approx(central.total_cost).margin(1e-6 * (1.0 + central.total_cost)));
    auto bad = tesim::schedule_violations(sol.schedule, p, exo, {});
    CHECK(bad.empty());
  }
}
