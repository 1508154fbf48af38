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
#include <cstdint>
#include <vector>

#include "support/central_oracle.hpp"
#include "tesim/admm_coordinator.hpp"

using tesim::CoordinatorConfig;
using tesim::CoordinatorState;
using tesim::ExogenousSeries;
using tesim::HouseholdParams;
using tesim::SubmitStatus;
using tesim::TradingPhase;
using tesim::TradingUser;

namespace {

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

// One user with cheap surplus renewable, one with a dear, capped grid: the
// pair has an unambiguous gain from trading.
std::vector<TradingUser> complementary_pair() {
  HouseholdParams seller = neutral_params();
  seller.energy_price = 0.5;
  seller.peak_price = 1.0;
  TradingUser a{seller, flat_exo(2, 1.0, 6.0)};

  HouseholdParams buyer = neutral_params();
  buyer.energy_price = 0.4;
  buyer.peak_price = 2.0;
  buyer.grid_cap = 4.0;
  TradingUser b{buyer, flat_exo(2, 3.0, 0.0)};
  return {a, b};
}

std::vector<TradingUser> mixed_triple() {
  HouseholdParams seller = neutral_params();
  seller.energy_price = 0.45;
  TradingUser a{seller, flat_exo(2, 0.5, 6.0)};

  HouseholdParams urban = neutral_params();
  urban.energy_price = 0.35;
  urban.peak_price = 2.5;
  TradingUser b{urban, flat_exo(2, 2.5, 0.0)};

  HouseholdParams night = neutral_params();
  night.energy_price = 0.3;
  night.peak_price = 1.5;
  ExogenousSeries e = flat_exo(2, 2.0, 0.5);
  e.inflexible_load = {1.0, 3.0};
  TradingUser c{night, e};
  return {a, b, c};
}

}  // namespace

TEST_CASE("penalty schedule follows the iteration count", "[admm_coordinator]") {
  CoordinatorConfig cfg;
  CHECK(tesim::step_penalty(1, cfg).first == Catch::Approx(1.0));
  CHECK(tesim::step_penalty(4, cfg).first == Catch::Approx(0.25));
  CHECK(tesim::step_penalty(4, cfg).second == Catch::Approx(0.25));
  cfg.diminishing_rho = false;
  cfg.fixed_rho = 0.7;
  CHECK(tesim::step_penalty(9, cfg).first == Catch::Approx(0.7));
  CHECK_THROWS_AS(tesim::step_penalty(0, cfg), tesim::ContractViolation);
}

TEST_CASE("trade update halves the disagreement and prices the gap", "[admm_coordinator]") {
  CoordinatorState s = tesim::make_coordinator(2, 1, {});
  s.trade_reports[s.trade_index(0, 1, 0)] = tesim::to_nano(1.0);
  s.trade_reports[s.trade_index(1, 0, 0)] = tesim::to_nano(1.0);
  tesim::hlp1_update(s, 1.0);
  CHECK(s.trade_aux[s.trade_index(0, 1, 0)] == 0);
  CHECK(s.trade_aux[s.trade_index(1, 0, 0)] == 0);
  CHECK(s.trade_dual[s.trade_index(0, 1, 0)] == tesim::to_nano(-1.0));
  CHECK(s.trade_dual[s.trade_index(1, 0, 0)] == tesim::to_nano(-1.0));
}

TEST_CASE("payment update mirrors the trade form", "[admm_coordinator]") {
  CoordinatorState s = tesim::make_coordinator(2, 1, {});
  s.pay_reports[s.pay_index(0, 1)] = tesim::to_nano(5.0);
  s.pay_reports[s.pay_index(1, 0)] = 0;
  tesim::hlp2_update(s, 1.0);
  CHECK(s.pay_aux[s.pay_index(0, 1)] == tesim::to_nano(2.5));
  CHECK(s.pay_aux[s.pay_index(1, 0)] == tesim::to_nano(-2.5));
  CHECK(s.pay_dual[s.pay_index(0, 1)] == tesim::to_nano(-2.5));
  CHECK(s.pay_dual[s.pay_index(1, 0)] == tesim::to_nano(-2.5));
}

TEST_CASE("auxiliary matrix is antisymmetric to the last nano", "[admm_coordinator]") {
  CoordinatorState s = tesim::make_coordinator(3, 2, {});
  std::int64_t stamp = 1;
  for (auto& v : s.trade_reports) v = 7919 * stamp++ % 1000003;
  for (auto& v : s.trade_dual) v = 104729 * stamp++ % 999983;
  tesim::hlp1_update(s, 0.37);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      for (int t = 0; t < 2; ++t) {
        CHECK(s.trade_aux[s.trade_index(i, j, t)] == -s.trade_aux[s.trade_index(j, i, t)]);
      }
    }
  }
}

TEST_CASE("residual sums the per-user block norms", "[admm_coordinator]") {
  CoordinatorState s = tesim::make_coordinator(2, 2, {});
  s.trade_aux[s.trade_index(0, 1, 0)] = tesim::to_nano(3.0);
  s.trade_aux[s.trade_index(0, 1, 1)] = tesim::to_nano(4.0);
  s.trade_aux[s.trade_index(1, 0, 0)] = tesim::to_nano(-3.0);
  s.trade_aux[s.trade_index(1, 0, 1)] = tesim::to_nano(-4.0);
  CHECK(tesim::convergence_residual(s) == Catch::Approx(10.0).margin(1e-12));
}

TEST_CASE("fixed-point round converges in one step", "[admm_coordinator]") {
  CoordinatorConfig cfg;
  CoordinatorState s = tesim::make_coordinator(2, 1, cfg);
  // Users reproduce exactly the auxiliary trades they were sent, with the
  // dual pair already agreeing: the genuine fixed point.
  s.trade_aux[s.trade_index(0, 1, 0)] = tesim::to_nano(0.7);
  s.trade_aux[s.trade_index(1, 0, 0)] = tesim::to_nano(-0.7);
  s.trade_dual[s.trade_index(0, 1, 0)] = tesim::to_nano(0.3);
  s.trade_dual[s.trade_index(1, 0, 0)] = tesim::to_nano(0.3);
  CHECK(tesim::submit_trade_report(s, 0, 1, {tesim::to_nano(0.7)}) == SubmitStatus::accepted);
  CHECK(tesim::submit_trade_report(s, 1, 1, {tesim::to_nano(-0.7)}) ==
        SubmitStatus::round_complete);
  CHECK(s.phase == TradingPhase::tbap);
  CHECK(s.tcmp_iterations == 1);
  CHECK(s.iteration == 1);
  CHECK(s.trades_final[s.trade_index(0, 1, 0)] == tesim::to_nano(0.7));
  REQUIRE(s.trace.size() == 1);
  CHECK(s.trace[0].residual == Catch::Approx(0.0).margin(1e-9));
}

TEST_CASE("report tally rejects what the round cannot use", "[admm_coordinator]") {
  CoordinatorState s = tesim::make_coordinator(3, 2, {});
  const std::vector<std::int64_t> ok(4, tesim::to_nano(0.1));
  CHECK(tesim::submit_trade_report(s, 0, 1, ok) == SubmitStatus::accepted);
  CHECK(tesim::submit_trade_report(s, 0, 1, ok) == SubmitStatus::duplicate_report);
  CHECK(tesim::submit_trade_report(s, 1, 2, ok) == SubmitStatus::wrong_iteration);
  CHECK(tesim::submit_trade_report(s, 1, 1, {1, 2, 3}) == SubmitStatus::bad_dimensions);
  CHECK(tesim::submit_trade_report(s, 7, 1, ok) == SubmitStatus::unknown_user);
  CHECK(tesim::submit_payment_report(s, 1, 1, {0, 0}) == SubmitStatus::wrong_phase);
  CHECK(tesim::submit_trade_report(s, 1, 1, ok) == SubmitStatus::accepted);
  CHECK(tesim::submit_trade_report(s, 2, 1, ok) == SubmitStatus::round_complete);
  CHECK(s.iteration == 2);
  for (auto seen : s.report_seen) CHECK(seen == 0);
}

TEST_CASE("broadcast projects one user's row of the shared state", "[admm_coordinator]") {
  CoordinatorState s = tesim::make_coordinator(3, 2, {});
  s.iteration = 4;
  s.trade_aux[s.trade_index(1, 0, 1)] = tesim::to_nano(0.25);
  s.trade_dual[s.trade_index(1, 2, 0)] = tesim::to_nano(-0.5);
  s.pay_aux[s.pay_index(1, 2)] = tesim::to_nano(1.5);
  auto b = tesim::broadcast_for(s, 1);
  CHECK(b.iteration == 4);
  CHECK(b.rho1 == Catch::Approx(0.25));
  CHECK(b.trade_aux.at(0, 1) == Catch::Approx(0.25));  // peer 0 is user 0
  CHECK(b.trade_dual.at(1, 0) == Catch::Approx(-0.5)); // peer 1 is user 2
  CHECK(b.pay_aux[1] == Catch::Approx(1.5));
  CHECK(b.pay_dual[0] == Catch::Approx(0.0));
}

TEST_CASE("state serialization round-trips byte for byte", "[admm_coordinator]") {
  CoordinatorState s = tesim::make_coordinator(3, 2, {});
  const std::vector<std::int64_t> r0 = {1, -2, 3, -4};
  tesim::submit_trade_report(s, 0, 1, r0);
  s.trace.push_back({TradingPhase::tcmp, 1, 0.125, 1.0});
  tesim::ByteWriter w;
  tesim::write_coordinator(s, w);
  tesim::ByteReader r(w.data());
  CoordinatorState copy = tesim::read_coordinator(r);
  tesim::ByteWriter w2;
  tesim::write_coordinator(copy, w2);
  CHECK(w.data() == w2.data());
  CHECK(copy.report_seen[0] == 1);
  CHECK(copy.trade_reports[copy.trade_index(0, 1, 1)] == -2);
}

TEST_CASE("single user settles immediately with no counterparties", "[admm_coordinator]") {
  std::vector<TradingUser> users = {{neutral_params(), flat_exo(2, 1.0, 0.0)}};
  auto out = tesim::run_trading_day(users, {});
  CHECK(out.converged());
  CHECK(out.tcmp_iterations == 1);
  CHECK(out.tbap_iterations == 0);
  CHECK(out.final_cost[0] == Catch::Approx(out.standalone_cost[0]).margin(1e-9));
  CHECK(out.payment_total[0] == 0.0);
}

TEST_CASE("identical self-sufficient users neither trade nor pay", "[admm_coordinator]") {
  std::vector<TradingUser> users(2, TradingUser{neutral_params(), flat_exo(2, 2.0, 5.0)});
  auto out = tesim::run_trading_day(users, {});
  CHECK(out.converged());
  CHECK(out.tbap_iterations == 0);
  for (auto v : out.trades_nano) CHECK(v == 0);
  for (auto v : out.payments_nano) CHECK(v == 0);
  for (int i = 0; i < 2; ++i) {
    CHECK(out.final_cost[static_cast<std::size_t>(i)] ==
          Catch::Approx(out.standalone_cost[static_cast<std::size_t>(i)]).margin(1e-9));
  }
}

TEST_CASE("complementary pair clears, gains, and splits the surplus", "[admm_coordinator]") {
  auto users = complementary_pair();
  CoordinatorConfig cfg;
  auto out = tesim::run_trading_day(users, cfg);
  REQUIRE(out.converged());

  auto central = tesim_tests::solve_central(users);
  REQUIRE(central.feasible);
  const double decentralized = out.trading_cost[0] + out.trading_cost[1];
  CHECK(decentralized ==
        Catch::Approx(central.total_cost).margin(1e-3 * (1.0 + std::abs(central.total_cost))));

  for (int t = 0; t < out.horizon; ++t) {
    CHECK(std::abs(out.trade_at(0, 1, t) + out.trade_at(1, 0, t)) <= 1e-4);
  }
  CHECK(std::abs(out.payment_at(0, 1) + out.payment_at(1, 0)) <= 1e-4);

  for (int i = 0; i < 2; ++i) {
    CHECK(out.final_cost[static_cast<std::size_t>(i)] <=
          out.standalone_cost[static_cast<std::size_t>(i)] + 1e-4);
  }
  CHECK(out.final_cost[1] < out.standalone_cost[1] - 1e-3);

  auto nash = tesim_tests::nash_net_payments(out.surplus);
  for (int i = 0; i < 2; ++i) {
    CHECK(out.payment_total[static_cast<std::size_t>(i)] ==
          Catch::Approx(nash[static_cast<std::size_t>(i)]).margin(1e-3));
  }
  CHECK(out.net_surplus[0] == Catch::Approx(out.net_surplus[1]).margin(1e-3));
}

TEST_CASE("three users clear pairwise and match the joint plan", "[admm_coordinator]") {
  auto users = mixed_triple();
  CoordinatorConfig cfg;
  cfg.diminishing_rho = false;
  cfg.fixed_rho = 1.0;
  auto out = tesim::run_trading_day(users, cfg);
  REQUIRE(out.converged());

  auto central = tesim_tests::solve_central(users);
  REQUIRE(central.feasible);
  double decentralized = 0.0;
  for (double c : out.trading_cost) decentralized += c;
  CHECK(decentralized ==
        Catch::Approx(central.total_cost).margin(1e-3 * (1.0 + std::abs(central.total_cost))));

  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      for (int t = 0; t < out.horizon; ++t) {
        CHECK(std::abs(out.trade_at(i, j, t) + out.trade_at(j, i, t)) <= 1e-4);
      }
      CHECK(std::abs(out.payment_at(i, j) + out.payment_at(j, i)) <= 1e-4);
    }
  }

  auto nash = tesim_tests::nash_net_payments(out.surplus);
  for (int i = 0; i < 3; ++i) {
    CHECK(out.payment_total[static_cast<std::size_t>(i)] ==
          Catch::Approx(nash[static_cast<std::size_t>(i)]).margin(1e-3));
    CHECK(out.final_cost[static_cast<std::size_t>(i)] <=
          out.standalone_cost[static_cast<std::size_t>(i)] + 1e-4);
  }
}

TEST_CASE("fixed penalty converges to the same allocation", "[admm_coordinator]") {
  auto users = complementary_pair();
  CoordinatorConfig fixed;
  fixed.diminishing_rho = false;
  fixed.fixed_rho = 1.0;
  auto out = tesim::run_trading_day(users, fixed);
  REQUIRE(out.converged());
  auto central = tesim_tests::solve_central(users);
  const double decentralized = out.trading_cost[0] + out.trading_cost[1];
  CHECK(decentralized ==
        Catch::Approx(central.total_cost).margin(1e-3 * (1.0 + std::abs(central.total_cost))));
}

TEST_CASE("identical runs produce identical bytes", "[admm_coordinator]") {
  auto users = complementary_pair();
  auto a = tesim::run_trading_day(users, {});
  auto b = tesim::run_trading_day(users, {});
  CHECK(a.trades_nano == b.trades_nano);
  CHECK(a.payments_nano == b.payments_nano);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t k = 0; k < a.trace.size(); ++k) {
    CHECK(a.trace[k].residual == b.trace[k].residual);
    CHECK(a.trace[k].rho == b.trace[k].rho);
  }
}

TEST_CASE("iteration caps surface as failure, not as a result", "[admm_coordinator]") {
  auto users = complementary_pair();
  CoordinatorConfig cfg;
  cfg.max_iter_tcmp = 3;
  auto out = tesim::run_trading_day(users, cfg);
  CHECK_FALSE(out.tcmp_converged);
  CHECK_FALSE(out.converged());
  CHECK(out.tcmp_iterations == 3);
  CHECK(out.trace.size() == 3);
  CHECK(out.final_cost[0] == 0.0);
}

TEST_CASE("residual trace shrinks over trailing windows", "[admm_coordinator]") {
  auto users = mixed_triple();
  CoordinatorConfig cfg;
  cfg.diminishing_rho = false;
  cfg.fixed_rho = 1.0;
  auto out = tesim::run_trading_day(users, cfg);
  REQUIRE(out.converged());
  for (auto phase : {TradingPhase::tcmp, TradingPhase::tbap}) {
    std::vector<double> res;
    for (const auto& rec : out.trace) {
      if (rec.phase == phase) res.push_back(rec.residual);
    }
    REQUIRE(!res.empty());
    // Mean over each disjoint 10-iteration window must not grow.
    std::vector<double> means;
    for (std::size_t start = 0; start + 10 <= res.size(); start += 10) {
      double m = 0.0;
      for (std::size_t k = start; k < start + 10; ++k) m += res[k];
      means.push_back(m / 10.0);
    }
    for (std::size_t k = 1; k < means.size(); ++k) {
      CHECK(means[k] <= means[k - 1] + 1e-12);
    }
  }
}
