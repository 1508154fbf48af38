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
//
// Per-user problem builders and solvers. Each household solves three
// problems: the standalone schedule (its participation baseline), the
// trade-quantity subproblem against the coordinator's current auxiliaries
// and duals, and the payment subproblem. Only trade and payment vectors
// ever leave the node; schedules, parameters, and exogenous data stay local.

#ifndef TESIM_LOCAL_OPTIMIZER_HPP
#define TESIM_LOCAL_OPTIMIZER_HPP

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "tesim/energy_model.hpp"
#include "tesim/errors.hpp"
#include "tesim/qp_core.hpp"

namespace tesim {

// Dense (peer, slot) array. Peers of user i are the other users in ascending
// index order; peer_of/peer_index translate between the two coordinates.
struct PairSeries {
  int peers = 0;
  int horizon = 0;
  std::vector<double> v;  // peer-major

  static PairSeries zeros(int peers, int horizon) {
    PairSeries s;
    s.peers = peers;
    s.horizon = horizon;
    s.v.assign(static_cast<std::size_t>(peers) * static_cast<std::size_t>(horizon), 0.0);
    return s;
  }

  double& at(int peer, int t) {
    return v[static_cast<std::size_t>(peer) * static_cast<std::size_t>(horizon) +
             static_cast<std::size_t>(t)];
  }
  double at(int peer, int t) const {
    return v[static_cast<std::size_t>(peer) * static_cast<std::size_t>(horizon) +
             static_cast<std::size_t>(t)];
  }
};

// Positive entry: this user buys that much power from the peer in that slot.
using TradeVector = PairSeries;

// Positive entry: this user pays the peer. One scalar per counterparty.
using PaymentVector = std::vector<double>;

inline int peer_of(int user, int peer_slot, int num_users) {
  (void)num_users;
  return peer_slot < user ? peer_slot : peer_slot + 1;
}

inline int peer_index(int user, int other) { return other < user ? other : other - 1; }

// Everything a user needs from the coordinator for one iteration.
struct LocalBroadcast {
  PairSeries trade_aux;   // p-hat, this user's row
  PairSeries trade_dual;  // lambda, this user's row
  PaymentVector pay_aux;  // pi-hat
  PaymentVector pay_dual; // gamma
  double rho1 = 1.0;
  double rho2 = 1.0;
  int iteration = 1;

  static LocalBroadcast zeros(int peers, int horizon) {
    LocalBroadcast b;
    b.trade_aux = PairSeries::zeros(peers, horizon);
    b.trade_dual = PairSeries::zeros(peers, horizon);
    b.pay_aux.assign(static_cast<std::size_t>(peers), 0.0);
    b.pay_dual.assign(static_cast<std::size_t>(peers), 0.0);
    return b;
  }
};

struct EmpSolution {
  Schedule schedule;
  double cost = 0.0;
};

struct Llp1Solution {
  Schedule schedule;
  TradeVector trades;
  double operating_cost = 0.0;  // tariff + discomfort + wear, trades excluded
  double objective = 0.0;       // full penalized objective the solver minimized
};

// Lifts noise-level surpluses onto a small positive floor so the payment
// barrier stays well posed in the degenerate no-gain case. Genuinely negative
// surpluses pass through: a seller whose own cost rises must be able to hold
// out for compensating payments, which the barrier handles for any finite
// level as long as payments stay below it.
inline double clamp_surplus(double delta) {
  constexpr double kFloor = 1e-6;
  if (std::abs(delta) < kFloor) return kFloor;
  return delta;
}

class LocalOptimizer {
 public:
  LocalOptimizer(int user_index, int num_users, HouseholdParams params, ExogenousSeries exo,
                 double solve_tol = 1e-10)
      : user_(user_index),
        num_users_(num_users),
        params_(std::move(params)),
        exo_(std::move(exo)),
        tol_(solve_tol) {
    validate_params(params_, exo_.horizon);
    validate_exogenous(exo_);
    if (user_index < 0 || user_index >= num_users) {
      throw ContractViolation("LocalOptimizer: user index outside population");
    }
  }

  const HouseholdParams& params() const { return params_; }
  const ExogenousSeries& exo() const { return exo_; }
  int user() const { return user_; }
  int peers() const { return num_users_ - 1; }

  // Standalone problem; the minimized cost is the participation baseline.
  EmpSolution solve_emp() {
    check_supply_floor();
    qp::Problem p = build(nullptr);
    qp::SolveOptions opt;
    opt.tol = tol_;
    auto report = qp::solve_qp(p, opt);
    if (report.status == qp::SolveStatus::infeasible) {
      throw InfeasibleError("user " + std::to_string(user_) +
                            " standalone schedule infeasible: " + report.note);
    }
    if (report.status != qp::SolveStatus::optimal) {
      throw InfeasibleError("user " + std::to_string(user_) +
                            " standalone solve stalled: " + report.note);
    }
    EmpSolution out;
    out.schedule = extract_schedule(report.x);
    out.cost = operating_cost(out.schedule, params_, exo_.slot_hours);
    return out;
  }

  // Trade-quantity subproblem for the current broadcast. Warm starts from the
  // previous iterate; the subproblem drifts slowly between iterations.
  Llp1Solution solve_llp1(const LocalBroadcast& b) {
    if (b.trade_aux.peers != peers() || b.trade_aux.horizon != exo_.horizon ||
        b.trade_dual.peers != peers() || b.trade_dual.horizon != exo_.horizon) {
      throw ContractViolation("solve_llp1: broadcast dimensions do not match scenario");
    }
    if (!(b.rho1 > 0.0)) throw ContractViolation("solve_llp1: rho1 must be positive");
    qp::Problem p = build(&b);
    qp::SolveOptions opt;
    opt.tol = tol_;
    if (warm_.size() == static_cast<std::size_t>(p.num_vars)) opt.warm = warm_;
    auto report = qp::solve_qp(p, opt);
    if (report.status != qp::SolveStatus::optimal && !opt.warm.empty()) {
      // A stale warm point can sit too close to the boundary for the
      // interior-point centering to recover; a cold start is always safe.
      opt.warm.clear();
      report = qp::solve_qp(p, opt);
    }
    if (report.status != qp::SolveStatus::optimal) {
      throw InfeasibleError("user " + std::to_string(user_) +
                            " trade subproblem failed: " + report.note);
    }
    warm_ = report.x;
    Llp1Solution out;
    out.schedule = extract_schedule(report.x);
    out.trades = PairSeries::zeros(peers(), exo_.horizon);
    const int base = trade_base();
    for (int pr = 0; pr < peers(); ++pr) {
      for (int t = 0; t < exo_.horizon; ++t) {
        out.trades.at(pr, t) =
            report.x[static_cast<std::size_t>(base + pr * exo_.horizon + t)];
      }
    }
    out.operating_cost = operating_cost(out.schedule, params_, exo_.slot_hours);
    out.objective = penalized_objective(out, b);
    return out;
  }

  // Payment subproblem: closed 1-D reduction, no iteration state.
  PaymentVector solve_llp2(double delta, const LocalBroadcast& b) const {
    if (b.pay_aux.size() != static_cast<std::size_t>(peers()) ||
        b.pay_dual.size() != b.pay_aux.size()) {
      throw ContractViolation("solve_llp2: broadcast dimensions do not match scenario");
    }
    if (peers() == 0) return {};
    return qp::solve_log_quadratic(clamp_surplus(delta), b.pay_aux, b.pay_dual, b.rho2);
  }

  // Full penalized objective of the trade subproblem at a given solution;
  // used by tests to confirm local optimality between iterations.
  double penalized_objective(const Llp1Solution& sol, const LocalBroadcast& b) const {
    double acc = sol.operating_cost;
    for (int pr = 0; pr < peers(); ++pr) {
      for (int t = 0; t < exo_.horizon; ++t) {
        const double diff = b.trade_aux.at(pr, t) - sol.trades.at(pr, t);
        acc += 0.5 * b.rho1 * diff * diff - b.trade_dual.at(pr, t) * sol.trades.at(pr, t);
      }
    }
    // The epigraph encoding prices the true peak, so the penalized QP
    // objective and this evaluation agree at optimal points.
    return acc;
  }

 private:
  // Variable layout per user: eight schedule series, the peak epigraph
  // scalar, then (for the trading problem) peer-major trade series.
  int h() const { return exo_.horizon; }
  int idx_re() const { return 0; }
  int idx_g() const { return h(); }
  int idx_ac() const { return 2 * h(); }
  int idx_f() const { return 3 * h(); }
  int idx_ch() const { return 4 * h(); }
  int idx_dis() const { return 5 * h(); }
  int idx_eb() const { return 6 * h(); }
  int idx_tin() const { return 7 * h(); }
  int idx_peak() const { return 8 * h(); }
  int trade_base() const { return 8 * h() + 1; }

  void check_supply_floor() const {
    std::vector<bool> in_window(static_cast<std::size_t>(h()), false);
    for (int t : params_.flex_window) in_window[static_cast<std::size_t>(t)] = true;
    const double battery_out = params_.battery_capacity > 0 ? params_.discharge_cap : 0.0;
    for (int t = 0; t < h(); ++t) {
      const auto u = static_cast<std::size_t>(t);
      const double supply = params_.grid_cap + exo_.renewable_avail[u] + battery_out;
      const double demand =
          exo_.inflexible_load[u] + (in_window[u] ? std::max(params_.flex_min[u], 0.0) : 0.0);
      if (supply < demand - 1e-9) {
        throw InfeasibleError(
            "user " + std::to_string(user_) + " slot " + std::to_string(t) +
            ": minimum demand " + std::to_string(demand) + " kW exceeds maximum supply " +
            std::to_string(supply) + " kW");
      }
    }
  }

  qp::Problem build(const LocalBroadcast* b) const {
    const int horizon = h();
    const double slot_hours = exo_.slot_hours;
    const bool battery = params_.battery_capacity > 0;
    qp::Problem p;

    std::vector<bool> in_window(static_cast<std::size_t>(horizon), false);
    for (int t : params_.flex_window) in_window[static_cast<std::size_t>(t)] = true;

    // Schedule variables, in layout order.
    for (int t = 0; t < horizon; ++t) {
      p.add_var(0.0, 0.0, 0.0, exo_.renewable_avail[static_cast<std::size_t>(t)]);
    }
    for (int t = 0; t < horizon; ++t) {
      p.add_var(0.0, params_.energy_price * slot_hours, 0.0, params_.grid_cap);
    }
    for (int t = 0; t < horizon; ++t) {
      p.add_var(0.0, 0.0, 0.0, qp::kInf);  // hvac draws power, never supplies
    }
    for (int t = 0; t < horizon; ++t) {
      const auto u = static_cast<std::size_t>(t);
      if (in_window[u]) {
        p.add_var(2.0 * params_.discomfort_flex,
                  -2.0 * params_.discomfort_flex * params_.flex_ref[u], params_.flex_min[u],
                  params_.flex_max[u]);
      } else {
        p.add_var(0.0, 0.0, 0.0, 0.0);
      }
    }
    for (int t = 0; t < horizon; ++t) {
      p.add_var(0.0, params_.battery_wear * slot_hours, 0.0, battery ? params_.charge_cap : 0.0);
    }
    for (int t = 0; t < horizon; ++t) {
      p.add_var(0.0, params_.battery_wear * slot_hours, 0.0,
                battery ? params_.discharge_cap : 0.0);
    }
    const double soc_lo = params_.soc_min_frac * params_.battery_capacity;
    const double soc_hi = params_.soc_max_frac * params_.battery_capacity;
    for (int t = 0; t < horizon; ++t) {
      p.add_var(0.0, 0.0, battery ? soc_lo : 0.0, battery ? soc_hi : 0.0);
    }
    for (int t = 0; t < horizon; ++t) {
      p.add_var(2.0 * params_.discomfort_ac, -2.0 * params_.discomfort_ac * params_.temp_ref,
                params_.temp_min, params_.temp_max);
    }
    p.add_var(0.0, params_.peak_price, 0.0, qp::kInf);  // peak epigraph

    const int num_peers = b != nullptr ? peers() : 0;
    if (b != nullptr) {
      for (int pr = 0; pr < num_peers; ++pr) {
        for (int t = 0; t < horizon; ++t) {
          const double aux = b->trade_aux.at(pr, t);
          const double dual = b->trade_dual.at(pr, t);
          p.add_var(b->rho1, -b->rho1 * aux - dual, -qp::kInf, qp::kInf);
        }
      }
    }

    // Power balance per slot.
    for (int t = 0; t < horizon; ++t) {
      qp::SparseRow row;
      row.label = "balance[" + std::to_string(t) + "]";
      row.entries = {{idx_re() + t, 1.0}, {idx_g() + t, 1.0},  {idx_dis() + t, 1.0},
                     {idx_ac() + t, -1.0}, {idx_f() + t, -1.0}, {idx_ch() + t, -1.0}};
      for (int pr = 0; pr < num_peers; ++pr) {
        row.entries.emplace_back(trade_base() + pr * horizon + t, 1.0);
      }
      p.add_eq(std::move(row), exo_.inflexible_load[static_cast<std::size_t>(t)]);
    }

    // Storage level recursion.
    for (int t = 0; t < horizon; ++t) {
      qp::SparseRow row;
      row.label = "storage[" + std::to_string(t) + "]";
      row.entries = {{idx_eb() + t, 1.0},
                     {idx_ch() + t, -params_.charge_eff},
                     {idx_dis() + t, 1.0 / params_.discharge_eff}};
      double rhs = 0.0;
      if (t == 0) {
        rhs = params_.soc_initial;
      } else {
        row.entries.emplace_back(idx_eb() + t - 1, -1.0);
      }
      p.add_eq(std::move(row), rhs);
    }
    if (params_.cyclic_storage && battery) {
      qp::SparseRow row;
      row.label = "storage[terminal]";
      row.entries = {{idx_eb() + horizon - 1, 1.0}};
      p.add_eq(std::move(row), params_.soc_initial);
    }

    // Indoor temperature recursion: t_in[t] - a*t_in[t-1] + (eta/C)*p_ac[t]
    // = t_out[t]/(C*R), with the initial condition folded into slot 0.
    const double cr = params_.thermal_capacity * params_.thermal_resistance;
    const double decay = 1.0 - 1.0 / cr;
    const double gain = params_.hvac_coeff / params_.thermal_capacity;
    for (int t = 0; t < horizon; ++t) {
      qp::SparseRow row;
      row.label = "temperature[" + std::to_string(t) + "]";
      row.entries = {{idx_tin() + t, 1.0}, {idx_ac() + t, gain}};
      double rhs = exo_.outdoor_temp[static_cast<std::size_t>(t)] / cr;
      if (t == 0) {
        rhs += decay * initial_indoor_temp(params_, exo_);
      } else {
        row.entries.emplace_back(idx_tin() + t - 1, -decay);
      }
      p.add_eq(std::move(row), rhs);
    }

    // Flexible-load energy requirement over its window.
    if (!params_.flex_window.empty()) {
      qp::SparseRow row;
      row.label = "flex demand";
      for (int t : params_.flex_window) row.entries.emplace_back(idx_f() + t, 1.0);
      p.add_eq(std::move(row), params_.flex_total);
    }

    // Peak epigraph: peak >= grid draw in every slot.
    for (int t = 0; t < horizon; ++t) {
      qp::SparseRow row;
      row.label = "peak[" + std::to_string(t) + "]";
      row.entries = {{idx_peak(), 1.0}, {idx_g() + t, -1.0}};
      p.add_ineq(std::move(row), 0.0, qp::kInf);
    }
    return p;
  }

  Schedule extract_schedule(const std::vector<double>& x) const {
    Schedule s = Schedule::zeros(h());
    for (int t = 0; t < h(); ++t) {
      const auto u = static_cast<std::size_t>(t);
      s.renewable[u] = x[static_cast<std::size_t>(idx_re() + t)];
      s.grid[u] = x[static_cast<std::size_t>(idx_g() + t)];
      s.hvac[u] = x[static_cast<std::size_t>(idx_ac() + t)];
      s.flex[u] = x[static_cast<std::size_t>(idx_f() + t)];
      s.charge[u] = x[static_cast<std::size_t>(idx_ch() + t)];
      s.discharge[u] = x[static_cast<std::size_t>(idx_dis() + t)];
      s.storage[u] = x[static_cast<std::size_t>(idx_eb() + t)];
      s.indoor_temp[u] = x[static_cast<std::size_t>(idx_tin() + t)];
    }
    return s;
  }

  int user_;
  int num_users_;
  HouseholdParams params_;
  ExogenousSeries exo_;
  double tol_;
  std::vector<double> warm_;
};

}  // namespace tesim

#endif  // TESIM_LOCAL_OPTIMIZER_HPP
