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
// The coordinator is the contract logic replicated by consensus: it tallies
// user reports per iteration, runs the closed-form auxiliary/dual updates
// when a round completes, tests convergence, and freezes results phase by
// phase. All replicated numeric state is int64 fixed point at nano (1e-9)
// resolution so every replica computes identical bytes; conversion to
// doubles happens in the update arithmetic, which is itself deterministic
// (fixed iteration order, no parallel reductions).

#ifndef TESIM_ADMM_COORDINATOR_HPP
#define TESIM_ADMM_COORDINATOR_HPP

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tesim/bytes.hpp"
#include "tesim/errors.hpp"
#include "tesim/fixed_point.hpp"
#include "tesim/local_optimizer.hpp"

namespace tesim {

enum class TradingPhase : std::uint8_t { tcmp = 0, tbap = 1, settled = 2, failed = 3 };

inline const char* phase_name(TradingPhase p) {
  switch (p) {
    case TradingPhase::tcmp: return "tcmp";
    case TradingPhase::tbap: return "tbap";
    case TradingPhase::settled: return "settled";
    case TradingPhase::failed: return "failed";
  }
  return "?";
}

struct CoordinatorConfig {
  double eps1 = 1e-6;
  double eps2 = 1e-6;
  bool diminishing_rho = true;  // rho(k) = 1/k; otherwise fixed_rho for all k
  double fixed_rho = 1.0;
  int max_iter_tcmp = 500;
  int max_iter_tbap = 500;
};

// Penalty weights for iteration k (both phases use the same schedule).
inline std::pair<double, double> step_penalty(int k, const CoordinatorConfig& cfg) {
  if (k < 1) throw ContractViolation("step_penalty: iteration must be >= 1");
  const double rho = cfg.diminishing_rho ? 1.0 / static_cast<double>(k) : cfg.fixed_rho;
  return {rho, rho};
}

struct TraceRecord {
  TradingPhase phase = TradingPhase::tcmp;
  int iteration = 0;
  double residual = 0.0;
  double rho = 0.0;
};

struct CoordinatorState {
  int num_users = 0;
  int horizon = 0;
  CoordinatorConfig config;
  TradingPhase phase = TradingPhase::tcmp;
  int iteration = 1;

  // Full pairwise matrices in nano fixed point; index (i*N + j)*H + t for
  // trades, i*N + j for payments. Diagonal entries stay zero.
  std::vector<std::int64_t> trade_aux, trade_dual;
  std::vector<std::int64_t> pay_aux, pay_dual;

  // Current round tallies. trade_reports[i][j] is user i's claim about j.
  std::vector<std::uint8_t> report_seen;
  std::vector<std::int64_t> trade_reports;
  std::vector<std::int64_t> pay_reports;

  // Frozen results.
  std::vector<std::int64_t> trades_final;
  std::vector<std::int64_t> payments_final;
  int tcmp_iterations = 0;
  int tbap_iterations = 0;

  std::vector<TraceRecord> trace;

  std::size_t trade_index(int i, int j, int t) const {
    return (static_cast<std::size_t>(i) * static_cast<std::size_t>(num_users) +
            static_cast<std::size_t>(j)) *
               static_cast<std::size_t>(horizon) +
           static_cast<std::size_t>(t);
  }
  std::size_t pay_index(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(num_users) +
           static_cast<std::size_t>(j);
  }
};

inline CoordinatorState make_coordinator(int num_users, int horizon,
                                         const CoordinatorConfig& cfg) {
  if (num_users < 1) throw ValidationError("coordinator: need at least one user");
  if (horizon < 1) throw ValidationError("coordinator: horizon must be positive");
  CoordinatorState s;
  s.num_users = num_users;
  s.horizon = horizon;
  s.config = cfg;
  const std::size_t pair_slots = static_cast<std::size_t>(num_users) *
                                 static_cast<std::size_t>(num_users) *
                                 static_cast<std::size_t>(horizon);
  const std::size_t pairs =
      static_cast<std::size_t>(num_users) * static_cast<std::size_t>(num_users);
  s.trade_aux.assign(pair_slots, 0);
  s.trade_dual.assign(pair_slots, 0);
  s.pay_aux.assign(pairs, 0);
  s.pay_dual.assign(pairs, 0);
  s.report_seen.assign(static_cast<std::size_t>(num_users), 0);
  s.trade_reports.assign(pair_slots, 0);
  s.pay_reports.assign(pairs, 0);
  s.trades_final.assign(pair_slots, 0);
  s.payments_final.assign(pairs, 0);
  return s;
}

// --- closed-form coordinator updates -------------------------------------

// Trade auxiliary/dual update over all ordered pairs. Each unordered pair is
// computed once and mirrored with an exact sign flip, which enforces the
// anti-symmetry invariant in integer arithmetic, not merely to rounding.
inline void hlp1_update(CoordinatorState& s, double rho1) {
  const int n = s.num_users;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      for (int t = 0; t < s.horizon; ++t) {
        const std::size_t ij = s.trade_index(i, j, t);
        const std::size_t ji = s.trade_index(j, i, t);
        const double p_ij = from_nano(s.trade_reports[ij]);
        const double p_ji = from_nano(s.trade_reports[ji]);
        const double l_ij = from_nano(s.trade_dual[ij]);
        const double l_ji = from_nano(s.trade_dual[ji]);
        const double aux = 0.5 * (p_ij - p_ji) - (l_ij - l_ji) / (2.0 * rho1);
        const std::int64_t aux_n = to_nano(aux);
        s.trade_aux[ij] = aux_n;
        s.trade_aux[ji] = -aux_n;
        const double aux_q = from_nano(aux_n);
        s.trade_dual[ij] = to_nano(l_ij + rho1 * (aux_q - p_ij));
        s.trade_dual[ji] = to_nano(l_ji + rho1 * (-aux_q - p_ji));
      }
    }
  }
}

// Payment auxiliary/dual update; same structure with per-pair scalars.
inline void hlp2_update(CoordinatorState& s, double rho2) {
  const int n = s.num_users;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const std::size_t ij = s.pay_index(i, j);
      const std::size_t ji = s.pay_index(j, i);
      const double pi_ij = from_nano(s.pay_reports[ij]);
      const double pi_ji = from_nano(s.pay_reports[ji]);
      const double g_ij = from_nano(s.pay_dual[ij]);
      const double g_ji = from_nano(s.pay_dual[ji]);
      const double aux = 0.5 * (pi_ij - pi_ji) - (g_ij - g_ji) / (2.0 * rho2);
      const std::int64_t aux_n = to_nano(aux);
      s.pay_aux[ij] = aux_n;
      s.pay_aux[ji] = -aux_n;
      const double aux_q = from_nano(aux_n);
      s.pay_dual[ij] = to_nano(g_ij + rho2 * (aux_q - pi_ij));
      s.pay_dual[ji] = to_nano(g_ji + rho2 * (-aux_q - pi_ji));
    }
  }
}

// Sum over users of the Euclidean distance between each user's auxiliary
// block and its current report, for the active phase. The round logic calls
// this before the auxiliary update, so the distance is measured against the
// values the users actually solved with; zero then certifies a fixed point
// of the whole iteration map, not a transient alignment of the reports.
inline double convergence_residual(const CoordinatorState& s) {
  const int n = s.num_users;
  double total = 0.0;
  if (s.phase == TradingPhase::tcmp || s.phase == TradingPhase::settled ||
      s.phase == TradingPhase::failed) {
    for (int i = 0; i < n; ++i) {
      double sq = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        for (int t = 0; t < s.horizon; ++t) {
          const std::size_t ij = s.trade_index(i, j, t);
          const double d = from_nano(s.trade_aux[ij]) - from_nano(s.trade_reports[ij]);
          sq += d * d;
        }
      }
      total += std::sqrt(sq);
    }
  } else {
    for (int i = 0; i < n; ++i) {
      double sq = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        const std::size_t ij = s.pay_index(i, j);
        const double d = from_nano(s.pay_aux[ij]) - from_nano(s.pay_reports[ij]);
        sq += d * d;
      }
      total += std::sqrt(sq);
    }
  }
  return total;
}

// --- report intake ---------------------------------------------------------

enum class SubmitStatus : std::uint8_t {
  accepted = 0,
  round_complete = 1,
  duplicate_report = 2,
  wrong_iteration = 3,
  wrong_phase = 4,
  bad_dimensions = 5,
  unknown_user = 6,
};

inline const char* submit_status_name(SubmitStatus s) {
  switch (s) {
    case SubmitStatus::accepted: return "accepted";
    case SubmitStatus::round_complete: return "round complete";
    case SubmitStatus::duplicate_report: return "duplicate report";
    case SubmitStatus::wrong_iteration: return "wrong iteration";
    case SubmitStatus::wrong_phase: return "wrong phase";
    case SubmitStatus::bad_dimensions: return "bad dimensions";
    case SubmitStatus::unknown_user: return "unknown user";
  }
  return "?";
}

namespace detail_admm {

// Runs once the last report of a round lands: closed-form update, residual,
// trace, convergence/caps, round counter. Deterministic given tallies.
inline void complete_round(CoordinatorState& s) {
  const auto [rho1, rho2] = step_penalty(s.iteration, s.config);
  if (s.phase == TradingPhase::tcmp) {
    const double res = convergence_residual(s);
    hlp1_update(s, rho1);
    s.trace.push_back({TradingPhase::tcmp, s.iteration, res, rho1});
    if (res <= s.config.eps1) {
      s.trades_final = s.trade_reports;
      s.tcmp_iterations = s.iteration;
      s.iteration = 1;
      // Nothing traded means nothing to pay for: freeze zero payments and
      // settle directly instead of asking the barrier subproblems to bargain
      // over a zero-surplus pot they cannot close on.
      bool all_zero = true;
      for (std::int64_t v : s.trades_final) {
        if (v > 1 || v < -1) {
          all_zero = false;
          break;
        }
      }
      s.phase = all_zero ? TradingPhase::settled : TradingPhase::tbap;
    } else if (s.iteration >= s.config.max_iter_tcmp) {
      s.trades_final = s.trade_reports;
      s.tcmp_iterations = s.iteration;
      s.phase = TradingPhase::failed;
    } else {
      ++s.iteration;
    }
  } else {
    const double res = convergence_residual(s);
    hlp2_update(s, rho2);
    s.trace.push_back({TradingPhase::tbap, s.iteration, res, rho2});
    if (res <= s.config.eps2) {
      s.payments_final = s.pay_reports;
      s.tbap_iterations = s.iteration;
      s.phase = TradingPhase::settled;
    } else if (s.iteration >= s.config.max_iter_tbap) {
      s.payments_final = s.pay_reports;
      s.tbap_iterations = s.iteration;
      s.phase = TradingPhase::failed;
    } else {
      ++s.iteration;
    }
  }
  for (auto& seen : s.report_seen) seen = 0;
}

}  // namespace detail_admm

// Accepts user i's trade report for iteration k. The payload is peer-major
// nano fixed point, length (N-1)*H. Completing the round triggers the
// coordinator update in the same deterministic step.
inline SubmitStatus submit_trade_report(CoordinatorState& s, int user, int iteration,
                                        const std::vector<std::int64_t>& payload) {
  if (user < 0 || user >= s.num_users) return SubmitStatus::unknown_user;
  if (s.phase != TradingPhase::tcmp) return SubmitStatus::wrong_phase;
  if (iteration != s.iteration) return SubmitStatus::wrong_iteration;
  if (s.report_seen[static_cast<std::size_t>(user)]) return SubmitStatus::duplicate_report;
  const std::size_t expect = static_cast<std::size_t>(s.num_users - 1) *
                             static_cast<std::size_t>(s.horizon);
  if (payload.size() != expect) return SubmitStatus::bad_dimensions;

  for (int pr = 0; pr < s.num_users - 1; ++pr) {
    const int j = peer_of(user, pr, s.num_users);
    for (int t = 0; t < s.horizon; ++t) {
      s.trade_reports[s.trade_index(user, j, t)] =
          payload[static_cast<std::size_t>(pr) * static_cast<std::size_t>(s.horizon) +
                  static_cast<std::size_t>(t)];
    }
  }
  s.report_seen[static_cast<std::size_t>(user)] = 1;
  for (auto seen : s.report_seen) {
    if (!seen) return SubmitStatus::accepted;
  }
  detail_admm::complete_round(s);
  return SubmitStatus::round_complete;
}

inline SubmitStatus submit_payment_report(CoordinatorState& s, int user, int iteration,
                                          const std::vector<std::int64_t>& payload) {
  if (user < 0 || user >= s.num_users) return SubmitStatus::unknown_user;
  if (s.phase != TradingPhase::tbap) return SubmitStatus::wrong_phase;
  if (iteration != s.iteration) return SubmitStatus::wrong_iteration;
  if (s.report_seen[static_cast<std::size_t>(user)]) return SubmitStatus::duplicate_report;
  if (payload.size() != static_cast<std::size_t>(s.num_users - 1)) {
    return SubmitStatus::bad_dimensions;
  }
  for (int pr = 0; pr < s.num_users - 1; ++pr) {
    const int j = peer_of(user, pr, s.num_users);
    s.pay_reports[s.pay_index(user, j)] = payload[static_cast<std::size_t>(pr)];
  }
  s.report_seen[static_cast<std::size_t>(user)] = 1;
  for (auto seen : s.report_seen) {
    if (!seen) return SubmitStatus::accepted;
  }
  detail_admm::complete_round(s);
  return SubmitStatus::round_complete;
}

// The view of coordinator state a single user needs for its next solve.
inline LocalBroadcast broadcast_for(const CoordinatorState& s, int user) {
  LocalBroadcast b = LocalBroadcast::zeros(s.num_users - 1, s.horizon);
  for (int pr = 0; pr < s.num_users - 1; ++pr) {
    const int j = peer_of(user, pr, s.num_users);
    for (int t = 0; t < s.horizon; ++t) {
      b.trade_aux.at(pr, t) = from_nano(s.trade_aux[s.trade_index(user, j, t)]);
      b.trade_dual.at(pr, t) = from_nano(s.trade_dual[s.trade_index(user, j, t)]);
    }
    b.pay_aux[static_cast<std::size_t>(pr)] = from_nano(s.pay_aux[s.pay_index(user, j)]);
    b.pay_dual[static_cast<std::size_t>(pr)] = from_nano(s.pay_dual[s.pay_index(user, j)]);
  }
  const auto [rho1, rho2] = step_penalty(s.iteration, s.config);
  b.rho1 = rho1;
  b.rho2 = rho2;
  b.iteration = s.iteration;
  return b;
}

inline std::vector<std::int64_t> quantize_trades(const TradeVector& trades) {
  std::vector<std::int64_t> out;
  out.reserve(trades.v.size());
  for (double v : trades.v) out.push_back(to_nano(v));
  return out;
}

inline std::vector<std::int64_t> quantize_payments(const PaymentVector& pay) {
  std::vector<std::int64_t> out;
  out.reserve(pay.size());
  for (double v : pay) out.push_back(to_nano(v));
  return out;
}

// Canonical byte encoding of the replicated state. Every replica that holds
// the same state must produce the same bytes; block state roots hash this.
inline void write_coordinator(const CoordinatorState& s, ByteWriter& w) {
  w.u32(static_cast<std::uint32_t>(s.num_users));
  w.u32(static_cast<std::uint32_t>(s.horizon));
  w.f64(s.config.eps1);
  w.f64(s.config.eps2);
  w.u8(s.config.diminishing_rho ? 1 : 0);
  w.f64(s.config.fixed_rho);
  w.u32(static_cast<std::uint32_t>(s.config.max_iter_tcmp));
  w.u32(static_cast<std::uint32_t>(s.config.max_iter_tbap));
  w.u8(static_cast<std::uint8_t>(s.phase));
  w.u32(static_cast<std::uint32_t>(s.iteration));
  w.i64_vec(s.trade_aux);
  w.i64_vec(s.trade_dual);
  w.i64_vec(s.pay_aux);
  w.i64_vec(s.pay_dual);
  w.u32(static_cast<std::uint32_t>(s.report_seen.size()));
  for (auto v : s.report_seen) w.u8(v);
  w.i64_vec(s.trade_reports);
  w.i64_vec(s.pay_reports);
  w.i64_vec(s.trades_final);
  w.i64_vec(s.payments_final);
  w.u32(static_cast<std::uint32_t>(s.tcmp_iterations));
  w.u32(static_cast<std::uint32_t>(s.tbap_iterations));
  w.u32(static_cast<std::uint32_t>(s.trace.size()));
  for (const auto& rec : s.trace) {
    w.u8(static_cast<std::uint8_t>(rec.phase));
    w.u32(static_cast<std::uint32_t>(rec.iteration));
    w.f64(rec.residual);
    w.f64(rec.rho);
  }
}

inline CoordinatorState read_coordinator(ByteReader& r) {
  CoordinatorState s;
  s.num_users = static_cast<int>(r.u32());
  s.horizon = static_cast<int>(r.u32());
  s.config.eps1 = r.f64();
  s.config.eps2 = r.f64();
  s.config.diminishing_rho = r.u8() != 0;
  s.config.fixed_rho = r.f64();
  s.config.max_iter_tcmp = static_cast<int>(r.u32());
  s.config.max_iter_tbap = static_cast<int>(r.u32());
  s.phase = static_cast<TradingPhase>(r.u8());
  s.iteration = static_cast<int>(r.u32());
  s.trade_aux = r.i64_vec();
  s.trade_dual = r.i64_vec();
  s.pay_aux = r.i64_vec();
  s.pay_dual = r.i64_vec();
  const std::uint32_t seen = r.u32();
  s.report_seen.resize(seen);
  for (auto& v : s.report_seen) v = r.u8();
  s.trade_reports = r.i64_vec();
  s.pay_reports = r.i64_vec();
  s.trades_final = r.i64_vec();
  s.payments_final = r.i64_vec();
  s.tcmp_iterations = static_cast<int>(r.u32());
  s.tbap_iterations = static_cast<int>(r.u32());
  const std::uint32_t traces = r.u32();
  s.trace.resize(traces);
  for (auto& rec : s.trace) {
    rec.phase = static_cast<TradingPhase>(r.u8());
    rec.iteration = static_cast<int>(r.u32());
    rec.residual = r.f64();
    rec.rho = r.f64();
  }
  return s;
}

// --- whole-day orchestration ------------------------------------------------

struct TradingUser {
  HouseholdParams params;
  ExogenousSeries exo;
};

struct ChainSummary {
  bool on_chain = false;
  std::int64_t committed_height = 0;
  int view_changes = 0;
  std::int64_t transactions = 0;
  int safety_violations = 0;
};

struct TradingOutcome {
  int num_users = 0;
  int horizon = 0;
  bool tcmp_converged = false;
  bool tbap_converged = false;
  int tcmp_iterations = 0;
  int tbap_iterations = 0;
  std::vector<double> standalone_cost;  // per user, the no-trading baseline
  std::vector<double> trading_cost;     // per user, operating cost with trades
  std::vector<double> payment_total;    // per user, sum of outgoing payments
  std::vector<double> final_cost;       // trading_cost + payment_total
  std::vector<double> surplus;          // standalone - trading (the bargaining gap)
  std::vector<double> net_surplus;      // surplus - payment_total
  std::vector<std::int64_t> trades_nano;    // N*N*H, nano kW
  std::vector<std::int64_t> payments_nano;  // N*N, nano $
  std::vector<TraceRecord> trace;
  ChainSummary chain;

  bool converged() const { return tcmp_converged && tbap_converged; }

  double trade_at(int i, int j, int t) const {
    return from_nano(trades_nano[(static_cast<std::size_t>(i) *
                                      static_cast<std::size_t>(num_users) +
                                  static_cast<std::size_t>(j)) *
                                     static_cast<std::size_t>(horizon) +
                                 static_cast<std::size_t>(t)]);
  }
  double payment_at(int i, int j) const {
    return from_nano(payments_nano[static_cast<std::size_t>(i) *
                                       static_cast<std::size_t>(num_users) +
                                   static_cast<std::size_t>(j)]);
  }
};

// Runs both phases in-process: every user solve, every coordinator update,
// no chain. The chain-hosted path executes the same submissions through
// transactions and must land on the identical outcome.
inline TradingOutcome run_trading_day(const std::vector<TradingUser>& users,
                                      const CoordinatorConfig& cfg) {
  const int n = static_cast<int>(users.size());
  if (n < 1) throw ValidationError("run_trading_day: no users");
  const int horizon = users[0].exo.horizon;
  for (const auto& u : users) {
    if (u.exo.horizon != horizon) {
      throw ValidationError("run_trading_day: users disagree on horizon");
    }
  }

  TradingOutcome out;
  out.num_users = n;
  out.horizon = horizon;
  out.standalone_cost.assign(static_cast<std::size_t>(n), 0.0);
  out.trading_cost.assign(static_cast<std::size_t>(n), 0.0);
  out.payment_total.assign(static_cast<std::size_t>(n), 0.0);
  out.final_cost.assign(static_cast<std::size_t>(n), 0.0);
  out.surplus.assign(static_cast<std::size_t>(n), 0.0);
  out.net_surplus.assign(static_cast<std::size_t>(n), 0.0);

  std::vector<LocalOptimizer> solvers;
  solvers.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    solvers.emplace_back(i, n, users[static_cast<std::size_t>(i)].params,
                         users[static_cast<std::size_t>(i)].exo);
  }
  for (int i = 0; i < n; ++i) {
    out.standalone_cost[static_cast<std::size_t>(i)] = solvers[static_cast<std::size_t>(i)]
                                                           .solve_emp()
                                                           .cost;
  }

  CoordinatorState st = make_coordinator(n, horizon, cfg);
  std::vector<double> last_cost(static_cast<std::size_t>(n), 0.0);
  while (st.phase == TradingPhase::tcmp) {
    for (int i = 0; i < n; ++i) {
      LocalBroadcast b = broadcast_for(st, i);
      Llp1Solution sol = solvers[static_cast<std::size_t>(i)].solve_llp1(b);
      last_cost[static_cast<std::size_t>(i)] = sol.operating_cost;
      submit_trade_report(st, i, b.iteration, quantize_trades(sol.trades));
    }
  }
  out.tcmp_converged = st.phase != TradingPhase::failed;
  out.tcmp_iterations = st.tcmp_iterations;
  out.trading_cost = last_cost;
  for (int i = 0; i < n; ++i) {
    out.surplus[static_cast<std::size_t>(i)] = out.standalone_cost[static_cast<std::size_t>(i)] -
                                               out.trading_cost[static_cast<std::size_t>(i)];
  }
  out.trades_nano = st.trades_final;

  if (st.phase == TradingPhase::tbap) {
    while (st.phase == TradingPhase::tbap) {
      for (int i = 0; i < n; ++i) {
        LocalBroadcast b = broadcast_for(st, i);
        PaymentVector pay =
            solvers[static_cast<std::size_t>(i)].solve_llp2(out.surplus[static_cast<std::size_t>(i)], b);
        submit_payment_report(st, i, b.iteration, quantize_payments(pay));
      }
    }
  }
  out.tbap_converged = st.phase == TradingPhase::settled;
  out.tbap_iterations = st.tbap_iterations;
  out.payments_nano = st.payments_final;
  out.trace = std::move(st.trace);

  if (out.tbap_converged) {
    for (int i = 0; i < n; ++i) {
      double total = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j != i) total += out.payment_at(i, j);
      }
      out.payment_total[static_cast<std::size_t>(i)] = total;
      out.final_cost[static_cast<std::size_t>(i)] =
          out.trading_cost[static_cast<std::size_t>(i)] + total;
      out.net_surplus[static_cast<std::size_t>(i)] =
          out.surplus[static_cast<std::size_t>(i)] - total;
    }
  }
  return out;
}

}  // namespace tesim

#endif  // TESIM_ADMM_COORDINATOR_HPP
