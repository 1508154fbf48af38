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
// Runs the trading day over the simulated chain: validators replicate the
// coordinator through consensus while users act as light nodes that solve
// locally and submit every report as a signed transaction to all validators.
// Report payloads are computed from committed coordinator state only, and the
// coordinator update is itself part of transaction execution, so the chain
// path reproduces the in-process run_trading_day outcome exactly; resends,
// duplicate inclusions, and block boundaries cannot change the arithmetic.
// Scripted fault behaviors wrap honest validators at the network boundary:
// crash drops a node entirely, mute suppresses its sends, equivocate splits
// its proposals into conflicting twins, and delay defers its outbound
// traffic past the view-change timeout.

#ifndef TESIM_CHAIN_RUNTIME_HPP
#define TESIM_CHAIN_RUNTIME_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tesim/admm_coordinator.hpp"
#include "tesim/consensus.hpp"
#include "tesim/ledger.hpp"
#include "tesim/local_optimizer.hpp"
#include "tesim/net_harness.hpp"
#include "tesim/scenario_io.hpp"

namespace tesim {

struct ChainOptions {
  std::int64_t block_reward_micro = 0;
  SimTime poll_tick = 10 * kMillisecond;      // validator proposal cadence
  SimTime driver_tick = 20 * kMillisecond;    // light-node orchestration cadence
  SimTime resend_after = 100 * kMillisecond;  // unconfirmed transaction retry
  SimTime drill_tx_every = 200 * kMillisecond;
  SimTime time_limit = 600 * kSecond;
  bool trace = false;
};

// Chain-level facts shared by trading runs and fault drills.
struct ChainReport {
  std::vector<std::int64_t> committed_heights;  // per validator
  std::int64_t max_height = 0;
  std::int64_t transactions = 0;   // applied on the longest chain
  int view_changes = 0;            // highest view any validator reached
  int safety_violations = 0;       // heights where committed chains disagree
  int equivocations_recorded = 0;  // conflicting proposals or votes observed
  int scripted_faults = 0;         // validators under a scripted behavior
  bool beyond_tolerance = false;   // scripted faults exceed f
  std::string chain_text;          // audit dump of the longest chain
};

enum class RunFailure : std::uint8_t {
  none = 0,
  non_convergence = 1,
  settlement_default = 2,
  consensus_stall = 3,
};

inline const char* run_failure_name(RunFailure f) {
  switch (f) {
    case RunFailure::none: return "ok";
    case RunFailure::non_convergence: return "non-convergence";
    case RunFailure::settlement_default: return "settlement-default";
    case RunFailure::consensus_stall: return "consensus-stall";
  }
  return "?";
}

struct ChainTradingResult {
  TradingOutcome outcome;
  std::vector<TransferIntent> settlement;
  std::vector<std::int64_t> final_balances_micro;  // per user, committed
  bool settled_on_chain = false;
  RunFailure failure = RunFailure::none;
  std::string failure_note;
  ChainReport chain;
  SimTime end_time = 0;
};

struct FaultDrillResult {
  ChainReport chain;
  bool stalled = false;
  SimTime end_time = 0;
};

namespace detail_chain {

struct Identity {
  Bytes priv;
  Bytes pub;
  AccountId id{};
};

inline Identity identity_for(const std::string& name) {
  Identity out;
  out.priv = private_key_for(name);
  out.pub = default_signature_scheme().derive_public(out.priv);
  out.id = account_id(out.pub);
  return out;
}

}  // namespace detail_chain

// Validators and light nodes wired over the discrete-event network. The
// harness owns the fault interpretation so the consensus state machines stay
// honest; a scripted behavior only filters or rewrites traffic at the edge.
class ChainHarness {
 public:
  ChainHarness(Scenario scen, ChainOptions opt)
      : scen_(std::move(scen)), opt_(opt), net_(scen_.net) {
    validate_scenario(scen_);
    nv_ = scen_.validators;
    nu_ = static_cast<int>(scen_.users.size());

    std::vector<AccountId> user_ids;
    for (int u = 0; u < nu_; ++u) {
      users_.push_back(detail_chain::identity_for("user" + std::to_string(u)));
      user_ids.push_back(users_.back().id);
      usr_node_.push_back(net_.add_node("user" + std::to_string(u)));
    }
    std::vector<AccountId> val_ids;
    std::vector<Bytes> val_pubs;
    for (int i = 0; i < nv_; ++i) {
      validators_.push_back(detail_chain::identity_for("validator" + std::to_string(i)));
      val_ids.push_back(validators_.back().id);
      val_pubs.push_back(validators_.back().pub);
      val_node_.push_back(net_.add_node("validator" + std::to_string(i)));
    }
    genesis_ = make_chain_state(user_ids, scen_.genesis_micro, val_ids, scen_.horizon,
                                scen_.coordinator, opt_.block_reward_micro, kBlockCapacity);

    ConsensusConfig base;
    base.n = nv_;
    base.timeout_base = timeout_from_latency(scen_.net);
    base.trace = opt_.trace;
    for (int i = 0; i < nv_; ++i) {
      ConsensusConfig cfg = base;
      cfg.index = i;
      vals_.push_back(std::make_unique<Validator>(cfg, genesis_, val_pubs,
                                                  validators_[static_cast<std::size_t>(i)].priv));
    }
    delay_amount_ = 2 * base.timeout_base;

    plans_.resize(static_cast<std::size_t>(nv_));
    std::set<int> scripted;
    for (const FaultEntry& f : scen_.net.faults) {
      int vi = -1;
      for (int i = 0; i < nv_; ++i) {
        if (f.node == "validator" + std::to_string(i)) vi = i;
      }
      if (vi < 0) {
        throw ValidationError("fault script: node '" + f.node + "' is not a validator");
      }
      auto& plan = plans_[static_cast<std::size_t>(vi)];
      if (f.behavior == "crash") plan.crash_at = f.activate_at;
      if (f.behavior == "mute") plan.mute_at = f.activate_at;
      if (f.behavior == "equivocate") plan.equivocate_at = f.activate_at;
      if (f.behavior == "delay") plan.delay_at = f.activate_at;
      scripted.insert(vi);
    }
    scripted_faults_ = static_cast<int>(scripted.size());

    timer_id_.assign(static_cast<std::size_t>(nv_), 0);
    timer_armed_.assign(static_cast<std::size_t>(nv_), 0);
    for (int i = 0; i < nv_; ++i) {
      net_.set_handler(val_node_[static_cast<std::size_t>(i)],
                       [this, i](int, const Bytes& payload, SimTime now) {
                         deliver(i, payload, now);
                       });
      schedule_poll(i);
    }
  }

  Network& network() { return net_; }
  const Scenario& scenario() const { return scen_; }
  int num_validators() const { return nv_; }
  int num_users() const { return nu_; }
  const Validator& validator(int i) const { return *vals_[static_cast<std::size_t>(i)]; }
  const AccountId& user_account(int u) const { return users_[static_cast<std::size_t>(u)].id; }

  // Fires once per block per committing validator.
  std::function<void(int validator, const Block&, SimTime)> on_commit;

  int best_validator() const {
    int best = 0;
    for (int i = 1; i < nv_; ++i) {
      if (vals_[static_cast<std::size_t>(i)]->committed_height() >
          vals_[static_cast<std::size_t>(best)]->committed_height()) {
        best = i;
      }
    }
    return best;
  }

  Transaction make_transfer(int from_user, int to_user, std::int64_t amount_micro,
                            std::uint64_t nonce) const {
    Transaction tx;
    tx.kind = TxKind::token_transfer;
    tx.sender_pub = users_[static_cast<std::size_t>(from_user)].pub;
    tx.nonce = nonce;
    tx.transfer.to = users_[static_cast<std::size_t>(to_user)].id;
    tx.transfer.amount_micro = amount_micro;
    sign_transaction(tx, users_[static_cast<std::size_t>(from_user)].priv);
    return tx;
  }

  Transaction make_report(int user, std::uint8_t phase, int iteration,
                          std::vector<std::int64_t> payload, std::uint64_t nonce) const {
    Transaction tx;
    tx.kind = TxKind::energy_trading;
    tx.sender_pub = users_[static_cast<std::size_t>(user)].pub;
    tx.nonce = nonce;
    tx.trading.phase = phase;
    tx.trading.iteration = iteration;
    tx.trading.payload_nano = std::move(payload);
    sign_transaction(tx, users_[static_cast<std::size_t>(user)].priv);
    return tx;
  }

  // Light-node gossip: the transaction goes to every validator directly.
  void submit_from_user(int user, const Transaction& tx) {
    ByteWriter w;
    w.u8(1);
    write_transaction(tx, w);
    const Bytes frame = w.take();
    for (int i = 0; i < nv_; ++i) {
      net_.send(usr_node_[static_cast<std::size_t>(user)], val_node_[static_cast<std::size_t>(i)],
                frame, "tx");
    }
  }

  ChainReport report() const {
    ChainReport r;
    for (int i = 0; i < nv_; ++i) {
      r.committed_heights.push_back(vals_[static_cast<std::size_t>(i)]->committed_height());
      if (r.committed_heights.back() > r.max_height) r.max_height = r.committed_heights.back();
      const auto view = static_cast<int>(vals_[static_cast<std::size_t>(i)]->view());
      if (view > r.view_changes) r.view_changes = view;
      r.equivocations_recorded += vals_[static_cast<std::size_t>(i)]->equivocations_seen();
    }
    for (std::int64_t h = 1; h <= r.max_height; ++h) {
      std::set<std::string> hashes;
      for (int i = 0; i < nv_; ++i) {
        const auto& chain = vals_[static_cast<std::size_t>(i)]->chain();
        if (static_cast<std::int64_t>(chain.size()) > h) {
          hashes.insert(hash_hex(block_hash(chain[static_cast<std::size_t>(h)])));
        }
      }
      if (hashes.size() > 1) r.safety_violations += 1;
    }
    const auto& best = vals_[static_cast<std::size_t>(best_validator())]->chain();
    for (std::size_t h = 1; h < best.size(); ++h) {
      r.transactions += static_cast<std::int64_t>(best[h].txs.size());
    }
    r.chain_text = dump_chain(best);
    r.scripted_faults = scripted_faults_;
    r.beyond_tolerance = scripted_faults_ > byzantine_tolerance(nv_);
    return r;
  }

 private:
  struct FaultPlan {
    SimTime crash_at = -1;
    SimTime mute_at = -1;
    SimTime equivocate_at = -1;
    SimTime delay_at = -1;
  };

  bool down(int vi, SimTime now) const {
    const auto& p = plans_[static_cast<std::size_t>(vi)];
    return p.crash_at >= 0 && now >= p.crash_at;
  }
  bool muted(int vi, SimTime now) const {
    const auto& p = plans_[static_cast<std::size_t>(vi)];
    return p.mute_at >= 0 && now >= p.mute_at;
  }
  bool equivocating(int vi, SimTime now) const {
    const auto& p = plans_[static_cast<std::size_t>(vi)];
    return p.equivocate_at >= 0 && now >= p.equivocate_at;
  }
  bool delayed(int vi, SimTime now) const {
    const auto& p = plans_[static_cast<std::size_t>(vi)];
    return p.delay_at >= 0 && now >= p.delay_at;
  }

  void schedule_poll(int vi) {
    net_.set_timer(val_node_[static_cast<std::size_t>(vi)], opt_.poll_tick,
                   [this, vi](SimTime now) {
                     if (!down(vi, now)) {
                       dispatch(vi, vals_[static_cast<std::size_t>(vi)]->poll(now), now);
                     }
                     schedule_poll(vi);
                   });
  }

  void deliver(int vi, const Bytes& payload, SimTime now) {
    if (down(vi, now)) return;
    try {
      ByteReader r(payload);
      const std::uint8_t tag = r.u8();
      if (tag == 0) {
        const ConsensusMessage m = read_message(r);
        dispatch(vi, vals_[static_cast<std::size_t>(vi)]->on_message(m, now), now);
      } else {
        const Transaction tx = read_transaction(r);
        dispatch(vi, vals_[static_cast<std::size_t>(vi)]->submit_transaction(tx, now), now);
      }
    } catch (const std::out_of_range&) {
      // Malformed frames are dropped; nothing in-protocol produces them.
    }
  }

  void dispatch(int vi, const Actions& acts, SimTime now) {
    for (const Block& b : acts.committed) {
      if (on_commit) on_commit(vi, b, now);
    }
    if (!down(vi, now) && !muted(vi, now)) {
      for (const ConsensusMessage& m : acts.outbound) emit(vi, m, now);
    }
    if (acts.deadline_update) {
      if (timer_armed_[static_cast<std::size_t>(vi)]) {
        net_.cancel_timer(timer_id_[static_cast<std::size_t>(vi)]);
        timer_armed_[static_cast<std::size_t>(vi)] = 0;
      }
      if (acts.deadline >= 0) {
        const SimTime delay = acts.deadline > now ? acts.deadline - now : 0;
        timer_id_[static_cast<std::size_t>(vi)] =
            net_.set_timer(val_node_[static_cast<std::size_t>(vi)], delay,
                           [this, vi](SimTime t) {
                             timer_armed_[static_cast<std::size_t>(vi)] = 0;
                             if (down(vi, t)) return;
                             dispatch(vi, vals_[static_cast<std::size_t>(vi)]->on_timeout(t), t);
                           });
        timer_armed_[static_cast<std::size_t>(vi)] = 1;
      }
    }
  }

  void send_frame(int vi, int to, const ConsensusMessage& m, SimTime now) {
    ByteWriter w;
    w.u8(0);
    write_message(m, w);
    const std::string tag = msg_kind_name(m.kind);
    if (delayed(vi, now)) {
      Bytes frame = w.take();
      net_.set_timer(val_node_[static_cast<std::size_t>(vi)], delay_amount_,
                     [this, vi, to, frame, tag](SimTime t) {
                       if (down(vi, t)) return;
                       net_.send(val_node_[static_cast<std::size_t>(vi)],
                                 val_node_[static_cast<std::size_t>(to)], frame, tag);
                     });
    } else {
      net_.send(val_node_[static_cast<std::size_t>(vi)],
                val_node_[static_cast<std::size_t>(to)], w.take(), tag);
    }
  }

  void emit(int vi, const ConsensusMessage& m, SimTime now) {
    const bool twin_mode = equivocating(vi, now) && m.kind == MsgKind::pre_prepare;
    ConsensusMessage twin;
    if (twin_mode) {
      // A timestamp twin executes to the same root, so both variants look
      // valid in isolation; only cross-checking exposes the equivocation.
      twin = m;
      twin.block.timestamp_us += 1;
      twin.signature = default_signature_scheme().sign(
          validators_[static_cast<std::size_t>(vi)].priv, message_signing_bytes(twin));
    }
    for (int to = 0; to < nv_; ++to) {
      if (to == vi) continue;
      send_frame(vi, to, m, now);
      // Both variants reach every peer; latency jitter decides which one a
      // peer adopts, so honest validators split and each records the clash.
      if (twin_mode) send_frame(vi, to, twin, now);
    }
  }

  Scenario scen_;
  ChainOptions opt_;
  Network net_;
  int nv_ = 0;
  int nu_ = 0;
  std::vector<detail_chain::Identity> users_;
  std::vector<detail_chain::Identity> validators_;
  std::vector<int> usr_node_;
  std::vector<int> val_node_;
  ChainState genesis_;
  std::vector<std::unique_ptr<Validator>> vals_;
  std::vector<FaultPlan> plans_;
  std::vector<std::uint64_t> timer_id_;
  std::vector<std::uint8_t> timer_armed_;
  SimTime delay_amount_ = 0;
  int scripted_faults_ = 0;
};

// Full trading day over the chain. The driver mirrors run_trading_day solve
// for solve: standalone baselines first, then one LLP solve per user per
// committed round, then settlement transfers once the coordinator settles.
inline ChainTradingResult run_chain_trading_day(const Scenario& scen, ChainOptions opt = {}) {
  ChainHarness h(scen, opt);
  const int n = h.num_users();
  const int horizon = scen.horizon;

  ChainTradingResult result;
  TradingOutcome& out = result.outcome;
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
    solvers.emplace_back(i, n, scen.users[static_cast<std::size_t>(i)].params,
                         scen.users[static_cast<std::size_t>(i)].exo);
  }
  for (int i = 0; i < n; ++i) {
    out.standalone_cost[static_cast<std::size_t>(i)] =
        solvers[static_cast<std::size_t>(i)].solve_emp().cost;
  }

  struct PendingReport {
    Transaction tx;
    SimTime last_sent = -1;
    bool active = false;
  };
  std::vector<PendingReport> reports(static_cast<std::size_t>(n));
  struct PendingTransfer {
    Transaction tx;
    int payer = 0;
    SimTime last_sent = -1;
  };
  std::vector<PendingTransfer> transfers;
  std::vector<std::int64_t> expected_balances;
  std::vector<double> last_cost(static_cast<std::size_t>(n), 0.0);
  int solved_tcmp = 0;
  int solved_tbap = 0;
  bool surplus_ready = false;
  bool outcome_ready = false;
  bool done = false;

  auto fill_from_coordinator = [&](const CoordinatorState& co) {
    out.tcmp_iterations = co.tcmp_iterations;
    out.tbap_iterations = co.tbap_iterations;
    out.trades_nano = co.trades_final;
    out.payments_nano = co.payments_final;
    out.trace = co.trace;
    out.trading_cost = last_cost;
    for (int i = 0; i < n; ++i) {
      out.surplus[static_cast<std::size_t>(i)] =
          out.standalone_cost[static_cast<std::size_t>(i)] -
          out.trading_cost[static_cast<std::size_t>(i)];
    }
  };

  auto resend_reports = [&](const CoordinatorState& co, SimTime now) {
    for (int i = 0; i < n; ++i) {
      auto& p = reports[static_cast<std::size_t>(i)];
      if (!p.active) continue;
      if (co.report_seen[static_cast<std::size_t>(i)]) {
        p.active = false;
        continue;
      }
      if (p.last_sent < 0 || now - p.last_sent >= opt.resend_after) {
        h.submit_from_user(i, p.tx);
        p.last_sent = now;
      }
    }
  };

  auto settle_step = [&](const ChainState& st, SimTime now) {
    const CoordinatorState& co = st.coordinator;
    if (!outcome_ready) {
      out.tcmp_converged = true;
      out.tbap_converged = true;
      fill_from_coordinator(co);
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
      result.settlement = settle_payments(out);
      expected_balances = scen.genesis_micro;
      try {
        apply_settlement(expected_balances, result.settlement);
      } catch (const InfeasibleError& e) {
        result.failure = RunFailure::settlement_default;
        result.failure_note = e.what();
        done = true;
        return;
      }
      std::vector<std::uint64_t> next_nonce(static_cast<std::size_t>(n));
      for (int u = 0; u < n; ++u) {
        next_nonce[static_cast<std::size_t>(u)] = st.accounts.at(h.user_account(u)).nonce;
      }
      for (const TransferIntent& leg : result.settlement) {
        PendingTransfer pt;
        pt.payer = leg.payer;
        pt.tx = h.make_transfer(leg.payer, leg.payee, leg.amount_micro,
                                next_nonce[static_cast<std::size_t>(leg.payer)]++);
        transfers.push_back(std::move(pt));
      }
      outcome_ready = true;
    }
    bool all_consumed = true;
    for (auto& pt : transfers) {
      if (st.accounts.at(h.user_account(pt.payer)).nonce > pt.tx.nonce) continue;
      all_consumed = false;
      if (pt.last_sent < 0 || now - pt.last_sent >= opt.resend_after) {
        h.submit_from_user(pt.payer, pt.tx);
        pt.last_sent = now;
      }
    }
    if (!all_consumed) return;
    for (int u = 0; u < n; ++u) {
      if (st.accounts.at(h.user_account(u)).balance_micro !=
          expected_balances[static_cast<std::size_t>(u)]) {
        result.failure = RunFailure::settlement_default;
        result.failure_note = "settlement default: committed balances diverge from the "
                              "cleared payments (a transfer leg was rejected on chain)";
        done = true;
        return;
      }
    }
    result.settled_on_chain = true;
    done = true;
  };

  auto driver_step = [&](SimTime now) {
    if (done) return;
    const ChainState& st = h.validator(h.best_validator()).state();
    const CoordinatorState& co = st.coordinator;
    switch (co.phase) {
      case TradingPhase::tcmp: {
        if (solved_tcmp < co.iteration) {
          for (int i = 0; i < n; ++i) {
            const LocalBroadcast b = broadcast_for(co, i);
            const Llp1Solution sol = solvers[static_cast<std::size_t>(i)].solve_llp1(b);
            last_cost[static_cast<std::size_t>(i)] = sol.operating_cost;
            auto& p = reports[static_cast<std::size_t>(i)];
            p.tx = h.make_report(i, 0, co.iteration, quantize_trades(sol.trades),
                                 st.accounts.at(h.user_account(i)).nonce);
            p.last_sent = -1;
            p.active = true;
          }
          solved_tcmp = co.iteration;
        }
        resend_reports(co, now);
        break;
      }
      case TradingPhase::tbap: {
        if (!surplus_ready) {
          for (int i = 0; i < n; ++i) {
            out.surplus[static_cast<std::size_t>(i)] =
                out.standalone_cost[static_cast<std::size_t>(i)] -
                last_cost[static_cast<std::size_t>(i)];
          }
          surplus_ready = true;
        }
        if (solved_tbap < co.iteration) {
          for (int i = 0; i < n; ++i) {
            const LocalBroadcast b = broadcast_for(co, i);
            const PaymentVector pay = solvers[static_cast<std::size_t>(i)].solve_llp2(
                out.surplus[static_cast<std::size_t>(i)], b);
            auto& p = reports[static_cast<std::size_t>(i)];
            p.tx = h.make_report(i, 1, co.iteration, quantize_payments(pay),
                                 st.accounts.at(h.user_account(i)).nonce);
            p.last_sent = -1;
            p.active = true;
          }
          solved_tbap = co.iteration;
        }
        resend_reports(co, now);
        break;
      }
      case TradingPhase::settled: {
        settle_step(st, now);
        break;
      }
      case TradingPhase::failed: {
        out.tcmp_converged = co.tbap_iterations > 0;
        out.tbap_converged = false;
        fill_from_coordinator(co);
        result.failure = RunFailure::non_convergence;
        result.failure_note = out.tcmp_converged
                                  ? "payment bargaining hit its iteration cap on chain"
                                  : "trade clearing hit its iteration cap on chain";
        done = true;
        break;
      }
    }
  };

  bool wake_pending = false;
  h.on_commit = [&](int, const Block&, SimTime) {
    if (wake_pending || done) return;
    wake_pending = true;
    h.network().set_timer(-1, 0, [&](SimTime t) {
      wake_pending = false;
      driver_step(t);
    });
  };
  std::function<void()> schedule_driver = [&]() {
    h.network().set_timer(-1, opt.driver_tick, [&](SimTime t) {
      driver_step(t);
      if (!done) schedule_driver();
    });
  };
  schedule_driver();

  const Network::RunResult rr = h.network().run_until([&]() { return done; }, opt.time_limit);
  result.end_time = rr.end_time;
  if (!done) {
    const ChainState& st = h.validator(h.best_validator()).state();
    const CoordinatorState& co = st.coordinator;
    out.tcmp_converged = false;
    out.tbap_converged = false;
    fill_from_coordinator(co);
    result.failure = RunFailure::consensus_stall;
    result.failure_note =
        rr.stalled ? "consensus stall: " + rr.stall_note
                   : "consensus stall: time limit reached at phase " +
                         std::string(phase_name(co.phase)) + " iteration " +
                         std::to_string(co.iteration);
  }

  const ChainState& final_state = h.validator(h.best_validator()).state();
  for (int u = 0; u < n; ++u) {
    result.final_balances_micro.push_back(final_state.accounts.at(h.user_account(u)).balance_micro);
  }
  result.chain = h.report();
  out.chain.on_chain = true;
  out.chain.committed_height = result.chain.max_height;
  out.chain.view_changes = result.chain.view_changes;
  out.chain.transactions = result.chain.transactions;
  out.chain.safety_violations = result.chain.safety_violations;
  return result;
}

// Consensus drill: steady transaction traffic plus heartbeats while the
// scripted behaviors play out; reports per-validator progress and the safety
// scan. Trading state is untouched, only token transfers flow.
inline FaultDrillResult run_fault_drill(const Scenario& scen, SimTime duration = 12 * kSecond,
                                        ChainOptions opt = {}) {
  if (scen.validators < 4) {
    throw ValidationError("fault drill: need at least 4 validators to tolerate one fault");
  }
  ChainHarness h(scen, opt);

  if (h.num_users() >= 2 && opt.drill_tx_every > 0) {
    // One timer per slot keeps the traffic schedule fixed regardless of how
    // fast the chain advances.
    auto pump_seq = std::make_shared<std::uint64_t>(0);
    const std::int64_t slots = duration / opt.drill_tx_every;
    for (std::int64_t k = 1; k <= slots; ++k) {
      h.network().set_timer(-1, k * opt.drill_tx_every, [&h, pump_seq](SimTime) {
        h.submit_from_user(0, h.make_transfer(0, 1, 1, (*pump_seq)++));
      });
    }
  }

  const Network::RunResult rr = h.network().run_for(duration);
  FaultDrillResult result;
  result.chain = h.report();
  result.stalled = rr.stalled;
  result.end_time = rr.end_time;
  return result;
}

}  // namespace tesim

#endif  // TESIM_CHAIN_RUNTIME_HPP
