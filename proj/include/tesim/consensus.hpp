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
// PBFT-style three-phase replication among a fixed validator set: the view's
// round-robin primary proposes, replicas prepare once the proposal's state
// root replays cleanly, commit on a prepare quorum, and execute on a commit
// quorum. Timeouts drive view changes carrying the latest prepared
// certificate; un-prepared candidates are discarded. Each validator is an
// isolated deterministic state machine: handlers consume one message at a
// time and return the messages to broadcast plus any blocks committed, so
// identical inbox orders replay identical chains. A replica that misses a
// committed block (crash, partition) stays at its height; in-protocol state
// transfer is out of scope, and quorums only need 2f+1 of n = 3f+1.

#ifndef TESIM_CONSENSUS_HPP
#define TESIM_CONSENSUS_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tesim/crypto.hpp"
#include "tesim/errors.hpp"
#include "tesim/ledger.hpp"
#include "tesim/net_harness.hpp"

namespace tesim {

inline int byzantine_tolerance(int n) { return (n - 1) / 3; }
inline int quorum_size(int n) { return 2 * byzantine_tolerance(n) + 1; }

enum class MsgKind : std::uint8_t {
  pre_prepare = 0,
  prepare = 1,
  commit = 2,
  view_change = 3,
  new_view = 4,
};

inline const char* msg_kind_name(MsgKind k) {
  switch (k) {
    case MsgKind::pre_prepare: return "pre_prepare";
    case MsgKind::prepare: return "prepare";
    case MsgKind::commit: return "commit";
    case MsgKind::view_change: return "view_change";
    case MsgKind::new_view: return "new_view";
  }
  return "unknown";
}

// A prepare quorum witnessed for one block; carried through view changes so
// a value that might have committed survives the primary's failure.
struct PreparedCert {
  Block block;
  std::vector<std::pair<std::int32_t, Bytes>> votes;  // validator, sig over block hash
};

struct ConsensusMessage {
  MsgKind kind = MsgKind::prepare;
  std::int64_t view = 0;
  std::int64_t height = 0;
  std::int32_t sender = 0;
  Block block;          // pre_prepare and new_view carry the proposal
  Hash32 block_hash{};  // prepare and commit vote for this hash
  Bytes cert_sig;       // signature over the bare block hash, reusable in certificates
  bool has_prepared = false;
  PreparedCert prepared;  // view_change proof, new_view justification
  Bytes signature;
};

inline void write_prepared_cert(const PreparedCert& c, ByteWriter& w) {
  write_block(c.block, w);
  w.u32(static_cast<std::uint32_t>(c.votes.size()));
  for (const auto& [validator, sig] : c.votes) {
    w.u32(static_cast<std::uint32_t>(validator));
    w.bytes(sig);
  }
}

inline PreparedCert read_prepared_cert(ByteReader& r) {
  PreparedCert c;
  c.block = read_block(r);
  const std::uint32_t n = r.u32();
  for (std::uint32_t i = 0; i < n; ++i) {
    const auto validator = static_cast<std::int32_t>(r.u32());
    c.votes.emplace_back(validator, r.bytes());
  }
  return c;
}

inline void write_message_unsigned(const ConsensusMessage& m, ByteWriter& w) {
  w.u8(static_cast<std::uint8_t>(m.kind));
  w.i64(m.view);
  w.i64(m.height);
  w.u32(static_cast<std::uint32_t>(m.sender));
  switch (m.kind) {
    case MsgKind::pre_prepare:
      write_block(m.block, w);
      break;
    case MsgKind::prepare:
    case MsgKind::commit:
      w.raw(m.block_hash.data(), m.block_hash.size());
      w.bytes(m.cert_sig);
      break;
    case MsgKind::view_change:
      w.u8(m.has_prepared ? 1 : 0);
      if (m.has_prepared) write_prepared_cert(m.prepared, w);
      break;
    case MsgKind::new_view:
      w.u8(m.has_prepared ? 1 : 0);
      if (m.has_prepared) write_prepared_cert(m.prepared, w);
      write_block(m.block, w);
      break;
  }
}

inline Bytes message_signing_bytes(const ConsensusMessage& m) {
  ByteWriter w;
  write_message_unsigned(m, w);
  return w.take();
}

inline void write_message(const ConsensusMessage& m, ByteWriter& w) {
  write_message_unsigned(m, w);
  w.bytes(m.signature);
}

inline ConsensusMessage read_message(ByteReader& r) {
  ConsensusMessage m;
  m.kind = static_cast<MsgKind>(r.u8());
  m.view = r.i64();
  m.height = r.i64();
  m.sender = static_cast<std::int32_t>(r.u32());
  switch (m.kind) {
    case MsgKind::pre_prepare:
      m.block = read_block(r);
      break;
    case MsgKind::prepare:
    case MsgKind::commit:
      for (auto& b : m.block_hash) b = r.u8();
      m.cert_sig = r.bytes();
      break;
    case MsgKind::view_change:
      m.has_prepared = r.u8() != 0;
      if (m.has_prepared) m.prepared = read_prepared_cert(r);
      break;
    case MsgKind::new_view:
      m.has_prepared = r.u8() != 0;
      if (m.has_prepared) m.prepared = read_prepared_cert(r);
      m.block = read_block(r);
      break;
  }
  m.signature = r.bytes();
  return m;
}

struct ConsensusConfig {
  int index = 0;
  int n = 4;
  SimTime timeout_base = 40 * kMillisecond;  // 4x the mean one-way delay
  SimTime heartbeat = 400 * kMillisecond;    // empty-block cadence when idle
  bool trace = false;
};

// Derives the view-change timeout base from the harness latency band. Six
// worst-case one-way hops cover submission fan-in, the poll delay before a
// proposal, and both vote rounds with margin to spare.
inline SimTime timeout_from_latency(const NetConfig& net) {
  const SimTime max_one_way = net.latency_max_ms * kMillisecond;
  return 6 * (max_one_way > 0 ? max_one_way : kMillisecond);
}

// What one event-handler call asks the runtime to do.
struct Actions {
  std::vector<ConsensusMessage> outbound;  // broadcast to all other validators
  std::vector<Block> committed;            // executed this step, in order
  bool deadline_update = false;
  SimTime deadline = -1;  // absolute; -1 disarms the round timer
};

class Validator {
 public:
  Validator(ConsensusConfig cfg, ChainState genesis, std::vector<Bytes> validator_pubs,
            Bytes private_key, const SignatureScheme& scheme = default_signature_scheme())
      : cfg_(std::move(cfg)),
        state_(std::move(genesis)),
        pubs_(std::move(validator_pubs)),
        priv_(std::move(private_key)),
        scheme_(scheme) {
    if (cfg_.n < 1 || static_cast<int>(pubs_.size()) != cfg_.n) {
      throw ContractViolation("consensus: validator set size mismatch");
    }
    if (cfg_.index < 0 || cfg_.index >= cfg_.n) {
      throw ContractViolation("consensus: validator index out of range");
    }
    Block genesis_block;
    genesis_block.height = 0;
    genesis_block.state_root = state_root(state_);
    chain_.push_back(genesis_block);
  }

  int primary_of(std::int64_t view) const {
    return static_cast<int>(view % static_cast<std::int64_t>(cfg_.n));
  }
  bool is_primary() const { return primary_of(view_) == cfg_.index; }
  std::int64_t view() const { return view_; }
  std::int64_t committed_height() const { return chain_.back().height; }
  const std::vector<Block>& chain() const { return chain_; }
  const ChainState& state() const { return state_; }
  int view_changes_completed() const { return view_changes_completed_; }
  int equivocations_seen() const { return equivocations_seen_; }
  int invalid_signatures() const { return invalid_signatures_; }
  int invalid_blocks() const { return invalid_blocks_; }
  std::size_t mempool_size() const { return mempool_.size(); }
  const std::vector<std::string>& trace_log() const { return trace_; }

  // Queues a transaction. Proposals happen on poll, on an explicit propose
  // call, or right after a commit frees the height, so submissions batch.
  Actions submit_transaction(const Transaction& tx, SimTime now) {
    Actions acts;
    const Hash32 h = tx_hash(tx);
    const std::string key = hash_hex(h);
    if (seen_txs_.count(key)) return acts;
    seen_txs_.insert(key);
    mempool_.push_back({now, key, tx});
    arm_if_pending(now, acts);
    return acts;
  }

  // Periodic driver hook: proposes pending work or an empty heartbeat block.
  Actions poll(SimTime now) {
    Actions acts;
    maybe_propose(now, acts);
    if (is_primary() && phase_ == Phase::idle && mempool_.empty() &&
        now - last_block_time_ >= cfg_.heartbeat) {
      propose_block(now, {}, acts);
    }
    arm_if_pending(now, acts);
    return acts;
  }

  // Builds and signs this primary's proposal outside the normal poll flow.
  ConsensusMessage propose(SimTime now) {
    if (!is_primary()) {
      throw ContractViolation("consensus: non-primary validator cannot propose");
    }
    Actions acts;
    propose_block(now, pending_batch(), acts);
    if (acts.outbound.empty()) {
      throw ContractViolation("consensus: a proposal is already in flight");
    }
    return acts.outbound.front();
  }

  Actions on_timeout(SimTime now) {
    Actions acts;
    if (phase_ == Phase::idle && mempool_.empty()) return acts;  // nothing outstanding
    consecutive_timeouts_ += 1;
    const std::int64_t target = view_ + 1;
    ConsensusMessage vc;
    vc.kind = MsgKind::view_change;
    vc.view = target;
    vc.height = next_height();
    vc.sender = cfg_.index;
    if (prepared_cert_.has_value()) {
      vc.has_prepared = true;
      vc.prepared = *prepared_cert_;
    }
    sign(vc);
    record_view_change(vc);
    acts.outbound.push_back(vc);
    trace_out(vc);
    check_view_change(target, now, acts);
    acts.deadline_update = true;
    acts.deadline = now + current_timeout();
    deadline_ = acts.deadline;
    return acts;
  }

  Actions on_message(const ConsensusMessage& msg, SimTime now) {
    Actions acts;
    if (msg.sender < 0 || msg.sender >= cfg_.n || msg.sender == cfg_.index) return acts;
    if (!scheme_.verify(pubs_[static_cast<std::size_t>(msg.sender)],
                        message_signing_bytes(msg), msg.signature)) {
      invalid_signatures_ += 1;
      return acts;
    }
    trace_in(msg);
    switch (msg.kind) {
      case MsgKind::pre_prepare: handle_pre_prepare(msg, now, acts); break;
      case MsgKind::prepare: handle_vote(msg, now, acts); break;
      case MsgKind::commit: handle_vote(msg, now, acts); break;
      case MsgKind::view_change: handle_view_change(msg, now, acts); break;
      case MsgKind::new_view: handle_new_view(msg, now, acts); break;
    }
    arm_if_pending(now, acts);
    return acts;
  }

 private:
  enum class Phase : std::uint8_t { idle = 0, pre_prepared, prepared, committed };

  struct PendingTx {
    SimTime arrived;
    std::string hash;
    Transaction tx;
  };

  std::int64_t next_height() const { return chain_.back().height + 1; }

  SimTime current_timeout() const {
    const int shift = consecutive_timeouts_ < 20 ? consecutive_timeouts_ : 20;
    return cfg_.timeout_base << shift;
  }

  void sign(ConsensusMessage& m) { m.signature = scheme_.sign(priv_, message_signing_bytes(m)); }

  void trace_in(const ConsensusMessage& m) {
    if (!cfg_.trace) return;
    trace_.push_back("recv " + std::string(msg_kind_name(m.kind)) + " v=" +
                     std::to_string(m.view) + " h=" + std::to_string(m.height) +
                     " from=" + std::to_string(m.sender));
  }

  void trace_out(const ConsensusMessage& m) {
    if (!cfg_.trace) return;
    trace_.push_back("send " + std::string(msg_kind_name(m.kind)) + " v=" +
                     std::to_string(m.view) + " h=" + std::to_string(m.height));
  }

  // Mempool slice in arrival-then-hash order, up to the block capacity.
  std::vector<Transaction> pending_batch() const {
    std::vector<const PendingTx*> order;
    order.reserve(mempool_.size());
    for (const auto& p : mempool_) order.push_back(&p);
    std::stable_sort(order.begin(), order.end(), [](const PendingTx* a, const PendingTx* b) {
      if (a->arrived != b->arrived) return a->arrived < b->arrived;
      return a->hash < b->hash;
    });
    std::vector<Transaction> batch;
    const std::size_t cap = static_cast<std::size_t>(state_.block_capacity);
    for (const auto* p : order) {
      if (batch.size() == cap) break;
      batch.push_back(p->tx);
    }
    return batch;
  }

  void maybe_propose(SimTime now, Actions& acts) {
    if (!is_primary() || phase_ != Phase::idle || mempool_.empty()) return;
    propose_block(now, pending_batch(), acts);
  }

  void propose_block(SimTime now, const std::vector<Transaction>& txs, Actions& acts) {
    if (phase_ != Phase::idle) return;
    Block b;
    b.height = next_height();
    b.view = view_;
    b.parent_hash = block_hash(chain_.back());
    b.timestamp_us = now;
    b.proposer = cfg_.index;
    b.txs = txs;
    ChainState scratch = state_;
    exec_block(scratch, b, scheme_);
    b.state_root = state_root(scratch);

    ConsensusMessage pp;
    pp.kind = MsgKind::pre_prepare;
    pp.view = view_;
    pp.height = b.height;
    pp.sender = cfg_.index;
    pp.block = b;
    sign(pp);
    acts.outbound.push_back(pp);
    trace_out(pp);

    adopt_candidate(b, std::move(scratch), now, acts);
  }

  // Progress re-bases the round timer so only genuine silence triggers it.
  void touch_deadline(SimTime now, Actions& acts) {
    deadline_ = now + current_timeout();
    acts.deadline_update = true;
    acts.deadline = deadline_;
  }

  // Candidate accepted (own proposal or verified pre-prepare): move to
  // pre-prepared and cast our prepare vote.
  void adopt_candidate(const Block& b, ChainState&& executed, SimTime now, Actions& acts) {
    candidate_ = b;
    candidate_hash_ = block_hash(b);
    spec_state_ = std::move(executed);
    phase_ = Phase::pre_prepared;
    touch_deadline(now, acts);

    ConsensusMessage prep;
    prep.kind = MsgKind::prepare;
    prep.view = view_;
    prep.height = b.height;
    prep.sender = cfg_.index;
    prep.block_hash = candidate_hash_;
    prep.cert_sig = scheme_.sign(priv_, hash_bytes(candidate_hash_));
    sign(prep);
    prepare_votes_[hash_hex(candidate_hash_)][cfg_.index] = prep.cert_sig;
    acts.outbound.push_back(prep);
    trace_out(prep);
    advance_tallies(now, acts);
  }

  void buffer_future(const ConsensusMessage& msg) {
    if (future_.size() < 10000) future_.push_back(msg);
  }

  void handle_pre_prepare(const ConsensusMessage& msg, SimTime now, Actions& acts) {
    if (msg.view > view_ || msg.height > next_height()) {
      buffer_future(msg);
      return;
    }
    if (msg.view < view_ || msg.height != next_height()) return;
    if (msg.sender != primary_of(msg.view)) return;
    accept_proposal(msg.block, now, acts);
  }

  void accept_proposal(const Block& b, SimTime now, Actions& acts) {
    const Hash32 h = block_hash(b);
    const std::string slot = std::to_string(view_) + ":" + std::to_string(b.height);
    const auto seen = pre_prepared_at_.find(slot);
    if (seen != pre_prepared_at_.end()) {
      if (seen->second != hash_hex(h)) equivocations_seen_ += 1;
      return;  // first proposal in a slot wins; a conflicting second is recorded
    }
    if (b.view != view_ || b.height != next_height()) return;
    if (b.parent_hash != block_hash(chain_.back())) {
      invalid_blocks_ += 1;
      return;
    }
    if (static_cast<int>(b.txs.size()) > state_.block_capacity) {
      invalid_blocks_ += 1;
      return;
    }
    ChainState scratch = state_;
    try {
      exec_block(scratch, b, scheme_);
    } catch (const std::exception&) {
      invalid_blocks_ += 1;
      return;
    }
    if (state_root(scratch) != b.state_root) {
      invalid_blocks_ += 1;  // speculative execution disagrees with the proposer
      return;
    }
    pre_prepared_at_[slot] = hash_hex(h);
    if (phase_ != Phase::idle) return;
    adopt_candidate(b, std::move(scratch), now, acts);
  }

  void handle_vote(const ConsensusMessage& msg, SimTime now, Actions& acts) {
    if (msg.view > view_ || msg.height > next_height()) {
      buffer_future(msg);
      return;
    }
    if (msg.view < view_ || msg.height != next_height()) return;
    if (!scheme_.verify(pubs_[static_cast<std::size_t>(msg.sender)],
                        hash_bytes(msg.block_hash), msg.cert_sig)) {
      invalid_signatures_ += 1;
      return;
    }
    auto& tally = msg.kind == MsgKind::prepare ? prepare_votes_ : commit_votes_;
    const std::string key = hash_hex(msg.block_hash);
    auto& votes = tally[key];
    const auto it = votes.find(msg.sender);
    if (it != votes.end()) {
      return;  // repeated vote, first one stands
    }
    for (const auto& [other_key, other_votes] : tally) {
      if (other_key != key && other_votes.count(msg.sender)) {
        equivocations_seen_ += 1;  // same validator voting two hashes in one slot
        return;
      }
    }
    votes[msg.sender] = msg.cert_sig;
    advance_tallies(now, acts);
  }

  void advance_tallies(SimTime now, Actions& acts) {
    if (phase_ == Phase::idle || !candidate_.has_value()) return;
    const std::string key = hash_hex(candidate_hash_);
    const int q = quorum_size(cfg_.n);

    if (phase_ == Phase::pre_prepared &&
        static_cast<int>(prepare_votes_[key].size()) >= q) {
      phase_ = Phase::prepared;
      touch_deadline(now, acts);
      PreparedCert cert;
      cert.block = *candidate_;
      for (const auto& [validator, sig] : prepare_votes_[key]) {
        cert.votes.emplace_back(validator, sig);
      }
      prepared_cert_ = cert;

      ConsensusMessage cm;
      cm.kind = MsgKind::commit;
      cm.view = view_;
      cm.height = candidate_->height;
      cm.sender = cfg_.index;
      cm.block_hash = candidate_hash_;
      cm.cert_sig = scheme_.sign(priv_, hash_bytes(candidate_hash_));
      sign(cm);
      commit_votes_[key][cfg_.index] = cm.cert_sig;
      acts.outbound.push_back(cm);
      trace_out(cm);
    }

    if (phase_ == Phase::prepared && static_cast<int>(commit_votes_[key].size()) >= q) {
      Block done = *candidate_;
      for (const auto& [validator, sig] : commit_votes_[key]) {
        done.quorum.emplace_back(validator, sig);
        if (static_cast<int>(done.quorum.size()) == q) break;
      }
      state_ = std::move(spec_state_);
      chain_.push_back(done);
      acts.committed.push_back(done);
      for (const auto& tx : done.txs) {
        const std::string txkey = hash_hex(tx_hash(tx));
        seen_txs_.erase(txkey);  // readmittable: replay protection lives in the nonce
        for (std::size_t k = 0; k < mempool_.size(); ++k) {
          if (mempool_[k].hash == txkey) {
            mempool_.erase(mempool_.begin() + static_cast<std::ptrdiff_t>(k));
            break;
          }
        }
      }
      last_block_time_ = now;
      consecutive_timeouts_ = 0;
      deadline_ = -1;  // the next height starts its own timeout from scratch
      acts.deadline_update = true;
      acts.deadline = -1;
      clear_round();
      replay_future(now, acts);  // messages for the next height may have raced ahead
      maybe_propose(now, acts);
    }
  }

  void clear_round() {
    phase_ = Phase::idle;
    candidate_.reset();
    prepared_cert_.reset();
    prepare_votes_.clear();
    commit_votes_.clear();
    pre_prepared_at_.clear();
  }

  void record_view_change(const ConsensusMessage& vc) {
    view_change_votes_[vc.view][vc.sender] = vc;
  }

  bool cert_valid(const PreparedCert& cert) const {
    const Hash32 h = block_hash(cert.block);
    std::set<std::int32_t> seen;
    int valid = 0;
    for (const auto& [validator, sig] : cert.votes) {
      if (validator < 0 || validator >= cfg_.n || seen.count(validator)) continue;
      if (scheme_.verify(pubs_[static_cast<std::size_t>(validator)], hash_bytes(h), sig)) {
        seen.insert(validator);
        valid += 1;
      }
    }
    return valid >= quorum_size(cfg_.n);
  }

  void handle_view_change(const ConsensusMessage& msg, SimTime now, Actions& acts) {
    if (msg.view <= view_) return;
    record_view_change(msg);
    check_view_change(msg.view, now, acts);
  }

  void check_view_change(std::int64_t target, SimTime now, Actions& acts) {
    const auto it = view_change_votes_.find(target);
    if (it == view_change_votes_.end()) return;
    if (static_cast<int>(it->second.size()) < quorum_size(cfg_.n)) return;
    if (target <= view_) return;

    // Carry the highest prepared certificate present in the quorum.
    std::optional<PreparedCert> carried;
    std::int64_t carried_view = -1;
    for (const auto& [sender, vc] : it->second) {
      if (vc.has_prepared && vc.prepared.block.height == next_height() &&
          vc.prepared.block.view > carried_view && cert_valid(vc.prepared)) {
        carried = vc.prepared;
        carried_view = vc.prepared.block.view;
      }
    }
    if (prepared_cert_.has_value() && prepared_cert_->block.view > carried_view) {
      carried = prepared_cert_;
    }

    enter_view(target);
    view_changes_completed_ += 1;

    if (is_primary()) {
      Block b;
      if (carried.has_value()) {
        b = carried->block;  // re-propose the prepared value in the new view
        b.view = view_;
        b.proposer = cfg_.index;
        b.quorum.clear();
      } else {
        b.height = next_height();
        b.view = view_;
        b.parent_hash = block_hash(chain_.back());
        b.timestamp_us = now;
        b.proposer = cfg_.index;
        b.txs = pending_batch();
      }
      ChainState scratch = state_;
      exec_block(scratch, b, scheme_);
      b.state_root = state_root(scratch);

      ConsensusMessage nv;
      nv.kind = MsgKind::new_view;
      nv.view = view_;
      nv.height = b.height;
      nv.sender = cfg_.index;
      nv.block = b;
      if (carried.has_value()) {
        nv.has_prepared = true;
        nv.prepared = *carried;
      }
      sign(nv);
      acts.outbound.push_back(nv);
      trace_out(nv);
      adopt_candidate(b, std::move(scratch), now, acts);
    }
    acts.deadline_update = true;
    acts.deadline = now + current_timeout();
    deadline_ = acts.deadline;
    replay_future(now, acts);
  }

  void enter_view(std::int64_t target) {
    view_ = target;
    phase_ = Phase::idle;
    candidate_.reset();  // un-prepared candidates are discarded
    prepare_votes_.clear();
    commit_votes_.clear();
    pre_prepared_at_.clear();
    for (auto it = view_change_votes_.begin(); it != view_change_votes_.end();) {
      it = it->first <= view_ ? view_change_votes_.erase(it) : ++it;
    }
  }

  void handle_new_view(const ConsensusMessage& msg, SimTime now, Actions& acts) {
    if (msg.view < view_) return;
    if (msg.sender != primary_of(msg.view)) return;
    if (msg.has_prepared && !cert_valid(msg.prepared)) {
      invalid_blocks_ += 1;  // carried certificate lacks a valid prepare quorum
      return;
    }
    if (msg.view > view_) {
      enter_view(msg.view);
      view_changes_completed_ += 1;
    }
    accept_proposal(msg.block, now, acts);
    replay_future(now, acts);
  }

  void replay_future(SimTime now, Actions& acts) {
    if (future_.empty()) return;
    std::vector<ConsensusMessage> ready;
    std::vector<ConsensusMessage> still_future;
    for (auto& m : future_) {
      const bool due = m.view <= view_ && m.height <= next_height();
      (due ? ready : still_future).push_back(std::move(m));
    }
    future_ = std::move(still_future);
    for (const auto& m : ready) {
      if (m.view < view_) continue;
      switch (m.kind) {
        case MsgKind::pre_prepare: handle_pre_prepare(m, now, acts); break;
        case MsgKind::prepare:
        case MsgKind::commit: handle_vote(m, now, acts); break;
        case MsgKind::view_change: handle_view_change(m, now, acts); break;
        case MsgKind::new_view: handle_new_view(m, now, acts); break;
      }
    }
  }

  // Keeps the round timer armed exactly while something is outstanding.
  void arm_if_pending(SimTime now, Actions& acts) {
    const bool outstanding = phase_ != Phase::idle || !mempool_.empty();
    if (outstanding && deadline_ < 0) {
      deadline_ = now + current_timeout();
      acts.deadline_update = true;
      acts.deadline = deadline_;
    } else if (!outstanding && deadline_ >= 0) {
      deadline_ = -1;
      acts.deadline_update = true;
      acts.deadline = -1;
    }
  }

  ConsensusConfig cfg_;
  ChainState state_;
  std::vector<Bytes> pubs_;
  Bytes priv_;
  const SignatureScheme& scheme_;

  std::vector<Block> chain_;
  std::int64_t view_ = 0;
  Phase phase_ = Phase::idle;
  std::optional<Block> candidate_;
  Hash32 candidate_hash_{};
  ChainState spec_state_;
  std::optional<PreparedCert> prepared_cert_;

  std::map<std::string, std::map<std::int32_t, Bytes>> prepare_votes_;
  std::map<std::string, std::map<std::int32_t, Bytes>> commit_votes_;
  std::map<std::int64_t, std::map<std::int32_t, ConsensusMessage>> view_change_votes_;
  std::map<std::string, std::string> pre_prepared_at_;  // "view:height" -> block hash
  std::vector<ConsensusMessage> future_;

  std::vector<PendingTx> mempool_;
  std::set<std::string> seen_txs_;

  SimTime last_block_time_ = 0;
  SimTime deadline_ = -1;
  int consecutive_timeouts_ = 0;
  int view_changes_completed_ = 0;
  int equivocations_seen_ = 0;
  int invalid_signatures_ = 0;
  int invalid_blocks_ = 0;
  std::vector<std::string> trace_;
};

}  // namespace tesim

#endif  // TESIM_CONSENSUS_HPP
