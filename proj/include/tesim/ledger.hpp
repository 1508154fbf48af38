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
// Token accounts, transaction and block formats, and the replicated state
// machine that hosts the trading coordinator. Everything that gets hashed or
// signed goes through the canonical byte encoding, so every replica that
// replays the same block sequence lands on the same state root. Money is
// fixed-point with micro-token resolution (one token pegged to one fiat
// unit); rejected transactions consume the sender's nonce but change nothing
// else, which is what makes replays fail deterministically.

#ifndef TESIM_LEDGER_HPP
#define TESIM_LEDGER_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "tesim/admm_coordinator.hpp"
#include "tesim/bytes.hpp"
#include "tesim/crypto.hpp"
#include "tesim/errors.hpp"

namespace tesim {

using AccountId = Hash32;

inline AccountId account_id(const Bytes& public_key) {
  return sha256(public_key.data(), public_key.size());
}

inline std::string short_id(const AccountId& id) {
  return to_hex(Bytes(id.begin(), id.begin() + 4));
}

struct Account {
  std::int64_t balance_micro = 0;
  std::uint64_t nonce = 0;
};

inline constexpr int kBlockCapacity = 2000;

enum class TxKind : std::uint8_t { token_transfer = 0, energy_trading = 1 };

struct TokenTransferBody {
  AccountId to{};
  std::int64_t amount_micro = 0;
};

struct EnergyTradingBody {
  std::uint8_t phase = 0;  // TradingPhase the report targets
  std::int32_t iteration = 1;
  std::vector<std::int64_t> payload_nano;
};

struct Transaction {
  TxKind kind = TxKind::token_transfer;
  Bytes sender_pub;
  std::uint64_t nonce = 0;
  TokenTransferBody transfer;
  EnergyTradingBody trading;
  Bytes signature;
};

inline void write_transaction_unsigned(const Transaction& tx, ByteWriter& w) {
  w.u8(static_cast<std::uint8_t>(tx.kind));
  w.bytes(tx.sender_pub);
  w.u64(tx.nonce);
  if (tx.kind == TxKind::token_transfer) {
    w.raw(tx.transfer.to.data(), tx.transfer.to.size());
    w.i64(tx.transfer.amount_micro);
  } else {
    w.u8(tx.trading.phase);
    w.u64(static_cast<std::uint64_t>(tx.trading.iteration));
    w.i64_vec(tx.trading.payload_nano);
  }
}

inline Bytes signing_bytes(const Transaction& tx) {
  ByteWriter w;
  write_transaction_unsigned(tx, w);
  return w.take();
}

inline void write_transaction(const Transaction& tx, ByteWriter& w) {
  write_transaction_unsigned(tx, w);
  w.bytes(tx.signature);
}

inline Transaction read_transaction(ByteReader& r) {
  Transaction tx;
  tx.kind = static_cast<TxKind>(r.u8());
  tx.sender_pub = r.bytes();
  tx.nonce = r.u64();
  if (tx.kind == TxKind::token_transfer) {
    for (auto& b : tx.transfer.to) b = r.u8();
    tx.transfer.amount_micro = r.i64();
  } else {
    tx.trading.phase = r.u8();
    tx.trading.iteration = static_cast<std::int32_t>(r.u64());
    tx.trading.payload_nano = r.i64_vec();
  }
  tx.signature = r.bytes();
  return tx;
}

inline Hash32 tx_hash(const Transaction& tx) {
  ByteWriter w;
  write_transaction(tx, w);
  return sha256(w.data());
}

inline void sign_transaction(Transaction& tx, const Bytes& private_key,
                             const SignatureScheme& scheme = default_signature_scheme()) {
  tx.signature = scheme.sign(private_key, signing_bytes(tx));
}

// The replicated state every validator executes against. The coordinator is
// the hosted contract: trading reports land in it, and the round update runs
// inside the same deterministic transaction application step.
struct ChainState {
  std::map<AccountId, Account> accounts;
  std::vector<AccountId> user_accounts;       // index = trading user
  std::map<AccountId, int> user_of;
  std::vector<AccountId> validator_accounts;  // index = validator
  CoordinatorState coordinator;
  std::int64_t block_reward_micro = 0;
  int block_capacity = kBlockCapacity;
  std::int64_t minted_micro = 0;  // rewards issued so far
};

inline ChainState make_chain_state(const std::vector<AccountId>& user_accounts,
                                   const std::vector<std::int64_t>& genesis_micro,
                                   const std::vector<AccountId>& validator_accounts,
                                   int horizon, const CoordinatorConfig& cfg,
                                   std::int64_t block_reward_micro = 0,
                                   int block_capacity = kBlockCapacity) {
  if (user_accounts.size() != genesis_micro.size()) {
    throw ValidationError("ledger: genesis balances must match user accounts");
  }
  if (block_capacity < 1) throw ValidationError("ledger: block capacity must be >= 1");
  if (block_reward_micro < 0) throw ValidationError("ledger: block reward must be >= 0");
  ChainState st;
  st.user_accounts = user_accounts;
  st.validator_accounts = validator_accounts;
  for (std::size_t i = 0; i < user_accounts.size(); ++i) {
    if (genesis_micro[i] < 0) throw ValidationError("ledger: negative genesis balance");
    if (st.accounts.count(user_accounts[i])) {
      throw ValidationError("ledger: duplicate genesis account");
    }
    st.accounts[user_accounts[i]] = Account{genesis_micro[i], 0};
    st.user_of[user_accounts[i]] = static_cast<int>(i);
  }
  for (const auto& v : validator_accounts) {
    if (!st.accounts.count(v)) st.accounts[v] = Account{0, 0};
  }
  st.coordinator = make_coordinator(static_cast<int>(user_accounts.size()), horizon, cfg);
  st.block_reward_micro = block_reward_micro;
  st.block_capacity = block_capacity;
  return st;
}

inline Hash32 state_root(const ChainState& st) {
  ByteWriter w;
  w.u32(static_cast<std::uint32_t>(st.accounts.size()));
  for (const auto& [id, acct] : st.accounts) {
    w.raw(id.data(), id.size());
    w.i64(acct.balance_micro);
    w.u64(acct.nonce);
  }
  w.u32(static_cast<std::uint32_t>(st.user_accounts.size()));
  for (const auto& id : st.user_accounts) w.raw(id.data(), id.size());
  w.u32(static_cast<std::uint32_t>(st.validator_accounts.size()));
  for (const auto& id : st.validator_accounts) w.raw(id.data(), id.size());
  write_coordinator(st.coordinator, w);
  w.i64(st.block_reward_micro);
  w.u32(static_cast<std::uint32_t>(st.block_capacity));
  w.i64(st.minted_micro);
  return sha256(w.data());
}

inline std::int64_t total_balance(const ChainState& st) {
  std::int64_t sum = 0;
  for (const auto& [id, acct] : st.accounts) sum += acct.balance_micro;
  return sum;
}

enum class TxResult : std::uint8_t {
  accepted = 0,
  bad_signature,
  unknown_sender,
  stale_nonce,
  bad_amount,
  insufficient_balance,
  not_a_user,
  wrong_iteration,
  wrong_phase,
  duplicate_report,
  bad_dimensions,
};

inline const char* tx_result_name(TxResult r) {
  switch (r) {
    case TxResult::accepted: return "accepted";
    case TxResult::bad_signature: return "bad_signature";
    case TxResult::unknown_sender: return "unknown_sender";
    case TxResult::stale_nonce: return "stale_nonce";
    case TxResult::bad_amount: return "bad_amount";
    case TxResult::insufficient_balance: return "insufficient_balance";
    case TxResult::not_a_user: return "not_a_user";
    case TxResult::wrong_iteration: return "wrong_iteration";
    case TxResult::wrong_phase: return "wrong_phase";
    case TxResult::duplicate_report: return "duplicate_report";
    case TxResult::bad_dimensions: return "bad_dimensions";
  }
  return "unknown";
}

// Applies one transaction. Signature and sender checks happen before the
// nonce is touched; past that point the nonce is consumed whether or not the
// body is accepted, so a committed transaction can never replay.
inline TxResult apply_transaction(ChainState& st, const Transaction& tx,
                                  const SignatureScheme& scheme = default_signature_scheme()) {
  if (!scheme.verify(tx.sender_pub, signing_bytes(tx), tx.signature)) {
    return TxResult::bad_signature;
  }
  const AccountId sender = account_id(tx.sender_pub);
  const auto it = st.accounts.find(sender);
  if (it == st.accounts.end()) return TxResult::unknown_sender;
  Account& acct = it->second;
  if (tx.nonce != acct.nonce) return TxResult::stale_nonce;
  acct.nonce += 1;

  if (tx.kind == TxKind::token_transfer) {
    if (tx.transfer.amount_micro <= 0) return TxResult::bad_amount;
    if (acct.balance_micro < tx.transfer.amount_micro) return TxResult::insufficient_balance;
    acct.balance_micro -= tx.transfer.amount_micro;
    st.accounts[tx.transfer.to].balance_micro += tx.transfer.amount_micro;
    return TxResult::accepted;
  }

  const auto user_it = st.user_of.find(sender);
  if (user_it == st.user_of.end()) return TxResult::not_a_user;
  const int user = user_it->second;
  SubmitStatus status;
  if (tx.trading.phase == static_cast<std::uint8_t>(TradingPhase::tcmp)) {
    status = submit_trade_report(st.coordinator, user, tx.trading.iteration,
                                 tx.trading.payload_nano);
  } else if (tx.trading.phase == static_cast<std::uint8_t>(TradingPhase::tbap)) {
    status = submit_payment_report(st.coordinator, user, tx.trading.iteration,
                                   tx.trading.payload_nano);
  } else {
    return TxResult::wrong_phase;
  }
  switch (status) {
    case SubmitStatus::accepted:
    case SubmitStatus::round_complete: return TxResult::accepted;
    case SubmitStatus::duplicate_report: return TxResult::duplicate_report;
    case SubmitStatus::wrong_iteration: return TxResult::wrong_iteration;
    case SubmitStatus::wrong_phase: return TxResult::wrong_phase;
    case SubmitStatus::bad_dimensions: return TxResult::bad_dimensions;
    case SubmitStatus::unknown_user: return TxResult::not_a_user;
  }
  return TxResult::bad_dimensions;
}

struct Block {
  std::int64_t height = 0;
  std::int64_t view = 0;
  Hash32 parent_hash{};
  std::int64_t timestamp_us = 0;
  std::int32_t proposer = 0;  // validator index
  std::vector<Transaction> txs;
  Hash32 state_root{};
  std::vector<std::pair<std::int32_t, Bytes>> quorum;  // validator index, signature
};

inline void write_block_core(const Block& b, ByteWriter& w) {
  w.i64(b.height);
  w.i64(b.view);
  w.raw(b.parent_hash.data(), b.parent_hash.size());
  w.i64(b.timestamp_us);
  w.u32(static_cast<std::uint32_t>(b.proposer));
  w.u32(static_cast<std::uint32_t>(b.txs.size()));
  for (const auto& tx : b.txs) write_transaction(tx, w);
  w.raw(b.state_root.data(), b.state_root.size());
}

inline Hash32 block_hash(const Block& b) {
  ByteWriter w;
  write_block_core(b, w);
  return sha256(w.data());
}

inline void write_block(const Block& b, ByteWriter& w) {
  write_block_core(b, w);
  w.u32(static_cast<std::uint32_t>(b.quorum.size()));
  for (const auto& [validator, sig] : b.quorum) {
    w.u32(static_cast<std::uint32_t>(validator));
    w.bytes(sig);
  }
}

inline Block read_block(ByteReader& r) {
  Block b;
  b.height = r.i64();
  b.view = r.i64();
  for (auto& x : b.parent_hash) x = r.u8();
  b.timestamp_us = r.i64();
  b.proposer = static_cast<std::int32_t>(r.u32());
  const std::uint32_t n = r.u32();
  b.txs.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) b.txs.push_back(read_transaction(r));
  for (auto& x : b.state_root) x = r.u8();
  const std::uint32_t q = r.u32();
  for (std::uint32_t i = 0; i < q; ++i) {
    const auto validator = static_cast<std::int32_t>(r.u32());
    b.quorum.emplace_back(validator, r.bytes());
  }
  return b;
}

// Executes a block body against the state: every transaction in order, then
// the proposer's reward. Returns one result per transaction.
inline std::vector<TxResult> exec_block(ChainState& st, const Block& b,
                                        const SignatureScheme& scheme =
                                            default_signature_scheme()) {
  if (static_cast<int>(b.txs.size()) > st.block_capacity) {
    throw ValidationError("ledger: block exceeds capacity " +
                          std::to_string(st.block_capacity));
  }
  std::vector<TxResult> results;
  results.reserve(b.txs.size());
  for (const auto& tx : b.txs) results.push_back(apply_transaction(st, tx, scheme));
  if (st.block_reward_micro > 0 && b.height > 0) {
    const auto idx = static_cast<std::size_t>(b.proposer);
    if (idx >= st.validator_accounts.size()) {
      throw ValidationError("ledger: block proposer index out of range");
    }
    st.accounts[st.validator_accounts[idx]].balance_micro += st.block_reward_micro;
    st.minted_micro += st.block_reward_micro;
  }
  return results;
}

// One settlement leg: trading user indices, amount in micro tokens.
struct TransferIntent {
  int payer = 0;
  int payee = 0;
  std::int64_t amount_micro = 0;
};

// Turns the bargained payment matrix into transfer legs. Positive entries
// pay; the nano amounts are apportioned onto the micro grid by the largest
// remainder rule so the legs sum exactly to the rounded total.
inline std::vector<TransferIntent> settle_payments(const TradingOutcome& out) {
  if (!out.converged()) {
    throw ContractViolation("settlement requires a settled trading outcome");
  }
  struct Leg {
    int payer;
    int payee;
    std::int64_t base;
    std::int64_t rem;
  };
  std::vector<Leg> legs;
  std::int64_t total_nano = 0;
  for (int i = 0; i < out.num_users; ++i) {
    for (int j = 0; j < out.num_users; ++j) {
      if (i == j) continue;
      const std::int64_t p =
          out.payments_nano[static_cast<std::size_t>(i * out.num_users + j)];
      if (p > 0) {
        legs.push_back({i, j, p / 1000, p % 1000});
        total_nano += p;
      }
    }
  }
  const std::int64_t target_micro = (total_nano + 500) / 1000;
  std::int64_t assigned = 0;
  for (const auto& leg : legs) assigned += leg.base;
  std::int64_t extra = target_micro - assigned;

  std::vector<std::size_t> order(legs.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&legs](std::size_t a, std::size_t b) {
    if (legs[a].rem != legs[b].rem) return legs[a].rem > legs[b].rem;
    if (legs[a].payer != legs[b].payer) return legs[a].payer < legs[b].payer;
    return legs[a].payee < legs[b].payee;
  });
  for (std::size_t k = 0; k < order.size() && extra > 0; ++k, --extra) {
    legs[order[k]].base += 1;
  }

  std::vector<TransferIntent> intents;
  intents.reserve(legs.size());
  for (const auto& leg : legs) {
    if (leg.base > 0) intents.push_back({leg.payer, leg.payee, leg.base});
  }
  std::sort(intents.begin(), intents.end(), [](const TransferIntent& a, const TransferIntent& b) {
    if (a.payer != b.payer) return a.payer < b.payer;
    return a.payee < b.payee;
  });
  return intents;
}

// Applies settlement legs to a plain balance table, in the deterministic
// (payer, payee) order. Aborts naming the defaulting user if any leg cannot
// be covered at its turn.
inline void apply_settlement(std::vector<std::int64_t>& balances_micro,
                             const std::vector<TransferIntent>& intents) {
  for (const auto& leg : intents) {
    auto& from = balances_micro.at(static_cast<std::size_t>(leg.payer));
    auto& to = balances_micro.at(static_cast<std::size_t>(leg.payee));
    if (from < leg.amount_micro) {
      throw InfeasibleError("settlement default: user " + std::to_string(leg.payer) +
                            " holds " + std::to_string(from) + " micro, owes " +
                            std::to_string(leg.amount_micro));
    }
    from -= leg.amount_micro;
    to += leg.amount_micro;
  }
}

// Full-chain audit dump: one line per block, one indented line per
// transaction, all values from the canonical encodings.
inline std::string dump_chain(const std::vector<Block>& blocks) {
  std::string out;
  for (const auto& b : blocks) {
    out += "block height=" + std::to_string(b.height) + " view=" + std::to_string(b.view) +
           " proposer=" + std::to_string(b.proposer) + " txs=" + std::to_string(b.txs.size()) +
           " hash=" + hash_hex(block_hash(b)).substr(0, 16) +
           " parent=" + hash_hex(b.parent_hash).substr(0, 16) +
           " root=" + hash_hex(b.state_root).substr(0, 16) + "\n";
    for (const auto& tx : b.txs) {
      const AccountId sender = account_id(tx.sender_pub);
      if (tx.kind == TxKind::token_transfer) {
        out += "  transfer from=" + short_id(sender) + " to=" + short_id(tx.transfer.to) +
               " amount_micro=" + std::to_string(tx.transfer.amount_micro) +
               " nonce=" + std::to_string(tx.nonce) + "\n";
      } else {
        out += "  trading from=" + short_id(sender) +
               " phase=" + std::to_string(static_cast<int>(tx.trading.phase)) +
               " iteration=" + std::to_string(tx.trading.iteration) +
               " values=" + std::to_string(tx.trading.payload_nano.size()) +
               " nonce=" + std::to_string(tx.nonce) + "\n";
      }
    }
  }
  return out;
}

}  // namespace tesim

#endif  // TESIM_LEDGER_HPP
