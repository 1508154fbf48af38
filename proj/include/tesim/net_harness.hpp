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
// Deterministic discrete-event network. Simulated time is int64 microseconds;
// events are processed in (time, sequence) order by a single-threaded loop,
// so equal seeds and configs replay byte-identical event logs. Latency and
// drops come from one seeded generator; partitions suppress cross-group
// traffic during their windows; fault scripts are carried as data for the
// consensus layer to interpret.

#ifndef TESIM_NET_HARNESS_HPP
#define TESIM_NET_HARNESS_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tesim/bytes.hpp"
#include "tesim/errors.hpp"

namespace tesim {

using SimTime = std::int64_t;  // microseconds
inline constexpr SimTime kMillisecond = 1000;
inline constexpr SimTime kSecond = 1000 * kMillisecond;

// During [from, until) the listed nodes can talk among themselves but not
// across to the rest of the network.
struct PartitionWindow {
  SimTime from = 0;
  SimTime until = 0;
  std::vector<std::string> isolated;
};

// Scheduled misbehavior. The network only validates and carries the script;
// the consensus layer decides what each behavior means.
struct FaultEntry {
  std::string node;
  std::string behavior;  // one of: crash, mute, equivocate, delay
  SimTime activate_at = 0;
};

struct NetConfig {
  std::uint64_t seed = 1;
  std::int64_t latency_min_ms = 5;
  std::int64_t latency_max_ms = 15;
  double drop_probability = 0.0;
  std::vector<PartitionWindow> partitions;
  std::vector<FaultEntry> faults;
};

inline void validate_net_config(const NetConfig& cfg) {
  auto fail = [](const std::string& msg) { throw ValidationError("NetConfig: " + msg); };
  if (!(cfg.drop_probability >= 0.0 && cfg.drop_probability <= 1.0)) {
    fail("drop_probability outside [0,1]");
  }
  if (cfg.latency_min_ms < 0) fail("latency_min_ms must be >= 0");
  if (cfg.latency_max_ms < cfg.latency_min_ms) fail("latency_max_ms below latency_min_ms");
  for (const auto& w : cfg.partitions) {
    if (w.until < w.from) fail("partition window ends before it starts");
    if (w.isolated.empty()) fail("partition window isolates no nodes");
  }
  static const std::set<std::string> known = {"crash", "mute", "equivocate", "delay"};
  for (const auto& f : cfg.faults) {
    if (!known.count(f.behavior)) fail("unknown fault behavior '" + f.behavior + "'");
    if (f.activate_at < 0) fail("fault activation time must be >= 0");
  }
}

class Network {
 public:
  using MessageHandler = std::function<void(int from, const Bytes& payload, SimTime now)>;

  explicit Network(NetConfig cfg) : cfg_(std::move(cfg)), rng_(cfg_.seed) {
    validate_net_config(cfg_);
  }

  int add_node(const std::string& name) {
    if (sealed_) throw ContractViolation("net: nodes must be added before traffic starts");
    if (ids_.count(name)) throw ValidationError("net: duplicate node name '" + name + "'");
    const int id = static_cast<int>(names_.size());
    ids_[name] = id;
    names_.push_back(name);
    handlers_.emplace_back();
    return id;
  }

  int node_id(const std::string& name) const {
    auto it = ids_.find(name);
    if (it == ids_.end()) throw ValidationError("net: unknown node '" + name + "'");
    return it->second;
  }

  const std::string& node_name(int id) const { return names_.at(static_cast<std::size_t>(id)); }
  int node_count() const { return static_cast<int>(names_.size()); }
  SimTime now() const { return now_; }
  const NetConfig& config() const { return cfg_; }
  const std::vector<FaultEntry>& fault_script() const { return cfg_.faults; }

  void set_handler(int node, MessageHandler h) {
    handlers_.at(static_cast<std::size_t>(node)) = std::move(h);
  }

  // Queues a delivery (or records a drop) for a point-to-point message.
  void send(int from, int to, Bytes payload, const std::string& tag) {
    seal();
    if (from == to) throw ContractViolation("net: node cannot message itself");
    check_node(from);
    check_node(to);
    log_line("S t=" + std::to_string(now_) + " " + names_[static_cast<std::size_t>(from)] +
             ">" + names_[static_cast<std::size_t>(to)] + " " + tag + " " +
             std::to_string(payload.size()) + "B");
    if (is_cut(from, to, now_)) {
      log_line("X t=" + std::to_string(now_) + " " + names_[static_cast<std::size_t>(from)] +
               ">" + names_[static_cast<std::size_t>(to)] + " " + tag + " partition");
      return;
    }
    if (cfg_.drop_probability > 0.0 && unit_draw() < cfg_.drop_probability) {
      log_line("X t=" + std::to_string(now_) + " " + names_[static_cast<std::size_t>(from)] +
               ">" + names_[static_cast<std::size_t>(to)] + " " + tag + " random");
      return;
    }
    Event e;
    e.at = now_ + sample_latency();
    e.seq = ++seq_;
    e.kind = Event::message;
    e.from = from;
    e.to = to;
    e.payload = std::move(payload);
    e.tag = tag;
    queue_.push(std::move(e));
  }

  void broadcast(int from, const Bytes& payload, const std::string& tag) {
    for (int to = 0; to < node_count(); ++to) {
      if (to != from) send(from, to, payload, tag);
    }
  }

  // One-shot timer. node is only used for labeling; -1 reads as the driver.
  std::uint64_t set_timer(int node, SimTime delay, std::function<void(SimTime)> cb) {
    seal();
    if (delay < 0) throw ContractViolation("net: negative timer delay");
    Event e;
    e.at = now_ + delay;
    e.seq = ++seq_;
    e.kind = Event::timer;
    e.from = node;
    e.timer_id = ++timer_ids_;
    e.timer_cb = std::move(cb);
    queue_.push(std::move(e));
    return timer_ids_;
  }

  void cancel_timer(std::uint64_t id) { canceled_.insert(id); }

  struct RunResult {
    bool condition_met = false;
    bool stalled = false;
    SimTime end_time = 0;
    std::string stall_note;
  };

  // Processes events in order until the condition holds, the queue drains
  // (stall), or the next event lies beyond the time limit.
  RunResult run_until(const std::function<bool()>& condition, SimTime time_limit) {
    seal();
    RunResult r;
    if (condition && condition()) {
      r.condition_met = true;
      r.end_time = now_;
      return r;
    }
    while (!queue_.empty()) {
      if (queue_.top().at > time_limit) {
        now_ = time_limit;
        r.end_time = now_;
        return r;
      }
      step_one();
      if (condition && condition()) {
        r.condition_met = true;
        r.end_time = now_;
        return r;
      }
    }
    r.stalled = true;
    r.end_time = now_;
    r.stall_note = "event queue drained at t=" + std::to_string(now_) +
                   " with the stop condition unmet";
    log_line("! " + r.stall_note);
    return r;
  }

  RunResult run_for(SimTime duration) {
    return run_until(nullptr, now_ + duration);
  }

  const std::vector<std::string>& event_log() const { return log_; }

  std::string log_text() const {
    std::string out;
    for (const auto& line : log_) {
      out += line;
      out += '\n';
    }
    return out;
  }

 private:
  struct Event {
    SimTime at = 0;
    std::uint64_t seq = 0;
    enum Kind { message, timer } kind = message;
    int from = -1;
    int to = -1;
    Bytes payload;
    std::string tag;
    std::uint64_t timer_id = 0;
    std::function<void(SimTime)> timer_cb;
  };
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.at != b.at) return a.at > b.at;
      return a.seq > b.seq;
    }
  };

  void check_node(int id) const {
    if (id < 0 || id >= node_count()) {
      throw ValidationError("net: node id " + std::to_string(id) + " not registered");
    }
  }

  // Resolves partition and fault references once the topology is final.
  void seal() {
    if (sealed_) return;
    sealed_ = true;
    partition_sets_.clear();
    for (const auto& w : cfg_.partitions) {
      std::set<int> members;
      for (const auto& name : w.isolated) members.insert(node_id(name));
      partition_sets_.push_back(std::move(members));
    }
    for (const auto& f : cfg_.faults) node_id(f.node);
  }

  bool is_cut(int a, int b, SimTime t) const {
    for (std::size_t k = 0; k < partition_sets_.size(); ++k) {
      const auto& w = cfg_.partitions[k];
      if (t < w.from || t >= w.until) continue;
      const bool a_in = partition_sets_[k].count(a) > 0;
      const bool b_in = partition_sets_[k].count(b) > 0;
      if (a_in != b_in) return true;
    }
    return false;
  }

  double unit_draw() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

  SimTime sample_latency() {
    const std::int64_t lo = cfg_.latency_min_ms * kMillisecond;
    const std::int64_t hi = cfg_.latency_max_ms * kMillisecond;
    if (hi == lo) return lo;
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(rng_() % span);
  }

  void step_one() {
    Event e = queue_.top();
    queue_.pop();
    now_ = e.at;
    if (e.kind == Event::timer) {
      if (canceled_.count(e.timer_id)) {
        canceled_.erase(e.timer_id);
        return;
      }
      const std::string who = e.from >= 0 ? names_[static_cast<std::size_t>(e.from)] : "driver";
      log_line("T t=" + std::to_string(now_) + " " + who + " timer " +
               std::to_string(e.timer_id));
      if (e.timer_cb) e.timer_cb(now_);
      return;
    }
    if (is_cut(e.from, e.to, now_)) {
      log_line("X t=" + std::to_string(now_) + " " + names_[static_cast<std::size_t>(e.from)] +
               ">" + names_[static_cast<std::size_t>(e.to)] + " " + e.tag + " partition");
      return;
    }
    log_line("D t=" + std::to_string(now_) + " " + names_[static_cast<std::size_t>(e.from)] +
             ">" + names_[static_cast<std::size_t>(e.to)] + " " + e.tag);
    auto& h = handlers_[static_cast<std::size_t>(e.to)];
    if (h) h(e.from, e.payload, now_);
  }

  void log_line(std::string line) { log_.push_back(std::move(line)); }

  NetConfig cfg_;
  std::mt19937_64 rng_;
  std::map<std::string, int> ids_;
  std::vector<std::string> names_;
  std::vector<MessageHandler> handlers_;
  std::vector<std::set<int>> partition_sets_;
  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  std::set<std::uint64_t> canceled_;
  std::vector<std::string> log_;
  SimTime now_ = 0;
  std::uint64_t seq_ = 0;
  std::uint64_t timer_ids_ = 0;
  bool sealed_ = false;
};

}  // namespace tesim

#endif  // TESIM_NET_HARNESS_HPP
