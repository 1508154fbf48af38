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
// Scenario files, synthetic data generation, and result export.
//
// A scenario is one JSON document: run-wide settings plus one entry per
// household, with the hourly series embedded as arrays or referenced as a
// delimited CSV next to the scenario file (docs/scenario_format.md describes
// the schema, the CSV column order, and how to map licensed datasets onto
// it). Loading validates every invariant and names the offending user and
// field. Exports are line-delimited UTF-8 and byte-stable for a given
// outcome, and saving a loaded scenario reproduces an equivalent document.

#ifndef TESIM_SCENARIO_IO_HPP
#define TESIM_SCENARIO_IO_HPP

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "tesim/admm_coordinator.hpp"
#include "tesim/energy_model.hpp"
#include "tesim/errors.hpp"
#include "tesim/fixed_point.hpp"
#include "tesim/net_harness.hpp"

namespace tesim {

struct Scenario {
  std::string name = "scenario";
  int horizon = 0;
  double slot_hours = 1.0;
  std::uint64_t seed = 1;
  int validators = 4;
  CoordinatorConfig coordinator;
  NetConfig net;
  std::vector<TradingUser> users;
  std::vector<std::int64_t> genesis_micro;  // starting token balance per user
};



inline int scenario_user_count(const Scenario& s) {
  return static_cast<int>(s.users.size());
}

inline void validate_scenario(const Scenario& s) {
  if (s.horizon < 1) throw ValidationError("scenario: horizon must be >= 1");
  if (!(s.slot_hours > 0.0)) throw ValidationError("scenario: slot_hours must be > 0");
  if (s.users.empty()) throw ValidationError("scenario: at least one user required");
  if (s.validators < 1) throw ValidationError("scenario: validator count must be >= 1");
  if (!s.net.faults.empty() && s.validators < 4) {
    throw ValidationError("scenario: fault scripts need at least 4 validators");
  }
  if (s.genesis_micro.size() != s.users.size()) {
    throw ValidationError("scenario: genesis balance list must have one entry per user");
  }
  validate_net_config(s.net);
  for (std::size_t u = 0; u < s.users.size(); ++u) {
    const std::string who = "user " + std::to_string(u);
    const auto& exo = s.users[u].exo;
    if (exo.horizon != s.horizon) {
      throw ValidationError("scenario: " + who + ": series horizon " +
                            std::to_string(exo.horizon) + " != scenario horizon " +
                            std::to_string(s.horizon));
    }
    if (exo.slot_hours != s.slot_hours) {
      throw ValidationError("scenario: " + who + ": slot_hours differs from scenario");
    }
    try {
      validate_params(s.users[u].params, s.horizon);
      validate_exogenous(exo);
    } catch (const ValidationError& e) {
      throw ValidationError("scenario: " + who + ": " + e.what());
    }
  }
}

// Shortest decimal form that parses back to the same double; keeps every
// emitted file byte-stable.
inline std::string fmt_double(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

namespace detail_scen {

using Json = nlohmann::ordered_json;

inline const Json& require_field(const Json& obj, const std::string& key,
                                 const std::string& ctx) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    throw ValidationError("scenario: " + ctx + ": missing field '" + key + "'");
  }
  return *it;
}

inline double num_field(const Json& obj, const std::string& key, const std::string& ctx) {
  const Json& v = require_field(obj, key, ctx);
  if (!v.is_number()) {
    throw ValidationError("scenario: " + ctx + ": field '" + key + "' must be a number");
  }
  return v.get<double>();
}

inline double num_or(const Json& obj, const std::string& key, double fallback,
                     const std::string& ctx) {
  return obj.contains(key) ? num_field(obj, key, ctx) : fallback;
}

inline bool bool_or(const Json& obj, const std::string& key, bool fallback,
                    const std::string& ctx) {
  const auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_boolean()) {
    throw ValidationError("scenario: " + ctx + ": field '" + key + "' must be a boolean");
  }
  return it->get<bool>();
}

inline std::vector<double> series_field(const Json& obj, const std::string& key,
                                        int horizon, const std::string& ctx) {
  const Json& v = require_field(obj, key, ctx);
  if (!v.is_array()) {
    throw ValidationError("scenario: " + ctx + ": field '" + key + "' must be an array");
  }
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& e : v) {
    if (!e.is_number()) {
      throw ValidationError("scenario: " + ctx + ": field '" + key +
                            "' must contain only numbers");
    }
    out.push_back(e.get<double>());
  }
  if (static_cast<int>(out.size()) != horizon) {
    throw ValidationError("scenario: " + ctx + ": field '" + key + "': expected " +
                          std::to_string(horizon) + " values, got " +
                          std::to_string(out.size()));
  }
  return out;
}

inline Json params_to_json(const HouseholdParams& p) {
  Json j = Json::object();
  j["thermal_capacity"] = p.thermal_capacity;
  j["thermal_resistance"] = p.thermal_resistance;
  j["hvac_coeff"] = p.hvac_coeff;
  j["temp_ref"] = p.temp_ref;
  j["temp_min"] = p.temp_min;
  j["temp_max"] = p.temp_max;
  j["discomfort_ac"] = p.discomfort_ac;
  j["flex_total"] = p.flex_total;
  j["flex_window"] = p.flex_window;
  j["flex_min"] = p.flex_min;
  j["flex_max"] = p.flex_max;
  j["flex_ref"] = p.flex_ref;
  j["discomfort_flex"] = p.discomfort_flex;
  j["grid_cap"] = p.grid_cap;
  j["energy_price"] = p.energy_price;
  j["peak_price"] = p.peak_price;
  j["battery_capacity"] = p.battery_capacity;
  j["charge_eff"] = p.charge_eff;
  j["discharge_eff"] = p.discharge_eff;
  j["soc_min_frac"] = p.soc_min_frac;
  j["soc_max_frac"] = p.soc_max_frac;
  j["charge_cap"] = p.charge_cap;
  j["discharge_cap"] = p.discharge_cap;
  j["soc_initial"] = p.soc_initial;
  j["battery_wear"] = p.battery_wear;
  j["cyclic_storage"] = p.cyclic_storage;
  return j;
}

inline HouseholdParams params_from_json(const Json& j, int horizon, const std::string& ctx) {
  HouseholdParams p;
  p.thermal_capacity = num_or(j, "thermal_capacity", p.thermal_capacity, ctx);
  p.thermal_resistance = num_or(j, "thermal_resistance", p.thermal_resistance, ctx);
  p.hvac_coeff = num_or(j, "hvac_coeff", p.hvac_coeff, ctx);
  p.temp_ref = num_or(j, "temp_ref", p.temp_ref, ctx);
  p.temp_min = num_or(j, "temp_min", p.temp_min, ctx);
  p.temp_max = num_or(j, "temp_max", p.temp_max, ctx);
  p.discomfort_ac = num_or(j, "discomfort_ac", p.discomfort_ac, ctx);
  p.flex_total = num_or(j, "flex_total", p.flex_total, ctx);
  if (j.contains("flex_window")) {
    for (const auto& e : j.at("flex_window")) p.flex_window.push_back(e.get<int>());
  }
  if (j.contains("flex_min")) p.flex_min = series_field(j, "flex_min", horizon, ctx);
  if (j.contains("flex_max")) p.flex_max = series_field(j, "flex_max", horizon, ctx);
  if (j.contains("flex_ref")) p.flex_ref = series_field(j, "flex_ref", horizon, ctx);
  p.discomfort_flex = num_or(j, "discomfort_flex", p.discomfort_flex, ctx);
  p.grid_cap = num_or(j, "grid_cap", p.grid_cap, ctx);
  p.energy_price = num_or(j, "energy_price", p.energy_price, ctx);
  p.peak_price = num_or(j, "peak_price", p.peak_price, ctx);
  p.battery_capacity = num_or(j, "battery_capacity", p.battery_capacity, ctx);
  p.charge_eff = num_or(j, "charge_eff", p.charge_eff, ctx);
  p.discharge_eff = num_or(j, "discharge_eff", p.discharge_eff, ctx);
  p.soc_min_frac = num_or(j, "soc_min_frac", p.soc_min_frac, ctx);
  p.soc_max_frac = num_or(j, "soc_max_frac", p.soc_max_frac, ctx);
  p.charge_cap = num_or(j, "charge_cap", p.charge_cap, ctx);
  p.discharge_cap = num_or(j, "discharge_cap", p.discharge_cap, ctx);
  p.soc_initial = num_or(j, "soc_initial", p.soc_initial, ctx);
  p.battery_wear = num_or(j, "battery_wear", p.battery_wear, ctx);
  p.cyclic_storage = bool_or(j, "cyclic_storage", p.cyclic_storage, ctx);
  return p;
}

inline Json net_to_json(const NetConfig& n) {
  Json j = Json::object();
  j["seed"] = n.seed;
  j["latency_min_ms"] = n.latency_min_ms;
  j["latency_max_ms"] = n.latency_max_ms;
  j["drop_probability"] = n.drop_probability;
  Json parts = Json::array();
  for (const auto& w : n.partitions) {
    Json p = Json::object();
    p["from_us"] = w.from;
    p["until_us"] = w.until;
    p["isolated"] = w.isolated;
    parts.push_back(std::move(p));
  }
  j["partitions"] = std::move(parts);
  Json faults = Json::array();
  for (const auto& f : n.faults) {
    Json p = Json::object();
    p["node"] = f.node;
    p["behavior"] = f.behavior;
    p["activate_at_us"] = f.activate_at;
    faults.push_back(std::move(p));
  }
  j["faults"] = std::move(faults);
  return j;
}

inline NetConfig net_from_json(const Json& j) {
  NetConfig n;
  const std::string ctx = "net";
  if (j.contains("seed")) n.seed = j.at("seed").get<std::uint64_t>();
  n.latency_min_ms = static_cast<std::int64_t>(num_or(j, "latency_min_ms",
      static_cast<double>(n.latency_min_ms), ctx));
  n.latency_max_ms = static_cast<std::int64_t>(num_or(j, "latency_max_ms",
      static_cast<double>(n.latency_max_ms), ctx));
  n.drop_probability = num_or(j, "drop_probability", n.drop_probability, ctx);
  if (j.contains("partitions")) {
    for (const auto& e : j.at("partitions")) {
      PartitionWindow w;
      w.from = e.at("from_us").get<SimTime>();
      w.until = e.at("until_us").get<SimTime>();
      for (const auto& name : require_field(e, "isolated", ctx)) {
        w.isolated.push_back(name.get<std::string>());
      }
      n.partitions.push_back(std::move(w));
    }
  }
  if (j.contains("faults")) {
    for (const auto& e : j.at("faults")) {
      FaultEntry f;
      f.node = require_field(e, "node", ctx).get<std::string>();
      f.behavior = require_field(e, "behavior", ctx).get<std::string>();
      f.activate_at = e.contains("activate_at_us") ? e.at("activate_at_us").get<SimTime>() : 0;
      n.faults.push_back(std::move(f));
    }
  }
  return n;
}

inline Json coordinator_to_json(const CoordinatorConfig& c) {
  Json j = Json::object();
  j["eps1"] = c.eps1;
  j["eps2"] = c.eps2;
  j["diminishing_rho"] = c.diminishing_rho;
  j["fixed_rho"] = c.fixed_rho;
  j["max_iter_tcmp"] = c.max_iter_tcmp;
  j["max_iter_tbap"] = c.max_iter_tbap;
  return j;
}

inline CoordinatorConfig coordinator_from_json(const Json& j) {
  CoordinatorConfig c;
  const std::string ctx = "coordinator";
  c.eps1 = num_or(j, "eps1", c.eps1, ctx);
  c.eps2 = num_or(j, "eps2", c.eps2, ctx);
  c.diminishing_rho = bool_or(j, "diminishing_rho", c.diminishing_rho, ctx);
  c.fixed_rho = num_or(j, "fixed_rho", c.fixed_rho, ctx);
  c.max_iter_tcmp = static_cast<int>(num_or(j, "max_iter_tcmp",
      static_cast<double>(c.max_iter_tcmp), ctx));
  c.max_iter_tbap = static_cast<int>(num_or(j, "max_iter_tbap",
      static_cast<double>(c.max_iter_tbap), ctx));
  return c;
}

// CSV series files carry one row per slot with the documented column order.
inline ExogenousSeries series_from_csv(const std::filesystem::path& path, int horizon,
                                       double slot_hours, const std::string& ctx) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("scenario: " + ctx + ": cannot read series file '" +
                          path.string() + "'");
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw ValidationError("scenario: " + ctx + ": series file '" + path.string() +
                          "' is empty");
  }
  if (line != "slot,load_kw,solar_kw,t_out_c") {
    throw ValidationError("scenario: " + ctx + ": series file '" + path.string() +
                          "' must start with header slot,load_kw,solar_kw,t_out_c");
  }
  ExogenousSeries exo;
  exo.horizon = horizon;
  exo.slot_hours = slot_hours;
  int row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream cells(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(cells, cell, ',')) {
      try {
        vals.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw ValidationError("scenario: " + ctx + ": series file '" + path.string() +
                              "' row " + std::to_string(row + 1) + ": bad number '" +
                              cell + "'");
      }
    }
    if (vals.size() != 4) {
      throw ValidationError("scenario: " + ctx + ": series file '" + path.string() +
                            "' row " + std::to_string(row + 1) + ": expected 4 columns");
    }
    exo.inflexible_load.push_back(vals[1]);
    exo.renewable_avail.push_back(vals[2]);
    exo.outdoor_temp.push_back(vals[3]);
    ++row;
  }
  if (row != horizon) {
    throw ValidationError("scenario: " + ctx + ": series file '" + path.string() +
                          "': expected " + std::to_string(horizon) + " rows, got " +
                          std::to_string(row));
  }
  return exo;
}

}  // namespace detail_scen

inline nlohmann::ordered_json scenario_to_json(const Scenario& s) {
  using detail_scen::Json;
  Json j = Json::object();
  j["name"] = s.name;
  j["horizon"] = s.horizon;
  j["slot_hours"] = s.slot_hours;
  j["seed"] = s.seed;
  j["validators"] = s.validators;
  j["coordinator"] = detail_scen::coordinator_to_json(s.coordinator);
  j["net"] = detail_scen::net_to_json(s.net);
  Json users = Json::array();
  for (std::size_t u = 0; u < s.users.size(); ++u) {
    Json e = Json::object();
    e["genesis_balance_tokens"] =
        static_cast<double>(s.genesis_micro[u]) / static_cast<double>(kMicroScale);
    e["params"] = detail_scen::params_to_json(s.users[u].params);
    Json series = Json::object();
    series["outdoor_temp"] = s.users[u].exo.outdoor_temp;
    series["renewable"] = s.users[u].exo.renewable_avail;
    series["load"] = s.users[u].exo.inflexible_load;
    if (s.users[u].exo.indoor_temp_initial.has_value()) {
      series["indoor_temp_initial"] = *s.users[u].exo.indoor_temp_initial;
    }
    e["series"] = std::move(series);
    users.push_back(std::move(e));
  }
  j["users"] = std::move(users);
  return j;
}

inline Scenario scenario_from_json(const nlohmann::ordered_json& j,
                                   const std::filesystem::path& base_dir = {}) {
  using detail_scen::Json;
  using detail_scen::require_field;
  Scenario s;
  const std::string top = "top level";
  if (j.contains("name")) s.name = j.at("name").get<std::string>();
  s.horizon = static_cast<int>(detail_scen::num_field(j, "horizon", top));
  s.slot_hours = detail_scen::num_or(j, "slot_hours", 1.0, top);
  if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
  s.validators = static_cast<int>(detail_scen::num_or(j, "validators", 4.0, top));
  if (j.contains("coordinator")) {
    s.coordinator = detail_scen::coordinator_from_json(j.at("coordinator"));
  }
  if (j.contains("net")) s.net = detail_scen::net_from_json(j.at("net"));
  const Json& users = require_field(j, "users", top);
  if (!users.is_array() || users.empty()) {
    throw ValidationError("scenario: top level: field 'users' must be a non-empty array");
  }
  for (std::size_t u = 0; u < users.size(); ++u) {
    const std::string ctx = "user " + std::to_string(u);
    const Json& e = users[u];
    TradingUser tu;
    if (e.contains("params")) {
      tu.params = detail_scen::params_from_json(e.at("params"), s.horizon, ctx);
    }
    if (e.contains("series_csv")) {
      const std::filesystem::path rel = e.at("series_csv").get<std::string>();
      tu.exo = detail_scen::series_from_csv(base_dir / rel, s.horizon, s.slot_hours, ctx);
      if (e.contains("series") && e.at("series").contains("indoor_temp_initial")) {
        tu.exo.indoor_temp_initial = e.at("series").at("indoor_temp_initial").get<double>();
      }
    } else {
      const Json& series = require_field(e, "series", ctx);
      tu.exo.outdoor_temp = detail_scen::series_field(series, "outdoor_temp", s.horizon, ctx);
      tu.exo.renewable_avail = detail_scen::series_field(series, "renewable", s.horizon, ctx);
      tu.exo.inflexible_load = detail_scen::series_field(series, "load", s.horizon, ctx);
      tu.exo.horizon = s.horizon;
      tu.exo.slot_hours = s.slot_hours;
      if (series.contains("indoor_temp_initial")) {
        tu.exo.indoor_temp_initial = series.at("indoor_temp_initial").get<double>();
      }
    }
    const double tokens = detail_scen::num_or(e, "genesis_balance_tokens", 1000.0, ctx);
    s.genesis_micro.push_back(static_cast<std::int64_t>(
        std::llround(tokens * static_cast<double>(kMicroScale))));
    s.users.push_back(std::move(tu));
  }
  validate_scenario(s);
  return s;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("scenario: cannot read '" + path + "'");
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("scenario: '" + path + "': " + e.what());
  }
  return scenario_from_json(j, std::filesystem::path(path).parent_path());
}

inline void save_scenario(const Scenario& s, const std::string& path) {
  validate_scenario(s);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("scenario: cannot write '" + path + "'");
  out << scenario_to_json(s).dump(2) << '\n';
  if (!out) throw ValidationError("scenario: write to '" + path + "' failed");
}

// Template for synthetic scenarios. The fixed penalty step is deliberate:
// generated populations mix linear tariff regions where the diminishing step
// closes the remaining dual gap too slowly to certify within the caps.
inline Scenario default_template(int horizon = 24, double slot_hours = 1.0) {
  Scenario s;
  s.name = "synthetic";
  s.horizon = horizon;
  s.slot_hours = slot_hours;
  s.validators = 4;
  s.coordinator.eps1 = 1e-6;
  s.coordinator.eps2 = 1e-6;
  s.coordinator.diminishing_rho = false;
  s.coordinator.fixed_rho = 1.0;
  s.net.latency_min_ms = 5;
  s.net.latency_max_ms = 15;
  s.net.drop_probability = 0.0;
  return s;
}

// Draws N households around a diurnal load curve and a midday solar bell.
// Parameter ranges are documented in docs/scenario_format.md; every draw
// comes from one generator seeded below, so equal seeds give equal scenarios.
inline Scenario synth_generate(const Scenario& tmpl, std::uint64_t seed, int num_users) {
  if (num_users < 1) throw ValidationError("synth: user count must be >= 1");
  if (tmpl.horizon < 1) throw ValidationError("synth: template horizon must be >= 1");
  Scenario s;
  s.name = tmpl.name;
  s.horizon = tmpl.horizon;
  s.slot_hours = tmpl.slot_hours;
  s.seed = seed;
  s.validators = tmpl.validators;
  s.coordinator = tmpl.coordinator;
  s.net = tmpl.net;
  s.net.seed = seed;

  std::mt19937_64 rng(seed);
  auto unit = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  auto uniform = [&unit](double lo, double hi) { return lo + (hi - lo) * unit(); };

  const int h = s.horizon;
  const double sh = s.slot_hours;
  const double pi = 3.14159265358979323846;

  for (int u = 0; u < num_users; ++u) {
    TradingUser tu;
    HouseholdParams& p = tu.params;
    p.thermal_resistance = uniform(8.0, 15.0);
    p.thermal_capacity = uniform(1.0, 2.5);
    p.hvac_coeff = uniform(1.5, 2.5);
    p.temp_min = 20.0;
    p.temp_max = 26.0;
    p.temp_ref = uniform(22.0, 24.0);
    p.discomfort_ac = uniform(0.02, 0.1);
    p.discomfort_flex = uniform(0.01, 0.05);
    p.energy_price = uniform(0.2, 0.3);
    p.peak_price = uniform(1.0, 3.0);
    p.grid_cap = uniform(5.0, 8.0);

    const int w_lo = h / 4;
    const int w_hi = h >= 2 ? (3 * h) / 4 : 1;
    p.flex_min.assign(static_cast<std::size_t>(h), 0.0);
    p.flex_max.assign(static_cast<std::size_t>(h), 0.0);
    p.flex_ref.assign(static_cast<std::size_t>(h), 0.0);
    const double per_slot_cap = uniform(1.0, 2.0);
    for (int t = w_lo; t < w_hi; ++t) {
      p.flex_window.push_back(t);
      p.flex_max[static_cast<std::size_t>(t)] = per_slot_cap;
    }
    const double window_slots = static_cast<double>(p.flex_window.size());
    p.flex_total = uniform(0.3, 0.7) * window_slots * sh * per_slot_cap;
    const double ref_kw = window_slots > 0.0 ? p.flex_total / (window_slots * sh) : 0.0;
    for (const int t : p.flex_window) p.flex_ref[static_cast<std::size_t>(t)] = ref_kw;

    if (unit() < 0.5) {
      p.battery_capacity = uniform(4.0, 10.0);
      p.charge_cap = uniform(1.0, 3.0);
      p.discharge_cap = uniform(1.0, 3.0);
      p.charge_eff = 0.95;
      p.discharge_eff = 0.95;
      p.soc_min_frac = 0.1;
      p.soc_max_frac = 0.9;
      p.soc_initial = p.battery_capacity * uniform(0.3, 0.6);
      p.battery_wear = uniform(0.01, 0.03);
    } else {
      p.battery_capacity = 0.0;
      p.charge_cap = 0.0;
      p.discharge_cap = 0.0;
      p.soc_initial = 0.0;
    }

    ExogenousSeries& exo = tu.exo;
    exo.horizon = h;
    exo.slot_hours = sh;
    const double temp_base = uniform(25.0, 29.0);
    const double temp_amp = uniform(2.0, 4.0);
    const double load_base = uniform(0.3, 0.8);
    const double load_amp = uniform(0.5, 2.0);
    const double solar_cap = unit() < 0.3 ? 0.0 : uniform(1.0, 4.0);
    for (int t = 0; t < h; ++t) {
      const double hour = std::fmod(static_cast<double>(t) * sh, 24.0);
      exo.outdoor_temp.push_back(temp_base + temp_amp * std::sin(2.0 * pi * (hour - 9.0) / 24.0));
      const double diurnal = 0.5 * (1.0 + std::sin(2.0 * pi * (hour - 13.0) / 24.0));
      exo.inflexible_load.push_back(load_base + load_amp * diurnal + uniform(0.0, 0.2));
      const double bell = hour > 6.0 && hour < 18.0 ? std::sin(pi * (hour - 6.0) / 12.0) : 0.0;
      exo.renewable_avail.push_back(solar_cap * bell * uniform(0.9, 1.1));
    }

    s.users.push_back(std::move(tu));
    s.genesis_micro.push_back(1000 * kMicroScale);
  }

  validate_scenario(s);
  return s;
}

// Writes costs.tsv (per-user standalone / pre-payment / post-payment),
// residuals.tsv (the iteration trace), and trades.tsv (per-slot traded
// volume) into dir. Pure function of the outcome, so re-export is
// byte-identical.
inline void export_outcome(const TradingOutcome& out, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ValidationError("export: cannot create directory '" + dir + "'");
  auto open = [&dir](const char* name) {
    std::ofstream f(fs::path(dir) / name, std::ios::binary);
    if (!f) throw ValidationError("export: cannot write '" + std::string(name) + "'");
    return f;
  };

  {
    std::ofstream f = open("costs.tsv");
    f << "user\tstandalone\tbefore_payment\tafter_payment\n";
    for (int i = 0; i < out.num_users; ++i) {
      const auto u = static_cast<std::size_t>(i);
      f << i << '\t' << fmt_double(out.standalone_cost[u]) << '\t'
        << fmt_double(out.trading_cost[u]) << '\t' << fmt_double(out.final_cost[u]) << '\n';
    }
  }
  {
    std::ofstream f = open("residuals.tsv");
    f << "phase\titeration\tresidual\trho\n";
    for (const auto& rec : out.trace) {
      f << phase_name(rec.phase) << '\t' << rec.iteration << '\t'
        << fmt_double(rec.residual) << '\t' << fmt_double(rec.rho) << '\n';
    }
  }
  {
    std::ofstream f = open("trades.tsv");
    f << "slot\ttraded_kw\n";
    for (int t = 0; t < out.horizon; ++t) {
      double total = 0.0;
      for (int i = 0; i < out.num_users; ++i) {
        for (int j = i + 1; j < out.num_users; ++j) {
          total += std::abs(out.trade_at(i, j, t));
        }
      }
      f << t << '\t' << fmt_double(total) << '\n';
    }
  }
}

}  // namespace tesim

#endif  // TESIM_SCENARIO_IO_HPP
