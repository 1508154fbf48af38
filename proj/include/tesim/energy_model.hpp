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
// Physical and economic household models: HVAC thermal dynamics, flexible
// load, battery storage, two-part grid tariff, discomfort costs, and the
// per-slot power balance. Everything here is a pure value or pure function;
// the optimizers build their constraint systems from these definitions.

#ifndef TESIM_ENERGY_MODEL_HPP
#define TESIM_ENERGY_MODEL_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "tesim/errors.hpp"

namespace tesim {

// Per-user physical and economic constants. Flexible-load series (window
// bounds, preferred profile) are per-slot and must match the scenario horizon.
struct HouseholdParams {
  // HVAC thermal model. hvac_coeff > 0 means the unit cools (consuming
  // power lowers indoor temperature), < 0 means it heats.
  double thermal_capacity = 2.0;    // kWh/degC
  double thermal_resistance = 10.0; // degC/kW
  double hvac_coeff = 2.0;
  double temp_ref = 23.0;           // degC
  double temp_min = 20.0;
  double temp_max = 26.0;
  double discomfort_ac = 0.05;      // $/degC^2

  // Flexible load: total energy demand over the window, per-slot bounds,
  // preferred profile, and the quadratic deviation price.
  double flex_total = 0.0;          // kWh
  std::vector<int> flex_window;     // 0-based slot indices
  std::vector<double> flex_min;     // kW, length H
  std::vector<double> flex_max;     // kW, length H
  std::vector<double> flex_ref;     // kW, length H
  double discomfort_flex = 0.02;    // $/kW^2

  // Grid supply: capacity and the two-part tariff.
  double grid_cap = 6.0;            // kW
  double energy_price = 0.25;       // $/kWh
  double peak_price = 2.0;          // $/kW

  // Battery.
  double battery_capacity = 0.0;    // kWh; 0 disables storage
  double charge_eff = 0.95;
  double discharge_eff = 0.95;
  double soc_min_frac = 0.1;
  double soc_max_frac = 0.9;
  double charge_cap = 0.0;          // kW
  double discharge_cap = 0.0;       // kW
  double soc_initial = 0.0;         // kWh
  double battery_wear = 0.01;       // $/kWh

  // When set, the end-of-horizon storage level must return to soc_initial.
  bool cyclic_storage = false;
};

// Per-user data the household does not control.
struct ExogenousSeries {
  std::vector<double> outdoor_temp;    // degC, length H
  std::vector<double> renewable_avail; // kW >= 0, length H
  std::vector<double> inflexible_load; // kW >= 0, length H
  int horizon = 0;
  double slot_hours = 1.0;
  std::optional<double> indoor_temp_initial; // defaults to temp_ref
};

// One user's decision vectors, all length H. storage[t] is the level at the
// end of slot t; the level entering slot 0 is HouseholdParams::soc_initial.
struct Schedule {
  std::vector<double> renewable;
  std::vector<double> grid;
  std::vector<double> hvac;
  std::vector<double> flex;
  std::vector<double> charge;
  std::vector<double> discharge;
  std::vector<double> storage;
  std::vector<double> indoor_temp;

  static Schedule zeros(int horizon) {
    Schedule s;
    auto n = static_cast<std::size_t>(horizon);
    s.renewable.assign(n, 0.0);
    s.grid.assign(n, 0.0);
    s.hvac.assign(n, 0.0);
    s.flex.assign(n, 0.0);
    s.charge.assign(n, 0.0);
    s.discharge.assign(n, 0.0);
    s.storage.assign(n, 0.0);
    s.indoor_temp.assign(n, 0.0);
    return s;
  }

  int horizon() const { return static_cast<int>(grid.size()); }
};

struct CostBreakdown {
  double grid_energy = 0.0;
  double grid_peak = 0.0;
  double hvac_discomfort = 0.0;
  double flex_discomfort = 0.0;
  double battery_wear = 0.0;

  double total() const {
    return grid_energy + grid_peak + hvac_discomfort + flex_discomfort + battery_wear;
  }
};

inline double initial_indoor_temp(const HouseholdParams& params, const ExogenousSeries& exo) {
  return exo.indoor_temp_initial.value_or(params.temp_ref);
}

// One step of the indoor-temperature recursion:
//   t' = t - (1/(C*R)) * (t - t_out + eta*R*p_ac)
inline double hvac_step(double t_in_prev, double t_out, double p_ac,
                        const HouseholdParams& params) {
  const double cr = params.thermal_capacity * params.thermal_resistance;
  return t_in_prev -
         (t_in_prev - t_out + params.hvac_coeff * params.thermal_resistance * p_ac) / cr;
}

inline CostBreakdown operating_cost_parts(const Schedule& s, const HouseholdParams& params,
                                          double slot_hours = 1.0) {
  const std::size_t h = s.grid.size();
  if (s.hvac.size() != h || s.flex.size() != h || s.charge.size() != h ||
      s.discharge.size() != h || s.indoor_temp.size() != h) {
    throw ValidationError("operating_cost: schedule series lengths differ");
  }
  if (!params.flex_ref.empty() && params.flex_ref.size() != h) {
    throw ValidationError("operating_cost: flex_ref length differs from schedule");
  }
  CostBreakdown parts;
  double grid_sum = 0.0, grid_peak = 0.0, throughput = 0.0;
  for (std::size_t t = 0; t < h; ++t) {
    grid_sum += s.grid[t];
    grid_peak = std::max(grid_peak, s.grid[t]);
    throughput += s.charge[t] + s.discharge[t];
    const double dt = s.indoor_temp[t] - params.temp_ref;
    parts.hvac_discomfort += params.discomfort_ac * dt * dt;
    const double ref = params.flex_ref.empty() ? 0.0 : params.flex_ref[t];
    const double df = s.flex[t] - ref;
    parts.flex_discomfort += params.discomfort_flex * df * df;
  }
  parts.grid_energy = params.energy_price * grid_sum * slot_hours;
  parts.grid_peak = params.peak_price * grid_peak;
  parts.battery_wear = params.battery_wear * throughput * slot_hours;
  return parts;
}

// Total per-user operating cost: grid energy + grid peak + HVAC discomfort +
// flexible-load discomfort + battery wear. Energy terms scale with slot_hours;
// the peak charge prices maximum power, not energy.
inline double operating_cost(const Schedule& s, const HouseholdParams& params,
                             double slot_hours = 1.0) {
  return operating_cost_parts(s, params, slot_hours).total();
}

// Per-slot power-balance residual:
//   supply (renewable + grid + discharge + trades bought) minus
//   demand (hvac + flex + inflexible + charge).
inline std::vector<double> check_balance(const Schedule& s, const std::vector<double>& trades_in,
                                         const ExogenousSeries& exo) {
  const std::size_t h = s.grid.size();
  std::vector<double> residual(h, 0.0);
  for (std::size_t t = 0; t < h; ++t) {
    const double traded = t < trades_in.size() ? trades_in[t] : 0.0;
    const double load = t < exo.inflexible_load.size() ? exo.inflexible_load[t] : 0.0;
    residual[t] = s.renewable[t] + s.grid[t] + s.discharge[t] + traded -
                  (s.hvac[t] + s.flex[t] + load + s.charge[t]);
  }
  return residual;
}

inline void validate_params(const HouseholdParams& p, int horizon) {
  auto fail = [](const std::string& msg) { throw ValidationError("HouseholdParams: " + msg); };
  if (!(p.thermal_capacity > 0)) fail("thermal_capacity must be > 0");
  if (!(p.thermal_resistance > 0)) fail("thermal_resistance must be > 0");
  if (!(p.temp_min <= p.temp_ref && p.temp_ref <= p.temp_max)) {
    fail("temp_min <= temp_ref <= temp_max violated");
  }
  if (p.discomfort_ac < 0 || p.discomfort_flex < 0 || p.battery_wear < 0) {
    fail("discomfort/wear prices must be >= 0");
  }
  if (!(p.grid_cap >= 0)) fail("grid_cap must be >= 0");
  if (p.energy_price < 0 || p.peak_price < 0) fail("tariff prices must be >= 0");

  const auto h = static_cast<std::size_t>(horizon);
  if (!p.flex_window.empty() || p.flex_total != 0.0) {
    if (p.flex_min.size() != h || p.flex_max.size() != h || p.flex_ref.size() != h) {
      fail("flex series must have length equal to the horizon");
    }
    double lo_sum = 0.0, hi_sum = 0.0;
    for (int t : p.flex_window) {
      if (t < 0 || t >= horizon) fail("flex_window slot " + std::to_string(t) + " out of range");
      if (!(p.flex_min[static_cast<std::size_t>(t)] <= p.flex_max[static_cast<std::size_t>(t)])) {
        fail("flex_min > flex_max at slot " + std::to_string(t));
      }
      lo_sum += p.flex_min[static_cast<std::size_t>(t)];
      hi_sum += p.flex_max[static_cast<std::size_t>(t)];
    }
    if (!(lo_sum <= p.flex_total && p.flex_total <= hi_sum)) {
      fail("flex_total outside [sum flex_min, sum flex_max] over the window");
    }
  }

  if (p.battery_capacity < 0) fail("battery_capacity must be >= 0");
  if (p.battery_capacity > 0) {
    if (!(p.charge_eff >= 0 && p.charge_eff <= 1)) fail("charge_eff outside [0,1]");
    if (!(p.discharge_eff > 0 && p.discharge_eff <= 1)) fail("discharge_eff outside (0,1]");
    if (!(p.soc_min_frac >= 0 && p.soc_min_frac < p.soc_max_frac && p.soc_max_frac <= 1)) {
      fail("soc fractions must satisfy 0 <= lo < hi <= 1");
    }
    if (p.charge_cap < 0 || p.discharge_cap < 0) fail("charge/discharge caps must be >= 0");
    const double lo = p.soc_min_frac * p.battery_capacity;
    const double hi = p.soc_max_frac * p.battery_capacity;
    if (!(lo <= p.soc_initial && p.soc_initial <= hi)) {
      fail("soc_initial outside [soc_min_frac, soc_max_frac] * battery_capacity");
    }
  }
}

inline void validate_exogenous(const ExogenousSeries& exo) {
  auto fail = [](const std::string& msg) { throw ValidationError("ExogenousSeries: " + msg); };
  if (exo.horizon <= 0) fail("horizon must be positive");
  const auto h = static_cast<std::size_t>(exo.horizon);
  if (exo.outdoor_temp.size() != h) fail("outdoor_temp length differs from horizon");
  if (exo.renewable_avail.size() != h) fail("renewable_avail length differs from horizon");
  if (exo.inflexible_load.size() != h) fail("inflexible_load length differs from horizon");
  if (!(exo.slot_hours > 0)) fail("slot_hours must be positive");
  for (std::size_t t = 0; t < h; ++t) {
    if (exo.renewable_avail[t] < 0) fail("renewable_avail negative at slot " + std::to_string(t));
    if (exo.inflexible_load[t] < 0) fail("inflexible_load negative at slot " + std::to_string(t));
  }
}

// Lists every constraint a schedule violates beyond `tol`; empty means
// feasible. Used by tests and the trade-run audit path, not by the solvers.
inline std::vector<std::string> schedule_violations(const Schedule& s,
                                                    const HouseholdParams& p,
                                                    const ExogenousSeries& exo,
                                                    const std::vector<double>& trades_in,
                                                    double tol = 1e-6) {
  std::vector<std::string> out;
  const int h = exo.horizon;
  auto flag = [&out](const std::string& msg) { out.push_back(msg); };
  if (s.horizon() != h) {
    flag("schedule horizon differs from exogenous horizon");
    return out;
  }
  std::vector<bool> in_window(static_cast<std::size_t>(h), false);
  for (int t : p.flex_window) in_window[static_cast<std::size_t>(t)] = true;

  double flex_sum = 0.0;
  double level = p.soc_initial;
  double temp = initial_indoor_temp(p, exo);
  const double soc_lo = p.soc_min_frac * p.battery_capacity;
  const double soc_hi = p.soc_max_frac * p.battery_capacity;
  for (int t = 0; t < h; ++t) {
    const auto u = static_cast<std::size_t>(t);
    const std::string at = " at slot " + std::to_string(t);
    if (s.grid[u] < -tol || s.grid[u] > p.grid_cap + tol) flag("grid power outside cap" + at);
    if (s.renewable[u] < -tol || s.renewable[u] > exo.renewable_avail[u] + tol) {
      flag("renewable use outside availability" + at);
    }
    if (s.hvac[u] < -tol) flag("hvac power negative" + at);
    if (s.charge[u] < -tol || s.charge[u] > p.charge_cap + tol) flag("charge outside cap" + at);
    if (s.discharge[u] < -tol || s.discharge[u] > p.discharge_cap + tol) {
      flag("discharge outside cap" + at);
    }
    if (p.battery_capacity > 0 && (s.storage[u] < soc_lo - tol || s.storage[u] > soc_hi + tol)) {
      flag("storage level outside soc band" + at);
    }
    const double expect_level = level + p.charge_eff * s.charge[u] -
                                (p.discharge_eff > 0 ? s.discharge[u] / p.discharge_eff : 0.0);
    if (std::abs(s.storage[u] - expect_level) > tol) flag("storage recursion broken" + at);
    level = s.storage[u];

    const double expect_temp = hvac_step(temp, exo.outdoor_temp[u], s.hvac[u], p);
    if (std::abs(s.indoor_temp[u] - expect_temp) > tol) flag("temperature recursion broken" + at);
    temp = s.indoor_temp[u];
    if (temp < p.temp_min - tol || temp > p.temp_max + tol) flag("indoor temp outside band" + at);

    if (in_window[u]) {
      if (s.flex[u] < p.flex_min[u] - tol || s.flex[u] > p.flex_max[u] + tol) {
        flag("flexible load outside per-slot bounds" + at);
      }
      flex_sum += s.flex[u];
    } else if (std::abs(s.flex[u]) > tol) {
      flag("flexible load outside its window" + at);
    }
  }
  if (!p.flex_window.empty() && std::abs(flex_sum - p.flex_total) > tol * 10) {
    flag("flexible load total differs from flex_total");
  }
  if (p.cyclic_storage && p.battery_capacity > 0 &&
      std::abs(level - p.soc_initial) > tol) {
    flag("terminal storage level differs from initial");
  }
  auto residual = check_balance(s, trades_in, exo);
  for (int t = 0; t < h; ++t) {
    if (std::abs(residual[static_cast<std::size_t>(t)]) > tol) {
      flag("power balance broken at slot " + std::to_string(t));
    }
  }
  return out;
}

}  // namespace tesim

#endif  // TESIM_ENERGY_MODEL_HPP
