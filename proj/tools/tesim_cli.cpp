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

// Batch entry point. Exit codes:
//   0  success
//   2  market or payment phase did not converge
//   3  settlement default (a user cannot cover the cleared payments)
//   4  consensus stall (the chain stopped committing before settlement)
//   5  scenario or fault-script validation error
//   6  safety violation in a fault drill within the tolerated fault budget
//   1  any other runtime error; CLI11 reports usage errors with codes >= 100
// Everything printed to stdout is also mirrored into machine-readable files
// under --out, so scripted callers never have to parse prose.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "tesim/chain_runtime.hpp"

namespace {

using namespace tesim;

int exit_code_for(RunFailure f) {
  switch (f) {
    case RunFailure::none: return 0;
    case RunFailure::non_convergence: return 2;
    case RunFailure::settlement_default: return 3;
    case RunFailure::consensus_stall: return 4;
  }
  return 1;
}

std::ofstream open_out(const std::filesystem::path& dir, const char* name) {
  std::ofstream f(dir / name, std::ios::binary);
  if (!f) throw ValidationError("cannot write '" + (dir / name).string() + "'");
  return f;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ValidationError("cannot create output directory '" + dir + "'");
}

Scenario load_for_run(const std::string& path, std::int64_t seed_override) {
  Scenario scen = load_scenario(path);
  if (seed_override >= 0) {
    scen.seed = static_cast<std::uint64_t>(seed_override);
    scen.net.seed = static_cast<std::uint64_t>(seed_override);
  }
  return scen;
}

double micro_to_tokens(std::int64_t v) { return static_cast<double>(v) / kMicroScale; }

double total_surplus(const TradingOutcome& out) {
  return std::accumulate(out.surplus.begin(), out.surplus.end(), 0.0);
}

void write_run_summary(const std::filesystem::path& dir, const Scenario& scen,
                       const TradingOutcome& out, const ChainTradingResult* chained) {
  std::ofstream f = open_out(dir, "summary.tsv");
  f << "key\tvalue\n";
  f << "mode\t" << (chained ? "with-chain" : "no-chain") << '\n';
  f << "users\t" << out.num_users << '\n';
  f << "horizon\t" << out.horizon << '\n';
  f << "validators\t" << scen.validators << '\n';
  f << "converged\t" << (out.converged() ? 1 : 0) << '\n';
  f << "tcmp_converged\t" << (out.tcmp_converged ? 1 : 0) << '\n';
  f << "tcmp_iterations\t" << out.tcmp_iterations << '\n';
  f << "tbap_iterations\t" << out.tbap_iterations << '\n';
  f << "trading_surplus\t" << fmt_double(total_surplus(out)) << '\n';
  if (chained) {
    f << "failure\t" << run_failure_name(chained->failure) << '\n';
    f << "settled_on_chain\t" << (chained->settled_on_chain ? 1 : 0) << '\n';
    f << "committed_height\t" << chained->chain.max_height << '\n';
    f << "view_changes\t" << chained->chain.view_changes << '\n';
    f << "safety_violations\t" << chained->chain.safety_violations << '\n';
    f << "transactions\t" << chained->chain.transactions << '\n';
    f << "end_time_us\t" << chained->end_time << '\n';
  } else {
    f << "failure\t" << (out.converged() ? "ok" : "non-convergence") << '\n';
  }
}

void write_balances(const std::filesystem::path& dir, const Scenario& scen,
                    const ChainTradingResult& r) {
  std::ofstream f = open_out(dir, "balances.tsv");
  f << "user\tgenesis_tokens\tfinal_tokens\n";
  for (std::size_t u = 0; u < scen.users.size(); ++u) {
    f << u << '\t' << fmt_double(micro_to_tokens(scen.genesis_micro[u])) << '\t'
      << fmt_double(micro_to_tokens(r.final_balances_micro[u])) << '\n';
  }
}

void print_phase_report(const TradingOutcome& out) {
  if (out.tcmp_converged) {
    std::cout << "market phase: converged in " << out.tcmp_iterations << " iterations\n";
  } else {
    std::cout << "market phase: no convergence after " << out.tcmp_iterations
              << " iterations\n";
  }
  if (out.tbap_iterations > 0 || out.tcmp_converged) {
    if (out.converged()) {
      std::cout << "payment phase: converged in " << out.tbap_iterations << " iterations\n";
    } else if (out.tcmp_converged) {
      std::cout << "payment phase: no convergence after " << out.tbap_iterations
                << " iterations\n";
    }
  }
  if (out.converged()) {
    std::cout << "trading surplus: " << fmt_double(total_surplus(out)) << " per day\n";
  }
}

int cmd_run(const std::string& path, bool with_chain, std::int64_t seed_override,
            const std::string& out_dir) {
  const Scenario scen = load_for_run(path, seed_override);
  std::cout << "scenario '" << scen.name << "': " << scen.users.size() << " users, horizon "
            << scen.horizon << ", " << scen.validators << " validators\n";
  std::cout << "mode: " << (with_chain ? "with-chain" : "no-chain") << '\n';

  TradingOutcome out;
  std::optional<ChainTradingResult> chained;
  int code = 0;
  if (with_chain) {
    chained = run_chain_trading_day(scen);
    out = chained->outcome;
    code = exit_code_for(chained->failure);
    print_phase_report(out);
    if (chained->settled_on_chain) {
      std::cout << "settlement: cleared on chain at height " << chained->chain.max_height
                << " (" << chained->chain.view_changes << " view changes, "
                << chained->chain.safety_violations << " safety violations)\n";
    } else {
      std::cout << "settlement: not reached (" << run_failure_name(chained->failure) << ")\n";
      if (!chained->failure_note.empty()) std::cout << "  " << chained->failure_note << '\n';
    }
  } else {
    out = run_trading_day(scen.users, scen.coordinator);
    code = out.converged() ? 0 : 2;
    print_phase_report(out);
  }

  if (!out_dir.empty()) {
    ensure_dir(out_dir);
    const std::filesystem::path dir(out_dir);
    export_outcome(out, out_dir);
    write_run_summary(dir, scen, out, chained ? &*chained : nullptr);
    if (chained) {
      write_balances(dir, scen, *chained);
      open_out(dir, "chain.txt") << chained->chain.chain_text;
    }
    std::cout << "wrote costs.tsv residuals.tsv trades.tsv summary.tsv"
              << (chained ? " balances.tsv chain.txt" : "") << " to " << out_dir << '\n';
  }
  std::cout << "exit " << code << " ("
            << (chained ? run_failure_name(chained->failure)
                        : (out.converged() ? "ok" : "non-convergence"))
            << ")\n";
  return code;
}

int cmd_faults(const std::string& path, std::int64_t duration_ms, std::int64_t seed_override,
               const std::string& out_dir) {
  const Scenario scen = load_for_run(path, seed_override);
  const FaultDrillResult r = run_fault_drill(scen, duration_ms * kMillisecond);
  const int f = byzantine_tolerance(scen.validators);

  std::cout << "fault drill: " << scen.validators << " validators, tolerance f=" << f << ", "
            << r.chain.scripted_faults << " scripted fault(s), " << duration_ms << " ms\n";
  std::cout << "committed heights:";
  for (const std::int64_t h : r.chain.committed_heights) std::cout << ' ' << h;
  std::cout << '\n';
  std::cout << "view changes: " << r.chain.view_changes << '\n';
  std::cout << "equivocations recorded: " << r.chain.equivocations_recorded << '\n';
  std::cout << "safety violations: " << r.chain.safety_violations << '\n';
  if (r.chain.beyond_tolerance) {
    std::cout << "beyond tolerance: more scripted faults than f, safety not asserted\n";
  }

  if (!out_dir.empty()) {
    ensure_dir(out_dir);
    const std::filesystem::path dir(out_dir);
    {
      std::ofstream hf = open_out(dir, "heights.tsv");
      hf << "validator\tcommitted_height\n";
      for (std::size_t i = 0; i < r.chain.committed_heights.size(); ++i) {
        hf << i << '\t' << r.chain.committed_heights[i] << '\n';
      }
    }
    {
      std::ofstream sf = open_out(dir, "summary.tsv");
      sf << "key\tvalue\n";
      sf << "validators\t" << scen.validators << '\n';
      sf << "tolerance_f\t" << f << '\n';
      sf << "scripted_faults\t" << r.chain.scripted_faults << '\n';
      sf << "beyond_tolerance\t" << (r.chain.beyond_tolerance ? 1 : 0) << '\n';
      sf << "duration_ms\t" << duration_ms << '\n';
      sf << "max_height\t" << r.chain.max_height << '\n';
      sf << "view_changes\t" << r.chain.view_changes << '\n';
      sf << "equivocations\t" << r.chain.equivocations_recorded << '\n';
      sf << "safety_violations\t" << r.chain.safety_violations << '\n';
      sf << "transactions\t" << r.chain.transactions << '\n';
    }
    open_out(dir, "chain.txt") << r.chain.chain_text;
    std::cout << "wrote heights.tsv summary.tsv chain.txt to " << out_dir << '\n';
  }

  if (r.chain.safety_violations > 0 && !r.chain.beyond_tolerance) {
    std::cout << "exit 6 (safety violation within the tolerated fault budget)\n";
    return 6;
  }
  std::cout << "exit 0 (ok)\n";
  return 0;
}

int cmd_synth(int users, std::int64_t seed, int horizon, double slot_hours,
              const std::string& name, const std::string& out_path) {
  Scenario tmpl = default_template(horizon, slot_hours);
  Scenario scen = synth_generate(tmpl, static_cast<std::uint64_t>(seed), users);
  if (!name.empty()) scen.name = name;
  save_scenario(scen, out_path);
  std::cout << "wrote scenario '" << scen.name << "' (" << users << " users, horizon "
            << horizon << ", seed " << seed << ") to " << out_path << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Peer-to-peer energy trading over a simulated byzantine-tolerant ledger"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir;
  std::int64_t seed_override = -1;
  bool with_chain = false;
  bool no_chain = false;

  CLI::App* run = app.add_subcommand("run", "Run one trading day from a scenario file");
  run->add_option("scenario", scenario_path, "Scenario file")->required();
  CLI::Option* wc = run->add_flag("--with-chain", with_chain,
                                  "Route every report and payment through consensus");
  run->add_flag("--no-chain", no_chain, "Optimization only, no ledger (default)")
      ->excludes(wc);
  run->add_option("--seed", seed_override, "Override the scenario and network seeds");
  run->add_option("--out", out_dir, "Directory for result tables");

  std::int64_t duration_ms = 12000;
  CLI::App* faults = app.add_subcommand("faults", "Run a consensus fault drill");
  faults->add_option("scenario", scenario_path, "Scenario file with a fault script")
      ->required();
  faults->add_option("--duration-ms", duration_ms, "Drill length in simulated milliseconds")
      ->check(CLI::PositiveNumber);
  faults->add_option("--seed", seed_override, "Override the scenario and network seeds");
  faults->add_option("--out", out_dir, "Directory for drill reports");

  int synth_users = 0;
  std::int64_t synth_seed = 1;
  int synth_horizon = 24;
  double synth_slot_hours = 1.0;
  std::string synth_name;
  std::string synth_out;
  CLI::App* synth = app.add_subcommand("synth", "Generate a seeded synthetic scenario");
  synth->add_option("--users", synth_users, "Number of households")
      ->required()
      ->check(CLI::PositiveNumber);
  synth->add_option("--seed", synth_seed, "Generator seed");
  synth->add_option("--horizon", synth_horizon, "Trading slots per day")
      ->check(CLI::PositiveNumber);
  synth->add_option("--slot-hours", synth_slot_hours, "Hours per slot")
      ->check(CLI::PositiveNumber);
  synth->add_option("--name", synth_name, "Scenario name");
  synth->add_option("--out", synth_out, "Output scenario path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(scenario_path, with_chain, seed_override, out_dir);
    if (faults->parsed()) return cmd_faults(scenario_path, duration_ms, seed_override, out_dir);
    return cmd_synth(synth_users, synth_seed, synth_horizon, synth_slot_hours, synth_name,
                     synth_out);
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return 5;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
