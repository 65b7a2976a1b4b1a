#pragma once

// Command-line front end. run_cli() is the whole program; tools/snra.cpp
// only forwards argv to it, so tests can drive every subcommand in-process.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "snra/array.hpp"
#include "snra/dataset.hpp"
#include "snra/dbn.hpp"
#include "snra/error.hpp"
#include "snra/fsm.hpp"
#include "snra/oracle.hpp"
#include "snra/power.hpp"
#include "snra/topology.hpp"
#include "snra/trace.hpp"

namespace snra::cli {

enum ExitCode : int { kOk = 0, kUserError = 1, kInternalError = 2 };

inline constexpr std::uint64_t kDefaultSeed = 1;

/// --seed if given, else $SNRA_SEED, else the built-in default.
inline std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("SNRA_SEED"); env != nullptr && *env != '\0') {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw DomainError("SNRA_SEED is not an unsigned integer");
  }
  return kDefaultSeed;
}

namespace detail {

struct TrainArgs {
  std::string topology;
  std::string images, labels, out;
  std::size_t samples = std::numeric_limits<std::size_t>::max();
  std::size_t epochs = 1;
  std::optional<std::uint64_t> seed;
  std::uint16_t levels = 32;
  std::uint16_t step = 1;
  double input_scale = 1.0;
};

struct EvalArgs {
  std::string model, images, labels;
  std::size_t samples = std::numeric_limits<std::size_t>::max();
  unsigned workers = 1;
};

struct TraceArgs {
  std::size_t visible = 0, hidden = 0;
  std::string v, h, vbar, hbar;
  std::string vcd = "-";
};

struct PowerArgs {
  std::string topology;
  std::string tech = "sram";
  std::string csv;
  std::string reference;
};

struct OracleArgs {
  std::size_t visible = 3, hidden = 2;
  std::uint64_t sweeps = 1'000'000;
  std::optional<std::uint64_t> seed;
  std::uint16_t levels = 32;
};

inline int do_train(const TrainArgs& a, std::ostream& out) {
  const Topology topo = Topology::parse(a.topology);
  const LabeledBitSet data = load_idx(a.images, a.labels, a.samples);
  DeviceConfig device;
  device.levels = a.levels;
  device.step = a.step;
  device.input_scale = a.input_scale;
  DbnModel model(topo, device, resolve_seed(a.seed));
  const TrainingReport report = greedy_train(model, data, a.epochs);
  save_model(model, a.out);
  for (std::size_t l = 0; l < report.layers.size(); ++l) {
    const auto& r = report.layers[l];
    out << "layer " << l << ' ' << r.n_visible << 'x' << r.n_hidden << (r.label_clamped ? " (label-clamped)" : "")
        << ": iterations " << r.iterations << ", clocks " << r.clocks << ", weight pulses " << r.weight_pulses
        << ", bias pulses " << r.bias_pulses << '\n';
  }
  const auto clocks = report.total_clocks();
  out << "total clocks " << clocks << " (" << std::setprecision(6)
      << static_cast<double>(clocks) / kDefaultClockHz * 1e3 << " ms at 500 MHz)\n";
  out << "model written to " << a.out << '\n';
  return kOk;
}

inline int do_eval(const EvalArgs& a, std::ostream& out) {
  const DbnModel model = load_model(a.model);
  const LabeledBitSet data = load_idx(a.images, a.labels, a.samples);
  const double err = error_rate(model, data, a.workers);
  out << "samples " << data.size() << '\n';
  out << "error_rate " << std::fixed << std::setprecision(4) << err << '\n';
  return kOk;
}

inline BitVector register_flag(const std::string& name, const std::string& text, std::size_t width) {
  BitVector b = BitVector::from_register_string(text);
  if (b.size() != width) {
    throw DimensionError("--" + name + " needs " + std::to_string(width) + " bits, got '" + text + "'");
  }
  return b;
}

inline int do_trace(const TraceArgs& a, std::ostream& out) {
  const BitVector v = register_flag("v", a.v, a.visible);
  const BitVector h = register_flag("h", a.h, a.hidden);
  const BitVector v_bar = register_flag("vbar", a.vbar, a.visible);
  const BitVector h_bar = register_flag("hbar", a.hbar, a.hidden);

  RbmArray array(a.visible, a.hidden);
  ScriptedArray scripted(array, h, v_bar, h_bar);
  CdFsm fsm(a.visible, a.hidden, FsmMode::Train);
  RandomStream rng(0);
  const CdIteration it = run_cd_iteration(fsm, scripted, v, rng);
  const std::string vcd = trace::write_vcd(it.records, a.visible, a.hidden);
  if (a.vcd == "-") {
    out << vcd;
  } else {
    std::ofstream f(a.vcd, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write '" + a.vcd + "'");
    f << vcd;
    if (!f) throw IoError("failed writing '" + a.vcd + "'");
    out << "wrote " << it.clocks << " clocks to " << a.vcd << '\n';
  }
  return kOk;
}

inline int do_power(const PowerArgs& a, std::ostream& out) {
  const power::ReferenceTables tables =
      a.reference.empty() ? power::ReferenceTables::bundled() : power::ReferenceTables::load(a.reference);
  const power::Technology tech = power::parse_technology(a.tech);
  const std::vector<Topology> topologies =
      a.topology.empty() ? power::bundled_topologies(tables) : std::vector<Topology>{Topology::parse(a.topology)};
  for (const auto& t : topologies) {
    out << t.to_string() << ' ' << power::to_string(tech) << ' ' << std::fixed << std::setprecision(2)
        << power::topology_power(t, tech, tables) << " mW\n";
  }
  out.unsetf(std::ios::floatfield);
  if (!a.csv.empty()) {
    const auto rows = power::compare(topologies, tables);
    std::ofstream f(a.csv, std::ios::trunc);
    if (!f) throw IoError("cannot write '" + a.csv + "'");
    power::write_csv(rows, f);
  }
  return kOk;
}

inline int do_oracle(const OracleArgs& a, std::ostream& out) {
  ArrayConfig cfg;
  cfg.synapse.levels = a.levels;
  RbmArray array(a.visible, a.hidden, cfg);
  const std::uint64_t seed = resolve_seed(a.seed);
  RandomStream init(derive_seed(seed, "oracle-weights", 0));
  SynapseGrid& g = array.grid();
  for (std::size_t i = 0; i < a.visible; ++i) {
    for (std::size_t j = 0; j < a.hidden; ++j) g.set_state(i, j, static_cast<SynapseGrid::Index>(init.below(g.levels())));
  }
  for (std::size_t i = 0; i < a.visible; ++i) {
    g.set_visible_bias_state(i, static_cast<SynapseGrid::Index>(init.below(g.levels())));
  }
  for (std::size_t j = 0; j < a.hidden; ++j) {
    g.set_hidden_bias_state(j, static_cast<SynapseGrid::Index>(init.below(g.levels())));
  }
  const auto exact = oracle::exact_distribution(oracle::dense_from_array(array));
  RandomStream rng(derive_seed(seed, "oracle-gibbs", 0));
  const auto empirical = oracle::gibbs_joint_frequencies(array, a.sweeps, rng);
  out << "states " << exact.size() << '\n';
  out << "sweeps " << a.sweeps << '\n';
  out << "tv_distance " << std::fixed << std::setprecision(6) << oracle::total_variation(exact, empirical) << '\n';
  return kOk;
}

}  // namespace detail

/// Runs one command line (args exclude the program name). Diagnostics go to
/// `err` as a single line; the return value is the process exit code.
inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spintronic RBM/DBN array simulator"};
  // No -h shorthand: the trace command has a --h register flag.
  app.set_help_flag("--help", "print this help and exit");
  app.require_subcommand(1, 1);

  detail::TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "greedy CD training of a DBN on IDX data");
  train_cmd->add_option("--topology", train.topology, "layer sizes, e.g. 784x500x10")->required();
  train_cmd->add_option("--images", train.images, "IDX image file (.gz accepted)")->required();
  train_cmd->add_option("--labels", train.labels, "IDX label file (.gz accepted)")->required();
  train_cmd->add_option("--train-samples", train.samples, "use the first N samples");
  train_cmd->add_option("--epochs", train.epochs, "passes over the data per layer");
  train_cmd->add_option("--seed", train.seed, "seed (falls back to $SNRA_SEED)");
  train_cmd->add_option("--levels", train.levels, "resistive levels per synapse")->check(CLI::Range(2, 65535));
  train_cmd->add_option("--step", train.step, "index change per write pulse")->check(CLI::Range(1, 65535));
  train_cmd->add_option("--input-scale", train.input_scale, "p-bit sigmoid gain");
  train_cmd->add_option("--out", train.out, "model file to write")->required();

  detail::EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "error rate of a trained model");
  eval_cmd->add_option("--model", eval.model, "model file")->required();
  eval_cmd->add_option("--images", eval.images, "IDX image file")->required();
  eval_cmd->add_option("--labels", eval.labels, "IDX label file")->required();
  eval_cmd->add_option("--test-samples", eval.samples, "use the first N samples");
  eval_cmd->add_option("--workers", eval.workers, "evaluation threads")->check(CLI::Range(1U, 1024U));

  detail::TraceArgs tr;
  auto* trace_cmd = app.add_subcommand("trace", "VCD of one CD iteration with preset registers");
  trace_cmd->add_option("--visible", tr.visible, "visible units")->required()->check(CLI::Range(1UL, 4096UL));
  trace_cmd->add_option("--hidden", tr.hidden, "hidden units")->required()->check(CLI::Range(1UL, 4096UL));
  trace_cmd->add_option("--v", tr.v, "v register, MSB first")->required();
  trace_cmd->add_option("--h", tr.h, "h register, MSB first")->required();
  trace_cmd->add_option("--vbar", tr.vbar, "v_bar register, MSB first")->required();
  trace_cmd->add_option("--hbar", tr.hbar, "h_bar register, MSB first")->required();
  trace_cmd->add_option("--vcd", tr.vcd, "output file ('-' for stdout)");

  detail::PowerArgs pw;
  auto* power_cmd = app.add_subcommand("power", "LUT-FF power of the training FSM");
  power_cmd->add_option("--topology", pw.topology, "topology (default: every bundled one)");
  power_cmd->add_option("--tech", pw.tech, "sram or she-mtj");
  power_cmd->add_option("--csv", pw.csv, "write the SRAM vs SHE-MTJ comparison as CSV");
  power_cmd->add_option("--reference", pw.reference, "alternate reference table file");

  detail::OracleArgs orc;
  auto* oracle_cmd = app.add_subcommand("oracle", "Gibbs sampling vs exact Boltzmann distribution");
  oracle_cmd->add_option("--visible", orc.visible, "visible units")->check(CLI::Range(1UL, 19UL));
  oracle_cmd->add_option("--hidden", orc.hidden, "hidden units")->check(CLI::Range(1UL, 19UL));
  oracle_cmd->add_option("--sweeps", orc.sweeps, "Gibbs sweeps")->check(CLI::PositiveNumber);
  oracle_cmd->add_option("--seed", orc.seed, "seed (falls back to $SNRA_SEED)");
  oracle_cmd->add_option("--levels", orc.levels, "resistive levels per synapse")->check(CLI::Range(2, 65535));

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    const std::string sub = app.get_subcommands().empty() ? "" : app.get_subcommands().front()->get_name() + ": ";
    err << "error: " << sub << e.what() << '\n';
    return kUserError;
  }

  try {
    if (*train_cmd) return detail::do_train(train, out);
    if (*eval_cmd) return detail::do_eval(eval, out);
    if (*trace_cmd) return detail::do_trace(tr, out);
    if (*power_cmd) return detail::do_power(pw, out);
    if (*oracle_cmd) return detail::do_oracle(orc, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kUserError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternalError;
  }
  return kInternalError;
}

}  // namespace snra::cli
