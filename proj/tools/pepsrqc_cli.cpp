// Copyright 2026 The pepsrqc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: generate / run / analyze / emit.
//
// Precedence for run settings: built-in defaults, then --config, then the
// PEPSRQC_OUTPUT_DIR / PEPSRQC_THREADS environment, then explicit flags.
// Failures exit with status 1 and a one-line JSON error record on stderr.

#include <fmt/format.h>

#include <cstdio>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"
#include "pepsrqc/experiment.hpp"

namespace {

using namespace pepsrqc;

struct Overrides {
    std::string config;
    std::optional<std::size_t> rows, cols, depth, instances, gauge_sweeps, oracle_every, qubit_cap, threads;
    std::optional<std::size_t> oracle_memory;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> sequence, schedule, output_dir;
    std::optional<double> theta, phi;
    std::vector<std::size_t> chis;
    std::optional<bool> oracle, checkpoints;
    std::string write_config;
};

void add_run_flags(CLI::App *cmd, Overrides &o) {
    cmd->add_option("-c,--config", o.config, "JSON run configuration")->check(CLI::ExistingFile);
    cmd->add_option("--rows", o.rows, "lattice rows");
    cmd->add_option("--cols", o.cols, "lattice columns");
    cmd->add_option("--depth", o.depth, "circuit depth D");
    cmd->add_option("--sequence", o.sequence, "two-qubit gate family: cz, fsim, 2hr");
    cmd->add_option("--theta", o.theta, "fSim theta");
    cmd->add_option("--phi", o.phi, "fSim phi");
    cmd->add_option("--chi", o.chis, "maximum bond dimensions")->delimiter(',');
    cmd->add_option("--instances", o.instances, "number of circuit instances");
    cmd->add_option("--seed", o.seed, "base seed; instance i uses seed + i");
    cmd->add_option("--gauge-sweeps", o.gauge_sweeps, "gauging sweeps per layer");
    cmd->add_option("--gauge-schedule", o.schedule, "per_layer or per_gate");
    cmd->add_flag("--oracle,!--no-oracle", o.oracle, "compare against the exact state vector");
    cmd->add_option("--oracle-every", o.oracle_every, "oracle checkpoint spacing in layers (0 = auto)");
    cmd->add_option("--oracle-memory", o.oracle_memory, "byte cap for exact PEPS contraction");
    cmd->add_option("--qubit-cap", o.qubit_cap, "largest state vector the oracle may allocate");
    cmd->add_flag("--checkpoints,!--no-checkpoints", o.checkpoints, "write binary PEPS checkpoints");
    cmd->add_option("-o,--output-dir", o.output_dir, "output directory");
    cmd->add_option("--threads", o.threads, "OpenMP threads");
    cmd->add_option("--write-config", o.write_config, "also write the effective configuration here");
}

RunConfig resolve(const Overrides &o) {
    RunConfig c = o.config.empty() ? RunConfig{} : load_config(o.config);
    apply_environment(c);
    if (o.rows) c.rows = *o.rows;
    if (o.cols) c.cols = *o.cols;
    if (o.depth) c.depth = *o.depth;
    if (o.sequence) {
        c.sequence.kind = parse_sequence_kind(*o.sequence);
        if (c.sequence.kind != SequenceKind::FSim) {
            c.sequence.theta = c.sequence.phi = 0.0;
        }
    }
    if (o.theta) c.sequence.theta = *o.theta;
    if (o.phi) c.sequence.phi = *o.phi;
    if (!o.chis.empty()) c.chis = o.chis;
    if (o.instances) c.instances = *o.instances;
    if (o.seed) c.seed = *o.seed;
    if (o.gauge_sweeps) c.gauge_sweeps = *o.gauge_sweeps;
    if (o.schedule) {
        if (*o.schedule == "per_layer") {
            c.gauge_schedule = GaugeSchedule::PerLayer;
        } else if (*o.schedule == "per_gate") {
            c.gauge_schedule = GaugeSchedule::PerGate;
        } else {
            throw Error(ErrorKind::Parameter, fmt::format("unknown gauge schedule '{}'", *o.schedule));
        }
    }
    if (o.oracle) c.oracle = *o.oracle;
    if (o.oracle_every) c.oracle_every = *o.oracle_every;
    if (o.oracle_memory) c.oracle_memory_bytes = *o.oracle_memory;
    if (o.qubit_cap) c.qubit_cap = *o.qubit_cap;
    if (o.checkpoints) c.checkpoints = *o.checkpoints;
    if (o.output_dir) c.output_dir = *o.output_dir;
    if (o.threads) c.threads = *o.threads;
    c.validate();
    if (!o.write_config.empty()) {
        save_config(c, o.write_config);
    }
    return c;
}

void emit_output(const std::string &out, const std::string &text) {
    if (out.empty() || out == "-") {
        std::cout << text;
    } else {
        write_text(out, text);
    }
}

int fail(const std::string &kind, const std::string &message) {
    nlohmann::json rec = {{"error", {{"kind", kind}, {"message", message}}}};
    std::cerr << rec.dump() << std::endl;
    return 1;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"PEPS simulation of random quantum circuits with an exact state-vector oracle"};
    app.require_subcommand(1);

    Overrides gen_o;
    auto *gen = app.add_subcommand("generate", "write circuit instance files");
    add_run_flags(gen, gen_o);

    Overrides run_o;
    auto *run = app.add_subcommand("run", "simulate every (instance, chi) and write reports");
    add_run_flags(run, run_o);

    std::vector<std::string> analyze_dirs;
    std::string analyze_out;
    auto *analyze = app.add_subcommand("analyze", "fit the fidelity laws over finished runs");
    analyze->add_option("runs", analyze_dirs, "run output directories")->required()->check(CLI::ExistingDirectory);
    analyze->add_option("-o,--out", analyze_out, "output file (default: stdout)");

    std::vector<std::string> emit_dirs;
    std::string emit_kind;
    std::string emit_out;
    auto *emit = app.add_subcommand("emit", "write a plot-data table");
    emit->add_option("-k,--kind", emit_kind,
                     "fidelity_vs_depth | epsilon_vs_chi | spectra | entropy | nxeb_scatter")
        ->required();
    emit->add_option("runs", emit_dirs, "run output directories")->required()->check(CLI::ExistingDirectory);
    emit->add_option("-o,--out", emit_out, "output file (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e);
        }
        return fail("usage", e.what());
    }

    try {
        if (*gen) {
            const RunConfig c = resolve(gen_o);
            const auto files = generate_instances(c);
            nlohmann::json out = {{"output_dir", c.output_dir}, {"instances", files}};
            std::cout << out.dump(1) << "\n";
        } else if (*run) {
            const RunConfig c = resolve(run_o);
            const RunResult r = run_experiment(c);
            nlohmann::json out = {{"manifest", r.manifest},
                                  {"config_hash", config_hash(c)},
                                  {"files", r.files.size()},
                                  {"oracle_refusals", r.oracle_refusals}};
            std::cout << out.dump(1) << "\n";
        } else if (*analyze) {
            emit_output(analyze_out, analyze_runs(analyze_dirs));
        } else if (*emit) {
            emit_output(emit_out, emit_plot_data(emit_dirs, parse_plot_kind(emit_kind)).to_csv());
        }
    } catch (const Error &e) {
        return fail(std::string(error_kind_name(e.kind())), e.what());
    } catch (const std::exception &e) {
        return fail("internal", e.what());
    }
    return 0;
}
