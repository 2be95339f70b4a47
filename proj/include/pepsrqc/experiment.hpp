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

#pragma once

#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "pepsrqc/circuit.hpp"
#include "pepsrqc/oracle.hpp"
#include "pepsrqc/peps.hpp"
#include "pepsrqc/report.hpp"

namespace pepsrqc {

struct RunConfig {
    std::size_t rows = 4;
    std::size_t cols = 4;
    std::size_t depth = 8;
    Sequence sequence = Sequence::fsim(std::numbers::pi / 2, std::numbers::pi / 6);
    std::vector<std::size_t> chis{4};
    std::size_t instances = 1;
    std::uint64_t seed = 1;
    std::size_t gauge_sweeps = 2;
    GaugeSchedule gauge_schedule = GaugeSchedule::PerLayer;
    bool oracle = true;
    /// Oracle checkpoint spacing in layers; 0 picks 1 for n <= 16, else 4.
    std::size_t oracle_every = 0;
    std::size_t oracle_memory_bytes = kDefaultContractionBytes;
    std::size_t qubit_cap = kDefaultQubitCap;
    bool checkpoints = false;
    // Not part of the experiment's identity: excluded from the config hash.
    std::string output_dir = "pepsrqc_out";
    std::size_t threads = 1;

    void validate() const;
};

std::string config_to_json(const RunConfig &c);
RunConfig config_from_json(const std::string &text);
RunConfig load_config(const std::string &path);
void save_config(const RunConfig &c, const std::string &path);

/// SHA-256 over the semantic fields only.
std::string config_hash(const RunConfig &c);

/// PEPSRQC_OUTPUT_DIR and PEPSRQC_THREADS override the file values.
void apply_environment(RunConfig &c);

std::vector<std::size_t> oracle_depths(const RunConfig &c);
std::uint64_t instance_seed(const RunConfig &c, std::size_t instance);

struct RunResult {
    std::string manifest;
    std::vector<std::string> files;  // relative to output_dir
    std::size_t oracle_refusals = 0;
};

/// Writes config.json, manifest.json, instances/, traces/ and oracle/ under
/// output_dir. Oracle resource refusals are recorded per row; I/O failures
/// leave a manifest with "complete": false and rethrow.
RunResult run_experiment(const RunConfig &c);

/// Instance files only.
std::vector<std::string> generate_instances(const RunConfig &c);

enum class PlotKind { FidelityVsDepth, EpsilonVsChi, Spectra, Entropy, NxebScatter };

std::string plot_kind_name(PlotKind k);
PlotKind parse_plot_kind(const std::string &name);

/// Aggregates the runs under `run_dirs` into one table for the given plot kind.
Table emit_plot_data(const std::vector<std::string> &run_dirs, PlotKind kind);

/// Three-stage and scaling fits over the runs; returns a JSON document.
std::string analyze_runs(const std::vector<std::string> &run_dirs);

}  // namespace pepsrqc
