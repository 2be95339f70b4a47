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

#include <optional>
#include <string>
#include <vector>

#include "pepsrqc/circuit.hpp"
#include "pepsrqc/tensor.hpp"

namespace pepsrqc {

/// When the gauging sweeps run: once after all gates of a layer, or after every two-qubit gate.
enum class GaugeSchedule { PerLayer, PerGate };

struct PepsOptions {
    std::size_t chi_max = 2;
    std::size_t gauge_sweeps = 2;
    GaugeSchedule gauge_schedule = GaugeSchedule::PerLayer;
    /// Lambda entries below inverse_floor * max are treated as zero when factored out.
    double inverse_floor = 1e-12;
    /// Singular values at or below rank_cutoff * max are numerical zeros and are
    /// dropped by gate updates even when the bond is below chi_max.
    double rank_cutoff = 1e-12;
    bool validate_gates = true;
    /// Update the (tensor-disjoint) edges of one scheduled set concurrently.
    bool parallel_edges = false;
    /// Measure gauge_residual after every layer for the trace.
    bool record_residual = true;
};

struct EdgeWeight {
    std::size_t edge = 0;
    double weight = 0.0;
};

struct LayerRecord {
    std::size_t layer = 0;
    std::vector<EdgeWeight> discarded;  // one entry per two-qubit gate
    double log_factor = 0.0;            // sum of ln(1 - w) over the layer
    double log_fapx = 0.0;              // cumulative after this layer
    std::size_t max_bond = 1;
    double gauge_residual = 0.0;        // NaN when not recorded
    double seconds = 0.0;
};

/// Per-layer record of truncations. F_apx = exp(sum of log_factor).
struct FidelityTrace {
    std::vector<LayerRecord> layers;

    double log_fapx() const;
};

/// Vidal-gauge PEPS. Gamma tensors carry legs "p", "l", "r", "u", "d" in that
/// order; boundary legs have extent 1 and an implicit lambda of {1}. Lambda
/// vectors live on lattice edges, sorted non-increasing.
class PepsState {
   public:
    PepsState() = default;
    PepsState(Lattice lattice, PepsOptions options, std::vector<DenseTensor> gamma,
              std::vector<std::vector<double>> lambda, double log_fapx = 0.0, FidelityTrace trace = {});

    const Lattice &lattice() const noexcept {
        return lattice_;
    }
    const PepsOptions &options() const noexcept {
        return options_;
    }
    PepsOptions &options() noexcept {
        return options_;
    }
    const DenseTensor &gamma(std::size_t site) const {
        return gamma_.at(site);
    }
    DenseTensor &gamma(std::size_t site) {
        return gamma_.at(site);
    }
    const std::vector<double> &lambda(std::size_t edge) const {
        return lambda_.at(edge);
    }
    std::vector<double> &lambda(std::size_t edge) {
        return lambda_.at(edge);
    }
    std::size_t bond_dim(std::size_t edge) const {
        return lambda_.at(edge).size();
    }
    std::size_t max_bond_dim() const;
    double log_fapx() const noexcept {
        return log_fapx_;
    }
    double fapx() const;
    const FidelityTrace &trace() const noexcept {
        return trace_;
    }

    // Engine internals.
    void add_log_fidelity(double delta) noexcept {
        log_fapx_ += delta;
    }
    FidelityTrace &trace() noexcept {
        return trace_;
    }

   private:
    Lattice lattice_;
    PepsOptions options_;
    std::vector<DenseTensor> gamma_;
    std::vector<std::vector<double>> lambda_;
    double log_fapx_ = 0.0;
    FidelityTrace trace_;
};

/// |0...0> with every bond of dimension 1.
PepsState init_product_state(const Lattice &lattice, PepsOptions options = {});

void apply_single_qubit(PepsState &state, std::size_t site, const Mat2 &gate);

/// One simple-update step on `edge`. With a gate, the gate acts on
/// |x_a x_b> where a < b are the edge's sites. With truncate, at most chi_max
/// singular values are kept and the discarded weight is returned (but not
/// added to the ledger; apply_layer does that). Without a gate and without
/// truncation this is one gauging pass over the bond.
double simple_update(PepsState &state, std::size_t edge, const std::optional<Mat4> &gate, bool truncate);

/// `sweeps` passes of gate-free simple updates over all edges in reading order.
void gauge_sweep(PepsState &state, std::size_t sweeps);

/// Single-qubit gates, truncated two-qubit updates on the scheduled edges,
/// then gauging; appends a LayerRecord and updates the fidelity ledger.
void apply_layer(PepsState &state, const Layer &layer);
void apply_layer(PepsState &state, const Layer &layer, std::size_t chi_max);

/// Largest deviation from the Vidal-gauge normalization conditions.
double gauge_residual(const PepsState &state);

std::vector<std::vector<double>> lambda_spectra(const PepsState &state);

/// Binary checkpoint of all tensors plus the fidelity ledger.
void save_checkpoint(const PepsState &state, const std::string &path);
PepsState load_checkpoint(const std::string &path);

}  // namespace pepsrqc
