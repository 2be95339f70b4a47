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
#include <span>
#include <vector>

#include "pepsrqc/circuit.hpp"
#include "pepsrqc/peps.hpp"

namespace pepsrqc {

/// epsilon with F = (1 - epsilon)^n_2qg, evaluated in the log domain.
double error_per_gate(double fidelity, std::size_t n_2qg);
double error_per_gate_log(double log_fidelity, std::size_t n_2qg);

/// Leading-order two-qubit gate count (2n - n_r - n_c) D / 4.
double nominal_two_qubit_gates(std::size_t n_r, std::size_t n_c, std::size_t depth);

struct ErrorRow {
    std::size_t depth = 0;
    double log_fidelity = 0.0;
    std::size_t n_2qg = 0;  // exact count from the schedule
    double epsilon = 0.0;
};

struct ErrorReport {
    std::vector<ErrorRow> rows;
};

/// One row per depth D >= 1, from log fidelities indexed by depth - 1.
ErrorReport error_report(const CircuitInstance &circuit, std::span<const double> log_fidelity_by_depth);
ErrorReport error_report(const CircuitInstance &circuit, const FidelityTrace &trace);

enum class FidelityKind { Exact, Approximate };

/// Piecewise law ln F = min(0, max(-eps_layer (D - D_tr), -n ln 2)); the floor
/// is dropped for approximate (F_apx) input, which keeps decaying.
struct ThreeStageFit {
    bool never_truncates = false;  // all points at F = 1: D_tr = inf, eps_layer = 0
    double d_tr = 0.0;
    double epsilon_layer = 0.0;
    double d_sat = 0.0;
    double rms = 0.0;        // over all points, in ln F
    double stage2_rms = 0.0;  // over the decaying points only
    std::size_t stage2_points = 0;

    double model(double depth, std::size_t n, FidelityKind kind) const;
};

ThreeStageFit fit_three_stage(std::span<const double> depths, std::span<const double> log_fidelity, std::size_t n,
                              FidelityKind kind);

struct ScalingPoint {
    std::size_t chi = 0;
    std::size_t depth = 0;
    double epsilon = 0.0;
};

/// eps(chi, D) = max(alpha (1 - beta log2(chi) / D), 0).
struct ScalingFit {
    double alpha = 0.0;
    double beta = 0.0;
    double residual = 0.0;  // RMS over the fitted points
    std::size_t points = 0;
    std::size_t instances = 0;

    double truncation_depth(std::size_t chi) const;
    double epsilon_layer(std::size_t n) const;
    double saturation_depth(std::size_t chi, std::size_t n) const;
    double predict(std::size_t chi, std::size_t depth) const;
};

/// Least squares in u = log2(chi) / D over points with epsilon > 0.
ScalingFit fit_scaling(std::span<const ScalingPoint> points, std::size_t instances = 1);

/// (1/D)(ln 2 - ln(4 chi) / (n/2)), clamped at zero.
double mps_error_reference(std::size_t n, std::size_t chi, std::size_t depth);

struct CostEstimate {
    double flops = 0.0;         // bond projections: D n chi^5 d^2
    double svd_flops = 0.0;     // D n chi^3 d^6
    double memory_bytes = 0.0;  // n chi^4 d complex doubles
};

CostEstimate cost_estimate(std::size_t n_r, std::size_t n_c, std::size_t chi, std::size_t depth);

/// D_ac = (beta / 2) log2 n.
double anticoncentration_depth(std::size_t n, double beta);

struct Series {
    std::vector<double> depths;
    std::vector<double> values;
};

struct AggregateSeries {
    std::vector<double> depths;
    std::vector<double> mean;
    std::vector<double> stddev;  // sample standard deviation
    std::size_t instances = 0;
};

AggregateSeries aggregate_instances(std::span<const Series> reports);

}  // namespace pepsrqc
