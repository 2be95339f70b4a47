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

/// Amplitudes over the computational basis. Site s is bit (n - 1 - s) of the
/// index: reading order, site 0 most significant.
struct StateVector {
    std::size_t n = 0;
    std::vector<cplx> amplitudes;

    double norm() const;
};

inline constexpr std::size_t kDefaultQubitCap = 25;
/// Default peak-memory bound for exact PEPS contraction.
inline constexpr std::size_t kDefaultContractionBytes = std::size_t{3} << 30;

StateVector zero_state(std::size_t n, std::size_t qubit_cap = kDefaultQubitCap);

void statevector_apply_layer(StateVector &psi, const Layer &layer);

/// Runs the first `depth` layers of the circuit (all of them by default).
StateVector statevector_run(const CircuitInstance &circuit, std::size_t depth = static_cast<std::size_t>(-1),
                            std::size_t qubit_cap = kDefaultQubitCap);

/// Peak bytes the exact contraction of `state` would need.
std::size_t contraction_bytes(const PepsState &state);

/// Full contraction of the PEPS into 2^n amplitudes. Each lambda is split as
/// sqrt on both adjacent sites. The four lattice quadrants are contracted
/// separately and then joined one index of a cut bond at a time, so the peak
/// is set by the quadrant tensors. Throws a resource error above `memory_cap`
/// bytes.
std::vector<cplx> peps_amplitudes(const PepsState &state, std::size_t memory_cap = kDefaultContractionBytes);

/// <psi|PEPS>.
cplx peps_overlap(const PepsState &state, const StateVector &psi, std::size_t memory_cap = kDefaultContractionBytes);

/// |<psi|PEPS>|^2 / (<psi|psi> <PEPS|PEPS>).
double exact_fidelity(const PepsState &state, const StateVector &psi,
                      std::size_t memory_cap = kDefaultContractionBytes);
double fidelity(std::span<const cplx> a, std::span<const cplx> b);

std::vector<double> probabilities(std::span<const cplx> amplitudes);

/// Normalized linear cross entropy. p_peps is renormalized before use.
double nxeb(std::span<const double> p_peps, std::span<const double> p_ex);

/// Kolmogorov-Smirnov distance between {2^n p(x)} and the unit exponential.
double ptd_distance(std::span<const double> p);

struct EntanglementCut {
    double entropy = 0.0;          // bits
    std::vector<double> spectrum;  // reduced-density eigenvalues, non-increasing
};

/// Bipartition into sites [0, cut) and [cut, n).
EntanglementCut entanglement(const StateVector &psi, std::size_t cut);
double entanglement_entropy(const StateVector &psi, std::size_t cut);
/// S_i for i = 1 .. n-1.
std::vector<double> entropy_profile(const StateVector &psi);

/// Operator Schmidt coefficients of a two-qubit gate, divided by the largest.
/// Values below 1e-12 of the largest are dropped.
std::vector<double> operator_schmidt(const Mat4 &gate);

struct OracleMetrics {
    std::size_t depth = 0;
    double f_ex = 0.0;
    double f_nxeb = 0.0;
    double ptd = 0.0;
    std::vector<double> entropy_profile;
    std::vector<std::vector<double>> spectra;  // one per cut, same order as entropy_profile
};

/// All metrics for a PEPS against the exact state at the same depth.
OracleMetrics oracle_metrics(const PepsState &state, const StateVector &psi, std::size_t depth,
                             std::size_t memory_cap = kDefaultContractionBytes);

}  // namespace pepsrqc
