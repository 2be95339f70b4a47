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

// Data-parallel inner loops. Every kernel has a serial reference and an
// OpenMP version that must produce bit-identical output; the dispatching
// entry point picks the OpenMP path for large inputs when more than one
// thread is available.

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "pepsrqc/tensor.hpp"

namespace pepsrqc::kernels {

using Mat2 = std::array<cplx, 4>;   // row-major 2x2
using Mat4 = std::array<cplx, 16>;  // row-major 4x4 in basis |00>,|01>,|10>,|11>

/// Optional per-leg diagonal weights for permute_scale. An empty span means unit weights.
using LegWeights = std::vector<std::span<const double>>;

/// out[j_0..j_k] = in[i] where output leg j takes input leg perm[j].
void permute_serial(std::span<const cplx> in, std::span<const std::size_t> dims, std::span<const std::size_t> perm,
                    std::span<cplx> out);
void permute_parallel(std::span<const cplx> in, std::span<const std::size_t> dims,
                      std::span<const std::size_t> perm, std::span<cplx> out);
void permute(std::span<const cplx> in, std::span<const std::size_t> dims, std::span<const std::size_t> perm,
             std::span<cplx> out);

/// Permutation fused with a diagonal rescaling of input legs:
/// out = permute(in) * prod_k weights[k][i_k].
void permute_scale_serial(std::span<const cplx> in, std::span<const std::size_t> dims,
                          std::span<const std::size_t> perm, const LegWeights &weights, std::span<cplx> out);
void permute_scale_parallel(std::span<const cplx> in, std::span<const std::size_t> dims,
                            std::span<const std::size_t> perm, const LegWeights &weights, std::span<cplx> out);
void permute_scale(std::span<const cplx> in, std::span<const std::size_t> dims, std::span<const std::size_t> perm,
                   const LegWeights &weights, std::span<cplx> out);

// State-vector gates. Qubit q of an n-qubit register is bit (n - 1 - q) of the
// basis index, i.e. qubit 0 is the most significant.
void apply_1q_serial(std::span<cplx> psi, std::size_t n, std::size_t q, const Mat2 &g);
void apply_1q_parallel(std::span<cplx> psi, std::size_t n, std::size_t q, const Mat2 &g);
void apply_1q(std::span<cplx> psi, std::size_t n, std::size_t q, const Mat2 &g);

/// Two-qubit gate with q0 as the first (more significant) factor of the gate basis.
void apply_2q_serial(std::span<cplx> psi, std::size_t n, std::size_t q0, std::size_t q1, const Mat4 &g);
void apply_2q_parallel(std::span<cplx> psi, std::size_t n, std::size_t q0, std::size_t q1, const Mat4 &g);
void apply_2q(std::span<cplx> psi, std::size_t n, std::size_t q0, std::size_t q1, const Mat4 &g);

/// Below this many elements the dispatchers stay serial.
inline constexpr std::size_t kParallelThreshold = std::size_t{1} << 15;

}  // namespace pepsrqc::kernels
