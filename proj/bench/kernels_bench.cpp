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

// Serial reference kernels against their OpenMP counterparts. Run with
// OMP_NUM_THREADS set to compare; with one thread the two should tie.

#include <benchmark/benchmark.h>

#include <numeric>
#include <random>

#include "pepsrqc/circuit.hpp"
#include "pepsrqc/kernels.hpp"
#include "pepsrqc/peps.hpp"

namespace {

using namespace pepsrqc;

std::vector<cplx> random_vector(std::size_t n) {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g;
    std::vector<cplx> v(n);
    for (auto &x : v) {
        x = {g(rng), g(rng)};
    }
    return v;
}

template <bool Parallel>
void BM_Permute(benchmark::State &state) {
    const auto chi = static_cast<std::size_t>(state.range(0));
    const std::vector<std::size_t> dims{2, chi, chi, chi, chi};
    const std::vector<std::size_t> perm{0, 3, 1, 4, 2};
    const auto in = random_vector(product(dims));
    std::vector<cplx> out(in.size());
    for (auto _ : state) {
        if constexpr (Parallel) {
            kernels::permute_parallel(in, dims, perm, out);
        } else {
            kernels::permute_serial(in, dims, perm, out);
        }
        benchmark::DoNotOptimize(out.data());
    }
    state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * in.size() * sizeof(cplx) * 2));
}

template <bool Parallel>
void BM_PermuteScale(benchmark::State &state) {
    const auto chi = static_cast<std::size_t>(state.range(0));
    const std::vector<std::size_t> dims{2, chi, chi, chi, chi};
    const std::vector<std::size_t> perm{0, 2, 1, 3, 4};
    const auto in = random_vector(product(dims));
    std::vector<double> w(chi);
    std::iota(w.begin(), w.end(), 1.0);
    kernels::LegWeights weights(5);
    weights[1] = w;
    weights[3] = w;
    weights[4] = w;
    std::vector<cplx> out(in.size());
    for (auto _ : state) {
        if constexpr (Parallel) {
            kernels::permute_scale_parallel(in, dims, perm, weights, out);
        } else {
            kernels::permute_scale_serial(in, dims, perm, weights, out);
        }
        benchmark::DoNotOptimize(out.data());
    }
    state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * in.size() * sizeof(cplx) * 2));
}

template <bool Parallel>
void BM_Apply1q(benchmark::State &state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    auto psi = random_vector(std::size_t{1} << n);
    const Mat2 g = sqrt_w();
    for (auto _ : state) {
        for (std::size_t q = 0; q < n; ++q) {
            if constexpr (Parallel) {
                kernels::apply_1q_parallel(psi, n, q, g);
            } else {
                kernels::apply_1q_serial(psi, n, q, g);
            }
        }
        benchmark::DoNotOptimize(psi.data());
    }
}

template <bool Parallel>
void BM_Apply2q(benchmark::State &state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    auto psi = random_vector(std::size_t{1} << n);
    const Mat4 g = fsim_matrix(1.5707963267948966, 0.5235987755982988);
    for (auto _ : state) {
        for (std::size_t q = 0; q + 1 < n; ++q) {
            if constexpr (Parallel) {
                kernels::apply_2q_parallel(psi, n, q, q + 1, g);
            } else {
                kernels::apply_2q_serial(psi, n, q, q + 1, g);
            }
        }
        benchmark::DoNotOptimize(psi.data());
    }
}

// Whole layers on a 6x6 lattice: edges of one scheduled set updated one after
// another versus concurrently.
template <bool Parallel>
void BM_Layers(benchmark::State &state) {
    const auto chi = static_cast<std::size_t>(state.range(0));
    const CircuitInstance c = generate_instance(6, 6, 12, Sequence::fsim(1.5707963267948966, 0.5235987755982988), 3);
    PepsOptions opt;
    opt.chi_max = chi;
    opt.parallel_edges = Parallel;
    opt.record_residual = false;
    for (auto _ : state) {
        PepsState s = init_product_state(c.lattice, opt);
        for (const auto &layer : c.layers) {
            apply_layer(s, layer);
        }
        benchmark::DoNotOptimize(s.log_fapx());
    }
}

}  // namespace

BENCHMARK(BM_Permute<false>)->Arg(8)->Arg(16)->Arg(24);
BENCHMARK(BM_Permute<true>)->Arg(8)->Arg(16)->Arg(24);
BENCHMARK(BM_PermuteScale<false>)->Arg(8)->Arg(16)->Arg(24);
BENCHMARK(BM_PermuteScale<true>)->Arg(8)->Arg(16)->Arg(24);
BENCHMARK(BM_Apply1q<false>)->Arg(16)->Arg(20);
BENCHMARK(BM_Apply1q<true>)->Arg(16)->Arg(20);
BENCHMARK(BM_Apply2q<false>)->Arg(16)->Arg(20);
BENCHMARK(BM_Apply2q<true>)->Arg(16)->Arg(20);
BENCHMARK(BM_Layers<false>)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Layers<true>)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
