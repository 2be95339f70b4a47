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

#include "pepsrqc/kernels.hpp"

#include <omp.h>

#include <cassert>

namespace pepsrqc::kernels {
namespace {

struct PermutePlan {
    std::vector<std::size_t> out_dims;
    std::vector<std::size_t> in_strides;  // indexed by output leg
    std::size_t inner = 1;                 // extent of the last output leg
    std::size_t inner_stride = 1;          // input stride of the last output leg
    std::size_t rows = 1;                  // product of the other output extents
};

PermutePlan make_plan(std::span<const std::size_t> dims, std::span<const std::size_t> perm) {
    assert(dims.size() == perm.size());
    const std::size_t k = dims.size();
    std::vector<std::size_t> strides(k, 1);
    for (std::size_t i = k; i-- > 1;) {
        strides[i - 1] = strides[i] * dims[i];
    }
    PermutePlan p;
    p.out_dims.resize(k);
    p.in_strides.resize(k);
    for (std::size_t j = 0; j < k; ++j) {
        p.out_dims[j] = dims[perm[j]];
        p.in_strides[j] = strides[perm[j]];
    }
    if (k > 0) {
        p.inner = p.out_dims.back();
        p.inner_stride = p.in_strides.back();
        for (std::size_t j = 0; j + 1 < k; ++j) {
            p.rows *= p.out_dims[j];
        }
    }
    return p;
}

// Input offset and leg indices of output row `row`.
std::size_t row_offset(const PermutePlan &p, std::size_t row, std::vector<std::size_t> &idx) {
    std::size_t off = 0;
    for (std::size_t j = p.out_dims.size() - 1; j-- > 0;) {
        idx[j] = row % p.out_dims[j];
        row /= p.out_dims[j];
        off += idx[j] * p.in_strides[j];
    }
    return off;
}

void permute_rows(const PermutePlan &p, std::span<const cplx> in, std::span<cplx> out, std::size_t row_begin,
                  std::size_t row_end) {
    if (p.out_dims.empty()) {
        out[0] = in[0];
        return;
    }
    std::vector<std::size_t> idx(p.out_dims.size(), 0);
    for (std::size_t row = row_begin; row < row_end; ++row) {
        const std::size_t off = row_offset(p, row, idx);
        cplx *dst = out.data() + row * p.inner;
        const cplx *src = in.data() + off;
        if (p.inner_stride == 1) {
            std::copy(src, src + p.inner, dst);
        } else {
            for (std::size_t j = 0; j < p.inner; ++j) {
                dst[j] = src[j * p.inner_stride];
            }
        }
    }
}

struct ScalePlan {
    std::vector<std::span<const double>> out_weights;  // by output leg
};

void permute_scale_rows(const PermutePlan &p, const ScalePlan &s, std::span<const cplx> in, std::span<cplx> out,
                        std::size_t row_begin, std::size_t row_end) {
    if (p.out_dims.empty()) {
        out[0] = in[0];
        return;
    }
    const std::size_t k = p.out_dims.size();
    const auto &last_w = s.out_weights[k - 1];
    std::vector<std::size_t> idx(k, 0);
    for (std::size_t row = row_begin; row < row_end; ++row) {
        const std::size_t off = row_offset(p, row, idx);
        double w = 1.0;
        for (std::size_t j = 0; j + 1 < k; ++j) {
            if (!s.out_weights[j].empty()) {
                w *= s.out_weights[j][idx[j]];
            }
        }
        cplx *dst = out.data() + row * p.inner;
        const cplx *src = in.data() + off;
        if (last_w.empty()) {
            for (std::size_t j = 0; j < p.inner; ++j) {
                dst[j] = src[j * p.inner_stride] * w;
            }
        } else {
            for (std::size_t j = 0; j < p.inner; ++j) {
                dst[j] = src[j * p.inner_stride] * (w * last_w[j]);
            }
        }
    }
}

ScalePlan make_scale_plan(std::span<const std::size_t> perm, const LegWeights &weights) {
    ScalePlan s;
    s.out_weights.resize(perm.size());
    for (std::size_t j = 0; j < perm.size(); ++j) {
        if (perm[j] < weights.size()) {
            s.out_weights[j] = weights[perm[j]];
        }
    }
    return s;
}

bool use_parallel(std::size_t size) {
    return size >= kParallelThreshold && omp_get_max_threads() > 1;
}

}  // namespace

void permute_serial(std::span<const cplx> in, std::span<const std::size_t> dims, std::span<const std::size_t> perm,
                    std::span<cplx> out) {
    const PermutePlan p = make_plan(dims, perm);
    permute_rows(p, in, out, 0, p.rows);
}

void permute_parallel(std::span<const cplx> in, std::span<const std::size_t> dims,
                      std::span<const std::size_t> perm, std::span<cplx> out) {
    const PermutePlan p = make_plan(dims, perm);
    const auto rows = static_cast<std::ptrdiff_t>(p.rows);
#pragma omp parallel
    {
        const auto nt = static_cast<std::ptrdiff_t>(omp_get_num_threads());
        const auto t = static_cast<std::ptrdiff_t>(omp_get_thread_num());
        const std::ptrdiff_t begin = rows * t / nt;
        const std::ptrdiff_t end = rows * (t + 1) / nt;
        permute_rows(p, in, out, static_cast<std::size_t>(begin), static_cast<std::size_t>(end));
    }
}

void permute(std::span<const cplx> in, std::span<const std::size_t> dims, std::span<const std::size_t> perm,
             std::span<cplx> out) {
    if (use_parallel(in.size())) {
        permute_parallel(in, dims, perm, out);
    } else {
        permute_serial(in, dims, perm, out);
    }
}

void permute_scale_serial(std::span<const cplx> in, std::span<const std::size_t> dims,
                          std::span<const std::size_t> perm, const LegWeights &weights, std::span<cplx> out) {
    const PermutePlan p = make_plan(dims, perm);
    const ScalePlan s = make_scale_plan(perm, weights);
    permute_scale_rows(p, s, in, out, 0, p.rows);
}

void permute_scale_parallel(std::span<const cplx> in, std::span<const std::size_t> dims,
                            std::span<const std::size_t> perm, const LegWeights &weights, std::span<cplx> out) {
    const PermutePlan p = make_plan(dims, perm);
    const ScalePlan s = make_scale_plan(perm, weights);
    const auto rows = static_cast<std::ptrdiff_t>(p.rows);
#pragma omp parallel
    {
        const auto nt = static_cast<std::ptrdiff_t>(omp_get_num_threads());
        const auto t = static_cast<std::ptrdiff_t>(omp_get_thread_num());
        const std::ptrdiff_t begin = rows * t / nt;
        const std::ptrdiff_t end = rows * (t + 1) / nt;
        permute_scale_rows(p, s, in, out, static_cast<std::size_t>(begin), static_cast<std::size_t>(end));
    }
}

void permute_scale(std::span<const cplx> in, std::span<const std::size_t> dims, std::span<const std::size_t> perm,
                   const LegWeights &weights, std::span<cplx> out) {
    if (use_parallel(in.size())) {
        permute_scale_parallel(in, dims, perm, weights, out);
    } else {
        permute_scale_serial(in, dims, perm, weights, out);
    }
}

void apply_1q_serial(std::span<cplx> psi, std::size_t n, std::size_t q, const Mat2 &g) {
    const std::size_t bit = std::size_t{1} << (n - 1 - q);
    const std::size_t half = psi.size() / 2;
    for (std::size_t k = 0; k < half; ++k) {
        const std::size_t i0 = ((k & ~(bit - 1)) << 1) | (k & (bit - 1));
        const std::size_t i1 = i0 | bit;
        const cplx a = psi[i0];
        const cplx b = psi[i1];
        psi[i0] = g[0] * a + g[1] * b;
        psi[i1] = g[2] * a + g[3] * b;
    }
}

void apply_1q_parallel(std::span<cplx> psi, std::size_t n, std::size_t q, const Mat2 &g) {
    const std::size_t bit = std::size_t{1} << (n - 1 - q);
    const auto half = static_cast<std::ptrdiff_t>(psi.size() / 2);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t kk = 0; kk < half; ++kk) {
        const auto k = static_cast<std::size_t>(kk);
        const std::size_t i0 = ((k & ~(bit - 1)) << 1) | (k & (bit - 1));
        const std::size_t i1 = i0 | bit;
        const cplx a = psi[i0];
        const cplx b = psi[i1];
        psi[i0] = g[0] * a + g[1] * b;
        psi[i1] = g[2] * a + g[3] * b;
    }
}

void apply_1q(std::span<cplx> psi, std::size_t n, std::size_t q, const Mat2 &g) {
    if (use_parallel(psi.size())) {
        apply_1q_parallel(psi, n, q, g);
    } else {
        apply_1q_serial(psi, n, q, g);
    }
}

namespace {

inline std::size_t insert_zero_bits(std::size_t k, std::size_t lo, std::size_t hi) {
    // lo < hi are single-bit masks; open a zero at each position.
    k = ((k & ~(lo - 1)) << 1) | (k & (lo - 1));
    k = ((k & ~(hi - 1)) << 1) | (k & (hi - 1));
    return k;
}

inline void apply_2q_block(std::span<cplx> psi, std::size_t base, std::size_t b0, std::size_t b1, const Mat4 &g) {
    const std::size_t idx[4] = {base, base | b1, base | b0, base | b0 | b1};
    const cplx v[4] = {psi[idx[0]], psi[idx[1]], psi[idx[2]], psi[idx[3]]};
    for (int r = 0; r < 4; ++r) {
        psi[idx[r]] = g[4 * r] * v[0] + g[4 * r + 1] * v[1] + g[4 * r + 2] * v[2] + g[4 * r + 3] * v[3];
    }
}

}  // namespace

void apply_2q_serial(std::span<cplx> psi, std::size_t n, std::size_t q0, std::size_t q1, const Mat4 &g) {
    const std::size_t b0 = std::size_t{1} << (n - 1 - q0);
    const std::size_t b1 = std::size_t{1} << (n - 1 - q1);
    const std::size_t lo = std::min(b0, b1);
    const std::size_t hi = std::max(b0, b1);
    const std::size_t quarter = psi.size() / 4;
    for (std::size_t k = 0; k < quarter; ++k) {
        apply_2q_block(psi, insert_zero_bits(k, lo, hi), b0, b1, g);
    }
}

void apply_2q_parallel(std::span<cplx> psi, std::size_t n, std::size_t q0, std::size_t q1, const Mat4 &g) {
    const std::size_t b0 = std::size_t{1} << (n - 1 - q0);
    const std::size_t b1 = std::size_t{1} << (n - 1 - q1);
    const std::size_t lo = std::min(b0, b1);
    const std::size_t hi = std::max(b0, b1);
    const auto quarter = static_cast<std::ptrdiff_t>(psi.size() / 4);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < quarter; ++k) {
        apply_2q_block(psi, insert_zero_bits(static_cast<std::size_t>(k), lo, hi), b0, b1, g);
    }
}

void apply_2q(std::span<cplx> psi, std::size_t n, std::size_t q0, std::size_t q1, const Mat4 &g) {
    if (use_parallel(psi.size())) {
        apply_2q_parallel(psi, n, q0, q1, g);
    } else {
        apply_2q_serial(psi, n, q0, q1, g);
    }
}

}  // namespace pepsrqc::kernels
