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

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "pepsrqc/error.hpp"

namespace pepsrqc {

using cplx = std::complex<double>;

/// Dense complex tensor with labelled legs.
///
/// Storage is row-major: the last leg varies fastest. A tensor with dims
/// (d0, d1, ..., dk) stores element (i0, ..., ik) at offset
/// ((i0 * d1 + i1) * d2 + ...) * dk + ik. Every reshape in the library is a
/// copy through this convention, never a reinterpretation of another layout.
class DenseTensor {
   public:
    DenseTensor() = default;
    /// Zero-initialised tensor.
    DenseTensor(std::vector<std::string> legs, std::vector<std::size_t> dims);
    DenseTensor(std::vector<std::string> legs, std::vector<std::size_t> dims, std::vector<cplx> data);

    static DenseTensor scalar(cplx value);

    std::size_t rank() const noexcept {
        return dims_.size();
    }
    std::size_t size() const noexcept {
        return data_.size();
    }
    const std::vector<std::size_t> &dims() const noexcept {
        return dims_;
    }
    const std::vector<std::string> &legs() const noexcept {
        return legs_;
    }
    std::span<const cplx> data() const noexcept {
        return data_;
    }
    std::span<cplx> data() noexcept {
        return data_;
    }
    std::vector<cplx> &storage() noexcept {
        return data_;
    }

    bool has_leg(std::string_view label) const noexcept;
    /// Position of a leg; throws a label error when absent.
    std::size_t leg_position(std::string_view label) const;
    std::size_t dim(std::string_view label) const {
        return dims_[leg_position(label)];
    }

    cplx &at(std::span<const std::size_t> index);
    cplx at(std::span<const std::size_t> index) const;

    /// Copy with legs reordered to `order`.
    DenseTensor permuted(std::span<const std::string> order) const;
    DenseTensor permuted(std::initializer_list<std::string> order) const {
        std::vector<std::string> o(order);
        return permuted(std::span<const std::string>(o));
    }
    DenseTensor relabeled(std::string_view from, std::string to) const;
    /// Restrict one leg to a single index, keeping it with extent 1.
    DenseTensor sliced(std::string_view label, std::size_t index) const;

    double norm() const;
    DenseTensor scaled(cplx factor) const;
    DenseTensor conj() const;

   private:
    std::vector<std::string> legs_;
    std::vector<std::size_t> dims_;
    std::vector<cplx> data_;
};

std::size_t product(std::span<const std::size_t> dims);

/// Contracts `legs_a` of `a` with `legs_b` of `b` pairwise. The result carries
/// the remaining legs of `a` followed by those of `b`, each in original order.
/// Labels of the two operands' free legs must not collide.
DenseTensor contract(const DenseTensor &a, std::span<const std::string> legs_a, const DenseTensor &b,
                     std::span<const std::string> legs_b);
DenseTensor contract(const DenseTensor &a, std::initializer_list<std::string> legs_a, const DenseTensor &b,
                     std::initializer_list<std::string> legs_b);

/// Frobenius distance between two tensors with identical legs (b is permuted to a's order).
double frobenius_distance(const DenseTensor &a, const DenseTensor &b);

struct QrSplit {
    DenseTensor q;  // legs: row legs..., bond
    DenseTensor r;  // legs: bond, column legs...
};

/// Thin QR across `row_legs | rest`. The diagonal of r is real and non-negative.
QrSplit qr_split(const DenseTensor &t, std::span<const std::string> row_legs, const std::string &bond = "bond");

struct SvdResult {
    DenseTensor left_isometry;   // legs: row legs..., bond
    std::vector<double> singular_values;
    DenseTensor right_isometry;  // legs: bond, column legs...
    double discarded_weight = 0.0;
    std::size_t kept_rank = 0;
};

/// Truncated SVD across `row_legs | rest`. Keeps at most `max_rank` values and
/// only those strictly above `cutoff * sigma_max`. The singular values are
/// returned as computed (not renormalised).
SvdResult svd_truncated(const DenseTensor &t, std::span<const std::string> row_legs, std::size_t max_rank,
                        double cutoff = 0.0, const std::string &bond = "bond");

}  // namespace pepsrqc
