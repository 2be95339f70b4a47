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

#include "pepsrqc/tensor.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "pepsrqc/kernels.hpp"
#include "pepsrqc/linalg.hpp"

namespace pepsrqc {

std::string_view error_kind_name(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Dimension:
            return "dimension";
        case ErrorKind::Label:
            return "label";
        case ErrorKind::Split:
            return "split";
        case ErrorKind::DegenerateInput:
            return "degenerate_input";
        case ErrorKind::Size:
            return "size";
        case ErrorKind::Parameter:
            return "parameter";
        case ErrorKind::Resource:
            return "resource";
        case ErrorKind::Domain:
            return "domain";
        case ErrorKind::Underdetermined:
            return "underdetermined";
        case ErrorKind::Alignment:
            return "alignment";
        case ErrorKind::EmptyOutput:
            return "empty_output";
        case ErrorKind::Format:
            return "format";
        case ErrorKind::Io:
            return "io";
    }
    return "unknown";
}

std::size_t product(std::span<const std::size_t> dims) {
    return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

namespace {

void check_unique(const std::vector<std::string> &legs) {
    std::unordered_set<std::string> seen;
    for (const auto &l : legs) {
        if (!seen.insert(l).second) {
            throw Error(ErrorKind::Label, fmt::format("duplicate leg label '{}'", l));
        }
    }
}

}  // namespace

DenseTensor::DenseTensor(std::vector<std::string> legs, std::vector<std::size_t> dims)
    : legs_(std::move(legs)), dims_(std::move(dims)) {
    if (legs_.size() != dims_.size()) {
        throw Error(ErrorKind::Dimension, "leg count does not match dims");
    }
    for (auto d : dims_) {
        if (d == 0) {
            throw Error(ErrorKind::Dimension, "tensor extents must be positive");
        }
    }
    check_unique(legs_);
    data_.assign(product(dims_), cplx{0.0, 0.0});
}

DenseTensor::DenseTensor(std::vector<std::string> legs, std::vector<std::size_t> dims, std::vector<cplx> data)
    : DenseTensor(std::move(legs), std::move(dims)) {
    if (data.size() != data_.size()) {
        throw Error(ErrorKind::Dimension,
                    fmt::format("data holds {} values but dims need {}", data.size(), data_.size()));
    }
    data_ = std::move(data);
}

DenseTensor DenseTensor::scalar(cplx value) {
    return DenseTensor({}, {}, {value});
}

bool DenseTensor::has_leg(std::string_view label) const noexcept {
    return std::find(legs_.begin(), legs_.end(), label) != legs_.end();
}

std::size_t DenseTensor::leg_position(std::string_view label) const {
    auto it = std::find(legs_.begin(), legs_.end(), label);
    if (it == legs_.end()) {
        throw Error(ErrorKind::Label, fmt::format("unknown leg '{}' (legs: {})", label, legs_));
    }
    return static_cast<std::size_t>(it - legs_.begin());
}

namespace {

std::size_t flat_index(const std::vector<std::size_t> &dims, std::span<const std::size_t> index) {
    if (index.size() != dims.size()) {
        throw Error(ErrorKind::Dimension, "index rank mismatch");
    }
    std::size_t off = 0;
    for (std::size_t k = 0; k < dims.size(); ++k) {
        if (index[k] >= dims[k]) {
            throw Error(ErrorKind::Dimension, "index out of range");
        }
        off = off * dims[k] + index[k];
    }
    return off;
}

}  // namespace

cplx &DenseTensor::at(std::span<const std::size_t> index) {
    return data_[flat_index(dims_, index)];
}

cplx DenseTensor::at(std::span<const std::size_t> index) const {
    return data_[flat_index(dims_, index)];
}

DenseTensor DenseTensor::permuted(std::span<const std::string> order) const {
    if (order.size() != legs_.size()) {
        throw Error(ErrorKind::Label, "permutation must name every leg exactly once");
    }
    std::vector<std::size_t> perm(order.size());
    std::vector<std::string> new_legs(order.begin(), order.end());
    std::vector<std::size_t> new_dims(order.size());
    for (std::size_t j = 0; j < order.size(); ++j) {
        perm[j] = leg_position(order[j]);
        new_dims[j] = dims_[perm[j]];
    }
    check_unique(new_legs);
    bool identity = true;
    for (std::size_t j = 0; j < perm.size(); ++j) {
        identity = identity && perm[j] == j;
    }
    if (identity) {
        return *this;
    }
    DenseTensor out(std::move(new_legs), std::move(new_dims));
    kernels::permute(data_, dims_, perm, out.data_);
    return out;
}

DenseTensor DenseTensor::relabeled(std::string_view from, std::string to) const {
    DenseTensor out = *this;
    out.legs_[leg_position(from)] = std::move(to);
    check_unique(out.legs_);
    return out;
}

DenseTensor DenseTensor::sliced(std::string_view label, std::size_t index) const {
    const std::size_t pos = leg_position(label);
    if (index >= dims_[pos]) {
        throw Error(ErrorKind::Dimension, "slice index out of range");
    }
    std::size_t outer = 1;
    for (std::size_t k = 0; k < pos; ++k) {
        outer *= dims_[k];
    }
    std::size_t inner = 1;
    for (std::size_t k = pos + 1; k < dims_.size(); ++k) {
        inner *= dims_[k];
    }
    std::vector<std::size_t> nd = dims_;
    nd[pos] = 1;
    DenseTensor out(legs_, nd);
    for (std::size_t o = 0; o < outer; ++o) {
        const cplx *src = data_.data() + (o * dims_[pos] + index) * inner;
        std::copy(src, src + inner, out.data_.data() + o * inner);
    }
    return out;
}

double DenseTensor::norm() const {
    double s = 0.0;
    for (const auto &v : data_) {
        s += std::norm(v);
    }
    return std::sqrt(s);
}

DenseTensor DenseTensor::scaled(cplx factor) const {
    DenseTensor out = *this;
    for (auto &v : out.data_) {
        v *= factor;
    }
    return out;
}

DenseTensor DenseTensor::conj() const {
    DenseTensor out = *this;
    for (auto &v : out.data_) {
        v = std::conj(v);
    }
    return out;
}

DenseTensor contract(const DenseTensor &a, std::span<const std::string> legs_a, const DenseTensor &b,
                     std::span<const std::string> legs_b) {
    if (legs_a.size() != legs_b.size()) {
        throw Error(ErrorKind::Dimension, "contracted leg lists differ in length");
    }
    std::vector<std::size_t> pos_a(legs_a.size());
    std::vector<std::size_t> pos_b(legs_b.size());
    std::size_t inner = 1;
    for (std::size_t k = 0; k < legs_a.size(); ++k) {
        pos_a[k] = a.leg_position(legs_a[k]);
        pos_b[k] = b.leg_position(legs_b[k]);
        if (a.dims()[pos_a[k]] != b.dims()[pos_b[k]]) {
            throw Error(ErrorKind::Dimension,
                        fmt::format("extent mismatch contracting '{}' ({}) with '{}' ({})", legs_a[k],
                                    a.dims()[pos_a[k]], legs_b[k], b.dims()[pos_b[k]]));
        }
        inner *= a.dims()[pos_a[k]];
    }
    std::vector<std::string> order_a;
    std::vector<std::string> order_b(legs_b.begin(), legs_b.end());
    std::vector<std::string> out_legs;
    std::vector<std::size_t> out_dims;
    std::size_t rows = 1;
    for (std::size_t k = 0; k < a.rank(); ++k) {
        if (std::find(pos_a.begin(), pos_a.end(), k) == pos_a.end()) {
            order_a.push_back(a.legs()[k]);
            out_legs.push_back(a.legs()[k]);
            out_dims.push_back(a.dims()[k]);
            rows *= a.dims()[k];
        }
    }
    order_a.insert(order_a.end(), legs_a.begin(), legs_a.end());
    std::size_t cols = 1;
    for (std::size_t k = 0; k < b.rank(); ++k) {
        if (std::find(pos_b.begin(), pos_b.end(), k) == pos_b.end()) {
            order_b.push_back(b.legs()[k]);
            out_legs.push_back(b.legs()[k]);
            out_dims.push_back(b.dims()[k]);
            cols *= b.dims()[k];
        }
    }
    const DenseTensor pa = a.permuted(order_a);
    const DenseTensor pb = b.permuted(order_b);
    DenseTensor out(std::move(out_legs), std::move(out_dims));

    using RowMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    Eigen::Map<const RowMat> ma(pa.data().data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(inner));
    Eigen::Map<const RowMat> mb(pb.data().data(), static_cast<Eigen::Index>(inner), static_cast<Eigen::Index>(cols));
    Eigen::Map<RowMat> mo(out.data().data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    mo.noalias() = ma * mb;
    return out;
}

DenseTensor contract(const DenseTensor &a, std::initializer_list<std::string> legs_a, const DenseTensor &b,
                     std::initializer_list<std::string> legs_b) {
    std::vector<std::string> la(legs_a);
    std::vector<std::string> lb(legs_b);
    return contract(a, std::span<const std::string>(la), b, std::span<const std::string>(lb));
}

double frobenius_distance(const DenseTensor &a, const DenseTensor &b) {
    const DenseTensor pb = b.permuted(a.legs());
    if (pb.dims() != a.dims()) {
        throw Error(ErrorKind::Dimension, "tensors differ in shape");
    }
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        s += std::norm(a.data()[k] - pb.data()[k]);
    }
    return std::sqrt(s);
}

namespace {

struct MatrixView {
    std::vector<std::string> row_legs;
    std::vector<std::string> col_legs;
    std::vector<std::size_t> row_dims;
    std::vector<std::size_t> col_dims;
    linalg::Matrix m;
};

MatrixView as_matrix(const DenseTensor &t, std::span<const std::string> row_legs) {
    MatrixView v;
    if (row_legs.empty() || row_legs.size() >= t.rank()) {
        throw Error(ErrorKind::Split, "row legs must be a nonempty proper subset of the tensor's legs");
    }
    for (const auto &l : row_legs) {
        t.leg_position(l);
        v.row_legs.push_back(l);
        v.row_dims.push_back(t.dim(l));
    }
    for (std::size_t k = 0; k < t.rank(); ++k) {
        if (std::find(row_legs.begin(), row_legs.end(), t.legs()[k]) == row_legs.end()) {
            v.col_legs.push_back(t.legs()[k]);
            v.col_dims.push_back(t.dims()[k]);
        }
    }
    std::vector<std::string> order = v.row_legs;
    order.insert(order.end(), v.col_legs.begin(), v.col_legs.end());
    const DenseTensor p = t.permuted(order);
    const auto rows = static_cast<Eigen::Index>(product(v.row_dims));
    const auto cols = static_cast<Eigen::Index>(product(v.col_dims));
    using RowMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    v.m = Eigen::Map<const RowMat>(p.data().data(), rows, cols);
    return v;
}

DenseTensor from_matrix(const linalg::Matrix &m, std::vector<std::string> legs, std::vector<std::size_t> dims) {
    DenseTensor out(std::move(legs), std::move(dims));
    using RowMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    Eigen::Map<RowMat>(out.data().data(), m.rows(), m.cols()) = m;
    return out;
}

}  // namespace

QrSplit qr_split(const DenseTensor &t, std::span<const std::string> row_legs, const std::string &bond) {
    MatrixView v = as_matrix(t, row_legs);
    linalg::Qr f = linalg::qr_thin(v.m);
    const auto k = static_cast<std::size_t>(f.q.cols());
    std::vector<std::string> ql = v.row_legs;
    ql.push_back(bond);
    std::vector<std::size_t> qd = v.row_dims;
    qd.push_back(k);
    std::vector<std::string> rl{bond};
    rl.insert(rl.end(), v.col_legs.begin(), v.col_legs.end());
    std::vector<std::size_t> rd{k};
    rd.insert(rd.end(), v.col_dims.begin(), v.col_dims.end());
    return {from_matrix(f.q, std::move(ql), std::move(qd)), from_matrix(f.r, std::move(rl), std::move(rd))};
}

SvdResult svd_truncated(const DenseTensor &t, std::span<const std::string> row_legs, std::size_t max_rank,
                        double cutoff, const std::string &bond) {
    if (max_rank == 0) {
        throw Error(ErrorKind::Parameter, "max_rank must be at least 1");
    }
    if (cutoff < 0.0) {
        throw Error(ErrorKind::Parameter, "cutoff must be non-negative");
    }
    MatrixView v = as_matrix(t, row_legs);
    linalg::Svd f = linalg::svd_thin(v.m);
    double total = 0.0;
    for (double s : f.s) {
        total += s * s;
    }
    if (f.s.empty() || f.s.front() == 0.0) {
        throw Error(ErrorKind::DegenerateInput, "cannot decompose an all-zero tensor");
    }
    const double floor = cutoff * f.s.front();
    std::size_t keep = 0;
    while (keep < f.s.size() && keep < max_rank && f.s[keep] > floor) {
        ++keep;
    }
    double dropped = 0.0;
    for (std::size_t k = keep; k < f.s.size(); ++k) {
        dropped += f.s[k] * f.s[k];
    }
    SvdResult out;
    out.kept_rank = keep;
    out.discarded_weight = dropped / total;
    out.singular_values.assign(f.s.begin(), f.s.begin() + static_cast<std::ptrdiff_t>(keep));
    const auto kk = static_cast<Eigen::Index>(keep);
    std::vector<std::string> ll = v.row_legs;
    ll.push_back(bond);
    std::vector<std::size_t> ld = v.row_dims;
    ld.push_back(keep);
    std::vector<std::string> rl{bond};
    rl.insert(rl.end(), v.col_legs.begin(), v.col_legs.end());
    std::vector<std::size_t> rd{keep};
    rd.insert(rd.end(), v.col_dims.begin(), v.col_dims.end());
    out.left_isometry = from_matrix(f.u.leftCols(kk), std::move(ll), std::move(ld));
    out.right_isometry = from_matrix(f.vh.topRows(kk), std::move(rl), std::move(rd));
    return out;
}

}  // namespace pepsrqc
