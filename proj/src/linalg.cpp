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

#include "pepsrqc/linalg.hpp"

#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace pepsrqc::linalg {

Qr qr_thin(const Matrix &a) {
    const lapack_int m = static_cast<lapack_int>(a.rows());
    const lapack_int n = static_cast<lapack_int>(a.cols());
    const lapack_int k = std::min(m, n);
    Qr out;
    if (k == 0) {
        out.q = Matrix::Zero(m, 0);
        out.r = Matrix::Zero(0, n);
        return out;
    }
    Matrix work = a;
    std::vector<cplx> tau(static_cast<std::size_t>(k));
    lapack_int info = LAPACKE_zgeqrf(LAPACK_COL_MAJOR, m, n, work.data(), m, tau.data());
    if (info != 0) {
        throw Error(ErrorKind::DegenerateInput, fmt::format("zgeqrf failed (info={})", info));
    }
    out.r = work.topRows(k).triangularView<Eigen::Upper>();
    Matrix q = work.leftCols(k);
    info = LAPACKE_zungqr(LAPACK_COL_MAJOR, m, k, k, q.data(), m, tau.data());
    if (info != 0) {
        throw Error(ErrorKind::DegenerateInput, fmt::format("zungqr failed (info={})", info));
    }
    // Real non-negative diagonal of r.
    for (lapack_int j = 0; j < k; ++j) {
        const cplx d = out.r(j, j);
        const double mag = std::abs(d);
        if (mag > 0.0) {
            const cplx phase = d / mag;
            out.r.row(j) *= std::conj(phase);
            q.col(j) *= phase;
            out.r(j, j) = mag;
        }
    }
    out.q = std::move(q);
    return out;
}

Svd svd_thin(const Matrix &a) {
    const lapack_int m = static_cast<lapack_int>(a.rows());
    const lapack_int n = static_cast<lapack_int>(a.cols());
    const lapack_int k = std::min(m, n);
    Svd out;
    if (k == 0) {
        out.u = Matrix::Zero(m, 0);
        out.vh = Matrix::Zero(0, n);
        return out;
    }
    Matrix work = a;
    out.u.resize(m, k);
    out.vh.resize(k, n);
    out.s.assign(static_cast<std::size_t>(k), 0.0);
    lapack_int info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'S', m, n, work.data(), m, out.s.data(), out.u.data(), m,
                                     out.vh.data(), k);
    if (info != 0) {
        work = a;
        std::vector<double> superb(static_cast<std::size_t>(k));
        info = LAPACKE_zgesvd(LAPACK_COL_MAJOR, 'S', 'S', m, n, work.data(), m, out.s.data(), out.u.data(), m,
                              out.vh.data(), k, superb.data());
        if (info != 0) {
            throw Error(ErrorKind::DegenerateInput, fmt::format("SVD did not converge (info={})", info));
        }
    }
    return out;
}

std::vector<double> singular_values(const Matrix &a) {
    const lapack_int m = static_cast<lapack_int>(a.rows());
    const lapack_int n = static_cast<lapack_int>(a.cols());
    const lapack_int k = std::min(m, n);
    std::vector<double> s(static_cast<std::size_t>(k));
    if (k == 0) {
        return s;
    }
    Matrix work = a;
    lapack_int info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'N', m, n, work.data(), m, s.data(), nullptr, 1, nullptr, 1);
    if (info != 0) {
        throw Error(ErrorKind::DegenerateInput, fmt::format("SVD did not converge (info={})", info));
    }
    return s;
}

std::vector<double> hermitian_eigenvalues(const Matrix &a) {
    const lapack_int n = static_cast<lapack_int>(a.rows());
    std::vector<double> w(static_cast<std::size_t>(n));
    if (n == 0) {
        return w;
    }
    Matrix work = a;
    lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'N', 'U', n, work.data(), n, w.data());
    if (info != 0) {
        throw Error(ErrorKind::DegenerateInput, fmt::format("zheevd failed (info={})", info));
    }
    return w;
}

}  // namespace pepsrqc::linalg
