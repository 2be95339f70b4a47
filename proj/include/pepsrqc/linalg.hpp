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

#include <Eigen/Dense>
#include <vector>

#include "pepsrqc/tensor.hpp"

namespace pepsrqc::linalg {

using Matrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic>;
using Vector = Eigen::Matrix<cplx, Eigen::Dynamic, 1>;
using RealVector = Eigen::VectorXd;

struct Qr {
    Matrix q;  // m x k, k = min(m, n), orthonormal columns
    Matrix r;  // k x n upper trapezoidal, real non-negative diagonal
};

/// Householder QR (LAPACK zgeqrf/zungqr).
Qr qr_thin(const Matrix &a);

struct Svd {
    Matrix u;                 // m x k
    std::vector<double> s;    // k values, non-increasing
    Matrix vh;                // k x n
};

/// Thin SVD (LAPACK zgesdd, falling back to zgesvd if it does not converge).
Svd svd_thin(const Matrix &a);

/// Singular values only.
std::vector<double> singular_values(const Matrix &a);

/// Hermitian eigenvalues in ascending order.
std::vector<double> hermitian_eigenvalues(const Matrix &a);

}  // namespace pepsrqc::linalg
