// SPDX-License-Identifier: Apache-2.0
//
// cfmimo - cell-free massive MIMO downlink analysis library
// Copyright (C) 2026 The cfmimo authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef CFMIMO_TYPES_HPP
#define CFMIMO_TYPES_HPP

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace cfmimo
{
    using cdouble = std::complex<double>;
    using CMatrix = Eigen::MatrixXcd;
    using CVector = Eigen::VectorXcd;
    using RMatrix = Eigen::MatrixXd;
    using RVector = Eigen::VectorXd;

    // Block layout used throughout the library
    //
    //   channel matrices  G   : (M*L) x (K*N), block (m,k) at (m*L, k*N) of size L x N
    //   effective channel D   : (K*N) x (K*N), block (k,k') at (k*N, k'*N) of size N x N
    //   pilot books       Phi : tau x (K*N),   user k occupies columns k*N .. k*N+N-1
    //
    // Stacking keeps every per-realization product a single dense GEMM.

    /// Raised when an input violates a documented precondition.
    class InvalidArgument : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    /// Raised when a matrix that must be Hermitian positive definite is not.
    class NotPositiveDefinite : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    inline void require(bool condition, const std::string &message)
    {
        if (!condition)
            throw InvalidArgument(message);
    }

    /// (A + A^H) / 2
    inline CMatrix hermitian_part(const CMatrix &a)
    {
        return (a + a.adjoint()) * 0.5;
    }
}

#endif
