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

#include "cfmimo/channel.hpp"

#include <cmath>

namespace cfmimo::channel
{
    void draw_channels_into(ChannelSet &chans, const RMatrix &beta, RandomStream &rng)
    {
        require(beta.rows() == chans.M && beta.cols() == chans.K, "beta shape does not match the channel set");
        chans.g.resize(chans.M * chans.L, chans.K * chans.N);
        rng.fill_complex_normal(chans.g);
        for (int m = 0; m < chans.M; ++m)
            for (int k = 0; k < chans.K; ++k)
                chans.block(m, k) *= std::sqrt(beta(m, k));
    }

    ChannelSet draw_channels(const RMatrix &beta, int L, int N, RandomStream &rng)
    {
        require(L >= 1 && N >= 1, "L and N must be positive");
        ChannelSet c;
        c.M = static_cast<int>(beta.rows());
        c.K = static_cast<int>(beta.cols());
        c.L = L;
        c.N = N;
        draw_channels_into(c, beta, rng);
        return c;
    }

    bool PilotBook::uplink_orthogonal(double tol) const
    {
        return (cross - CMatrix::Identity(cross.rows(), cross.cols())).cwiseAbs().maxCoeff() <= tol;
    }

    CMatrix random_unitary(int n, RandomStream &rng)
    {
        const CMatrix z = rng.complex_normal_matrix(n, n);
        Eigen::HouseholderQR<CMatrix> qr(z);
        CMatrix q = qr.householderQ() * CMatrix::Identity(n, n);
        const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
        for (int j = 0; j < n; ++j)
        {
            const double a = std::abs(r(j, j));
            if (a > 0.0)
                q.col(j) *= r(j, j) / a;
        }
        return q;
    }

    PilotBook pilot_book_from(const CMatrix &uplink, const CMatrix &downlink, int K, int N)
    {
        require(K >= 1 && N >= 1, "K and N must be positive");
        require(uplink.cols() == K * N && downlink.cols() == K * N, "pilot books need K*N columns");
        require(uplink.rows() >= N, "tau_u must be at least N");
        require(downlink.rows() >= K * N, "tau_d must be at least K*N");
        PilotBook b;
        b.K = K;
        b.N = N;
        b.tau_u = static_cast<int>(uplink.rows());
        b.tau_d = static_cast<int>(downlink.rows());
        b.uplink = uplink;
        b.downlink = downlink;
        b.cross = uplink.adjoint() * uplink;
        const CMatrix eye = CMatrix::Identity(N, N);
        for (int k = 0; k < K; ++k)
            require((b.cross_of(k, k) - eye).cwiseAbs().maxCoeff() < 1e-10,
                    "uplink pilots of one user must be orthonormal");
        const CMatrix dg = downlink.adjoint() * downlink;
        require((dg - CMatrix::Identity(K * N, K * N)).cwiseAbs().maxCoeff() < 1e-10,
                "downlink pilots must be mutually orthonormal");
        return b;
    }

    PilotBook build_pilot_book(int tau_u, int tau_d, int K, int N, PilotPolicy policy, RandomStream &rng)
    {
        require(K >= 1 && N >= 1, "K and N must be positive");
        require(tau_u >= N, "tau_u must be at least N");
        require(tau_d >= K * N, "tau_d must be at least K*N");
        require(policy == PilotPolicy::round_robin, "unsupported pilot policy");
        const CMatrix up_src = random_unitary(tau_u, rng);
        const CMatrix dn_src = random_unitary(tau_d, rng);
        CMatrix up(tau_u, K * N);
        CMatrix dn(tau_d, K * N);
        for (int k = 0; k < K; ++k)
            for (int n = 0; n < N; ++n)
            {
                up.col(k * N + n) = up_src.col((k * N + n) % tau_u);
                dn.col(k * N + n) = dn_src.col(k * N + n);
            }
        PilotBook b;
        b.K = K;
        b.N = N;
        b.tau_u = tau_u;
        b.tau_d = tau_d;
        b.uplink = std::move(up);
        b.downlink = std::move(dn);
        b.cross = b.uplink.adjoint() * b.uplink;
        return b;
    }

    UplinkReceived uplink_pilot_receive(const ChannelSet &chans, const PilotBook &book, double rho_u,
                                        RandomStream &rng)
    {
        require(book.K == chans.K && book.N == chans.N, "pilot book does not match the channel set");
        const double amp = std::sqrt(book.tau_u * rho_u);
        UplinkReceived r;
        r.y = rng.complex_normal_matrix(chans.M * chans.L, book.tau_u);
        r.y.noalias() += amp * chans.g * book.uplink.adjoint();
        r.y_proj = r.y * book.uplink;
        return r;
    }

    void uplink_projections_into(const ChannelSet &chans, const PilotBook &book, double rho_u, RandomStream &rng,
                                 CMatrix &noise_workspace, CMatrix &y_proj)
    {
        const double amp = std::sqrt(book.tau_u * rho_u);
        noise_workspace.resize(chans.M * chans.L, book.tau_u);
        rng.fill_complex_normal(noise_workspace);
        y_proj.noalias() = noise_workspace * book.uplink;
        y_proj.noalias() += amp * chans.g * book.cross;
    }
}
