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

#ifndef CFMIMO_CHANNEL_HPP
#define CFMIMO_CHANNEL_HPP

#include "cfmimo/random.hpp"
#include "cfmimo/types.hpp"

namespace cfmimo::channel
{
    /// One small-scale realization. g is (M*L) x (K*N); block (m,k) is G_mk = sqrt(beta_mk) H_mk.
    struct ChannelSet
    {
        int M = 0, K = 0, L = 0, N = 0;
        CMatrix g;

        auto block(int m, int k) { return g.block(m * L, k * N, L, N); }
        auto block(int m, int k) const { return g.block(m * L, k * N, L, N); }
    };

    ChannelSet draw_channels(const RMatrix &beta, int L, int N, RandomStream &rng);

    /// Redraws into an existing set (no reallocation when shapes match).
    void draw_channels_into(ChannelSet &chans, const RMatrix &beta, RandomStream &rng);

    enum class PilotPolicy
    {
        round_robin // user k takes columns (k*N + n) mod tau_u of one unitary
    };

    /// Uplink and downlink pilot books with the cached uplink Gram table.
    struct PilotBook
    {
        int K = 0, N = 0;
        int tau_u = 0, tau_d = 0;
        CMatrix uplink;   // tau_u x (K*N)
        CMatrix downlink; // tau_d x (K*N)
        CMatrix cross;    // (K*N) x (K*N); block (i,k) is Phi_u,i^H Phi_u,k

        auto uplink_of(int k) const { return uplink.middleCols(k * N, N); }
        auto downlink_of(int k) const { return downlink.middleCols(k * N, N); }
        auto cross_of(int i, int k) const { return cross.block(i * N, k * N, N, N); }

        /// True when the uplink Gram table is the identity (no pilot sharing).
        bool uplink_orthogonal(double tol = 1e-12) const;
    };

    PilotBook build_pilot_book(int tau_u, int tau_d, int K, int N, PilotPolicy policy, RandomStream &rng);

    /// Book from explicit matrices; validates intra-user orthonormality and downlink orthogonality.
    PilotBook pilot_book_from(const CMatrix &uplink, const CMatrix &downlink, int K, int N);

    /// Haar-distributed n x n unitary (QR of a Gaussian matrix with phase-fixed R diagonal).
    CMatrix random_unitary(int n, RandomStream &rng);

    struct UplinkReceived
    {
        CMatrix y;      // (M*L) x tau_u, stacked Y_u,m
        CMatrix y_proj; // (M*L) x (K*N), block (m,k) is Y_u,m Phi_u,k
    };

    /// Y_u,m = sum_k sqrt(tau_u rho_u) G_mk Phi_u,k^H + W_m with CN(0,1) noise.
    UplinkReceived uplink_pilot_receive(const ChannelSet &chans, const PilotBook &book, double rho_u,
                                        RandomStream &rng);

    /// Projections only, through the cached Gram table. Same noise draws as uplink_pilot_receive.
    void uplink_projections_into(const ChannelSet &chans, const PilotBook &book, double rho_u, RandomStream &rng,
                                 CMatrix &noise_workspace, CMatrix &y_proj);
}

#endif
