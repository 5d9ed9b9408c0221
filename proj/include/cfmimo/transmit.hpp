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

#ifndef CFMIMO_TRANSMIT_HPP
#define CFMIMO_TRANSMIT_HPP

#include <string>

#include "cfmimo/channel.hpp"
#include "cfmimo/estimation.hpp"
#include "cfmimo/random.hpp"
#include "cfmimo/types.hpp"

namespace cfmimo::transmit
{
    /// Power-control coefficients with the per-AP budget bookkeeping.
    struct PowerAllocation
    {
        RMatrix eta;         // M x K, non-negative
        bool feasible = false;
        RVector slack;       // per AP: 1/L - sqrt(tau_u rho_u) sum_k eta_mk beta_mk Tr(A_mk)
        std::string origin;  // "uniform", "maxmin", "maxmin-reused", "sca", "custom"
    };

    /// Per-AP budget usage sqrt(tau_u rho_u) sum_k eta_mk beta_mk Tr(A_mk).
    RVector power_usage(const RMatrix &eta, const RMatrix &beta, const estimation::UplinkStatistics &stats);

    /// Wraps eta with slack and feasibility (tolerance 1e-12 relative to 1/L).
    PowerAllocation make_allocation(const RMatrix &eta, const RMatrix &beta,
                                    const estimation::UplinkStatistics &stats, int L, std::string origin = "custom");

    /// eta_mk = c_m for every k, with c_m meeting the budget with equality.
    PowerAllocation uniform_power(const RMatrix &beta, const estimation::UplinkStatistics &stats, int L);

    /// D = G^H (Ghat scaled per block by sqrt(eta)).
    EffectiveChannels effective_channels(const channel::ChannelSet &chans, const CMatrix &g_hat,
                                         const PowerAllocation &alloc);

    /// Hot-loop variant. `sqrt_eta` is M x K; `scaled` is a workspace.
    void effective_channels_into(const CMatrix &g, const CMatrix &g_hat, const RMatrix &sqrt_eta, int L, int N,
                                 CMatrix &scaled, EffectiveChannels &out);

    /// Stacked per-AP transmit vectors x_m = sqrt(rho) sum_k sqrt(eta_mk) Ghat_mk q_k, length M*L.
    CVector transmit_signal(const CMatrix &g_hat, const RMatrix &eta, const CVector &q, double rho, int L, int N);

    /// Stacked r_k = sqrt(rho) sum_k' D_kk' q_k' + n_k, length K*N.
    CVector received_signal(const EffectiveChannels &eff, const CVector &q, double rho, RandomStream &rng,
                            bool add_noise = true);
}

#endif
