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

#ifndef CFMIMO_ESTIMATION_HPP
#define CFMIMO_ESTIMATION_HPP

#include <vector>

#include "cfmimo/channel.hpp"
#include "cfmimo/random.hpp"
#include "cfmimo/types.hpp"

namespace cfmimo
{
    /// Effective downlink channels, (K*N) x (K*N); block (k,k') is D_kk' = sum_m sqrt(eta_mk') G_mk^H Ghat_mk'.
    struct EffectiveChannels
    {
        int K = 0, N = 0;
        CMatrix d;

        auto block(int k, int kp) { return d.block(k * N, kp * N, N, N); }
        auto block(int k, int kp) const { return d.block(k * N, kp * N, N, N); }
    };
}

namespace cfmimo::estimation
{
    /// Per-drop uplink estimator matrices A_mk and per-antenna statistics gamma_mk,i.
    struct UplinkStatistics
    {
        int M = 0, K = 0, N = 0;
        double tau_u = 0.0;
        double rho_u = 0.0;
        std::vector<CMatrix> a; // index m*K + k, N x N
        RMatrix gamma;          // row m*K + k, column i

        const CMatrix &a_of(int m, int k) const { return a[static_cast<std::size_t>(m * K + k)]; }
        double gamma_of(int m, int k, int i) const { return gamma(m * K + k, i); }

        /// M x K matrix of gamma_mk,i for one antenna index i.
        RMatrix gamma_matrix(int i = 0) const;
    };

    /// A_mk = sqrt(tau rho) beta_mk (tau rho sum_i beta_mi Phi_ik^H Phi_ik + I)^-1, gamma_mk,i = sqrt(tau rho) beta_mk [A_mk]_ii.
    UplinkStatistics uplink_statistics(const RMatrix &beta, const channel::PilotBook &book, double rho_u);

    struct UplinkEstimates
    {
        CMatrix g_hat; // (M*L) x (K*N)
        UplinkStatistics stats;
    };

    /// Ghat_mk = Y_u,mk A_mk for stacked projections.
    UplinkEstimates estimate_uplink(const CMatrix &y_proj, const RMatrix &beta, const channel::PilotBook &book,
                                    double rho_u, int L);

    /// Hot-loop variant writing into `g_hat`.
    void apply_uplink_estimator(const CMatrix &y_proj, const UplinkStatistics &stats, int L, CMatrix &g_hat);

    /// Running check of the orthogonality between estimate and estimation error.
    class OrthogonalityCheck
    {
    public:
        /// Adds one realization of stacked G and Ghat.
        void add(const CMatrix &g, const CMatrix &g_hat);

        /// Worst normalized |E{conj(err) * est}| over entries.
        double max_abs_correlation() const;
        /// Mean error energy per entry.
        double error_energy() const;
        int trials() const { return trials_; }

    private:
        CMatrix cross_;
        RMatrix err_power_;
        RMatrix est_power_;
        int trials_ = 0;
    };

    /// Lemma-level sums: xi_kk',j = L sum_m eta_mk' beta_mk gamma_mk',j and kappa_k,i = L sum_m sqrt(eta_mk) gamma_mk,i.
    struct EffectiveStats
    {
        int K = 0, N = 0;
        std::vector<double> xi; // index (k*K + k')*N + j
        RMatrix kappa;          // K x N

        double xi_of(int k, int kp, int j) const { return xi[static_cast<std::size_t>((k * K + kp) * N + j)]; }
    };

    EffectiveStats effective_channel_stats(const RMatrix &eta, const RMatrix &beta, const UplinkStatistics &stats,
                                           int L);

    struct DownlinkReceived
    {
        CMatrix y;      // (K*N) x tau_d, stacked Y_d,k
        CMatrix y_proj; // (K*N) x (K*N), element (k*N+i, k'*N+j) is y_d,k,ij for D_kk'
    };

    /// Y_d,k = sqrt(tau_d rho_d) sum_k' D_kk' Phi_d,k'^H + W_d,k; projections onto every Phi_d,k'.
    DownlinkReceived downlink_pilot_receive(const EffectiveChannels &eff, const channel::PilotBook &book,
                                            double rho_d, RandomStream &rng, bool add_noise = true);

    /// Projections only. Uses the downlink orthogonality, so the noise is drawn in projected form.
    void downlink_projections_into(const EffectiveChannels &eff, const channel::PilotBook &book, double rho_d,
                                   RandomStream &rng, CMatrix &noise_workspace, CMatrix &y_proj);

    struct EffectiveChannelEstimates
    {
        int K = 0, N = 0;
        CMatrix d_hat;   // same layout as EffectiveChannels::d
        RMatrix err_var; // var of the error on each entry, same layout
        EffectiveStats stats;

        auto d_hat_block(int k, int kp) const { return d_hat.block(k * N, kp * N, N, N); }
    };

    /// Error variance table: (xi + kappa^2) / (T (xi + kappa^2) + 1) on own diagonals, xi / (T xi + 1) elsewhere.
    RMatrix error_variances(const EffectiveStats &stats, double tau_d, double rho_d);

    EffectiveChannelEstimates estimate_effective(const CMatrix &y_proj_dl, const EffectiveStats &stats, double tau_d,
                                                 double rho_d);

    /// Hot-loop variant writing only the estimates.
    void estimate_effective_into(const CMatrix &y_proj_dl, const EffectiveStats &stats, double tau_d, double rho_d,
                                 CMatrix &d_hat);
}

#endif
