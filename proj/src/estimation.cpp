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

#include "cfmimo/estimation.hpp"

#include <cmath>

namespace cfmimo::estimation
{
    RMatrix UplinkStatistics::gamma_matrix(int i) const
    {
        RMatrix g(M, K);
        for (int m = 0; m < M; ++m)
            for (int k = 0; k < K; ++k)
                g(m, k) = gamma_of(m, k, i);
        return g;
    }

    UplinkStatistics uplink_statistics(const RMatrix &beta, const channel::PilotBook &book, double rho_u)
    {
        require(beta.cols() == book.K, "beta and pilot book disagree on K");
        require(rho_u >= 0.0, "rho_u must be non-negative");
        const int M = static_cast<int>(beta.rows());
        const int K = book.K;
        const int N = book.N;
        const double t = book.tau_u * rho_u;
        const double s = std::sqrt(t);

        // Phi_ik^H Phi_ik is shared by every AP
        std::vector<CMatrix> gram2(static_cast<std::size_t>(K * K));
        for (int i = 0; i < K; ++i)
            for (int k = 0; k < K; ++k)
            {
                const CMatrix c = book.cross_of(i, k);
                gram2[static_cast<std::size_t>(i * K + k)] = c.adjoint() * c;
            }

        UplinkStatistics st;
        st.M = M;
        st.K = K;
        st.N = N;
        st.tau_u = book.tau_u;
        st.rho_u = rho_u;
        st.a.resize(static_cast<std::size_t>(M * K));
        st.gamma.resize(M * K, N);
        const CMatrix eye = CMatrix::Identity(N, N);
        for (int m = 0; m < M; ++m)
            for (int k = 0; k < K; ++k)
            {
                CMatrix r = eye;
                for (int i = 0; i < K; ++i)
                    r += t * beta(m, i) * gram2[static_cast<std::size_t>(i * K + k)];
                const CMatrix r_inv = hermitian_part(r).llt().solve(eye);
                CMatrix a = hermitian_part(s * beta(m, k) * r_inv);
                for (int i = 0; i < N; ++i)
                    st.gamma(m * K + k, i) = s * beta(m, k) * a(i, i).real();
                st.a[static_cast<std::size_t>(m * K + k)] = std::move(a);
            }
        return st;
    }

    void apply_uplink_estimator(const CMatrix &y_proj, const UplinkStatistics &stats, int L, CMatrix &g_hat)
    {
        const int M = stats.M, K = stats.K, N = stats.N;
        require(y_proj.rows() == M * L && y_proj.cols() == K * N, "uplink projections have wrong shape");
        g_hat.resize(M * L, K * N);
        for (int m = 0; m < M; ++m)
            for (int k = 0; k < K; ++k)
                g_hat.block(m * L, k * N, L, N).noalias() = y_proj.block(m * L, k * N, L, N) * stats.a_of(m, k);
    }

    UplinkEstimates estimate_uplink(const CMatrix &y_proj, const RMatrix &beta, const channel::PilotBook &book,
                                    double rho_u, int L)
    {
        UplinkEstimates e;
        e.stats = uplink_statistics(beta, book, rho_u);
        apply_uplink_estimator(y_proj, e.stats, L, e.g_hat);
        return e;
    }

    void OrthogonalityCheck::add(const CMatrix &g, const CMatrix &g_hat)
    {
        if (trials_ == 0)
        {
            cross_ = CMatrix::Zero(g.rows(), g.cols());
            err_power_ = RMatrix::Zero(g.rows(), g.cols());
            est_power_ = RMatrix::Zero(g.rows(), g.cols());
        }
        const CMatrix err = g - g_hat;
        cross_ += err.conjugate().cwiseProduct(g_hat);
        err_power_ += err.cwiseAbs2();
        est_power_ += g_hat.cwiseAbs2();
        ++trials_;
    }

    double OrthogonalityCheck::max_abs_correlation() const
    {
        double worst = 0.0;
        for (Eigen::Index j = 0; j < cross_.cols(); ++j)
            for (Eigen::Index i = 0; i < cross_.rows(); ++i)
            {
                const double denom = std::sqrt(err_power_(i, j) * est_power_(i, j));
                if (denom > 0.0)
                    worst = std::max(worst, std::abs(cross_(i, j)) / denom);
            }
        return worst;
    }

    double OrthogonalityCheck::error_energy() const
    {
        if (trials_ == 0)
            return 0.0;
        return err_power_.mean() / trials_;
    }

    EffectiveStats effective_channel_stats(const RMatrix &eta, const RMatrix &beta, const UplinkStatistics &stats,
                                           int L)
    {
        const int M = stats.M, K = stats.K, N = stats.N;
        require(eta.rows() == M && eta.cols() == K && beta.rows() == M && beta.cols() == K,
                "eta and beta must be M x K");
        require((eta.array() >= 0.0).all(), "eta must be non-negative");
        EffectiveStats es;
        es.K = K;
        es.N = N;
        es.xi.assign(static_cast<std::size_t>(K * K * N), 0.0);
        es.kappa = RMatrix::Zero(K, N);
        for (int k = 0; k < K; ++k)
            for (int kp = 0; kp < K; ++kp)
                for (int j = 0; j < N; ++j)
                {
                    double acc = 0.0;
                    for (int m = 0; m < M; ++m)
                        acc += eta(m, kp) * beta(m, k) * stats.gamma_of(m, kp, j);
                    es.xi[static_cast<std::size_t>((k * K + kp) * N + j)] = L * acc;
                }
        for (int k = 0; k < K; ++k)
            for (int i = 0; i < N; ++i)
            {
                double acc = 0.0;
                for (int m = 0; m < M; ++m)
                    acc += std::sqrt(eta(m, k)) * stats.gamma_of(m, k, i);
                es.kappa(k, i) = L * acc;
            }
        return es;
    }

    DownlinkReceived downlink_pilot_receive(const EffectiveChannels &eff, const channel::PilotBook &book,
                                            double rho_d, RandomStream &rng, bool add_noise)
    {
        require(eff.K == book.K && eff.N == book.N, "pilot book does not match the effective channels");
        const double amp = std::sqrt(book.tau_d * rho_d);
        DownlinkReceived r;
        const int kn = eff.K * eff.N;
        r.y = add_noise ? rng.complex_normal_matrix(kn, book.tau_d) : CMatrix::Zero(kn, book.tau_d);
        r.y.noalias() += amp * eff.d * book.downlink.adjoint();
        r.y_proj = r.y * book.downlink;
        return r;
    }

    void downlink_projections_into(const EffectiveChannels &eff, const channel::PilotBook &book, double rho_d,
                                   RandomStream &rng, CMatrix &noise_workspace, CMatrix &y_proj)
    {
        const double amp = std::sqrt(book.tau_d * rho_d);
        noise_workspace.resize(eff.K * eff.N, book.tau_d);
        rng.fill_complex_normal(noise_workspace);
        y_proj.noalias() = noise_workspace * book.downlink;
        y_proj.noalias() += amp * eff.d; // Phi_d^H Phi_d = I
    }

    RMatrix error_variances(const EffectiveStats &stats, double tau_d, double rho_d)
    {
        const int K = stats.K, N = stats.N;
        const double t = tau_d * rho_d;
        RMatrix v(K * N, K * N);
        for (int k = 0; k < K; ++k)
            for (int kp = 0; kp < K; ++kp)
                for (int i = 0; i < N; ++i)
                    for (int j = 0; j < N; ++j)
                    {
                        double s;
                        if (k == kp && i == j)
                            s = stats.xi_of(k, k, i) + stats.kappa(k, i) * stats.kappa(k, i);
                        else
                            s = stats.xi_of(k, kp, j);
                        v(k * N + i, kp * N + j) = s / (t * s + 1.0);
                    }
        return v;
    }

    void estimate_effective_into(const CMatrix &y_proj_dl, const EffectiveStats &stats, double tau_d, double rho_d,
                                 CMatrix &d_hat)
    {
        const int K = stats.K, N = stats.N;
        require(y_proj_dl.rows() == K * N && y_proj_dl.cols() == K * N, "downlink projections have wrong shape");
        const double t = tau_d * rho_d;
        const double s = std::sqrt(t);
        d_hat.resize(K * N, K * N);
        for (int k = 0; k < K; ++k)
            for (int kp = 0; kp < K; ++kp)
                for (int j = 0; j < N; ++j)
                {
                    const double xi = stats.xi_of(k, kp, j);
                    const double w = s * xi / (t * xi + 1.0);
                    for (int i = 0; i < N; ++i)
                    {
                        const cdouble y = y_proj_dl(k * N + i, kp * N + j);
                        if (k == kp && i == j)
                        {
                            const double kap = stats.kappa(k, i);
                            const double sec = stats.xi_of(k, k, i) + kap * kap;
                            d_hat(k * N + i, kp * N + j) = (s * sec * y + kap) / (t * sec + 1.0);
                        }
                        else
                        {
                            d_hat(k * N + i, kp * N + j) = w * y;
                        }
                    }
                }
    }

    EffectiveChannelEstimates estimate_effective(const CMatrix &y_proj_dl, const EffectiveStats &stats, double tau_d,
                                                 double rho_d)
    {
        EffectiveChannelEstimates e;
        e.K = stats.K;
        e.N = stats.N;
        e.stats = stats;
        estimate_effective_into(y_proj_dl, stats, tau_d, rho_d, e.d_hat);
        e.err_var = error_variances(stats, tau_d, rho_d);
        return e;
    }
}
