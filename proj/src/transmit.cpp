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

#include "cfmimo/transmit.hpp"

#include <cmath>
#include <utility>

namespace cfmimo::transmit
{
    RVector power_usage(const RMatrix &eta, const RMatrix &beta, const estimation::UplinkStatistics &stats)
    {
        const int M = stats.M, K = stats.K;
        require(eta.rows() == M && eta.cols() == K, "eta must be M x K");
        const double s = std::sqrt(stats.tau_u * stats.rho_u);
        RVector use(M);
        for (int m = 0; m < M; ++m)
        {
            double acc = 0.0;
            for (int k = 0; k < K; ++k)
                acc += eta(m, k) * beta(m, k) * stats.a_of(m, k).trace().real();
            use(m) = s * acc;
        }
        return use;
    }

    PowerAllocation make_allocation(const RMatrix &eta, const RMatrix &beta,
                                    const estimation::UplinkStatistics &stats, int L, std::string origin)
    {
        require((eta.array() >= 0.0).all(), "eta must be non-negative");
        PowerAllocation p;
        p.eta = eta;
        p.slack = RVector::Constant(stats.M, 1.0 / L) - power_usage(eta, beta, stats);
        p.feasible = (p.slack.array() >= -1e-12 / L).all();
        p.origin = std::move(origin);
        return p;
    }

    PowerAllocation uniform_power(const RMatrix &beta, const estimation::UplinkStatistics &stats, int L)
    {
        const RVector per_unit = power_usage(RMatrix::Ones(stats.M, stats.K), beta, stats);
        RMatrix eta(stats.M, stats.K);
        for (int m = 0; m < stats.M; ++m)
            eta.row(m).setConstant(per_unit(m) > 0.0 ? 1.0 / (L * per_unit(m)) : 0.0);
        return make_allocation(eta, beta, stats, L, "uniform");
    }

    void effective_channels_into(const CMatrix &g, const CMatrix &g_hat, const RMatrix &sqrt_eta, int L, int N,
                                 CMatrix &scaled, EffectiveChannels &out)
    {
        const auto M = sqrt_eta.rows();
        const auto K = sqrt_eta.cols();
        scaled = g_hat;
        for (Eigen::Index m = 0; m < M; ++m)
            for (Eigen::Index k = 0; k < K; ++k)
                scaled.block(m * L, k * N, L, N) *= sqrt_eta(m, k);
        out.K = static_cast<int>(K);
        out.N = N;
        out.d.noalias() = g.adjoint() * scaled;
    }

    EffectiveChannels effective_channels(const channel::ChannelSet &chans, const CMatrix &g_hat,
                                         const PowerAllocation &alloc)
    {
        require(g_hat.rows() == chans.g.rows() && g_hat.cols() == chans.g.cols(), "Ghat shape mismatch");
        require(alloc.eta.rows() == chans.M && alloc.eta.cols() == chans.K, "eta shape mismatch");
        EffectiveChannels out;
        CMatrix scaled;
        effective_channels_into(chans.g, g_hat, alloc.eta.cwiseSqrt(), chans.L, chans.N, scaled, out);
        return out;
    }

    CVector transmit_signal(const CMatrix &g_hat, const RMatrix &eta, const CVector &q, double rho, int L, int N)
    {
        CMatrix scaled = g_hat;
        for (Eigen::Index m = 0; m < eta.rows(); ++m)
            for (Eigen::Index k = 0; k < eta.cols(); ++k)
                scaled.block(m * L, k * N, L, N) *= std::sqrt(eta(m, k));
        return std::sqrt(rho) * (scaled * q);
    }

    CVector received_signal(const EffectiveChannels &eff, const CVector &q, double rho, RandomStream &rng,
                            bool add_noise)
    {
        require(q.size() == eff.d.cols(), "symbol vector must have K*N entries");
        CVector r = std::sqrt(rho) * (eff.d * q);
        if (add_noise)
            for (Eigen::Index i = 0; i < r.size(); ++i)
                r(i) += rng.complex_normal();
        return r;
    }
}
