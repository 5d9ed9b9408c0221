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

#ifndef CFMIMO_VALIDATION_COMMON_HPP
#define CFMIMO_VALIDATION_COMMON_HPP

#include <cstdio>
#include <ostream>
#include <string>

#include "cfmimo/channel.hpp"
#include "cfmimo/config.hpp"
#include "cfmimo/estimation.hpp"
#include "cfmimo/harness.hpp"
#include "cfmimo/se.hpp"
#include "cfmimo/transmit.hpp"
#include "cfmimo/validation.hpp"

namespace cfmimo::validation::detail
{
    /// One drop's small-scale realizations: G, Ghat, D and the downlink estimate of D.
    class RealizationEngine
    {
    public:
        RealizationEngine(const SystemConfig &c, const harness::DropSetup &s, const RMatrix &eta, int drop)
            : c_(c), s_(s), sqrt_eta_(eta.cwiseSqrt()),
              ch_(RandomStream::derive(c.seed, static_cast<std::uint64_t>(drop), StreamPurpose::channel)),
              ul_(RandomStream::derive(c.seed, static_cast<std::uint64_t>(drop), StreamPurpose::uplink_noise)),
              dl_(RandomStream::derive(c.seed, static_cast<std::uint64_t>(drop), StreamPurpose::downlink_noise))
        {
            chans_.M = c.M;
            chans_.K = c.K;
            chans_.L = c.L;
            chans_.N = c.N;
            eff_stats_ = estimation::effective_channel_stats(eta, s.ls.beta, s.stats, c.L);
            err_rows_ = se::error_variance_rows(estimation::error_variances(eff_stats_, c.tau_d, c.rho_d), c.K, c.N);
        }

        void next()
        {
            channel::draw_channels_into(chans_, s_.ls.beta, ch_);
            channel::uplink_projections_into(chans_, s_.book, c_.rho_u, ul_, work_, y_);
            estimation::apply_uplink_estimator(y_, s_.stats, c_.L, g_hat_);
            transmit::effective_channels_into(chans_.g, g_hat_, sqrt_eta_, c_.L, c_.N, scaled_, eff_);
            estimation::downlink_projections_into(eff_, s_.book, c_.rho_d, dl_, work_, y_dl_);
            estimation::estimate_effective_into(y_dl_, eff_stats_, c_.tau_d, c_.rho_d, d_hat_);
        }

        const CMatrix &d() const { return eff_.d; }
        const CMatrix &d_hat() const { return d_hat_; }
        const RVector &err_rows() const { return err_rows_; }
        const estimation::EffectiveStats &eff_stats() const { return eff_stats_; }

    private:
        const SystemConfig &c_;
        const harness::DropSetup &s_;
        RMatrix sqrt_eta_;
        RandomStream ch_, ul_, dl_;
        channel::ChannelSet chans_;
        estimation::EffectiveStats eff_stats_;
        RVector err_rows_;
        CMatrix work_, y_, g_hat_, scaled_, y_dl_, d_hat_;
        EffectiveChannels eff_;
    };

    inline std::string fmt(const char *f, double v)
    {
        char buf[64];
        std::snprintf(buf, sizeof buf, f, v);
        return buf;
    }

    inline void note(const CheckOptions &o, const std::string &s)
    {
        if (o.log)
            *o.log << "    " << s << std::endl;
    }

    inline SystemConfig base_config(int M, int K, int L, int N, const CheckOptions &o)
    {
        SystemConfig c;
        c.M = M;
        c.K = K;
        c.L = L;
        c.N = N;
        c.seed = o.seed;
        return c;
    }
}

#endif
