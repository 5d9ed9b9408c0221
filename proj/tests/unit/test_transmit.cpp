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

#include <cmath>

#include "doctest.h"

#include "cfmimo/transmit.hpp"

using namespace cfmimo;
using namespace cfmimo::transmit;

namespace
{
    struct Fixture
    {
        int M = 4, K = 3, L = 2, N = 2;
        RMatrix beta;
        channel::PilotBook book;
        estimation::UplinkStatistics stats;
        channel::ChannelSet chans;
        CMatrix g_hat;

        explicit Fixture(int tau_u)
        {
            RandomStream rng(21);
            beta = RMatrix::Random(M, K).cwiseAbs() + RMatrix::Constant(M, K, 0.05);
            book = channel::build_pilot_book(tau_u, K * N, K, N, channel::PilotPolicy::round_robin, rng);
            chans = channel::draw_channels(beta, L, N, rng);
            const auto rx = channel::uplink_pilot_receive(chans, book, 5.0, rng);
            const auto est = estimation::estimate_uplink(rx.y_proj, beta, book, 5.0, L);
            stats = est.stats;
            g_hat = est.g_hat;
        }
    };
}

TEST_CASE("uniform power fills every AP budget with equal coefficients")
{
    const Fixture f(6);
    const PowerAllocation a = uniform_power(f.beta, f.stats, f.L);
    CHECK(a.feasible);
    CHECK(a.origin == "uniform");
    CHECK(a.slack.cwiseAbs().maxCoeff() < 1e-12);
    for (int m = 0; m < f.M; ++m)
    {
        double sum_gamma = 0.0;
        for (int k = 0; k < f.K; ++k)
            sum_gamma += f.stats.gamma_of(m, k, 0);
        for (int k = 0; k < f.K; ++k)
            CHECK(a.eta(m, k) == doctest::Approx(1.0 / (f.L * f.N * sum_gamma)).epsilon(1e-12));
    }
}

TEST_CASE("budget bookkeeping flags overdriven APs")
{
    const Fixture f(3);
    PowerAllocation a = uniform_power(f.beta, f.stats, f.L);
    CHECK(a.feasible);
    RMatrix eta = a.eta;
    eta(1, 2) *= 1.01;
    const PowerAllocation b = make_allocation(eta, f.beta, f.stats, f.L);
    CHECK_FALSE(b.feasible);
    CHECK(b.slack(1) < 0.0);
    CHECK(b.slack(0) == doctest::Approx(a.slack(0)));
}

TEST_CASE("effective channels equal the explicit block sum")
{
    const Fixture f(3);
    const PowerAllocation a = uniform_power(f.beta, f.stats, f.L);
    const EffectiveChannels eff = effective_channels(f.chans, f.g_hat, a);
    for (int k = 0; k < f.K; ++k)
        for (int kp = 0; kp < f.K; ++kp)
        {
            CMatrix acc = CMatrix::Zero(f.N, f.N);
            for (int m = 0; m < f.M; ++m)
                acc += std::sqrt(a.eta(m, kp)) * f.chans.block(m, k).adjoint() *
                       f.g_hat.block(m * f.L, kp * f.N, f.L, f.N);
            CHECK((eff.block(k, kp) - acc).cwiseAbs().maxCoeff() < 1e-12);
        }
}

TEST_CASE("received signal through D matches G^H applied to the transmitted signal")
{
    const Fixture f(6);
    const PowerAllocation a = uniform_power(f.beta, f.stats, f.L);
    const EffectiveChannels eff = effective_channels(f.chans, f.g_hat, a);
    RandomStream rng(8);
    const CVector q = rng.complex_normal_matrix(f.K * f.N, 1);
    const double rho = 7.0;
    const CVector x = transmit_signal(f.g_hat, a.eta, q, rho, f.L, f.N);
    const CVector r = received_signal(eff, q, rho, rng, false);
    CHECK((f.chans.g.adjoint() * x - r).cwiseAbs().maxCoeff() < 1e-10);

    // per-AP average power respects the budget rho per antenna group
    const RVector use = power_usage(a.eta, f.beta, f.stats);
    CHECK(use.maxCoeff() <= 1.0 / f.L + 1e-12);
}
