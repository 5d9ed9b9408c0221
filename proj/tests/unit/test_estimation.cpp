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

#include "cfmimo/estimation.hpp"
#include "cfmimo/transmit.hpp"

using namespace cfmimo;
using namespace cfmimo::estimation;

namespace
{
    RMatrix sample_beta()
    {
        RMatrix beta(3, 2);
        beta << 1.0, 0.2, 0.05, 2.0, 0.7, 0.7;
        return beta;
    }
}

TEST_CASE("orthogonal pilots give the scalar MMSE gain")
{
    RandomStream rng(1);
    const auto book = channel::build_pilot_book(4, 4, 2, 2, channel::PilotPolicy::round_robin, rng);
    const RMatrix beta = sample_beta();
    const double rho_u = 3.0, tau = 4.0;
    const UplinkStatistics st = uplink_statistics(beta, book, rho_u);
    for (int m = 0; m < 3; ++m)
        for (int k = 0; k < 2; ++k)
        {
            const double b = beta(m, k);
            const double g = tau * rho_u * b * b / (tau * rho_u * b + 1.0);
            for (int i = 0; i < 2; ++i)
                CHECK(st.gamma_of(m, k, i) == doctest::Approx(g).epsilon(1e-12));
            const CMatrix a = st.a_of(m, k);
            CHECK(std::abs(a(0, 1)) < 1e-14);
            CHECK(a(0, 0).real() == doctest::Approx(std::sqrt(tau * rho_u) * b / (tau * rho_u * b + 1.0)));
        }
    CHECK(st.gamma_matrix(1).rows() == 3);
}

TEST_CASE("shared pilots: gamma drops with contamination")
{
    RandomStream rng(1);
    const auto shared = channel::build_pilot_book(2, 4, 2, 2, channel::PilotPolicy::round_robin, rng);
    const auto clean = channel::build_pilot_book(4, 4, 2, 2, channel::PilotPolicy::round_robin, rng);
    const RMatrix beta = sample_beta();
    const UplinkStatistics a = uplink_statistics(beta, shared, 3.0);
    const UplinkStatistics b = uplink_statistics(beta, clean, 3.0);
    // shorter pilots also lose energy, so compare against the same tau with full contamination
    for (int m = 0; m < 3; ++m)
    {
        const double tr = 2.0 * 3.0;
        const double expect = tr * beta(m, 0) * beta(m, 0) / (tr * (beta(m, 0) + beta(m, 1)) + 1.0);
        CHECK(a.gamma_of(m, 0, 0) == doctest::Approx(expect).epsilon(1e-10));
        CHECK(a.gamma_of(m, 0, 0) < b.gamma_of(m, 0, 0));
    }
}

TEST_CASE("estimate is uncorrelated with its error and the error has energy beta - gamma")
{
    RandomStream rp(3);
    const auto book = channel::build_pilot_book(2, 4, 2, 2, channel::PilotPolicy::round_robin, rp);
    const RMatrix beta = sample_beta();
    const int L = 2;
    const double rho_u = 2.0;
    const UplinkStatistics st = uplink_statistics(beta, book, rho_u);
    RandomStream rc(4), rn(5);
    OrthogonalityCheck check;
    RMatrix err = RMatrix::Zero(3, 2), est = RMatrix::Zero(3, 2);
    const int trials = 6000;
    CMatrix ws, proj, g_hat;
    for (int t = 0; t < trials; ++t)
    {
        const auto c = channel::draw_channels(beta, L, 2, rc);
        channel::uplink_projections_into(c, book, rho_u, rn, ws, proj);
        apply_uplink_estimator(proj, st, L, g_hat);
        check.add(c.g, g_hat);
        for (int m = 0; m < 3; ++m)
            for (int k = 0; k < 2; ++k)
            {
                err(m, k) += (c.block(m, k) - g_hat.block(m * L, k * 2, L, 2)).squaredNorm() / (2 * L);
                est(m, k) += g_hat.block(m * L, k * 2, L, 2).squaredNorm() / (2 * L);
            }
    }
    CHECK(check.trials() == trials);
    CHECK(check.max_abs_correlation() < 0.05);
    for (int m = 0; m < 3; ++m)
        for (int k = 0; k < 2; ++k)
        {
            const double g = st.gamma_of(m, k, 0);
            CHECK(est(m, k) / trials == doctest::Approx(g).epsilon(0.04));
            CHECK(err(m, k) / trials == doctest::Approx(beta(m, k) - g).epsilon(0.04));
        }
}

TEST_CASE("estimate_uplink agrees with the hot-loop estimator")
{
    RandomStream rp(3), rc(4), rn(5);
    const auto book = channel::build_pilot_book(4, 4, 2, 2, channel::PilotPolicy::round_robin, rp);
    const RMatrix beta = sample_beta();
    const auto c = channel::draw_channels(beta, 2, 2, rc);
    const auto rx = channel::uplink_pilot_receive(c, book, 1.5, rn);
    const UplinkEstimates e = estimate_uplink(rx.y_proj, beta, book, 1.5, 2);
    CMatrix g_hat;
    apply_uplink_estimator(rx.y_proj, e.stats, 2, g_hat);
    CHECK((g_hat - e.g_hat).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("effective-channel sums follow their definitions")
{
    RandomStream rp(1);
    const auto book = channel::build_pilot_book(4, 4, 2, 2, channel::PilotPolicy::round_robin, rp);
    const RMatrix beta = sample_beta();
    const UplinkStatistics st = uplink_statistics(beta, book, 2.0);
    RMatrix eta(3, 2);
    eta << 0.1, 0.3, 0.2, 0.05, 0.4, 0.01;
    const int L = 3;
    const EffectiveStats es = effective_channel_stats(eta, beta, st, L);
    for (int k = 0; k < 2; ++k)
        for (int kp = 0; kp < 2; ++kp)
            for (int j = 0; j < 2; ++j)
            {
                double xi = 0.0;
                for (int m = 0; m < 3; ++m)
                    xi += L * eta(m, kp) * beta(m, k) * st.gamma_of(m, kp, j);
                CHECK(es.xi_of(k, kp, j) == doctest::Approx(xi).epsilon(1e-12));
            }
    for (int k = 0; k < 2; ++k)
    {
        double kappa = 0.0;
        for (int m = 0; m < 3; ++m)
            kappa += L * std::sqrt(eta(m, k)) * st.gamma_of(m, k, 0);
        CHECK(es.kappa(k, 0) == doctest::Approx(kappa).epsilon(1e-12));
    }
}

TEST_CASE("noiseless downlink projections recover the scaled effective channel")
{
    RandomStream rp(1), rn(2);
    const auto book = channel::build_pilot_book(4, 4, 2, 2, channel::PilotPolicy::round_robin, rp);
    EffectiveChannels eff;
    eff.K = 2;
    eff.N = 2;
    RandomStream rd(6);
    eff.d = rd.complex_normal_matrix(4, 4);
    const DownlinkReceived rx = downlink_pilot_receive(eff, book, 2.0, rn, false);
    CHECK((rx.y_proj - std::sqrt(4.0 * 2.0) * eff.d).cwiseAbs().maxCoeff() < 1e-12);

    RandomStream a(8), b(8);
    const DownlinkReceived noisy = downlink_pilot_receive(eff, book, 2.0, a);
    CMatrix ws, proj;
    downlink_projections_into(eff, book, 2.0, b, ws, proj);
    CHECK((proj - noisy.y_proj).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("error variance table is below the prior variance and shrinks with pilot power")
{
    EffectiveStats s;
    s.K = 2;
    s.N = 1;
    s.xi = {0.5, 0.2, 0.1, 0.4};
    s.kappa = RMatrix::Constant(2, 1, 3.0);
    const RMatrix lo = error_variances(s, 2.0, 1.0);
    const RMatrix hi = error_variances(s, 2.0, 10.0);
    CHECK(lo(0, 0) == doctest::Approx((0.5 + 9.0) / (2.0 * (0.5 + 9.0) + 1.0)));
    CHECK(lo(0, 1) == doctest::Approx(0.2 / (2.0 * 0.2 + 1.0)));
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            CHECK(hi(i, j) < lo(i, j));
}

TEST_CASE("Monte Carlo MSE of the downlink estimator against the variance table")
{
    // Gaussian effective channel: own diagonals mean kappa, every entry variance xi
    EffectiveStats s;
    s.K = 2;
    s.N = 1;
    s.xi = {0.4, 0.2, 0.3, 0.5};
    s.kappa = RMatrix(2, 1);
    s.kappa << 1.5, 0.8;
    const double tau = 2.0, rho = 3.0, T = tau * rho;
    RandomStream rng(77);
    RMatrix mse = RMatrix::Zero(2, 2);
    CMatrix d(2, 2), y(2, 2), d_hat;
    const int trials = 200000;
    for (int n = 0; n < trials; ++n)
    {
        for (int k = 0; k < 2; ++k)
            for (int kp = 0; kp < 2; ++kp)
                d(k, kp) = (k == kp ? cdouble(s.kappa(k, 0)) : cdouble(0.0)) + rng.complex_normal(s.xi_of(k, kp, 0));
        for (int k = 0; k < 2; ++k)
            for (int kp = 0; kp < 2; ++kp)
                y(k, kp) = std::sqrt(T) * d(k, kp) + rng.complex_normal();
        estimate_effective_into(y, s, tau, rho, d_hat);
        mse += (d_hat - d).cwiseAbs2();
    }
    mse /= trials;
    const RMatrix table = error_variances(s, tau, rho);
    for (int k = 0; k < 2; ++k)
        for (int kp = 0; kp < 2; ++kp)
        {
            const double xi = s.xi_of(k, kp, 0);
            if (k != kp)
            {
                CHECK(mse(k, kp) == doctest::Approx(xi / (T * xi + 1.0)).epsilon(0.01));
                CHECK(table(k, kp) == doctest::Approx(xi / (T * xi + 1.0)));
                continue;
            }
            // own diagonal: the table carries an extra kappa^2 / (T sec + 1)^2 over the true MSE
            const double kap = s.kappa(k, 0);
            const double sec = xi + kap * kap;
            const double exact = (xi + T * sec * sec) / ((T * sec + 1.0) * (T * sec + 1.0));
            CHECK(mse(k, k) == doctest::Approx(exact).epsilon(0.01));
            CHECK(table(k, k) - exact == doctest::Approx(kap * kap / ((T * sec + 1.0) * (T * sec + 1.0))));
        }
}
