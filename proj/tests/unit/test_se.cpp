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
#include <numeric>

#include "doctest.h"

#include "cfmimo/se.hpp"
#include "cfmimo/transmit.hpp"

using namespace cfmimo;
using namespace cfmimo::se;

namespace
{
    CMatrix random_hpd(int n, RandomStream &rng)
    {
        const CMatrix a = rng.complex_normal_matrix(n, n);
        return a * a.adjoint() + CMatrix::Identity(n, n);
    }

    struct Setup
    {
        int M = 6, K = 3, L = 2, N = 2;
        RMatrix beta;
        channel::PilotBook book;
        estimation::UplinkStatistics stats;
        transmit::PowerAllocation alloc;

        explicit Setup(int tau_u)
        {
            RandomStream rng(31);
            beta = RMatrix::Random(M, K).cwiseAbs() + RMatrix::Constant(M, K, 0.1);
            book = channel::build_pilot_book(tau_u, K * N, K, N, channel::PilotPolicy::round_robin, rng);
            stats = estimation::uplink_statistics(beta, book, 4.0);
            alloc = transmit::uniform_power(beta, stats, L);
        }
    };
}

TEST_CASE("pre-log factors")
{
    CHECK(prelog_p1(20, 200) == doctest::Approx(0.9));
    CHECK(prelog_p2(20, 30, 200) == doctest::Approx(0.75));
    CHECK_THROWS_AS(prelog_p1(200, 200), InvalidArgument);
    CHECK_THROWS_AS(prelog_p2(100, 100, 200), InvalidArgument);
}

TEST_CASE("log2 det of Hermitian positive definite matrices")
{
    CMatrix d = CMatrix::Zero(2, 2);
    d(0, 0) = 2.0;
    d(1, 1) = 4.0;
    CHECK(log2det_hpd(d) == doctest::Approx(3.0));
    RandomStream rng(1);
    const CMatrix a = random_hpd(4, rng);
    CHECK(log2det_hpd(a) == doctest::Approx(std::log2(a.determinant().real())).epsilon(1e-10));
    d(1, 1) = -1.0;
    CHECK_THROWS_AS(log2det_hpd(d), NotPositiveDefinite);
}

TEST_CASE("scalar statistical-CSI bound")
{
    // m = a, E|D|^2 = a^2 + v  ->  log2(1 + rho a^2 / (1 + rho v))
    const double a = 1.7, v = 0.3, rho = 5.0;
    CMatrix m(1, 1), s(1, 1);
    m(0, 0) = a;
    s(0, 0) = a * a + v;
    CHECK(se_generic(m, s, 0.8, rho) == doctest::Approx(0.8 * std::log2(1.0 + rho * a * a / (1.0 + rho * v))));
    s(0, 0) = a * a - 1.0; // negative variance, Psi^a not positive definite
    CHECK_THROWS_AS(se_generic(m, s, 1.0, rho), NotPositiveDefinite);
}

TEST_CASE("MMSE-SIC chain rule: stream SINRs of successive cancellation sum to the log-det rate")
{
    RandomStream rng(4);
    const CMatrix m = rng.complex_normal_matrix(3, 3);
    const CMatrix psi = random_hpd(3, rng);
    const double rho = 2.0;
    // SIC: stream j sees streams j+1.. as interference
    double sic = 0.0;
    for (int j = 0; j < 3; ++j)
    {
        CMatrix q = psi;
        for (int o = j + 1; o < 3; ++o)
            q += rho * m.col(o) * m.col(o).adjoint();
        sic += std::log2(1.0 + rho * m.col(j).dot(q.llt().solve(m.col(j))).real());
    }
    CHECK(log_det_rate(m, psi, rho) == doctest::Approx(sic).epsilon(1e-10));

    const auto lin = mmse_stream_sinr(m, psi, rho);
    double mmse = 0.0;
    for (double z : lin)
        mmse += std::log2(1.0 + z);
    CHECK(mmse <= sic + 1e-12);
}

TEST_CASE("single-stream linear MMSE reduces to the scalar SINR")
{
    CMatrix m(1, 1), psi(1, 1);
    m(0, 0) = cdouble(0.6, -0.8);
    psi(0, 0) = 2.0;
    CHECK(mmse_stream_sinr(m, psi, 3.0)[0] == doctest::Approx(3.0 * 1.0 / 2.0));
}

TEST_CASE("closed form pieces are Hermitian PD and intra-AP forms agree under orthogonal pilots")
{
    const Setup s(6);
    const double prelog = prelog_p1(6, 200);
    ClosedFormOptions printed;
    printed.intra_ap = IntraApTerm::printed;
    const ClosedFormResult a = closed_form_p1(s.beta, s.book, s.stats, s.alloc.eta, s.L, prelog, 10.0);
    const ClosedFormResult b = closed_form_p1(s.beta, s.book, s.stats, s.alloc.eta, s.L, prelog, 10.0, printed);
    for (int k = 0; k < s.K; ++k)
    {
        const CMatrix &psi = a.pieces.psi_b[k];
        CHECK((psi - psi.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(psi.llt().info() == Eigen::Success);
        CHECK(a.report.per_user_bits[k] == doctest::Approx(b.report.per_user_bits[k]).epsilon(1e-12));
        CHECK(a.report.per_user_bits[k] > 0.0);
        // orthogonal pilots: the mean channel is kappa I
        const CMatrix &db = a.pieces.d_bar[k];
        CHECK(std::abs(db(0, 1)) < 1e-12);
        CHECK(db(0, 0).real() == doctest::Approx(db(1, 1).real()));
    }
    const SEReport lin = se_linear_mmse_p1(a.pieces, prelog, 10.0);
    for (int k = 0; k < s.K; ++k)
        CHECK(lin.per_user_bits[k] <= a.report.per_user_bits[k] + 1e-12);
}

TEST_CASE("pilot contamination lowers the closed-form SE")
{
    const Setup clean(6), shared(3);
    const auto a = closed_form_p1(clean.beta, clean.book, clean.stats, clean.alloc.eta, 2, 1.0, 10.0);
    const auto b = closed_form_p1(shared.beta, shared.book, shared.stats, shared.alloc.eta, 2, 1.0, 10.0);
    const double sa = std::accumulate(a.report.per_user_bits.begin(), a.report.per_user_bits.end(), 0.0);
    const double sb = std::accumulate(b.report.per_user_bits.begin(), b.report.per_user_bits.end(), 0.0);
    CHECK(sb < sa);
}

TEST_CASE("perfect CSI SE against the explicit formula")
{
    RandomStream rng(12);
    const int K = 3, N = 2;
    const CMatrix d = rng.complex_normal_matrix(K * N, K * N);
    const double rho = 4.0;
    std::vector<double> out;
    se_perfect_csi_into(d, K, N, 1.0, rho, out);
    for (int k = 0; k < K; ++k)
    {
        CMatrix psi = CMatrix::Identity(N, N);
        for (int kp = 0; kp < K; ++kp)
            if (kp != k)
                psi += rho * d.block(k * N, kp * N, N, N) * d.block(k * N, kp * N, N, N).adjoint();
        const CMatrix dk = d.block(k * N, k * N, N, N);
        const CMatrix x = CMatrix::Identity(N, N) + rho * dk.adjoint() * psi.inverse() * dk;
        CHECK(out[k] == doctest::Approx(std::log2(std::abs(x.determinant()))).epsilon(1e-10));
    }
}

TEST_CASE("statistical moments of a constant channel give the coherent rate")
{
    CMatrix d(1, 1);
    d(0, 0) = cdouble(1.2, 0.5);
    StatisticalMoments mom(1, 1, 4, 40);
    for (int i = 0; i < 40; ++i)
        mom.add(d);
    CHECK(mom.count() == 40);
    CHECK(mom.se(1.0, 3.0)[0] == doctest::Approx(std::log2(1.0 + 3.0 * std::norm(d(0, 0)))));
    CHECK(mom.standard_error(1.0, 3.0)[0] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("single-antenna perfect-CSI approximation by hand")
{
    RMatrix beta(2, 2), gamma(2, 2), vs(2, 2);
    beta << 1.0, 0.5, 0.2, 2.0;
    gamma << 0.8, 0.3, 0.1, 1.5;
    vs << 0.6, 0.4, 0.9, 0.2;
    const double rho = 10.0;
    const auto se = se_up_approx(beta, gamma, vs, rho, 1.0);
    // user 0: coherent 0.8*0.6 + 0.1*0.9
    const double coh = 0.8 * 0.6 + 0.1 * 0.9;
    const double self = 1.0 * 0.8 * 0.36 + 0.2 * 0.1 * 0.81;
    const double interf = 1.0 * 0.3 * 0.16 + 0.2 * 1.5 * 0.04;
    CHECK(se[0] == doctest::Approx(std::log2(1.0 + (coh * coh + self) / (interf + 1.0 / rho))));
    CHECK_THROWS_AS(se_up_approx(beta, gamma, vs, rho, 1.0, 2, 1), InvalidArgument);
}

TEST_CASE("bilinear moment oracle: diagonal with entries M Tr(C)")
{
    const auto cov = lemma4_column_covariances(5, 3);
    REQUIRE(cov.size() == 3);
    CHECK((cov[1] - 5.0 * CMatrix::Identity(3, 3)).cwiseAbs().maxCoeff() == 0.0);
    RandomStream rng(2);
    const CMatrix c = random_hpd(3, rng);
    const CMatrix o = lemma4_oracle(c, cov);
    for (int i = 0; i < 3; ++i)
        CHECK(o(i, i).real() == doctest::Approx(5.0 * c.trace().real()));
    CHECK(std::abs(o(0, 1)) == 0.0);
}

TEST_CASE("large-M entry laws: mean only on own diagonals")
{
    const Setup s(6);
    const Lemma3Params p = lemma3_params(s.alloc.eta, s.beta, s.stats, s.L);
    const auto es = estimation::effective_channel_stats(s.alloc.eta, s.beta, s.stats, s.L);
    for (int k = 0; k < s.K; ++k)
        for (int kp = 0; kp < s.K; ++kp)
            for (int i = 0; i < s.N; ++i)
                for (int j = 0; j < s.N; ++j)
                {
                    const double mu = p.mean(k * s.N + i, kp * s.N + j);
                    if (p.is_real_entry(k, kp, i, j))
                        CHECK(mu == doctest::Approx(es.kappa(k, i)));
                    else
                        CHECK(mu == 0.0);
                    CHECK(p.variance(k * s.N + i, kp * s.N + j) > 0.0);
                }
}
