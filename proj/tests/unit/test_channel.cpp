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

#include "cfmimo/channel.hpp"

using namespace cfmimo;
using namespace cfmimo::channel;

TEST_CASE("random unitary is unitary")
{
    RandomStream rng(2);
    for (int n : {1, 3, 8})
    {
        const CMatrix u = random_unitary(n, rng);
        CHECK((u.adjoint() * u - CMatrix::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("orthogonal pilot book has identity Gram table")
{
    RandomStream rng(4);
    const PilotBook b = build_pilot_book(6, 6, 3, 2, PilotPolicy::round_robin, rng);
    CHECK(b.uplink_orthogonal());
    CHECK((b.downlink.adjoint() * b.downlink - CMatrix::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("shared pilots stay orthonormal within each user")
{
    RandomStream rng(4);
    const PilotBook b = build_pilot_book(3, 8, 4, 2, PilotPolicy::round_robin, rng);
    CHECK_FALSE(b.uplink_orthogonal());
    for (int k = 0; k < 4; ++k)
        CHECK((b.cross_of(k, k) - CMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
    // user 0 column 0 and user 1 column 1 reuse the same sequence (0 and 3 mod 3)
    CHECK(std::abs(b.cross_of(0, 1)(0, 1)) == doctest::Approx(1.0));
    CHECK((b.cross - b.uplink.adjoint() * b.uplink).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("pilot books from explicit matrices are validated")
{
    CMatrix up = CMatrix::Identity(2, 2);
    CMatrix dn = CMatrix::Identity(2, 2);
    CHECK_NOTHROW(pilot_book_from(up, dn, 1, 2));
    up(0, 1) = 1.0; // not orthonormal within the user
    CHECK_THROWS_AS(pilot_book_from(up, dn, 1, 2), InvalidArgument);
}

TEST_CASE("channel blocks have variance beta")
{
    RMatrix beta(2, 2);
    beta << 1.0, 0.25, 4.0, 0.01;
    RandomStream rng(9);
    RMatrix acc = RMatrix::Zero(2, 2);
    const int trials = 4000, L = 3, N = 2;
    for (int t = 0; t < trials; ++t)
    {
        const ChannelSet c = draw_channels(beta, L, N, rng);
        for (int m = 0; m < 2; ++m)
            for (int k = 0; k < 2; ++k)
                acc(m, k) += c.block(m, k).squaredNorm() / (L * N);
    }
    for (int m = 0; m < 2; ++m)
        for (int k = 0; k < 2; ++k)
            CHECK(acc(m, k) / trials == doctest::Approx(beta(m, k)).epsilon(0.03));
}

TEST_CASE("projected uplink matches the full received signal")
{
    RMatrix beta = RMatrix::Constant(3, 2, 0.5);
    RandomStream rc(1), rp(2);
    const ChannelSet c = draw_channels(beta, 2, 2, rc);
    const PilotBook b = build_pilot_book(3, 4, 2, 2, PilotPolicy::round_robin, rp);
    RandomStream n1(5), n2(5);
    const UplinkReceived full = uplink_pilot_receive(c, b, 10.0, n1);
    CHECK((full.y_proj - full.y * b.uplink).cwiseAbs().maxCoeff() < 1e-12);
    CMatrix ws, proj;
    uplink_projections_into(c, b, 10.0, n2, ws, proj);
    CHECK((proj - full.y_proj).cwiseAbs().maxCoeff() < 1e-10);

    // noiseless part: sqrt(tau rho) sum_i G_mi Phi_i^H Phi_k
    RandomStream n3(5);
    const UplinkReceived again = uplink_pilot_receive(c, b, 10.0, n3);
    CHECK((again.y - full.y).norm() == 0.0);
}
