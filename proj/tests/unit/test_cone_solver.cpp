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

#include "cfmimo/detail/cone_solver.hpp"
#include "cfmimo/random.hpp"

using namespace cfmimo;
using namespace cfmimo::powerctl::detail;

namespace
{
    ConeProblem random_problem(int M, int K, UserCone kind, double c2, std::uint64_t seed)
    {
        RandomStream rng(seed);
        ConeProblem p;
        p.M = M;
        p.K = K;
        p.kind = kind;
        p.b2.resize(M, K);
        p.h.resize(M, K);
        for (int m = 0; m < M; ++m)
            for (int k = 0; k < K; ++k)
            {
                p.b2(m, k) = 0.1 + rng.uniform();
                p.h(m, k) = 0.2 + 2.0 * rng.uniform();
            }
        p.h0 = RVector::Zero(K);
        p.c2 = RVector::Constant(K, c2);
        return p;
    }
}

TEST_CASE("structured Newton step matches the dense KKT solve")
{
    for (UserCone kind : {UserCone::second_order, UserCone::quadratic})
        for (int trial = 0; trial < 5; ++trial)
        {
            const ConeProblem p = random_problem(4 + trial, 3, kind, 0.5, 100 + trial);
            const ConePoint z = interior_start(p, RMatrix::Constant(p.M, p.K, 0.2));
            REQUIRE(in_domain(p, z));
            for (double t : {1.0, 37.0})
            {
                const NewtonStep a = newton_step(p, z, t);
                const NewtonStep b = newton_step_dense(p, z, t);
                const double scale = 1.0 + b.dx.cwiseAbs().maxCoeff() + std::abs(b.ds);
                CHECK((a.dx - b.dx).cwiseAbs().maxCoeff() < 1e-8 * scale);
                CHECK((a.dtheta - b.dtheta).cwiseAbs().maxCoeff() < 1e-8 * scale);
                CHECK((a.du - b.du).cwiseAbs().maxCoeff() < 1e-8 * scale);
                CHECK(std::abs(a.ds - b.ds) < 1e-8 * scale);
                CHECK(a.decrement2 == doctest::Approx(b.decrement2).epsilon(1e-7));
                CHECK(a.decrement2 >= 0.0);
            }
        }
}

TEST_CASE("Newton direction decreases the barrier")
{
    const ConeProblem p = random_problem(5, 2, UserCone::second_order, 1.0, 7);
    const ConePoint z = interior_start(p, RMatrix::Constant(5, 2, 0.3));
    const NewtonStep st = newton_step(p, z, 4.0);
    ConePoint w = z;
    const double a = 1e-3;
    w.x += a * st.dx;
    w.theta += a * st.dtheta;
    w.u += a * st.du;
    w.s += a * st.ds;
    REQUIRE(in_domain(p, w));
    CHECK(barrier_value(p, w, 4.0) < barrier_value(p, z, 4.0));
}

TEST_CASE("interior start is strictly inside for any admissible hint")
{
    const ConeProblem p = random_problem(3, 4, UserCone::quadratic, 2.0, 3);
    CHECK(in_domain(p, interior_start(p, RMatrix::Zero(3, 4))));
    CHECK(in_domain(p, interior_start(p, RMatrix::Constant(3, 4, 0.5))));
    CHECK(barrier_degree(p) > 0.0);
}

TEST_CASE("phase one separates feasible from infeasible sets")
{
    // small noise term: strictly feasible
    const ConeProblem easy = random_problem(6, 2, UserCone::second_order, 1e-3, 5);
    const ConeResult a = phase_one(easy, interior_start(easy, RMatrix::Constant(6, 2, 0.1)));
    CHECK(a.status == ConeStatus::feasible);
    CHECK(a.point.s < 0.0);
    CHECK(in_domain(easy, a.point));

    // noise floor beyond any reachable signal: max sum h x <= sum h < sqrt(c2)
    ConeProblem hard = random_problem(6, 2, UserCone::second_order, 1.0, 5);
    hard.c2.setConstant(1e4);
    const ConeResult b = phase_one(hard, interior_start(hard, RMatrix::Constant(6, 2, 0.1)));
    CHECK(b.status == ConeStatus::infeasible);
    CHECK(b.lower_bound > 0.0);
}
