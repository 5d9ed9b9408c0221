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

#include <algorithm>
#include <cmath>

#include "doctest.h"

#include "cfmimo/powerctl.hpp"

using namespace cfmimo;
using namespace cfmimo::powerctl;

namespace
{
    MaxMinProblem problem_from(const RMatrix &beta, double rho, int L, int N)
    {
        MaxMinProblem p;
        p.beta = beta;
        p.gamma = orthogonal_gamma(beta, 20.0, 5.0);
        p.rho = rho;
        p.L = L;
        p.N = N;
        p.tol_t = 1e-5;
        return p;
    }

    double min_of(const std::vector<double> &v)
    {
        return *std::min_element(v.begin(), v.end());
    }
}

TEST_CASE("orthogonal gamma formula")
{
    RMatrix beta(1, 1);
    beta(0, 0) = 0.5;
    CHECK(orthogonal_gamma(beta, 4.0, 2.0)(0, 0) == doctest::Approx(8.0 * 0.25 / (8.0 * 0.5 + 1.0)));
}

TEST_CASE("one AP, one user: full power is optimal with SINR L rho gamma / (N (rho beta + 1))")
{
    RMatrix beta(1, 1);
    beta(0, 0) = 0.3;
    for (int L : {1, 2, 4})
        for (int N : {1, 2})
        {
            const MaxMinProblem p = problem_from(beta, 50.0, L, N);
            const MaxMinResult r = maxmin_bisection(p);
            REQUIRE(r.status == Status::feasible);
            const double g = p.gamma(0, 0);
            const double expect = L * p.rho * g / (N * (p.rho * 0.3 + 1.0));
            CHECK(r.t_star == doctest::Approx(expect).epsilon(2e-5));
            CHECK(r.t_hi - r.t_lo <= p.tol_t * r.t_hi * (1.0 + 1e-12));
            CHECK(r.alloc.feasible);
        }
}

TEST_CASE("certificates recheck and the bisection bracket is tight")
{
    RMatrix beta(3, 2);
    beta << 1.0, 0.1, 0.2, 0.8, 0.05, 0.3;
    const MaxMinProblem p = problem_from(beta, 20.0, 2, 2);
    const MaxMinResult r = maxmin_bisection(p);
    REQUIRE(r.status == Status::feasible);
    CHECK(recheck(r.witness, r.witness_t, p));
    CHECK(min_of(sinr_p1(r.witness.varsigma, p)) >= r.witness_t * (1.0 - 1e-8));
    CHECK(r.t_star >= min_of(sinr_p1(uniform_varsigma(p), p)));

    const FeasibilityCertificate above = feasibility(r.t_hi * 1.01, p);
    CHECK(above.status == Status::infeasible);
    const FeasibilityCertificate below = feasibility(r.t_lo * 0.99, p);
    CHECK(below.status == Status::feasible);
    CHECK(recheck(below, r.t_lo * 0.99, p));

    // per-AP budget N sum_k gamma eta <= 1/L
    CHECK(r.alloc.slack.minCoeff() >= -1e-10);
}

TEST_CASE("duplicated users: order does not matter and sharing costs SINR")
{
    RMatrix one(3, 1);
    one << 0.6, 0.2, 0.05;
    RMatrix two(3, 2);
    two << one, one;
    RMatrix mixed(3, 2);
    mixed << one, RMatrix::Constant(3, 1, 0.1);
    RMatrix swapped(3, 2);
    swapped << RMatrix::Constant(3, 1, 0.1), one;

    const double t1 = maxmin_bisection(problem_from(one, 20.0, 1, 1)).t_star;
    const double t2 = maxmin_bisection(problem_from(two, 20.0, 1, 1)).t_star;
    CHECK(t2 < t1);
    const MaxMinResult a = maxmin_bisection(problem_from(mixed, 20.0, 1, 1));
    const MaxMinResult b = maxmin_bisection(problem_from(swapped, 20.0, 1, 1));
    CHECK(a.t_star == doctest::Approx(b.t_star).epsilon(3e-5));
}

TEST_CASE("max-min SINR grows with the data SNR")
{
    RMatrix beta(4, 3);
    beta << 1.0, 0.1, 0.3, 0.2, 0.8, 0.05, 0.05, 0.3, 0.9, 0.4, 0.4, 0.4;
    double prev = 0.0;
    for (double rho : {0.5, 2.0, 8.0, 32.0})
    {
        const double t = maxmin_bisection(problem_from(beta, rho, 2, 2)).t_star;
        CHECK(t > prev);
        prev = t;
    }
}

TEST_CASE("zero target is trivially feasible and invalid problems are rejected")
{
    RMatrix beta = RMatrix::Constant(2, 2, 0.5);
    MaxMinProblem p = problem_from(beta, 10.0, 1, 1);
    const FeasibilityCertificate c = feasibility(0.0, p);
    CHECK(c.status == Status::feasible);
    p.rho = -1.0;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
}

TEST_CASE("make_problem refuses shared pilots")
{
    RandomStream rng(1);
    RMatrix beta = RMatrix::Constant(2, 3, 0.5);
    const auto shared = channel::build_pilot_book(2, 3, 3, 1, channel::PilotPolicy::round_robin, rng);
    const auto clean = channel::build_pilot_book(3, 3, 3, 1, channel::PilotPolicy::round_robin, rng);
    CHECK_THROWS_AS(make_problem(beta, estimation::uplink_statistics(beta, shared, 1.0), 1.0, 1, 1),
                    InvalidArgument);
    const MaxMinProblem p = make_problem(beta, estimation::uplink_statistics(beta, clean, 1.0), 1.0, 1, 1);
    CHECK((p.gamma - orthogonal_gamma(beta, 3.0, 1.0)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("successive approximation never lowers the objective and beats uniform power")
{
    RMatrix beta(5, 3);
    beta << 1.0, 0.1, 0.3, 0.2, 0.8, 0.05, 0.05, 0.3, 0.9, 0.4, 0.4, 0.4, 0.02, 0.6, 0.1;
    const MaxMinProblem p = problem_from(beta, 30.0, 1, 1);
    const ScaResult r = maxmin_up_approx(p);
    REQUIRE(r.status == Status::feasible);
    REQUIRE(!r.objective.empty());
    for (std::size_t i = 1; i < r.objective.size(); ++i)
        CHECK(r.objective[i] >= r.objective[i - 1] - 1e-12);
    const double uni = std::log2(1.0 + min_of(sinr_up_approx(uniform_varsigma(p), p)));
    CHECK(r.objective.back() >= uni - 1e-9);
    CHECK(r.alloc.slack.minCoeff() >= -1e-10);

    MaxMinProblem multi = p;
    multi.L = 2;
    CHECK_THROWS_AS(maxmin_up_approx(multi), InvalidArgument);
}
