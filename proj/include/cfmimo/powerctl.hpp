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

#ifndef CFMIMO_POWERCTL_HPP
#define CFMIMO_POWERCTL_HPP

#include <string>
#include <vector>

#include "cfmimo/estimation.hpp"
#include "cfmimo/transmit.hpp"
#include "cfmimo/types.hpp"

namespace cfmimo::powerctl
{
    /// Max-min fairness problem under mutually orthogonal pilots.
    struct MaxMinProblem
    {
        RMatrix beta;  // M x K
        RMatrix gamma; // M x K, tau_u rho_u beta^2 / (tau_u rho_u beta + 1)
        double rho = 1.0;
        int L = 1, N = 1;
        double tol_t = 1e-4; // relative bracket width
        double t_lo = -1.0;  // negative: automatic
        double t_hi = -1.0;

        void validate() const;
        int M() const { return static_cast<int>(beta.rows()); }
        int K() const { return static_cast<int>(beta.cols()); }
    };

    /// gamma_mk = tau rho beta^2 / (tau rho beta + 1).
    RMatrix orthogonal_gamma(const RMatrix &beta, double tau_u, double rho_u);

    /// Builds the problem from uplink statistics; throws unless every A_mk is a multiple of I.
    MaxMinProblem make_problem(const RMatrix &beta, const estimation::UplinkStatistics &stats, double rho, int L,
                               int N, double tol_t = 1e-4);

    enum class Status
    {
        feasible,
        infeasible,
        solver_failure
    };

    struct FeasibilityCertificate
    {
        Status status = Status::infeasible;
        bool feasible = false;
        RMatrix varsigma; // M x K, sqrt(eta)
        RVector theta;    // M, 0 <= theta_m <= 1/sqrt(LN)
        double achieved_min_sinr = 0.0;
        int newton_steps = 0;
    };

    /// (sum_m gamma varsigma)^2 / ((N/L) sum_m beta_mk sum_k' gamma_mk' varsigma_mk'^2 + 1/(rho L^2)) per user.
    std::vector<double> sinr_p1(const RMatrix &varsigma, const MaxMinProblem &problem);

    /// Equal eta_mk across users at each AP, with every AP on its full budget.
    RMatrix uniform_varsigma(const MaxMinProblem &problem);

    /// Decides whether min_k SINR >= t is achievable. `hint` is an optional varsigma to start from.
    FeasibilityCertificate feasibility(double t, const MaxMinProblem &problem, const RMatrix *hint = nullptr);

    /// Independent check of every constraint of a certificate at target t.
    bool recheck(const FeasibilityCertificate &cert, double t, const MaxMinProblem &problem, double tol = 1e-8);

    struct MaxMinResult
    {
        Status status = Status::solver_failure;
        transmit::PowerAllocation alloc;
        FeasibilityCertificate witness;
        double witness_t = 0.0; // target the witness was certified for
        double t_star = 0.0; // min-user SINR of the returned allocation
        double t_lo = 0.0, t_hi = 0.0;
        int iterations = 0;
        int feasibility_calls = 0;
    };

    MaxMinResult maxmin_bisection(const MaxMinProblem &problem);

    /// eta = varsigma^2 with per-AP slack 1/L - N sum_k gamma eta.
    transmit::PowerAllocation allocation_from(const RMatrix &varsigma, const MaxMinProblem &problem,
                                              std::string origin);

    /// Same coefficients, tagged for Protocol 2.
    transmit::PowerAllocation reuse_for_p2(const transmit::PowerAllocation &alloc);

    struct ScaResult
    {
        Status status = Status::solver_failure;
        transmit::PowerAllocation alloc;
        RMatrix varsigma;
        std::vector<double> objective; // min-user SE after each iterate, index 0 = start
        int iterations = 0;
        bool converged = false;
    };

    /// Successive approximation for the single-antenna perfect-CSI objective. Requires L = N = 1.
    ScaResult maxmin_up_approx(const MaxMinProblem &problem, double prelog = 1.0, int max_iterations = 30,
                               double tol_bits = 1e-4);

    /// SINRs inside the single-antenna perfect-CSI approximation.
    std::vector<double> sinr_up_approx(const RMatrix &varsigma, const MaxMinProblem &problem);
}

#endif
