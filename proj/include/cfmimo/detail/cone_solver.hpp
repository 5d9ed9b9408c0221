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

#ifndef CFMIMO_DETAIL_CONE_SOLVER_HPP
#define CFMIMO_DETAIL_CONE_SOLVER_HPP

#include "cfmimo/types.hpp"

// Phase-I barrier solver for the power-control feasibility sets.
//
// Variables: x (M x K, positive), theta (M), u (K), s (scalar).
//   AP cones:   ||x_m|| < theta_m < 1
//   user rows:  u_k = sum_m h_mk x_mk + h0_k
//   user cones: second_order: sqrt(sum_m b2_mk theta_m^2 + c2_k) < u_k + s
//               quadratic:    sum_m b2_mk theta_m^2 + c2_k      < u_k + s
// The set is non-empty iff min s < 0.
namespace cfmimo::powerctl::detail
{
    enum class UserCone
    {
        second_order,
        quadratic
    };

    struct ConeProblem
    {
        int M = 0, K = 0;
        RMatrix b2; // M x K
        RMatrix h;  // M x K
        RVector h0; // K
        RVector c2; // K
        UserCone kind = UserCone::second_order;
    };

    struct ConePoint
    {
        RMatrix x;     // M x K
        RVector theta; // M
        RVector u;     // K
        double s = 0.0;
    };

    enum class ConeStatus
    {
        feasible,
        infeasible,
        failure
    };

    struct ConeOptions
    {
        double t0 = 1.0;          // initial barrier weight on s
        double mu = 8.0;          // barrier weight growth
        double gap_tol = 1e-7;    // relative to the user-cone scale
        double newton_tol = 1e-9; // half squared Newton decrement
        int max_newton = 5000;
    };

    struct ConeResult
    {
        ConeStatus status = ConeStatus::failure;
        ConePoint point;
        int newton_steps = 0;
        double lower_bound = 0.0; // s* >= lower_bound at exit when infeasible
    };

    /// Strict interior start built from any non-negative x with row norms <= 1.
    ConePoint interior_start(const ConeProblem &p, const RMatrix &x_hint);

    /// Runs phase I from an interior point. Stops as soon as s < 0.
    ConeResult phase_one(const ConeProblem &p, ConePoint start, const ConeOptions &options = {});

    // Exposed for tests: barrier value, and the Newton direction by structured or dense elimination.
    bool in_domain(const ConeProblem &p, const ConePoint &z);
    double barrier_value(const ConeProblem &p, const ConePoint &z, double t);
    struct NewtonStep
    {
        RMatrix dx;
        RVector dtheta, du;
        double ds = 0.0;
        double decrement2 = 0.0; // -grad^T step
    };
    NewtonStep newton_step(const ConeProblem &p, const ConePoint &z, double t);
    NewtonStep newton_step_dense(const ConeProblem &p, const ConePoint &z, double t);

    /// Degree of the barrier, which bounds the duality gap by degree / t on the central path.
    double barrier_degree(const ConeProblem &p);
}

#endif
