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

#include "cfmimo/powerctl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "cfmimo/detail/cone_solver.hpp"

namespace cfmimo::powerctl
{
    namespace
    {
        // Normalized variables: x_mk = sqrt(L N gamma_mk) varsigma_mk, theta = sqrt(L N) vartheta.
        // Then the AP cone is ||x_m|| <= theta_m <= 1 and the user cone reads
        //   sqrt(t) || (sqrt(rho beta_k) .* theta, 1) || <= sum_m sqrt(rho L gamma_mk / N) x_mk.
        RMatrix x_scale(const MaxMinProblem &p)
        {
            return (static_cast<double>(p.L) * p.N * p.gamma.array()).sqrt().matrix();
        }

        RMatrix to_x(const RMatrix &varsigma, const MaxMinProblem &p)
        {
            return (varsigma.array() * x_scale(p).array()).matrix();
        }

        RMatrix to_varsigma(const RMatrix &x, const MaxMinProblem &p)
        {
            return (x.array() / x_scale(p).array()).matrix();
        }

        double min_of(const std::vector<double> &v)
        {
            return *std::min_element(v.begin(), v.end());
        }

        double geometric_mid(double lo, double hi)
        {
            return lo > 0.0 ? std::sqrt(lo * hi) : 0.5 * hi;
        }

        detail::ConeProblem p1_cone(double t, const MaxMinProblem &p)
        {
            detail::ConeProblem c;
            c.M = p.M();
            c.K = p.K();
            c.kind = detail::UserCone::second_order;
            c.b2 = p.rho * p.beta;
            c.h = (p.rho * p.L / p.N * p.gamma.array() / t).sqrt().matrix();
            c.h0 = RVector::Zero(c.K);
            c.c2 = RVector::Ones(c.K);
            return c;
        }

        // F_k(x) = (g_k^T x_k)^2 + (1 + t) sum_m b2_mk x_mk^2 linearized at x0, divided by t.
        detail::ConeProblem sca_cone(double t, const RMatrix &x0, const MaxMinProblem &p)
        {
            detail::ConeProblem c;
            c.M = p.M();
            c.K = p.K();
            c.kind = detail::UserCone::quadratic;
            c.b2 = p.rho * p.beta;
            const RMatrix g = (p.rho * p.gamma.array()).sqrt().matrix();
            c.h.resize(c.M, c.K);
            c.h0.resize(c.K);
            for (int k = 0; k < c.K; ++k)
            {
                const double coh = g.col(k).dot(x0.col(k));
                const double self = (c.b2.col(k).array() * x0.col(k).array().square()).sum();
                const double f = coh * coh + (1.0 + t) * self;
                c.h.col(k) = (2.0 * coh * g.col(k).array() + 2.0 * (1.0 + t) * c.b2.col(k).array() *
                                                                   x0.col(k).array())
                                 .matrix() /
                             t;
                c.h0(k) = -f / t;
            }
            c.c2 = RVector::Ones(c.K);
            return c;
        }
    }

    void MaxMinProblem::validate() const
    {
        require(beta.size() > 0, "beta must be non-empty");
        require(gamma.rows() == beta.rows() && gamma.cols() == beta.cols(), "gamma must match beta");
        require((beta.array() > 0.0).all(), "beta must be positive");
        require((gamma.array() > 0.0).all() && (gamma.array() <= beta.array()).all(),
                "gamma must lie in (0, beta]");
        require(rho > 0.0, "rho must be positive");
        require(L >= 1 && N >= 1, "L and N must be positive");
        require(tol_t > 0.0, "tol_t must be positive");
    }

    RMatrix orthogonal_gamma(const RMatrix &beta, double tau_u, double rho_u)
    {
        const double c = tau_u * rho_u;
        return (c * beta.array().square() / (c * beta.array() + 1.0)).matrix();
    }

    MaxMinProblem make_problem(const RMatrix &beta, const estimation::UplinkStatistics &stats, double rho, int L,
                               int N, double tol_t)
    {
        require(stats.M == beta.rows() && stats.K == beta.cols() && stats.N == N, "statistics do not match beta");
        MaxMinProblem p;
        p.beta = beta;
        p.gamma.resize(stats.M, stats.K);
        for (int m = 0; m < stats.M; ++m)
            for (int k = 0; k < stats.K; ++k)
            {
                const CMatrix &a = stats.a_of(m, k);
                const double g0 = stats.gamma_of(m, k, 0);
                const double off = (a - CMatrix(a.diagonal().asDiagonal())).norm();
                bool scalar = off <= 1e-9 * a.norm();
                for (int i = 1; i < N; ++i)
                    scalar = scalar && std::abs(stats.gamma_of(m, k, i) - g0) <= 1e-9 * g0;
                // a shared pilot shows up as gamma below its contamination-free value
                const double tb = stats.tau_u * stats.rho_u * beta(m, k);
                scalar = scalar && std::abs(g0 - tb * beta(m, k) / (tb + 1.0)) <= 1e-9 * g0;
                require(scalar, "max-min power control requires mutually orthogonal pilots");
                p.gamma(m, k) = g0;
            }
        p.rho = rho;
        p.L = L;
        p.N = N;
        p.tol_t = tol_t;
        p.validate();
        return p;
    }

    std::vector<double> sinr_p1(const RMatrix &varsigma, const MaxMinProblem &p)
    {
        require(varsigma.rows() == p.M() && varsigma.cols() == p.K(), "varsigma must be M x K");
        require((varsigma.array() >= 0.0).all(), "varsigma must be non-negative");
        const RVector load = (p.gamma.array() * varsigma.array().square()).rowwise().sum();
        const double floor = 1.0 / (p.rho * p.L * p.L);
        std::vector<double> out(static_cast<std::size_t>(p.K()));
        for (int k = 0; k < p.K(); ++k)
        {
            const double coh = p.gamma.col(k).dot(varsigma.col(k));
            const double den = static_cast<double>(p.N) / p.L * p.beta.col(k).dot(load) + floor;
            out[static_cast<std::size_t>(k)] = coh * coh / den;
        }
        return out;
    }

    std::vector<double> sinr_up_approx(const RMatrix &varsigma, const MaxMinProblem &p)
    {
        require(p.L == 1 && p.N == 1, "the perfect CSI approximation is defined for L = N = 1 only");
        const RVector load = (p.gamma.array() * varsigma.array().square()).rowwise().sum();
        std::vector<double> out(static_cast<std::size_t>(p.K()));
        for (int k = 0; k < p.K(); ++k)
        {
            double coh = 0.0, self = 0.0, interf = 0.0;
            for (int m = 0; m < p.M(); ++m)
            {
                const double own = p.gamma(m, k) * varsigma(m, k) * varsigma(m, k);
                coh += p.gamma(m, k) * varsigma(m, k);
                self += p.beta(m, k) * own;
                interf += p.beta(m, k) * (load(m) - own);
            }
            out[static_cast<std::size_t>(k)] = (coh * coh + self) / (interf + 1.0 / p.rho);
        }
        return out;
    }

    RMatrix uniform_varsigma(const MaxMinProblem &p)
    {
        const RVector total = p.gamma.rowwise().sum();
        RMatrix v(p.M(), p.K());
        for (int m = 0; m < p.M(); ++m)
            v.row(m).setConstant(1.0 / std::sqrt(static_cast<double>(p.L) * p.N * total(m)));
        return v;
    }

    FeasibilityCertificate feasibility(double t, const MaxMinProblem &p, const RMatrix *hint)
    {
        p.validate();
        require(t >= 0.0, "target SINR must be non-negative");
        FeasibilityCertificate cert;
        if (t == 0.0)
        {
            cert.status = Status::feasible;
            cert.feasible = true;
            cert.varsigma = RMatrix::Zero(p.M(), p.K());
            cert.theta = RVector::Zero(p.M());
            return cert;
        }

        const detail::ConeProblem cone = p1_cone(t, p);
        const RMatrix x_hint = to_x(hint ? *hint : uniform_varsigma(p), p);
        const detail::ConeResult r = detail::phase_one(cone, detail::interior_start(cone, x_hint));
        cert.newton_steps = r.newton_steps;
        switch (r.status)
        {
        case detail::ConeStatus::failure:
            cert.status = Status::solver_failure;
            return cert;
        case detail::ConeStatus::infeasible:
            cert.status = Status::infeasible;
            return cert;
        case detail::ConeStatus::feasible:
            break;
        }
        cert.varsigma = to_varsigma(r.point.x, p);
        cert.theta = r.point.theta / std::sqrt(static_cast<double>(p.L) * p.N);
        cert.achieved_min_sinr = min_of(sinr_p1(cert.varsigma, p));
        cert.feasible = true;
        cert.status = Status::feasible;
        if (!recheck(cert, t, p))
        {
            cert.feasible = false;
            cert.status = Status::solver_failure;
        }
        return cert;
    }

    bool recheck(const FeasibilityCertificate &cert, double t, const MaxMinProblem &p, double tol)
    {
        if (!cert.feasible)
            return false;
        const int M = p.M(), K = p.K();
        if (cert.varsigma.rows() != M || cert.varsigma.cols() != K || cert.theta.size() != M)
            return false;
        if ((cert.varsigma.array() < 0.0).any())
            return false;
        const double cap = 1.0 / std::sqrt(static_cast<double>(p.L) * p.N);
        for (int m = 0; m < M; ++m)
        {
            if (cert.theta(m) < -tol * cap || cert.theta(m) > cap * (1.0 + tol))
                return false;
            const double load = std::sqrt((p.gamma.row(m).array() * cert.varsigma.row(m).array().square()).sum());
            if (load > cert.theta(m) + tol * cap)
                return false;
        }
        for (int k = 0; k < K; ++k)
        {
            double inner = 1.0 / (p.rho * p.L * p.L);
            for (int m = 0; m < M; ++m)
                inner += static_cast<double>(p.N) / p.L * p.beta(m, k) * cert.theta(m) * cert.theta(m);
            const double lhs = std::sqrt(t * inner);
            const double rhs = p.gamma.col(k).dot(cert.varsigma.col(k));
            if (lhs > rhs + tol * std::max(lhs, rhs))
                return false;
        }
        return true;
    }

    transmit::PowerAllocation allocation_from(const RMatrix &varsigma, const MaxMinProblem &p, std::string origin)
    {
        transmit::PowerAllocation a;
        a.eta = varsigma.array().square().matrix();
        a.slack = RVector::Constant(p.M(), 1.0 / p.L) -
                  static_cast<double>(p.N) * (p.gamma.array() * a.eta.array()).rowwise().sum().matrix();
        a.feasible = (a.slack.array() >= -1e-12 / p.L).all();
        a.origin = std::move(origin);
        return a;
    }

    MaxMinResult maxmin_bisection(const MaxMinProblem &p)
    {
        p.validate();
        MaxMinResult res;
        RMatrix best = uniform_varsigma(p);
        double lo = p.t_lo >= 0.0 ? p.t_lo : min_of(sinr_p1(best, p));
        double hi = p.t_hi;
        if (hi < 0.0)
        {
            // SINR_k <= (rho L / N)(sum_m sqrt(gamma_mk))^2 once interference is dropped and x <= 1
            hi = std::numeric_limits<double>::infinity();
            for (int k = 0; k < p.K(); ++k)
            {
                const double s = p.gamma.col(k).cwiseSqrt().sum();
                hi = std::min(hi, p.rho * p.L / p.N * s * s);
            }
        }
        hi = std::max(hi, lo);

        FeasibilityCertificate witness;
        witness.status = Status::feasible;
        witness.feasible = true;
        witness.varsigma = best;
        witness.theta = RVector::Constant(p.M(), 1.0 / std::sqrt(static_cast<double>(p.L) * p.N));
        witness.achieved_min_sinr = min_of(sinr_p1(best, p));
        double witness_t = witness.achieved_min_sinr;

        auto fail = [&]() {
            res.status = Status::solver_failure;
            res.witness = witness;
            res.witness_t = witness_t;
            res.alloc = allocation_from(best, p, "maxmin");
            res.t_star = min_of(sinr_p1(best, p));
            res.t_lo = lo;
            res.t_hi = hi;
            return res;
        };

        // confirm the upper end of the bracket, doubling while it is still feasible
        for (int guard = 0; hi > 0.0; ++guard)
        {
            const FeasibilityCertificate c = feasibility(hi, p, &best);
            ++res.feasibility_calls;
            if (c.status == Status::solver_failure || guard > 60)
                return fail();
            if (c.status == Status::infeasible)
                break;
            best = c.varsigma;
            witness = c;
            witness_t = hi;
            lo = std::max(hi, c.achieved_min_sinr);
            hi = 2.0 * lo;
        }

        while (hi - lo > p.tol_t * hi)
        {
            const double mid = geometric_mid(lo, hi);
            const FeasibilityCertificate c = feasibility(mid, p, &best);
            ++res.feasibility_calls;
            ++res.iterations;
            if (c.status == Status::solver_failure)
                return fail();
            if (c.status == Status::feasible)
            {
                best = c.varsigma;
                witness = c;
                witness_t = mid;
                lo = std::min(std::max(mid, c.achieved_min_sinr), hi);
            }
            else
                hi = mid;
        }

        res.status = Status::feasible;
        res.witness = witness;
        res.witness_t = witness_t;
        res.alloc = allocation_from(best, p, "maxmin");
        res.t_star = min_of(sinr_p1(best, p));
        res.t_lo = lo;
        res.t_hi = hi;
        return res;
    }

    transmit::PowerAllocation reuse_for_p2(const transmit::PowerAllocation &alloc)
    {
        transmit::PowerAllocation out = alloc;
        out.origin = "maxmin-reused";
        return out;
    }

    ScaResult maxmin_up_approx(const MaxMinProblem &p, double prelog, int max_iterations, double tol_bits)
    {
        p.validate();
        require(p.L == 1 && p.N == 1, "successive approximation is defined for L = N = 1 only");
        require(max_iterations >= 1, "need at least one iteration");
        ScaResult res;
        RMatrix vs = uniform_varsigma(p);
        auto objective = [&](const RMatrix &v) { return prelog * std::log2(1.0 + min_of(sinr_up_approx(v, p))); };
        res.objective.push_back(objective(vs));

        const RMatrix g = (p.rho * p.gamma.array()).sqrt().matrix();
        double ceiling = std::numeric_limits<double>::infinity();
        for (int k = 0; k < p.K(); ++k)
        {
            const double s = g.col(k).sum();
            ceiling = std::min(ceiling, s * s + p.rho * p.beta.col(k).sum());
        }

        for (int it = 0; it < max_iterations; ++it)
        {
            const RMatrix x0 = to_x(vs, p);
            RMatrix best_x = x0;
            double lo = min_of(sinr_up_approx(vs, p));
            double hi = std::max(ceiling, lo);
            while (hi - lo > p.tol_t * hi)
            {
                const double mid = geometric_mid(lo, hi);
                const detail::ConeProblem cone = sca_cone(mid, x0, p);
                const detail::ConeResult r = detail::phase_one(cone, detail::interior_start(cone, best_x));
                if (r.status == detail::ConeStatus::failure)
                {
                    res.status = Status::solver_failure;
                    res.varsigma = vs;
                    res.alloc = allocation_from(vs, p, "sca");
                    res.iterations = it;
                    return res;
                }
                if (r.status == detail::ConeStatus::feasible)
                {
                    best_x = r.point.x;
                    lo = mid;
                }
                else
                    hi = mid;
            }
            const RMatrix candidate = to_varsigma(best_x, p);
            const double obj = objective(candidate);
            res.iterations = it + 1;
            const double prev = res.objective.back();
            if (obj > prev)
            {
                vs = candidate;
                res.objective.push_back(obj);
            }
            else
                res.objective.push_back(prev);
            if (res.objective.back() - prev < tol_bits)
            {
                res.converged = true;
                break;
            }
        }
        res.status = Status::feasible;
        res.varsigma = vs;
        res.alloc = allocation_from(vs, p, "sca");
        return res;
    }
}
