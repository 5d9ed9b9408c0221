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

#include "cfmimo/detail/cone_solver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace cfmimo::powerctl::detail
{
    namespace
    {
        constexpr double kInf = std::numeric_limits<double>::infinity();

        // Gradient and Hessian of the barrier t*s + phi. x-variables form M diagonal K x K blocks,
        // coupled only to theta_m; y = (theta, u, s).
        struct Derivatives
        {
            std::vector<RMatrix> p; // Hessian blocks of x_m
            RMatrix gx;             // M x K
            RMatrix hx_theta;       // M x K: d2/(dx_m dtheta_m)
            RMatrix hyy;
            RVector gy;
        };

        double user_lhs(const ConeProblem &p, const ConePoint &z, int k)
        {
            double acc = p.c2(k);
            for (int m = 0; m < p.M; ++m)
                acc += p.b2(m, k) * z.theta(m) * z.theta(m);
            return p.kind == UserCone::second_order ? std::sqrt(acc) : acc;
        }

        Derivatives derivatives(const ConeProblem &p, const ConePoint &z, double t)
        {
            const int M = p.M, K = p.K, ny = M + K + 1;
            const int is = M + K;
            Derivatives d;
            d.p.assign(static_cast<std::size_t>(M), RMatrix::Zero(K, K));
            d.gx = RMatrix::Zero(M, K);
            d.hx_theta = RMatrix::Zero(M, K);
            d.hyy = RMatrix::Zero(ny, ny);
            d.gy = RVector::Zero(ny);

            for (int m = 0; m < M; ++m)
            {
                const RVector xm = z.x.row(m).transpose();
                const double th = z.theta(m);
                const double q = th * th - xm.squaredNorm();
                RMatrix &pm = d.p[static_cast<std::size_t>(m)];
                d.gx.row(m) += (2.0 / q) * xm.transpose();
                d.gy(m) += -2.0 * th / q;
                pm.diagonal().array() += 2.0 / q;
                pm.noalias() += (4.0 / (q * q)) * xm * xm.transpose();
                d.hx_theta.row(m) += (-4.0 * th / (q * q)) * xm.transpose();
                d.hyy(m, m) += -2.0 / q + 4.0 * th * th / (q * q);

                // x > 0 and theta < 1
                d.gx.row(m) -= xm.cwiseInverse().transpose();
                pm.diagonal() += xm.cwiseInverse().cwiseAbs2();
                const double r = 1.0 - th;
                d.gy(m) += 1.0 / r;
                d.hyy(m, m) += 1.0 / (r * r);
            }

            RVector bt(M);
            for (int k = 0; k < K; ++k)
            {
                const int iu = M + k;
                const double w = z.u(k) + z.s;
                for (int m = 0; m < M; ++m)
                    bt(m) = p.b2(m, k) * z.theta(m);
                const double quad = bt.dot(z.theta) + p.c2(k);
                double dw, hww, q;
                RVector hwt;
                if (p.kind == UserCone::second_order)
                {
                    q = w * w - quad;
                    dw = -2.0 * w / q;
                    hww = -2.0 / q + 4.0 * w * w / (q * q);
                    hwt = (-4.0 * w / (q * q)) * bt;
                }
                else
                {
                    q = w - quad;
                    dw = -1.0 / q;
                    hww = 1.0 / (q * q);
                    hwt = (-2.0 / (q * q)) * bt;
                }
                d.gy.head(M) += (2.0 / q) * bt;
                d.hyy.topLeftCorner(M, M).diagonal() += (2.0 / q) * p.b2.col(k);
                d.hyy.topLeftCorner(M, M).noalias() += (4.0 / (q * q)) * bt * bt.transpose();
                d.gy(iu) += dw;
                d.gy(is) += dw;
                for (int a : {iu, is})
                {
                    for (int b : {iu, is})
                        d.hyy(a, b) += hww;
                    d.hyy.col(a).head(M) += hwt;
                    d.hyy.row(a).head(M) += hwt.transpose();
                }
            }
            d.gy(is) += t;
            return d;
        }

        NewtonStep finish(const ConeProblem &p, const Derivatives &d, RMatrix dx, const RVector &dy)
        {
            NewtonStep st;
            st.dx = std::move(dx);
            st.dtheta = dy.head(p.M);
            st.du = dy.segment(p.M, p.K);
            st.ds = dy(p.M + p.K);
            st.decrement2 = -((d.gx.array() * st.dx.array()).sum() + d.gy.dot(dy));
            return st;
        }

        ConePoint advance(const ConePoint &z, const NewtonStep &st, double a)
        {
            ConePoint out;
            out.x = z.x + a * st.dx;
            out.theta = z.theta + a * st.dtheta;
            out.u = z.u + a * st.du;
            out.s = z.s + a * st.ds;
            return out;
        }

        void resync_u(const ConeProblem &p, ConePoint &z)
        {
            for (int k = 0; k < p.K; ++k)
                z.u(k) = p.h.col(k).dot(z.x.col(k)) + p.h0(k);
        }
    }

    double barrier_degree(const ConeProblem &p)
    {
        const double user = p.kind == UserCone::second_order ? 2.0 : 1.0;
        return 3.0 * p.M + static_cast<double>(p.M) * p.K + user * p.K;
    }

    bool in_domain(const ConeProblem &p, const ConePoint &z)
    {
        if (!z.x.allFinite() || !z.theta.allFinite() || !z.u.allFinite() || !std::isfinite(z.s))
            return false;
        if ((z.x.array() <= 0.0).any())
            return false;
        for (int m = 0; m < p.M; ++m)
        {
            const double th = z.theta(m);
            if (!(th < 1.0) || !(th > z.x.row(m).norm()) || !(th * th - z.x.row(m).squaredNorm() > 0.0))
                return false;
        }
        for (int k = 0; k < p.K; ++k)
        {
            const double w = z.u(k) + z.s;
            if (p.kind == UserCone::second_order)
            {
                if (!(w > 0.0) || !(w > user_lhs(p, z, k)))
                    return false;
            }
            else if (!(w > user_lhs(p, z, k)))
                return false;
        }
        return true;
    }

    double barrier_value(const ConeProblem &p, const ConePoint &z, double t)
    {
        if (!in_domain(p, z))
            return kInf;
        double phi = t * z.s;
        for (int m = 0; m < p.M; ++m)
        {
            const double th = z.theta(m);
            phi -= std::log(th * th - z.x.row(m).squaredNorm());
            phi -= std::log(1.0 - th);
        }
        phi -= z.x.array().log().sum();
        for (int k = 0; k < p.K; ++k)
        {
            double quad = p.c2(k);
            for (int m = 0; m < p.M; ++m)
                quad += p.b2(m, k) * z.theta(m) * z.theta(m);
            const double w = z.u(k) + z.s;
            phi -= std::log(p.kind == UserCone::second_order ? w * w - quad : w - quad);
        }
        return phi;
    }

    NewtonStep newton_step(const ConeProblem &p, const ConePoint &z, double t)
    {
        const int M = p.M, K = p.K, ny = M + K + 1;
        const Derivatives d = derivatives(p, z, t);

        // Reduced system in (dy, lambda) after eliminating every x_m block.
        RMatrix sys = RMatrix::Zero(ny + K, ny + K);
        RVector rhs = RVector::Zero(ny + K);
        sys.topLeftCorner(ny, ny) = d.hyy;
        rhs.head(ny) = -d.gy;
        for (int k = 0; k < K; ++k)
        {
            sys(M + k, ny + k) = 1.0;
            sys(ny + k, M + k) = 1.0;
        }

        std::vector<Eigen::LLT<RMatrix>> chol;
        chol.reserve(static_cast<std::size_t>(M));
        std::vector<RVector> pinv_g(static_cast<std::size_t>(M)), pinv_h(static_cast<std::size_t>(M));
        for (int m = 0; m < M; ++m)
        {
            chol.emplace_back(d.p[static_cast<std::size_t>(m)]);
            if (chol.back().info() != Eigen::Success)
                throw NotPositiveDefinite("barrier Hessian block is not positive definite");
            const auto &ch = chol.back();
            const RVector g = d.gx.row(m).transpose();
            const RVector hth = d.hx_theta.row(m).transpose();
            const RVector hm = p.h.row(m).transpose();
            const RVector pg = ch.solve(g);
            const RVector ph = ch.solve(hth);
            const RMatrix pinv = ch.solve(RMatrix::Identity(K, K));

            sys(m, m) -= hth.dot(ph);
            rhs(m) += hth.dot(pg);
            for (int k = 0; k < K; ++k)
            {
                const double c = ph(k) * hm(k);
                sys(m, ny + k) += c;
                sys(ny + k, m) += c;
                rhs(ny + k) -= hm(k) * pg(k);
            }
            sys.bottomRightCorner(K, K).noalias() -= hm.asDiagonal() * pinv * hm.asDiagonal();
            pinv_g[static_cast<std::size_t>(m)] = pg;
            pinv_h[static_cast<std::size_t>(m)] = ph;
        }

        const RVector sol = sys.partialPivLu().solve(rhs);
        const RVector dy = sol.head(ny);
        const RVector lambda = sol.tail(K);

        RMatrix dx(M, K);
        for (int m = 0; m < M; ++m)
        {
            const auto &ch = chol[static_cast<std::size_t>(m)];
            const RVector coupling = p.h.row(m).transpose().cwiseProduct(lambda);
            dx.row(m) = (-pinv_g[static_cast<std::size_t>(m)] - pinv_h[static_cast<std::size_t>(m)] * dy(m) +
                         ch.solve(coupling))
                            .transpose();
        }
        return finish(p, d, std::move(dx), dy);
    }

    NewtonStep newton_step_dense(const ConeProblem &p, const ConePoint &z, double t)
    {
        const int M = p.M, K = p.K, ny = M + K + 1, nx = M * K, n = nx + ny;
        const Derivatives d = derivatives(p, z, t);
        auto xi = [K](int m, int k) { return m * K + k; };

        RMatrix kkt = RMatrix::Zero(n + K, n + K);
        RVector rhs = RVector::Zero(n + K);
        for (int m = 0; m < M; ++m)
        {
            kkt.block(xi(m, 0), xi(m, 0), K, K) = d.p[static_cast<std::size_t>(m)];
            for (int k = 0; k < K; ++k)
            {
                kkt(xi(m, k), nx + m) = d.hx_theta(m, k);
                kkt(nx + m, xi(m, k)) = d.hx_theta(m, k);
                rhs(xi(m, k)) = -d.gx(m, k);
                // equality row k: u_k - sum_m h_mk x_mk = h0_k
                kkt(n + k, xi(m, k)) = -p.h(m, k);
                kkt(xi(m, k), n + k) = -p.h(m, k);
            }
        }
        kkt.block(nx, nx, ny, ny) = d.hyy;
        rhs.segment(nx, ny) = -d.gy;
        for (int k = 0; k < K; ++k)
        {
            kkt(n + k, nx + M + k) = 1.0;
            kkt(nx + M + k, n + k) = 1.0;
        }
        const RVector sol = kkt.fullPivLu().solve(rhs);
        RMatrix dx(M, K);
        for (int m = 0; m < M; ++m)
            for (int k = 0; k < K; ++k)
                dx(m, k) = sol(xi(m, k));
        return finish(p, d, std::move(dx), sol.segment(nx, ny));
    }

    ConePoint interior_start(const ConeProblem &p, const RMatrix &x_hint)
    {
        require(x_hint.rows() == p.M && x_hint.cols() == p.K, "x hint must be M x K");
        ConePoint z;
        z.x.resize(p.M, p.K);
        z.theta.resize(p.M);
        for (int m = 0; m < p.M; ++m)
        {
            RVector row = x_hint.row(m).transpose().cwiseMax(0.0);
            const double nrm = row.norm();
            if (nrm > 1.0)
                row /= nrm;
            z.x.row(m) = (0.9 * row + RVector::Constant(p.K, 0.05 / std::sqrt(p.K))).transpose();
            z.theta(m) = 0.5 * (z.x.row(m).norm() + 1.0);
        }
        z.u.resize(p.K);
        resync_u(p, z);
        double worst = -kInf, scale = 0.0;
        for (int k = 0; k < p.K; ++k)
        {
            const double lhs = user_lhs(p, z, k);
            worst = std::max(worst, lhs - z.u(k));
            scale = std::max(scale, std::abs(lhs));
        }
        z.s = worst + 0.1 * (1.0 + scale);
        return z;
    }

    ConeResult phase_one(const ConeProblem &p, ConePoint start, const ConeOptions &options)
    {
        require(p.b2.rows() == p.M && p.b2.cols() == p.K && p.h.rows() == p.M && p.h.cols() == p.K,
                "cone problem shapes do not match");
        require(p.h0.size() == p.K && p.c2.size() == p.K, "cone problem shapes do not match");
        ConeResult res;
        ConePoint z = std::move(start);
        if (!in_domain(p, z))
            throw InvalidArgument("phase one needs a strictly interior start");

        double scale = 1.0;
        for (int k = 0; k < p.K; ++k)
            scale = std::max(scale, std::abs(user_lhs(p, z, k)));
        const double nu = barrier_degree(p);
        double t = options.t0;

        auto done = [&](ConeStatus status) {
            res.status = status;
            res.point = z;
            return res;
        };

        if (z.s < 0.0)
            return done(ConeStatus::feasible);

        while (true)
        {
            // centering
            while (true)
            {
                if (res.newton_steps >= options.max_newton)
                    return done(ConeStatus::failure);
                NewtonStep st;
                try
                {
                    st = newton_step(p, z, t);
                }
                catch (const NotPositiveDefinite &)
                {
                    return done(ConeStatus::failure);
                }
                ++res.newton_steps;
                if (!std::isfinite(st.decrement2))
                    return done(ConeStatus::failure);
                if (0.5 * st.decrement2 <= options.newton_tol)
                    break;

                const double f0 = barrier_value(p, z, t);
                const double slope = -st.decrement2;
                double a = 1.0;
                ConePoint trial = advance(z, st, a);
                while (a > 1e-16 && !in_domain(p, trial))
                {
                    a *= 0.5;
                    trial = advance(z, st, a);
                }
                while (a > 1e-16 && barrier_value(p, trial, t) > f0 + 0.01 * a * slope)
                {
                    a *= 0.5;
                    trial = advance(z, st, a);
                }
                if (a <= 1e-16)
                {
                    // stalled by rounding: accept as centered if the decrement is already small
                    if (0.5 * st.decrement2 <= 1e-6)
                        break;
                    return done(ConeStatus::failure);
                }
                resync_u(p, trial);
                if (!in_domain(p, trial))
                    trial = advance(z, st, a);
                // a near-centered step that no longer moves the barrier is a rounding stall
                const bool no_progress = f0 - barrier_value(p, trial, t) <= 1e-13 * std::max(1.0, std::abs(f0));
                z = std::move(trial);
                if (no_progress && 0.5 * st.decrement2 <= 1e-6)
                    break;
                if (z.s < 0.0)
                    return done(ConeStatus::feasible);
            }
            res.lower_bound = z.s - nu / t;
            if (res.lower_bound > 0.0)
                return done(ConeStatus::infeasible);
            if (nu / t < options.gap_tol * scale)
                return done(ConeStatus::infeasible); // optimum within the tolerance of zero
            t *= options.mu;
        }
    }
}
