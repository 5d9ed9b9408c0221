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

#include "cfmimo/netgeom.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace cfmimo::netgeom
{
    double wrap_distance(const Point &a, const Point &b, double area_m)
    {
        double dx = std::fabs(a.x - b.x);
        double dy = std::fabs(a.y - b.y);
        dx = std::min(dx, area_m - dx);
        dy = std::min(dy, area_m - dy);
        return std::hypot(dx, dy);
    }

    double hata_constant_db(const PropagationParams &p)
    {
        const double lf = std::log10(p.carrier_freq_ghz * 1000.0); // MHz
        return 46.3 + 33.9 * lf - 13.82 * std::log10(p.ap_height_m) - (1.1 * lf - 0.7) * p.user_height_m +
               (1.56 * lf - 0.8);
    }

    double path_loss_db(double d_m, const PropagationParams &p)
    {
        const double big_l = hata_constant_db(p);
        const double d0 = p.d0_m / 1000.0;
        const double d1 = p.d1_m / 1000.0;
        const double d = std::max(d_m, 0.0) / 1000.0;
        if (d > d1)
            return -big_l - 35.0 * std::log10(d);
        const double near = -big_l - 15.0 * std::log10(d1);
        if (d > d0)
            return near - 20.0 * std::log10(d);
        return near - 20.0 * std::log10(d0);
    }

    namespace
    {
        // Gaussian vector with covariance exp(-d_ij / decorr).
        // Eigen-decomposition with clipped eigenvalues keeps this valid when points coincide.
        RVector correlated_field(const std::vector<Point> &pts, double area_m, double decorr, RandomStream &rng)
        {
            const auto n = static_cast<Eigen::Index>(pts.size());
            RMatrix cov(n, n);
            for (Eigen::Index i = 0; i < n; ++i)
                for (Eigen::Index j = 0; j <= i; ++j)
                {
                    const double c = std::exp(-wrap_distance(pts[i], pts[j], area_m) / decorr);
                    cov(i, j) = c;
                    cov(j, i) = c;
                }
            Eigen::SelfAdjointEigenSolver<RMatrix> eig(cov);
            const RVector scale = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
            RVector z(n);
            for (Eigen::Index i = 0; i < n; ++i)
                z(i) = rng.normal();
            return eig.eigenvectors() * scale.cwiseProduct(z);
        }
    }

    RMatrix draw_shadowing(const std::vector<Point> &aps, const std::vector<Point> &users,
                           const PropagationParams &params, RandomStream &rng)
    {
        const auto M = static_cast<Eigen::Index>(aps.size());
        const auto K = static_cast<Eigen::Index>(users.size());
        if (params.shadow_sigma_db == 0.0)
            return RMatrix::Zero(M, K);
        const double area = params.area_m();
        const RVector a = correlated_field(aps, area, params.shadow_decorr_m, rng);
        const RVector b = correlated_field(users, area, params.shadow_decorr_m, rng);
        const double wa = std::sqrt(params.shadow_mix_delta);
        const double wb = std::sqrt(1.0 - params.shadow_mix_delta);
        RMatrix z(M, K);
        for (Eigen::Index m = 0; m < M; ++m)
            for (Eigen::Index k = 0; k < K; ++k)
                z(m, k) = params.shadow_sigma_db * (wa * a(m) + wb * b(k));
        return z;
    }

    RMatrix large_scale_from(const std::vector<Point> &aps, const std::vector<Point> &users, const RMatrix &shadow_db,
                             const PropagationParams &params)
    {
        const auto M = static_cast<Eigen::Index>(aps.size());
        const auto K = static_cast<Eigen::Index>(users.size());
        require(shadow_db.rows() == M && shadow_db.cols() == K, "shadowing field has wrong shape");
        RMatrix beta(M, K);
        for (Eigen::Index m = 0; m < M; ++m)
            for (Eigen::Index k = 0; k < K; ++k)
            {
                const double d = wrap_distance(aps[m], users[k], params.area_m());
                double db = path_loss_db(d, params);
                if (d > params.d1_m)
                    db += shadow_db(m, k);
                beta(m, k) = std::pow(10.0, db / 10.0);
            }
        return beta;
    }

    LargeScaleState draw_drop(const SystemConfig &config, RandomStream &rng)
    {
        require(config.M >= 1 && config.K >= 1, "a drop needs at least one AP and one user");
        config.propagation.validate();
        const double area = config.propagation.area_m();
        LargeScaleState s;
        s.ap_positions.resize(config.M);
        s.user_positions.resize(config.K);
        for (auto &p : s.ap_positions)
            p = {area * rng.uniform(), area * rng.uniform()};
        for (auto &p : s.user_positions)
            p = {area * rng.uniform(), area * rng.uniform()};
        const RMatrix shadow = draw_shadowing(s.ap_positions, s.user_positions, config.propagation, rng);
        s.beta = large_scale_from(s.ap_positions, s.user_positions, shadow, config.propagation);
        return s;
    }
}
