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

#ifndef CFMIMO_NETGEOM_HPP
#define CFMIMO_NETGEOM_HPP

#include <vector>

#include "cfmimo/config.hpp"
#include "cfmimo/random.hpp"
#include "cfmimo/types.hpp"

namespace cfmimo::netgeom
{
    struct Point
    {
        double x = 0.0;
        double y = 0.0;
    };

    /// Geometry of one drop and its M x K large-scale fading matrix (linear scale).
    struct LargeScaleState
    {
        std::vector<Point> ap_positions;
        std::vector<Point> user_positions;
        RMatrix beta;
    };

    /// Shortest distance on the torus [0, area)^2.
    double wrap_distance(const Point &a, const Point &b, double area_m);

    /// Far-field intercept L of the Hata-COST231 model, in dB.
    double hata_constant_db(const PropagationParams &params);

    /// Three-slope large-scale gain in dB (negative, non-increasing in d).
    double path_loss_db(double d_m, const PropagationParams &params);

    /// Correlated shadowing field in dB, drawn for every (AP, user) pair.
    ///
    /// z_mk = sqrt(delta) a_m + sqrt(1 - delta) b_k, where a and b are Gaussian fields with
    /// correlation exp(-d / decorr) over wrapped AP-AP and user-user distances.
    /// The field is not gated here; draw_drop applies it beyond d1 only.
    RMatrix draw_shadowing(const std::vector<Point> &aps, const std::vector<Point> &users,
                           const PropagationParams &params, RandomStream &rng);

    /// beta from positions and a shadowing field, with the near-range gate applied.
    RMatrix large_scale_from(const std::vector<Point> &aps, const std::vector<Point> &users,
                             const RMatrix &shadow_db, const PropagationParams &params);

    /// Uniform positions, shadowing, and beta for one drop.
    LargeScaleState draw_drop(const SystemConfig &config, RandomStream &rng);
}

#endif
