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
#include <chrono>
#include <cmath>
#include <exception>

#include "common.hpp"

namespace cfmimo::validation
{
    const std::vector<CheckInfo> &all_checks()
    {
        static const std::vector<CheckInfo> checks{
            {1, "closed form vs Monte Carlo", check_closed_form_vs_monte_carlo},
            {2, "single-antenna reduction", check_single_antenna_reduction},
            {3, "bilinear moment identity", check_bilinear_moment},
            {4, "effective-channel Gaussianity", check_effective_channel_gaussianity},
            {5, "MMSE equals SIC under statistical CSI", check_mmse_equals_sic_statistical},
            {6, "single-stream detector equivalence", check_p2_single_stream_detectors},
            {7, "power-control gain", check_power_control_gain},
            {8, "SE ordering", check_ordering},
            {9, "bisection correctness", check_bisection},
            {10, "protocol crossover", check_protocol_crossover},
            {11, "framework selection", check_framework_select},
            {12, "determinism", check_determinism},
        };
        return checks;
    }

    int scaled(int full, double scale, int minimum)
    {
        return std::max(minimum, static_cast<int>(std::lround(full * scale)));
    }

    std::vector<CheckResult> run_battery(const CheckOptions &o, const std::vector<int> &ids)
    {
        std::vector<CheckResult> out;
        for (const CheckInfo &info : all_checks())
        {
            if (!ids.empty() && std::find(ids.begin(), ids.end(), info.id) == ids.end())
                continue;
            const auto start = std::chrono::steady_clock::now();
            CheckResult r;
            try
            {
                r = info.run(o);
            }
            catch (const std::exception &e)
            {
                r.pass = false;
                r.detail = std::string("exception: ") + e.what();
            }
            r.id = info.id;
            r.name = info.name;
            r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            if (o.log)
                *o.log << format_result(r) << std::endl;
            out.push_back(std::move(r));
        }
        return out;
    }

    std::string format_result(const CheckResult &r)
    {
        char head[96];
        std::snprintf(head, sizeof head, "%s %2d %s: ", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str());
        return head + r.detail + " (" + detail::fmt("%.1f", r.seconds) + " s)";
    }
}
