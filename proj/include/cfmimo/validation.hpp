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

#ifndef CFMIMO_VALIDATION_HPP
#define CFMIMO_VALIDATION_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

// End-to-end oracle battery. Each check is one acceptance criterion.
namespace cfmimo::validation
{
    struct CheckResult
    {
        int id = 0;
        std::string name;
        bool pass = false;
        std::string detail;
        double seconds = 0.0;
    };

    struct CheckOptions
    {
        double scale = 1.0; // multiplies sample and drop counts; 1 is the acceptance size
        int workers = 0;    // 0: default worker count
        std::uint64_t seed = 20261015;
        std::ostream *log = nullptr; // progress notes
    };

    CheckResult check_closed_form_vs_monte_carlo(const CheckOptions &o);  // 1
    CheckResult check_single_antenna_reduction(const CheckOptions &o);    // 2
    CheckResult check_bilinear_moment(const CheckOptions &o);             // 3
    CheckResult check_effective_channel_gaussianity(const CheckOptions &o); // 4
    CheckResult check_mmse_equals_sic_statistical(const CheckOptions &o); // 5
    CheckResult check_p2_single_stream_detectors(const CheckOptions &o);  // 6
    CheckResult check_power_control_gain(const CheckOptions &o);          // 7
    CheckResult check_ordering(const CheckOptions &o);                    // 8
    CheckResult check_bisection(const CheckOptions &o);                   // 9
    CheckResult check_protocol_crossover(const CheckOptions &o);          // 10
    CheckResult check_framework_select(const CheckOptions &o);            // 11
    CheckResult check_determinism(const CheckOptions &o);                 // 12

    struct CheckInfo
    {
        int id;
        const char *name;
        CheckResult (*run)(const CheckOptions &);
    };

    const std::vector<CheckInfo> &all_checks();

    /// Runs the selected checks (all when `ids` is empty), timing each and turning exceptions into failures.
    std::vector<CheckResult> run_battery(const CheckOptions &o, const std::vector<int> &ids = {});

    /// "PASS  3  name: detail (1.2 s)"
    std::string format_result(const CheckResult &r);

    /// max(minimum, round(full * scale))
    int scaled(int full, double scale, int minimum = 1);
}

#endif
