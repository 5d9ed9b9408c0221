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

#include <sstream>
#include <string>
#include <vector>

#include "common.hpp"

namespace cfmimo::validation
{
    using detail::fmt;
    using detail::note;

    CheckResult check_protocol_crossover(const CheckOptions &o)
    {
        CheckResult r;
        std::string detail;
        double diff5 = 0.0, diff40 = 0.0;
        for (int K : {5, 10, 20, 30, 40})
        {
            SystemConfig c = detail::base_config(50, K, 4, 2, o);
            c.n_drops = scaled(100, o.scale, 10);
            c.n_realizations = scaled(K <= 10 ? 300 : 100, o.scale, 20);
            c.n_batches = 10;
            c.protocols = {Protocol::p1_closed_form, Protocol::p2_sic};
            c.pc_modes = {PcMode::uniform};
            const harness::ExperimentResult res = harness::run_experiment(c, o.workers);
            const double p1 = res.pool(Protocol::p1_closed_form, PcMode::uniform).likely95();
            const double p2 = res.pool(Protocol::p2_sic, PcMode::uniform).likely95();
            if (K == 5)
                diff5 = p2 - p1;
            if (K == 40)
                diff40 = p2 - p1;
            detail += std::string(detail.empty() ? "" : "; ") + "K=" + std::to_string(K) + " P1 " + fmt("%.4f", p1) +
                      " P2 " + fmt("%.4f", p2);
            note(o, detail);
        }
        r.pass = diff5 > 0.0 && diff40 < 0.0;
        r.detail = detail;
        return r;
    }

    CheckResult check_framework_select(const CheckOptions &o)
    {
        CheckResult r;
        auto describe = [](const harness::Selection &s) {
            std::string out = to_string(s.protocol) + " n=" + std::to_string(s.n) + " [";
            for (std::size_t i = 0; i < s.candidates.size(); ++i)
                out += std::string(i ? " " : "") + (s.candidates[i].protocol == Protocol::p1_closed_form ? "P1" : "P2") +
                       "/" + std::to_string(s.candidates[i].n) + ":" + fmt("%.3f", s.candidates[i].likely95);
            return out + "]";
        };

        // both regimes run with max-min power control, as in the antenna-count study
        SystemConfig s1 = detail::base_config(50, 5, 4, 4, o);
        s1.pc_modes = {PcMode::maxmin};
        s1.n_drops = scaled(50, o.scale, 5);
        s1.n_realizations = scaled(200, o.scale, 20);
        s1.n_batches = 10;
        const harness::Selection a = harness::framework_select(s1, 4, o.workers);

        SystemConfig s2 = detail::base_config(20, 30, 1, 4, o);
        s2.pc_modes = {PcMode::maxmin};
        s2.n_drops = scaled(50, o.scale, 5);
        s2.n_realizations = scaled(200, o.scale, 20);
        s2.n_batches = 10;
        const harness::Selection b = harness::framework_select(s2, 4, o.workers);

        r.pass = a.n > 1 && b.n == 1;
        r.detail = "M=50 L=4 K=5: " + describe(a) + "; M=20 L=1 K=30: " + describe(b);
        note(o, r.detail);
        return r;
    }

    CheckResult check_determinism(const CheckOptions &o)
    {
        CheckResult r;
        SystemConfig c = detail::base_config(12, 3, 2, 2, o);
        c.n_drops = 6;
        c.n_realizations = 60;
        c.n_batches = 6;
        c.protocols = {Protocol::p1_closed_form, Protocol::p1_sic, Protocol::p1_mmse, Protocol::p2_sic,
                       Protocol::p2_mmse, Protocol::perfect_csi};
        c.pc_modes = {PcMode::uniform, PcMode::maxmin};
        auto csv = [&](int workers) {
            std::ostringstream os;
            harness::write_csv(os, harness::run_experiment(c, workers));
            return os.str();
        };
        const std::string one = csv(1);
        const std::string again = csv(1);
        const std::string three = csv(3);
        const std::string many = csv(6);
        r.pass = one == again && one == three && one == many && !one.empty();
        r.detail = std::to_string(one.size()) + " CSV bytes; repeat " + (one == again ? "identical" : "DIFFERS") +
                   ", 3 workers " + (one == three ? "identical" : "DIFFERS") + ", 6 workers " +
                   (one == many ? "identical" : "DIFFERS");
        return r;
    }
}
