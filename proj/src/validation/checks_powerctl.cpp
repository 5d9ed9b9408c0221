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
#include <limits>
#include <string>
#include <vector>

#include "cfmimo/powerctl.hpp"
#include "common.hpp"

namespace cfmimo::validation
{
    using detail::fmt;
    using detail::note;

    namespace
    {
        // Max-min SINR by grid search over x = sqrt(gamma) varsigma in [0,1]^(M K). Rows leaving the unit
        // ball are scaled back onto it. Coarse-to-fine: each level re-grids a +-1.5 step window at a quarter
        // of the step, ending at step 1e-3.
        double grid_maxmin(const powerctl::MaxMinProblem &p)
        {
            const int M = p.M(), K = p.K(), D = M * K;
            const RMatrix g = (p.rho * p.gamma.array()).sqrt().matrix();
            const RMatrix b2 = p.rho * p.beta;
            auto value = [&](const std::vector<double> &x) {
                double worst = std::numeric_limits<double>::infinity();
                std::vector<double> load(static_cast<std::size_t>(M));
                for (int m = 0; m < M; ++m)
                {
                    double n2 = 0.0;
                    for (int k = 0; k < K; ++k)
                        n2 += x[m * K + k] * x[m * K + k];
                    load[m] = std::min(n2, 1.0);
                }
                for (int k = 0; k < K; ++k)
                {
                    double coh = 0.0, den = 1.0;
                    for (int m = 0; m < M; ++m)
                    {
                        double n2 = 0.0;
                        for (int j = 0; j < K; ++j)
                            n2 += x[m * K + j] * x[m * K + j];
                        const double shrink = n2 > 1.0 ? 1.0 / std::sqrt(n2) : 1.0;
                        coh += g(m, k) * x[m * K + k] * shrink;
                        den += b2(m, k) * load[m];
                    }
                    worst = std::min(worst, coh * coh / den);
                }
                return worst;
            };

            std::vector<double> center(static_cast<std::size_t>(D), 0.5);
            double best = -1.0;
            std::vector<double> best_x = center;
            double step = 0.1;
            int half = 5; // level 0 covers [0, 1] with 11 points
            bool first = true;
            while (true)
            {
                std::vector<double> lo(static_cast<std::size_t>(D));
                for (int d = 0; d < D; ++d)
                    lo[d] = first ? 0.0 : center[d] - half * step;
                const int pts = first ? 11 : 2 * half + 1;
                std::vector<int> idx(static_cast<std::size_t>(D), 0);
                std::vector<double> x(static_cast<std::size_t>(D));
                while (true)
                {
                    bool inside = true;
                    for (int d = 0; d < D; ++d)
                    {
                        x[d] = lo[d] + idx[d] * step;
                        if (x[d] < -1e-12 || x[d] > 1.0 + 1e-12)
                            inside = false;
                        x[d] = std::clamp(x[d], 0.0, 1.0);
                    }
                    if (inside)
                    {
                        const double v = value(x);
                        if (v > best)
                        {
                            best = v;
                            best_x = x;
                        }
                    }
                    int d = 0;
                    while (d < D && ++idx[d] == pts)
                        idx[d++] = 0;
                    if (d == D)
                        break;
                }
                if (step <= 1e-3 + 1e-15)
                    break;
                center = best_x;
                const double next = std::max(step / 4.0, 1e-3);
                half = static_cast<int>(std::ceil(1.5 * step / next));
                step = next;
                first = false;
            }
            return best;
        }
    }

    CheckResult check_bisection(const CheckOptions &o)
    {
        CheckResult r;
        int instances = 0, bad_t = 0, bad_cert = 0, bad_bracket = 0;
        double worst = 0.0;
        for (int M = 1; M <= 3; ++M)
            for (int K = 1; K <= 2; ++K)
                for (int rep = 0; rep < 5; ++rep)
                {
                    SystemConfig c = detail::base_config(M, K, 1, 1, o).resolved();
                    const harness::DropSetup s = harness::setup_drop(c, 100 * M + 10 * K + rep);
                    powerctl::MaxMinProblem p = powerctl::make_problem(s.ls.beta, s.stats, c.rho, 1, 1, 1e-4);
                    const powerctl::MaxMinResult res = powerctl::maxmin_bisection(p);
                    ++instances;
                    if (res.status != powerctl::Status::feasible ||
                        !powerctl::recheck(res.witness, res.witness_t, p, 1e-8))
                        ++bad_cert;
                    if (res.t_hi - res.t_lo > p.tol_t * res.t_hi)
                        ++bad_bracket;
                    const double grid = grid_maxmin(p);
                    const double rel = std::abs(res.t_star - grid) / grid;
                    worst = std::max(worst, rel);
                    if (!(rel <= 2e-3))
                        ++bad_t;
                }
        r.pass = bad_t == 0 && bad_cert == 0 && bad_bracket == 0;
        r.detail = std::to_string(instances) + " instances: t* vs grid max rel. diff " + fmt("%.2e", worst) + ", " +
                   std::to_string(bad_t) + " mismatches, " + std::to_string(bad_cert) + " bad certificates, " +
                   std::to_string(bad_bracket) + " wide brackets";
        return r;
    }

    CheckResult check_power_control_gain(const CheckOptions &o)
    {
        CheckResult r;
        SystemConfig c = detail::base_config(50, 10, 4, 2, o);
        c.n_drops = scaled(100, o.scale, 10);
        c.n_realizations = scaled(300, o.scale, 50);
        c.n_batches = 10;
        c.protocols = {Protocol::p1_closed_form, Protocol::p2_sic};
        c.pc_modes = {PcMode::uniform, PcMode::maxmin};
        const harness::ExperimentResult res = harness::run_experiment(c, o.workers);
        const double p1u = res.pool(Protocol::p1_closed_form, PcMode::uniform).likely95();
        const double p1m = res.pool(Protocol::p1_closed_form, PcMode::maxmin).likely95();
        const double p2u = res.pool(Protocol::p2_sic, PcMode::uniform).likely95();
        const double p2m = res.pool(Protocol::p2_sic, PcMode::maxmin).likely95();
        const double g1 = p1m / p1u, g2 = p2m / p2u;
        r.pass = res.skips.empty() && g1 >= 1.5 && g1 <= 2.2 && g2 >= 1.35 && g2 <= 2.0;
        r.detail = "P1 95%-likely " + fmt("%.4f", p1u) + " -> " + fmt("%.4f", p1m) + " (x" + fmt("%.3f", g1) +
                   "), P2 " + fmt("%.4f", p2u) + " -> " + fmt("%.4f", p2m) + " (x" + fmt("%.3f", g2) + "), " +
                   std::to_string(c.n_drops) + " drops, " + std::to_string(res.skips.size()) + " skipped";
        note(o, r.detail);
        return r;
    }
}
