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
#include <string>
#include <vector>

#include "cfmimo/powerctl.hpp"
#include "common.hpp"

namespace cfmimo::validation
{
    using detail::fmt;
    using detail::note;

    CheckResult check_closed_form_vs_monte_carlo(const CheckOptions &o)
    {
        CheckResult r;
        SystemConfig c = detail::base_config(50, 10, 4, 2, o);
        c.n_drops = 20;
        c.n_realizations = scaled(10000, o.scale, 200);
        c.n_batches = 20;
        c.protocols = {Protocol::p1_closed_form, Protocol::p1_sic};
        c.pc_modes = {PcMode::uniform};
        const harness::ExperimentResult res = harness::run_experiment(c, o.workers);

        int total = 0, bad = 0;
        double worst_z = 0.0;
        for (const auto &rec : res.drops)
        {
            const harness::SeEntry *cf = nullptr, *mc = nullptr;
            for (const auto &e : rec.entries)
                (e.protocol == Protocol::p1_closed_form ? cf : mc) = &e;
            if (!cf || !mc)
            {
                ++bad;
                continue;
            }
            for (int k = 0; k < c.K; ++k)
            {
                const double diff = std::abs(cf->se[k] - mc->se[k]);
                const double z = diff / mc->std_error[k];
                worst_z = std::max(worst_z, z);
                ++total;
                if (!(diff <= 3.0 * mc->std_error[k]))
                    ++bad;
            }
        }
        r.pass = bad == 0 && total == c.n_drops * c.K;
        r.detail = std::to_string(bad) + " of " + std::to_string(total) + " users outside 3 standard errors, max z " +
                   fmt("%.2f", worst_z) + ", " + std::to_string(c.n_realizations) + " realizations per drop";
        return r;
    }

    CheckResult check_single_antenna_reduction(const CheckOptions &o)
    {
        CheckResult r;
        SystemConfig base = detail::base_config(20, 5, 1, 1, o);
        const int instances = 100;
        double worst = 0.0;
        RandomStream rng = RandomStream::derive(o.seed, 0, StreamPurpose::test, 2);
        for (int i = 0; i < instances; ++i)
        {
            SystemConfig c = base;
            c.M = 1 + static_cast<int>(rng.uniform() * 30);
            c.K = 1 + static_cast<int>(rng.uniform() * 8);
            c = c.resolved();
            const harness::DropSetup s = harness::setup_drop(c, i);
            RMatrix eta(c.M, c.K);
            const transmit::PowerAllocation uni = transmit::uniform_power(s.ls.beta, s.stats, c.L);
            for (int m = 0; m < c.M; ++m)
                for (int k = 0; k < c.K; ++k)
                    eta(m, k) = uni.eta(m, k) * (0.05 + rng.uniform());
            const double prelog = se::prelog_p1(c.tau_u, c.tau_c);
            const auto cf = se::closed_form_p1(s.ls.beta, s.book, s.stats, eta, 1, prelog, c.rho);
            const powerctl::MaxMinProblem prob = powerctl::make_problem(s.ls.beta, s.stats, c.rho, 1, 1);
            const std::vector<double> sinr = powerctl::sinr_p1(eta.cwiseSqrt(), prob);
            for (int k = 0; k < c.K; ++k)
                worst = std::max(worst, std::abs(cf.report.per_user_bits[k] - prelog * std::log2(1.0 + sinr[k])));
        }
        r.pass = worst <= 1e-10;
        r.detail = "max |difference| " + fmt("%.3e", worst) + " bits/s/Hz over " + std::to_string(instances) +
                   " instances";
        return r;
    }

    CheckResult check_mmse_equals_sic_statistical(const CheckOptions &o)
    {
        CheckResult r;
        SystemConfig c = detail::base_config(50, 10, 4, 2, o).resolved();
        const int drops = 20;
        double worst = 0.0;
        RandomStream rng = RandomStream::derive(o.seed, 0, StreamPurpose::test, 5);
        for (int d = 0; d < drops; ++d)
        {
            const harness::DropSetup s = harness::setup_drop(c, d);
            RMatrix eta = transmit::uniform_power(s.ls.beta, s.stats, c.L).eta;
            if (d % 2 == 1)
                for (Eigen::Index i = 0; i < eta.size(); ++i)
                    eta.data()[i] *= rng.uniform();
            const double prelog = se::prelog_p1(c.tau_u, c.tau_c);
            const auto cf = se::closed_form_p1(s.ls.beta, s.book, s.stats, eta, c.L, prelog, c.rho);
            const auto mm = se::se_linear_mmse_p1(cf.pieces, prelog, c.rho, MmseForm::standard);
            for (int k = 0; k < c.K; ++k)
                worst = std::max(worst, std::abs(cf.report.per_user_bits[k] - mm.per_user_bits[k]));
        }
        r.pass = worst <= 1e-9;
        r.detail = "max |difference| " + fmt("%.3e", worst) + " over " + std::to_string(drops) + " drops";
        return r;
    }

    CheckResult check_p2_single_stream_detectors(const CheckOptions &o)
    {
        CheckResult r;
        SystemConfig c = detail::base_config(50, 10, 4, 1, o).resolved();
        const int drops = 10;
        const int reals = scaled(200, o.scale, 20);
        const double prelog = se::prelog_p2(c.tau_u, c.tau_d, c.tau_c);
        double worst = 0.0;
        long count = 0;
        std::vector<double> sic, mmse;
        for (int d = 0; d < drops; ++d)
        {
            const harness::DropSetup s = harness::setup_drop(c, d);
            const RMatrix eta = transmit::uniform_power(s.ls.beta, s.stats, c.L).eta;
            detail::RealizationEngine eng(c, s, eta, d);
            for (int t = 0; t < reals; ++t)
            {
                eng.next();
                se::se_p2_sic_into(eng.d_hat(), eng.err_rows(), c.K, c.N, prelog, c.rho, sic);
                se::se_linear_mmse_p2_into(eng.d_hat(), eng.err_rows(), c.K, c.N, prelog, c.rho, MmseForm::standard,
                                           mmse);
                for (int k = 0; k < c.K; ++k)
                    worst = std::max(worst, std::abs(sic[k] - mmse[k]));
                count += c.K;
            }
        }
        r.pass = worst <= 1e-9;
        r.detail = "max |difference| " + fmt("%.3e", worst) + " over " + std::to_string(count) + " user realizations";
        return r;
    }

    CheckResult check_ordering(const CheckOptions &o)
    {
        CheckResult r;
        SystemConfig c = detail::base_config(50, 5, 4, 4, o).resolved();
        const int drops = 20;
        const int reals = scaled(1000, o.scale, 50);
        const double prelog = se::prelog_p2(c.tau_u, c.tau_d, c.tau_c);

        int mean_violations = 0, realization_violations = 0;
        std::vector<double> perfect_pool, p2_pool;
        std::vector<double> sic, mmse, perf;
        for (int d = 0; d < drops; ++d)
        {
            const harness::DropSetup s = harness::setup_drop(c, d);
            const auto prob = powerctl::make_problem(s.ls.beta, s.stats, c.rho, c.L, c.N, c.tol_t);
            const auto pc = powerctl::maxmin_bisection(prob);
            require(pc.status == powerctl::Status::feasible, "max-min power control failed");
            const RMatrix eta = powerctl::reuse_for_p2(pc.alloc).eta;
            detail::RealizationEngine eng(c, s, eta, d);
            std::vector<double> sum_sic(c.K, 0.0), sum_perf(c.K, 0.0);
            for (int t = 0; t < reals; ++t)
            {
                eng.next();
                se::se_p2_sic_into(eng.d_hat(), eng.err_rows(), c.K, c.N, prelog, c.rho, sic);
                se::se_linear_mmse_p2_into(eng.d_hat(), eng.err_rows(), c.K, c.N, prelog, c.rho, MmseForm::standard,
                                           mmse);
                se::se_perfect_csi_into(eng.d(), c.K, c.N, prelog, c.rho, perf);
                for (int k = 0; k < c.K; ++k)
                {
                    if (mmse[k] > sic[k] + 1e-10 * (1.0 + sic[k]))
                        ++realization_violations;
                    sum_sic[k] += sic[k];
                    sum_perf[k] += perf[k];
                }
            }
            for (int k = 0; k < c.K; ++k)
            {
                if (sum_perf[k] < sum_sic[k])
                    ++mean_violations;
                perfect_pool.push_back(sum_perf[k] / reals);
                p2_pool.push_back(sum_sic[k] / reals);
            }
        }
        const double med_perfect = harness::cdf_summary(perfect_pool).median();
        const double med_p2 = harness::cdf_summary(p2_pool).median();
        const double gap = (med_perfect - med_p2) / med_perfect;
        r.pass = mean_violations == 0 && realization_violations == 0 && med_p2 <= med_perfect && gap < 0.25;
        r.detail = "perfect<P2 mean pairs " + std::to_string(mean_violations) + ", MMSE>SIC realizations " +
                   std::to_string(realization_violations) + ", median perfect " + fmt("%.4f", med_perfect) +
                   " vs P2 " + fmt("%.4f", med_p2) + " (gap " + fmt("%.1f", 100.0 * gap) + "%)";
        note(o, r.detail);
        return r;
    }
}
