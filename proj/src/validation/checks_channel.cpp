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

#include "cfmimo/stats.hpp"
#include "common.hpp"

namespace cfmimo::validation
{
    using detail::fmt;
    using detail::note;

    CheckResult check_bilinear_moment(const CheckOptions &o)
    {
        CheckResult r;
        const int instances = 10;
        const int trials = scaled(100000, o.scale, 1000);
        const double off_bound = 4.0 / std::sqrt(static_cast<double>(trials));
        RandomStream rng = RandomStream::derive(o.seed, 0, StreamPurpose::test, 3);
        double worst_diag = 0.0, worst_off = 0.0;
        for (int inst = 0; inst < instances; ++inst)
        {
            const int M = 1 + static_cast<int>(rng.uniform() * 8);
            const int N = 1 + static_cast<int>(rng.uniform() * 3);
            const CMatrix z = rng.complex_normal_matrix(N, N);
            const CMatrix cm = z * z.adjoint() + 0.1 * CMatrix::Identity(N, N);
            const CMatrix oracle = se::lemma4_oracle(cm, se::lemma4_column_covariances(M, N));

            CMatrix sum = CMatrix::Zero(N, N);
            RMatrix sum_sq = RMatrix::Zero(N, N);
            CMatrix x(M, N), y(M, N);
            for (int t = 0; t < trials; ++t)
            {
                rng.fill_complex_normal(x);
                rng.fill_complex_normal(y);
                const CMatrix b = y.adjoint() * x;
                const CMatrix q = b.adjoint() * cm * b;
                sum += q;
                sum_sq += q.cwiseAbs2();
            }
            const CMatrix mean = sum / static_cast<double>(trials);
            for (int i = 0; i < N; ++i)
                for (int j = 0; j < N; ++j)
                {
                    if (i == j)
                        worst_diag = std::max(worst_diag, std::abs(mean(i, i) - oracle(i, i)) / std::abs(oracle(i, i)));
                    else
                    {
                        // magnitude in units of the per-draw RMS, so sampling noise is about 1/sqrt(trials)
                        const double rms = std::sqrt(sum_sq(i, j) / trials);
                        worst_off = std::max(worst_off, std::abs(mean(i, j)) / rms);
                    }
                }
        }
        r.pass = worst_diag <= 0.02 && worst_off < off_bound;
        r.detail = "max diagonal rel. error " + fmt("%.4f", worst_diag) + ", max normalized off-diagonal " +
                   fmt("%.5f", worst_off) + " (bound " + fmt("%.5f", off_bound) + "), " + std::to_string(trials) +
                   " draws";
        return r;
    }

    CheckResult check_effective_channel_gaussianity(const CheckOptions &o)
    {
        CheckResult r;
        SystemConfig c = detail::base_config(100, 10, 4, 2, o).resolved();
        const int samples = scaled(10000, o.scale, 500);
        const harness::DropSetup s = harness::setup_drop(c, 0);
        const RMatrix eta = transmit::uniform_power(s.ls.beta, s.stats, c.L).eta;
        const se::Lemma3Params lp = se::lemma3_params(eta, s.ls.beta, s.stats, c.L);

        struct EntryClass
        {
            const char *name;
            int row, col;
            bool real_entry;
        };
        const int N = c.N;
        const EntryClass classes[] = {
            {"own diagonal", 0, 0, true},
            {"own off-diagonal", 0, 1, false},
            {"cross-user", 0, N, false},
        };

        std::vector<std::vector<cdouble>> draws(3);
        detail::RealizationEngine eng(c, s, eta, 0);
        for (int t = 0; t < samples; ++t)
        {
            eng.next();
            for (int i = 0; i < 3; ++i)
                draws[i].push_back(eng.d()(classes[i].row, classes[i].col));
        }

        bool ok = true;
        std::string detail;
        for (int i = 0; i < 3; ++i)
        {
            const EntryClass &ec = classes[i];
            const double m_model = lp.mean(ec.row, ec.col);
            const double v_model = lp.variance(ec.row, ec.col);
            cdouble mean = 0.0;
            for (cdouble v : draws[i])
                mean += v;
            mean /= static_cast<double>(samples);
            double var = 0.0;
            std::vector<double> re;
            for (cdouble v : draws[i])
            {
                const cdouble dv = v - mean;
                var += ec.real_entry ? dv.real() * dv.real() : std::norm(dv);
                re.push_back(v.real());
            }
            var /= static_cast<double>(samples - 1);
            const double sd_model = std::sqrt(v_model);
            const double mean_err = ec.real_entry ? std::abs(mean.real() - m_model) / std::max(std::abs(m_model), sd_model)
                                                  : std::abs(mean) / sd_model;
            const double var_err = std::abs(var / v_model - 1.0);
            const double re_sd = ec.real_entry ? sd_model : std::sqrt(v_model / 2.0);
            const double ks = stats::ks_distance_normal(re, ec.real_entry ? m_model : 0.0, re_sd);
            const bool pass = mean_err <= 0.05 && var_err <= 0.05 && ks < 0.02;
            ok = ok && pass;
            detail += std::string(i ? "; " : "") + ec.name + ": mean err " + fmt("%.3f", mean_err) + ", var err " +
                      fmt("%.3f", var_err) + ", KS " + fmt("%.4f", ks);
        }
        r.pass = ok;
        r.detail = detail;
        note(o, detail);
        return r;
    }
}
