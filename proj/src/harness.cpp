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

#include "cfmimo/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "cfmimo/estimation.hpp"
#include "cfmimo/se.hpp"
#include "cfmimo/stats.hpp"
#include "cfmimo/transmit.hpp"

namespace cfmimo::harness
{
    CdfSummary::CdfSummary(std::vector<double> samples) : sorted_(std::move(samples))
    {
        require(!sorted_.empty(), "CDF of an empty sample pool");
        std::sort(sorted_.begin(), sorted_.end());
    }

    double CdfSummary::percentile(double p) const
    {
        require(!sorted_.empty(), "percentile of an empty sample pool");
        require(p > 0.0 && p <= 1.0, "percentile level must lie in (0, 1]");
        const double n = static_cast<double>(sorted_.size());
        // ceil(p n) - 1, guarded against p n landing a rounding step above an integer
        auto idx = static_cast<std::size_t>(std::ceil(p * n - 1e-9 * n));
        idx = std::clamp<std::size_t>(idx, 1, sorted_.size());
        return sorted_[idx - 1];
    }

    double CdfSummary::cdf(double x) const
    {
        const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
        return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
    }

    CdfSummary cdf_summary(std::vector<double> samples)
    {
        return CdfSummary(std::move(samples));
    }

    const CdfSummary &ExperimentResult::pool(Protocol p, PcMode m) const
    {
        for (std::size_t i = 0; i < keys.size(); ++i)
            if (keys[i].protocol == p && keys[i].pc_mode == m)
                return pools[i];
        throw InvalidArgument("no pool for " + to_string(p) + "/" + to_string(m));
    }

    int default_workers()
    {
        if (const char *env = std::getenv("CFMIMO_WORKERS"))
        {
            const int w = std::atoi(env);
            if (w >= 1)
                return w;
        }
        return std::max(1u, std::thread::hardware_concurrency());
    }

    DropSetup setup_drop(const SystemConfig &c, int drop)
    {
        DropSetup s;
        const auto d = static_cast<std::uint64_t>(drop);
        RandomStream geo = RandomStream::derive(c.seed, d, StreamPurpose::geometry);
        s.ls = netgeom::draw_drop(c, geo);
        RandomStream pil = RandomStream::derive(c.seed, d, StreamPurpose::pilots);
        s.book = channel::build_pilot_book(c.tau_u, c.tau_d, c.K, c.N, channel::PilotPolicy::round_robin, pil);
        s.stats = estimation::uplink_statistics(s.ls.beta, s.book, c.rho_u);
        return s;
    }

    namespace
    {
        bool is_monte_carlo(Protocol p)
        {
            return p == Protocol::p1_sic || p == Protocol::p2_sic || p == Protocol::p2_mmse ||
                   p == Protocol::perfect_csi;
        }

        double prelog_of(Protocol p, const SystemConfig &c)
        {
            return uses_downlink_pilots(p) ? se::prelog_p2(c.tau_u, c.tau_d, c.tau_c) : se::prelog_p1(c.tau_u, c.tau_c);
        }

        struct Allocated
        {
            PcMode mode;
            transmit::PowerAllocation alloc;
            double t_star = std::numeric_limits<double>::quiet_NaN();
            bool ok = true;
            std::string reason;
        };

        Allocated allocate(const SystemConfig &c, const DropSetup &s, PcMode mode)
        {
            Allocated a;
            a.mode = mode;
            if (mode == PcMode::uniform)
            {
                a.alloc = transmit::uniform_power(s.ls.beta, s.stats, c.L);
                return a;
            }
            const powerctl::MaxMinProblem prob = powerctl::make_problem(s.ls.beta, s.stats, c.rho, c.L, c.N, c.tol_t);
            if (mode == PcMode::maxmin)
            {
                const powerctl::MaxMinResult r = powerctl::maxmin_bisection(prob);
                if (r.status != powerctl::Status::feasible)
                {
                    a.ok = false;
                    a.reason = "max-min solver failure";
                    return a;
                }
                a.alloc = r.alloc;
                a.t_star = r.t_star;
                return a;
            }
            const powerctl::ScaResult r = powerctl::maxmin_up_approx(prob, 1.0);
            if (r.status != powerctl::Status::feasible)
            {
                a.ok = false;
                a.reason = "successive approximation solver failure";
                return a;
            }
            a.alloc = r.alloc;
            a.t_star = std::exp2(r.objective.back()) - 1.0;
            return a;
        }

        // Mean per-user SE over realizations, with batch standard errors.
        struct McAccumulators
        {
            std::vector<Protocol> protocols;
            std::vector<stats::BatchMean> means;
            std::unique_ptr<se::StatisticalMoments> moments; // P1 bound by simulation
        };
    }

    DropRecord evaluate_drop(const SystemConfig &c, int drop)
    {
        DropRecord rec;
        rec.drop = drop;
        const DropSetup s = setup_drop(c, drop);
        const int M = c.M, K = c.K, L = c.L, N = c.N;
        const auto d = static_cast<std::uint64_t>(drop);

        std::vector<Allocated> allocs;
        for (PcMode mode : c.pc_modes)
        {
            try
            {
                allocs.push_back(allocate(c, s, mode));
            }
            catch (const std::exception &e)
            {
                Allocated a;
                a.mode = mode;
                a.ok = false;
                a.reason = e.what();
                allocs.push_back(std::move(a));
            }
            rec.maxmin_t.push_back(allocs.back().t_star);
        }

        // Closed forms
        std::vector<std::vector<SeEntry>> by_mode(allocs.size());
        const RMatrix gamma0 = s.stats.gamma_matrix(0);
        for (std::size_t a = 0; a < allocs.size(); ++a)
        {
            if (!allocs[a].ok)
                continue;
            const RMatrix &eta = allocs[a].alloc.eta;
            se::ClosedFormResult cf;
            bool have_cf = false;
            for (Protocol p : c.protocols)
            {
                if (p == Protocol::p1_closed_form || p == Protocol::p1_mmse)
                {
                    if (!have_cf)
                    {
                        cf = se::closed_form_p1(s.ls.beta, s.book, s.stats, eta, L, prelog_of(p, c), c.rho);
                        have_cf = true;
                    }
                    SeEntry e{p, allocs[a].mode, {}, std::vector<double>(K, 0.0)};
                    e.se = p == Protocol::p1_closed_form
                               ? cf.report.per_user_bits
                               : se::se_linear_mmse_p1(cf.pieces, prelog_of(p, c), c.rho, c.mmse_form).per_user_bits;
                    by_mode[a].push_back(std::move(e));
                }
                else if (p == Protocol::up_approx)
                {
                    SeEntry e{p, allocs[a].mode, {}, std::vector<double>(K, 0.0)};
                    e.se = se::se_up_approx(s.ls.beta, gamma0, eta.cwiseSqrt(), c.rho, prelog_of(p, c), L, N);
                    by_mode[a].push_back(std::move(e));
                }
            }
        }

        // Monte Carlo over small-scale realizations, shared across power-control modes
        std::vector<Protocol> mc;
        for (Protocol p : c.protocols)
            if (is_monte_carlo(p))
                mc.push_back(p);
        if (!mc.empty())
        {
            const bool need_dl = std::any_of(mc.begin(), mc.end(), [](Protocol p) {
                return p == Protocol::p2_sic || p == Protocol::p2_mmse;
            });
            const bool need_p1 = std::find(mc.begin(), mc.end(), Protocol::p1_sic) != mc.end();

            struct ModeState
            {
                McAccumulators acc;
                RMatrix sqrt_eta;
                estimation::EffectiveStats eff_stats;
                RVector err_rows;
                RandomStream dl_rng{0};
            };
            std::vector<ModeState> modes(allocs.size());
            for (std::size_t a = 0; a < allocs.size(); ++a)
            {
                if (!allocs[a].ok)
                    continue;
                ModeState &ms = modes[a];
                ms.sqrt_eta = allocs[a].alloc.eta.cwiseSqrt();
                for (Protocol p : mc)
                {
                    if (p == Protocol::p1_sic)
                        continue;
                    ms.acc.protocols.push_back(p);
                    ms.acc.means.emplace_back(static_cast<std::size_t>(K), c.n_batches, c.n_realizations);
                }
                if (need_p1)
                    ms.acc.moments = std::make_unique<se::StatisticalMoments>(K, N, c.n_batches, c.n_realizations);
                if (need_dl)
                {
                    ms.eff_stats = estimation::effective_channel_stats(allocs[a].alloc.eta, s.ls.beta, s.stats, L);
                    ms.err_rows = se::error_variance_rows(
                        estimation::error_variances(ms.eff_stats, c.tau_d, c.rho_d), K, N);
                    ms.dl_rng = RandomStream::derive(c.seed, d, StreamPurpose::downlink_noise, a);
                }
            }

            RandomStream ch_rng = RandomStream::derive(c.seed, d, StreamPurpose::channel);
            RandomStream ul_rng = RandomStream::derive(c.seed, d, StreamPurpose::uplink_noise);
            channel::ChannelSet chans;
            chans.M = M;
            chans.K = K;
            chans.L = L;
            chans.N = N;
            CMatrix ul_noise, y_proj, g_hat, scaled, dl_noise, y_dl, d_hat;
            EffectiveChannels eff;
            std::vector<double> buf;
            std::vector<double> sample(static_cast<std::size_t>(K));
            for (int r = 0; r < c.n_realizations; ++r)
            {
                channel::draw_channels_into(chans, s.ls.beta, ch_rng);
                channel::uplink_projections_into(chans, s.book, c.rho_u, ul_rng, ul_noise, y_proj);
                estimation::apply_uplink_estimator(y_proj, s.stats, L, g_hat);
                for (std::size_t a = 0; a < allocs.size(); ++a)
                {
                    if (!allocs[a].ok)
                        continue;
                    ModeState &ms = modes[a];
                    transmit::effective_channels_into(chans.g, g_hat, ms.sqrt_eta, L, N, scaled, eff);
                    if (ms.acc.moments)
                        ms.acc.moments->add(eff.d);
                    if (need_dl)
                    {
                        estimation::downlink_projections_into(eff, s.book, c.rho_d, ms.dl_rng, dl_noise, y_dl);
                        estimation::estimate_effective_into(y_dl, ms.eff_stats, c.tau_d, c.rho_d, d_hat);
                    }
                    for (std::size_t i = 0; i < ms.acc.protocols.size(); ++i)
                    {
                        const Protocol p = ms.acc.protocols[i];
                        const double pl = prelog_of(p, c);
                        if (p == Protocol::p2_sic)
                            se::se_p2_sic_into(d_hat, ms.err_rows, K, N, pl, c.rho, buf);
                        else if (p == Protocol::p2_mmse)
                            se::se_linear_mmse_p2_into(d_hat, ms.err_rows, K, N, pl, c.rho, c.mmse_form, buf);
                        else
                            se::se_perfect_csi_into(eff.d, K, N, pl, c.rho, buf);
                        ms.acc.means[i].add(buf);
                    }
                }
            }

            for (std::size_t a = 0; a < allocs.size(); ++a)
            {
                if (!allocs[a].ok)
                    continue;
                ModeState &ms = modes[a];
                for (Protocol p : mc)
                {
                    SeEntry e{p, allocs[a].mode, {}, {}};
                    if (p == Protocol::p1_sic)
                    {
                        e.se = ms.acc.moments->se(prelog_of(p, c), c.rho);
                        e.std_error = ms.acc.moments->standard_error(prelog_of(p, c), c.rho);
                    }
                    else
                    {
                        const auto it = std::find(ms.acc.protocols.begin(), ms.acc.protocols.end(), p);
                        const auto &bm = ms.acc.means[static_cast<std::size_t>(it - ms.acc.protocols.begin())];
                        e.se = bm.mean();
                        e.std_error = bm.standard_error();
                    }
                    by_mode[a].push_back(std::move(e));
                }
            }
        }

        // Fixed output order: pc mode as configured, then protocol as configured
        for (std::size_t a = 0; a < allocs.size(); ++a)
        {
            if (!allocs[a].ok)
            {
                rec.skipped = true;
                rec.status = to_string(allocs[a].mode) + ": " + allocs[a].reason;
                continue;
            }
            for (Protocol p : c.protocols)
                for (const SeEntry &e : by_mode[a])
                    if (e.protocol == p)
                        rec.entries.push_back(e);
        }
        return rec;
    }

    ExperimentResult run_experiment(const SystemConfig &config, int workers)
    {
        ExperimentResult res;
        res.config = config.resolved();
        res.config.validate();
        const SystemConfig &c = res.config;
        if (workers <= 0)
            workers = default_workers();
        workers = std::min(workers, std::max(1, c.n_drops));

        res.drops.resize(static_cast<std::size_t>(c.n_drops));
        std::atomic<int> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        auto work = [&]() {
            while (true)
            {
                const int i = next.fetch_add(1);
                if (i >= c.n_drops)
                    return;
                try
                {
                    res.drops[static_cast<std::size_t>(i)] = evaluate_drop(c, i);
                }
                catch (...)
                {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure)
                        failure = std::current_exception();
                    next.store(c.n_drops);
                }
            }
        };
        if (workers == 1)
            work();
        else
        {
            std::vector<std::thread> pool;
            for (int w = 0; w < workers; ++w)
                pool.emplace_back(work);
            for (auto &t : pool)
                t.join();
        }
        if (failure)
            std::rethrow_exception(failure);

        for (PcMode m : c.pc_modes)
            for (Protocol p : c.protocols)
                res.keys.push_back({p, m});
        std::vector<std::vector<double>> samples(res.keys.size());
        for (const DropRecord &rec : res.drops)
        {
            for (std::size_t a = 0; a < c.pc_modes.size(); ++a)
            {
                bool present = false;
                for (const SeEntry &e : rec.entries)
                    if (e.pc_mode == c.pc_modes[a])
                        present = true;
                if (!present)
                    res.skips.push_back({rec.drop, to_string(c.pc_modes[a]), rec.status});
            }
            for (const SeEntry &e : rec.entries)
                for (std::size_t i = 0; i < res.keys.size(); ++i)
                    if (res.keys[i].protocol == e.protocol && res.keys[i].pc_mode == e.pc_mode)
                        samples[i].insert(samples[i].end(), e.se.begin(), e.se.end());
        }
        for (auto &s : samples)
            res.pools.push_back(s.empty() ? CdfSummary() : CdfSummary(std::move(s)));
        return res;
    }

    Selection framework_select(const SystemConfig &config, int n_max, int workers)
    {
        require(n_max >= 1 && n_max <= config.N, "n_max must lie in [1, N]");
        Selection sel;
        bool first = true;
        for (int n = 1; n <= n_max; ++n)
        {
            SystemConfig c = config;
            c.N = n;
            c.tau_u = config.tau_u == 0 ? 0 : std::max(config.tau_u, c.K * n);
            c.tau_d = config.tau_d == 0 ? 0 : std::max(config.tau_d, c.K * n);
            c.pc_modes = {config.pc_modes.front()};
            const SystemConfig r = c.resolved();
            c.protocols = {Protocol::p1_closed_form};
            if (r.tau_u + r.tau_d < r.tau_c)
                c.protocols.push_back(Protocol::p2_sic);
            const ExperimentResult res = run_experiment(c, workers);
            for (Protocol p : c.protocols)
            {
                const CdfSummary &pool = res.pool(p, c.pc_modes.front());
                if (pool.size() == 0)
                    continue;
                const double v = pool.likely95();
                sel.candidates.push_back({p, n, v});
                // strict improvement only, so ties keep the smaller n and Protocol 1
                if (first || v > sel.likely95)
                {
                    sel.protocol = p;
                    sel.n = n;
                    sel.likely95 = v;
                    first = false;
                }
            }
        }
        require(!first, "no protocol could be evaluated");
        return sel;
    }
}
