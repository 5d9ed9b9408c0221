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

#ifndef CFMIMO_HARNESS_HPP
#define CFMIMO_HARNESS_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "cfmimo/channel.hpp"
#include "cfmimo/config.hpp"
#include "cfmimo/netgeom.hpp"
#include "cfmimo/powerctl.hpp"
#include "cfmimo/types.hpp"

namespace cfmimo::harness
{
    /// Empirical CDF of a pooled per-user SE sample.
    class CdfSummary
    {
    public:
        CdfSummary() = default;
        explicit CdfSummary(std::vector<double> samples);

        const std::vector<double> &sorted() const { return sorted_; }
        std::size_t size() const { return sorted_.size(); }

        /// Value at index ceil(p n) - 1 of the ascending pool, p in (0, 1].
        double percentile(double p) const;
        double likely95() const { return percentile(0.05); }
        double median() const { return percentile(0.5); }
        /// Fraction of samples <= x.
        double cdf(double x) const;

    private:
        std::vector<double> sorted_;
    };

    CdfSummary cdf_summary(std::vector<double> samples);

    /// SE of one (protocol, power-control) pair on one drop.
    struct SeEntry
    {
        Protocol protocol = Protocol::p1_closed_form;
        PcMode pc_mode = PcMode::uniform;
        std::vector<double> se;     // K values
        std::vector<double> std_error; // Monte Carlo standard errors; zero for closed forms
    };

    struct DropRecord
    {
        int drop = 0;
        bool skipped = false;
        std::string status = "ok"; // reason when skipped
        std::vector<SeEntry> entries;
        std::vector<double> maxmin_t; // per pc mode, achieved min SINR (NaN when not max-min)
    };

    struct SkipLog
    {
        int drop = 0;
        std::string pc_mode;
        std::string reason;
    };

    struct PoolKey
    {
        Protocol protocol;
        PcMode pc_mode;
    };

    struct ExperimentResult
    {
        SystemConfig config; // resolved
        std::vector<DropRecord> drops;
        std::vector<PoolKey> keys; // config order: pc mode outer, protocol inner
        std::vector<CdfSummary> pools;
        std::vector<SkipLog> skips;

        const CdfSummary &pool(Protocol p, PcMode m) const;
    };

    /// Drop-level evaluation. Pure function of (config, drop index).
    DropRecord evaluate_drop(const SystemConfig &resolved_config, int drop);

    /// All drops, spread over worker threads; output independent of the worker count.
    ExperimentResult run_experiment(const SystemConfig &config, int workers = 0);

    /// Worker count: CFMIMO_WORKERS if set, else hardware concurrency.
    int default_workers();

    /// Shared per-drop inputs, exposed for the CLI `pc` command and for tests.
    struct DropSetup
    {
        netgeom::LargeScaleState ls;
        channel::PilotBook book;
        estimation::UplinkStatistics stats;
    };
    DropSetup setup_drop(const SystemConfig &resolved_config, int drop);

    struct Selection
    {
        Protocol protocol = Protocol::p1_closed_form;
        int n = 1;
        double likely95 = 0.0;
        // every evaluated candidate, n ascending then P1 before P2
        struct Candidate
        {
            Protocol protocol;
            int n;
            double likely95;
        };
        std::vector<Candidate> candidates;
    };

    /// Evaluates Protocol 1 and 2 with n = 1..n_max active user antennas on the same drops.
    Selection framework_select(const SystemConfig &config, int n_max, int workers = 0);

    // Export. Floats are written with 17 significant digits.
    void write_csv(std::ostream &os, const ExperimentResult &result);
    std::string summary_json(const ExperimentResult &result);
    std::string config_json(const SystemConfig &config);
    SystemConfig config_from_json(const std::string &text, const SystemConfig &base = {});
    std::string format_double(double v);
    std::string git_describe();

    inline constexpr int config_schema_version = 1;
}

#endif
