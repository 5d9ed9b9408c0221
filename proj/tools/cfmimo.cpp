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

// Command-line front end: run, sweep, pc, select, validate, config.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "cfmimo/harness.hpp"
#include "cfmimo/powerctl.hpp"
#include "cfmimo/validation.hpp"

namespace
{
    using namespace cfmimo;

    // Flags that override values from the config file. Unset flags leave the file (or default) value.
    struct Overrides
    {
        std::string config_path;
        std::optional<int> M, K, L, N, tau_u, tau_d, tau_c, drops, realizations, batches;
        std::optional<double> rho, rho_u, rho_d, tol_t;
        std::optional<std::uint64_t> seed;
        std::vector<std::string> protocols, pc_modes;
        std::string mmse_form;
        int workers = 0;

        void attach(CLI::App *app)
        {
            app->add_option("-c,--config", config_path, "JSON config file (flat keys, schema_version 1)");
            app->add_option("--M", M, "number of APs");
            app->add_option("--K", K, "number of users");
            app->add_option("--L", L, "antennas per AP");
            app->add_option("--N", N, "antennas per user");
            app->add_option("--tau-u", tau_u, "uplink pilot length (0: K*N)");
            app->add_option("--tau-d", tau_d, "downlink pilot length (0: K*N)");
            app->add_option("--tau-c", tau_c, "coherence interval in samples");
            app->add_option("--rho", rho, "normalized downlink data SNR (linear)");
            app->add_option("--rho-u", rho_u, "normalized uplink pilot SNR (linear)");
            app->add_option("--rho-d", rho_d, "normalized downlink pilot SNR (linear)");
            app->add_option("--drops", drops, "number of large-scale drops");
            app->add_option("--realizations", realizations, "small-scale realizations per drop");
            app->add_option("--batches", batches, "batches for Monte Carlo standard errors");
            app->add_option("--seed", seed, "master seed");
            app->add_option("--protocols", protocols,
                            "P1-ClosedForm P1-SIC P1-MMSE P2-SIC P2-MMSE PerfectCSI UpApprox");
            app->add_option("--pc", pc_modes, "uniform maxmin sca");
            app->add_option("--mmse-form", mmse_form, "standard or printed");
            app->add_option("--tol-t", tol_t, "relative bisection tolerance");
            app->add_option("-j,--workers", workers, "worker threads (0: CFMIMO_WORKERS or all cores)");
        }

        SystemConfig build() const
        {
            SystemConfig c;
            if (!config_path.empty())
            {
                std::ifstream in(config_path);
                if (!in)
                    throw InvalidArgument("cannot open config file " + config_path);
                std::stringstream ss;
                ss << in.rdbuf();
                c = harness::config_from_json(ss.str());
            }
            auto set = [](auto &dst, const auto &src) {
                if (src)
                    dst = *src;
            };
            set(c.M, M);
            set(c.K, K);
            set(c.L, L);
            set(c.N, N);
            set(c.tau_u, tau_u);
            set(c.tau_d, tau_d);
            set(c.tau_c, tau_c);
            set(c.rho, rho);
            set(c.rho_u, rho_u);
            set(c.rho_d, rho_d);
            set(c.n_drops, drops);
            set(c.n_realizations, realizations);
            set(c.n_batches, batches);
            set(c.seed, seed);
            set(c.tol_t, tol_t);
            if (!protocols.empty())
            {
                c.protocols.clear();
                for (const auto &p : protocols)
                    c.protocols.push_back(parse_protocol(p));
            }
            if (!pc_modes.empty())
            {
                c.pc_modes.clear();
                for (const auto &p : pc_modes)
                    c.pc_modes.push_back(parse_pc_mode(p));
            }
            if (!mmse_form.empty())
                c.mmse_form = parse_mmse_form(mmse_form);
            return c;
        }
    };

    void write_file(const std::string &path, const std::string &text)
    {
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw InvalidArgument("cannot write " + path);
        out << text;
    }

    void print_pools(std::ostream &os, const harness::ExperimentResult &res, const std::string &prefix)
    {
        for (std::size_t i = 0; i < res.keys.size(); ++i)
        {
            const auto &pool = res.pools[i];
            os << prefix << to_string(res.keys[i].protocol) << " / " << to_string(res.keys[i].pc_mode) << ": ";
            if (pool.size() == 0)
                os << "no samples\n";
            else
                os << "95%-likely " << harness::format_double(pool.likely95()) << ", median "
                   << harness::format_double(pool.median()) << ", n=" << pool.size() << '\n';
        }
        for (const auto &s : res.skips)
            os << prefix << "skipped drop " << s.drop << " (" << s.pc_mode << "): " << s.reason << '\n';
    }

    int cmd_run(const Overrides &ov, const std::string &csv_path, const std::string &json_path)
    {
        const auto res = harness::run_experiment(ov.build(), ov.workers);
        if (!csv_path.empty())
        {
            std::ostringstream os;
            harness::write_csv(os, res);
            write_file(csv_path, os.str());
        }
        const std::string summary = harness::summary_json(res);
        if (!json_path.empty())
            write_file(json_path, summary + "\n");
        if (csv_path.empty() && json_path.empty())
            std::cout << summary << '\n';
        else
            print_pools(std::cout, res, "");
        return 0;
    }

    int cmd_sweep(const Overrides &ov, const std::string &param, const std::vector<double> &values,
                  const std::string &out_dir)
    {
        const SystemConfig base = ov.build();
        if (!out_dir.empty())
        {
            std::error_code ec;
            std::filesystem::create_directories(out_dir, ec);
            if (ec)
                throw InvalidArgument("cannot create " + out_dir + ": " + ec.message());
        }
        for (double v : values)
        {
            SystemConfig c = base;
            const int iv = static_cast<int>(std::lround(v));
            if (param == "M") c.M = iv;
            else if (param == "K") c.K = iv;
            else if (param == "L") c.L = iv;
            else if (param == "N") c.N = iv;
            else if (param == "tau_c") c.tau_c = iv;
            else if (param == "rho") c.rho = v;
            else if (param == "rho_u") c.rho_u = v;
            else if (param == "rho_d") c.rho_d = v;
            else if (param == "area_km") c.propagation.area_km = v;
            else
                throw InvalidArgument("cannot sweep '" + param + "'");
            const auto res = harness::run_experiment(c, ov.workers);
            const std::string tag = param + "=" + harness::format_double(v);
            if (!out_dir.empty())
            {
                std::ostringstream os;
                harness::write_csv(os, res);
                write_file(out_dir + "/sweep_" + tag + ".csv", os.str());
                write_file(out_dir + "/sweep_" + tag + ".json", harness::summary_json(res) + "\n");
            }
            print_pools(std::cout, res, tag + "  ");
        }
        return 0;
    }

    int cmd_pc(const Overrides &ov, int drop, const std::string &mode)
    {
        const SystemConfig c = ov.build().resolved();
        c.validate();
        const harness::DropSetup s = harness::setup_drop(c, drop);
        const powerctl::MaxMinProblem p = powerctl::make_problem(s.ls.beta, s.stats, c.rho, c.L, c.N, c.tol_t);
        RMatrix eta;
        std::vector<double> sinr;
        if (mode == "sca")
        {
            const auto r = powerctl::maxmin_up_approx(p);
            std::cout << "status " << (r.status == powerctl::Status::feasible ? "ok" : "solver-failure")
                      << ", iterations " << r.iterations << (r.converged ? " (converged)" : "") << '\n';
            for (std::size_t i = 0; i < r.objective.size(); ++i)
                std::cout << "  iterate " << i << " min SE " << harness::format_double(r.objective[i]) << '\n';
            eta = r.alloc.eta;
            sinr = powerctl::sinr_up_approx(r.varsigma, p);
        }
        else
        {
            const auto r = powerctl::maxmin_bisection(p);
            std::cout << "status " << (r.status == powerctl::Status::feasible ? "ok" : "solver-failure") << ", t* "
                      << harness::format_double(r.t_star) << ", bracket [" << harness::format_double(r.t_lo) << ", "
                      << harness::format_double(r.t_hi) << "], " << r.iterations << " bisection steps, "
                      << r.feasibility_calls << " feasibility calls\n";
            eta = r.alloc.eta;
            sinr = powerctl::sinr_p1(eta.cwiseSqrt(), p);
        }
        for (int k = 0; k < c.K; ++k)
            std::cout << "  user " << k << " SINR " << harness::format_double(sinr[k]) << '\n';
        std::cout << "eta (rows = APs)\n";
        for (int m = 0; m < c.M; ++m)
        {
            std::cout << " ";
            for (int k = 0; k < c.K; ++k)
                std::cout << ' ' << harness::format_double(eta(m, k));
            std::cout << '\n';
        }
        return 0;
    }

    int cmd_select(const Overrides &ov, int n_max)
    {
        const SystemConfig c = ov.build();
        const auto sel = harness::framework_select(c, n_max > 0 ? n_max : c.N, ov.workers);
        for (const auto &cand : sel.candidates)
            std::cout << to_string(cand.protocol) << " n=" << cand.n << " 95%-likely "
                      << harness::format_double(cand.likely95) << '\n';
        std::cout << "selected " << to_string(sel.protocol) << " with n=" << sel.n << '\n';
        return 0;
    }

    int cmd_validate(double scale, const std::vector<int> &only, std::uint64_t seed, int workers)
    {
        validation::CheckOptions o;
        o.scale = scale;
        o.workers = workers;
        o.seed = seed;
        o.log = &std::cout;
        const auto results = validation::run_battery(o, only);
        int failed = 0;
        for (const auto &r : results)
            failed += r.pass ? 0 : 1;
        std::cout << results.size() - failed << " passed, " << failed << " failed\n";
        return failed == 0 ? 0 : 1;
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"cfmimo: cell-free massive MIMO downlink simulator"};
    app.require_subcommand(1);

    Overrides ov;
    auto *run = app.add_subcommand("run", "run one experiment and write CSV + JSON summary");
    ov.attach(run);
    std::string csv_path, json_path;
    run->add_option("--csv", csv_path, "per-(drop, user) CSV output");
    run->add_option("--json", json_path, "JSON summary output");

    Overrides ov_sweep;
    auto *sweep = app.add_subcommand("sweep", "grid over one parameter");
    ov_sweep.attach(sweep);
    std::string param, out_dir;
    std::vector<double> values;
    sweep->add_option("--param", param, "M, K, L, N, tau_c, rho, rho_u, rho_d or area_km")->required();
    sweep->add_option("--values", values, "values to visit")->required();
    sweep->add_option("--out-dir", out_dir, "directory for per-value CSV and JSON");

    Overrides ov_pc;
    auto *pc = app.add_subcommand("pc", "solve max-min power control for one drop");
    ov_pc.attach(pc);
    int drop = 0;
    std::string mode = "maxmin";
    pc->add_option("--drop", drop, "drop index (regenerated from seed and config)");
    pc->add_option("--mode", mode, "maxmin or sca")->check(CLI::IsMember({"maxmin", "sca"}));

    Overrides ov_sel;
    auto *sel = app.add_subcommand("select", "pick protocol and active user antennas");
    ov_sel.attach(sel);
    int n_max = 0;
    sel->add_option("--n-max", n_max, "largest number of active antennas (default N)");

    auto *val = app.add_subcommand("validate", "run the oracle battery");
    double scale = 1.0;
    std::vector<int> only;
    std::uint64_t vseed = validation::CheckOptions{}.seed;
    int vworkers = 0;
    val->add_option("--scale", scale, "sample-size multiplier (1 = acceptance size)");
    val->add_option("--only", only, "check ids to run");
    val->add_option("--seed", vseed, "master seed");
    val->add_option("-j,--workers", vworkers, "worker threads");

    Overrides ov_cfg;
    auto *cfg = app.add_subcommand("config", "print the resolved config as JSON");
    ov_cfg.attach(cfg);

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (*run)
            return cmd_run(ov, csv_path, json_path);
        if (*sweep)
            return cmd_sweep(ov_sweep, param, values, out_dir);
        if (*pc)
            return cmd_pc(ov_pc, drop, mode);
        if (*sel)
            return cmd_select(ov_sel, n_max);
        if (*val)
            return cmd_validate(scale, only, vseed, vworkers);
        if (*cfg)
        {
            const SystemConfig c = ov_cfg.build().resolved();
            c.validate();
            std::cout << harness::config_json(c) << '\n';
            return 0;
        }
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
