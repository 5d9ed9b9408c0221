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

#include <cmath>
#include <cstdio>
#include <ostream>

#include "json.hpp"

#include "cfmimo/harness.hpp"

#ifndef CFMIMO_GIT_DESCRIBE
#define CFMIMO_GIT_DESCRIBE "unknown"
#endif

namespace cfmimo::harness
{
    using nlohmann::ordered_json;

    std::string format_double(double v)
    {
        if (std::isnan(v))
            return "nan";
        if (std::isinf(v))
            return v > 0 ? "inf" : "-inf";
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return buf;
    }

    std::string git_describe()
    {
        return CFMIMO_GIT_DESCRIBE;
    }

    void write_csv(std::ostream &os, const ExperimentResult &result)
    {
        os << "drop_id,user_id,protocol,pc_mode,se_bits_per_hz\n";
        for (const DropRecord &rec : result.drops)
            for (const SeEntry &e : rec.entries)
                for (std::size_t k = 0; k < e.se.size(); ++k)
                    os << rec.drop << ',' << k << ',' << to_string(e.protocol) << ',' << to_string(e.pc_mode) << ','
                       << format_double(e.se[k]) << '\n';
    }

    namespace
    {
        // Doubles go through format_double so the JSON text is bit-stable.
        ordered_json number(double v)
        {
            return ordered_json::parse(std::isfinite(v) ? format_double(v) : "null");
        }

        ordered_json config_object(const SystemConfig &c)
        {
            ordered_json j;
            j["schema_version"] = config_schema_version;
            j["M"] = c.M;
            j["K"] = c.K;
            j["L"] = c.L;
            j["N"] = c.N;
            j["tau_u"] = c.tau_u;
            j["tau_d"] = c.tau_d;
            j["tau_c"] = c.tau_c;
            j["rho"] = number(c.rho);
            j["rho_u"] = number(c.rho_u);
            j["rho_d"] = number(c.rho_d);
            const PropagationParams &p = c.propagation;
            j["carrier_freq_ghz"] = number(p.carrier_freq_ghz);
            j["area_km"] = number(p.area_km);
            j["d0_m"] = number(p.d0_m);
            j["d1_m"] = number(p.d1_m);
            j["ap_height_m"] = number(p.ap_height_m);
            j["user_height_m"] = number(p.user_height_m);
            j["shadow_sigma_db"] = number(p.shadow_sigma_db);
            j["shadow_decorr_m"] = number(p.shadow_decorr_m);
            j["shadow_mix_delta"] = number(p.shadow_mix_delta);
            j["noise_figure_db"] = number(p.noise_figure_db);
            j["bandwidth_hz"] = number(p.bandwidth_hz);
            j["noise_temperature_k"] = number(p.noise_temperature_k);
            j["n_drops"] = c.n_drops;
            j["n_realizations"] = c.n_realizations;
            j["n_batches"] = c.n_batches;
            j["seed"] = c.seed;
            ordered_json prot = ordered_json::array();
            for (Protocol x : c.protocols)
                prot.push_back(to_string(x));
            j["protocols"] = prot;
            ordered_json pc = ordered_json::array();
            for (PcMode x : c.pc_modes)
                pc.push_back(to_string(x));
            j["pc_modes"] = pc;
            j["mmse_form"] = to_string(c.mmse_form);
            j["tol_t"] = number(c.tol_t);
            return j;
        }
    }

    std::string config_json(const SystemConfig &config)
    {
        return config_object(config).dump(2);
    }

    SystemConfig config_from_json(const std::string &text, const SystemConfig &base)
    {
        ordered_json j;
        try
        {
            j = ordered_json::parse(text);
        }
        catch (const std::exception &e)
        {
            throw InvalidArgument(std::string("config is not valid JSON: ") + e.what());
        }
        require(j.is_object(), "config must be a JSON object");
        require(j.contains("schema_version"), "config needs a schema_version key");
        require(j["schema_version"] == config_schema_version,
                "unsupported config schema_version (expected " + std::to_string(config_schema_version) + ")");

        SystemConfig c = base;
        PropagationParams &p = c.propagation;
        double powers[3] = {-1.0, -1.0, -1.0};
        for (auto it = j.begin(); it != j.end(); ++it)
        {
            const std::string &key = it.key();
            const ordered_json &v = it.value();
            try
            {
                if (key == "schema_version")
                    continue;
                else if (key == "M") c.M = v.get<int>();
                else if (key == "K") c.K = v.get<int>();
                else if (key == "L") c.L = v.get<int>();
                else if (key == "N") c.N = v.get<int>();
                else if (key == "tau_u") c.tau_u = v.get<int>();
                else if (key == "tau_d") c.tau_d = v.get<int>();
                else if (key == "tau_c") c.tau_c = v.get<int>();
                else if (key == "rho") c.rho = v.get<double>();
                else if (key == "rho_u") c.rho_u = v.get<double>();
                else if (key == "rho_d") c.rho_d = v.get<double>();
                else if (key == "data_power_w") powers[0] = v.get<double>();
                else if (key == "uplink_pilot_power_w") powers[1] = v.get<double>();
                else if (key == "downlink_pilot_power_w") powers[2] = v.get<double>();
                else if (key == "carrier_freq_ghz") p.carrier_freq_ghz = v.get<double>();
                else if (key == "area_km") p.area_km = v.get<double>();
                else if (key == "d0_m") p.d0_m = v.get<double>();
                else if (key == "d1_m") p.d1_m = v.get<double>();
                else if (key == "ap_height_m") p.ap_height_m = v.get<double>();
                else if (key == "user_height_m") p.user_height_m = v.get<double>();
                else if (key == "shadow_sigma_db") p.shadow_sigma_db = v.get<double>();
                else if (key == "shadow_decorr_m") p.shadow_decorr_m = v.get<double>();
                else if (key == "shadow_mix_delta") p.shadow_mix_delta = v.get<double>();
                else if (key == "noise_figure_db") p.noise_figure_db = v.get<double>();
                else if (key == "bandwidth_hz") p.bandwidth_hz = v.get<double>();
                else if (key == "noise_temperature_k") p.noise_temperature_k = v.get<double>();
                else if (key == "n_drops") c.n_drops = v.get<int>();
                else if (key == "n_realizations") c.n_realizations = v.get<int>();
                else if (key == "n_batches") c.n_batches = v.get<int>();
                else if (key == "seed") c.seed = v.get<std::uint64_t>();
                else if (key == "protocols")
                {
                    c.protocols.clear();
                    for (const auto &s : v)
                        c.protocols.push_back(parse_protocol(s.get<std::string>()));
                }
                else if (key == "pc_modes")
                {
                    c.pc_modes.clear();
                    for (const auto &s : v)
                        c.pc_modes.push_back(parse_pc_mode(s.get<std::string>()));
                }
                else if (key == "mmse_form") c.mmse_form = parse_mmse_form(v.get<std::string>());
                else if (key == "tol_t") c.tol_t = v.get<double>();
                else
                    throw InvalidArgument("unknown config key '" + key + "'");
            }
            catch (const nlohmann::json::exception &e)
            {
                throw InvalidArgument("config key '" + key + "' has the wrong type: " + e.what());
            }
        }
        double *targets[3] = {&c.rho, &c.rho_u, &c.rho_d};
        const char *names[3] = {"rho", "rho_u", "rho_d"};
        for (int i = 0; i < 3; ++i)
        {
            if (powers[i] < 0.0)
                continue;
            require(!j.contains(names[i]), std::string("give either ") + names[i] + " or its power, not both");
            *targets[i] = snr_from_power(powers[i], p);
        }
        return c;
    }

    std::string summary_json(const ExperimentResult &result)
    {
        ordered_json j;
        j["git_describe"] = git_describe();
        j["seed"] = result.config.seed;
        ordered_json pools = ordered_json::array();
        for (std::size_t i = 0; i < result.keys.size(); ++i)
        {
            const CdfSummary &pool = result.pools[i];
            ordered_json e;
            e["protocol"] = to_string(result.keys[i].protocol);
            e["pc_mode"] = to_string(result.keys[i].pc_mode);
            e["sample_count"] = pool.size();
            e["likely95"] = pool.size() ? number(pool.likely95()) : ordered_json();
            e["median"] = pool.size() ? number(pool.median()) : ordered_json();
            pools.push_back(e);
        }
        j["pools"] = pools;
        ordered_json skips = ordered_json::array();
        for (const SkipLog &s : result.skips)
            skips.push_back({{"drop", s.drop}, {"pc_mode", s.pc_mode}, {"reason", s.reason}});
        j["skipped"] = skips;
        j["config"] = config_object(result.config);
        return j.dump(2);
    }
}
