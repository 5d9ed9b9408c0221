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

#include "cfmimo/config.hpp"

#include <algorithm>
#include <cmath>

#include "cfmimo/types.hpp"

namespace cfmimo
{
    namespace
    {
        constexpr double boltzmann = 1.380649e-23;
    }

    double PropagationParams::noise_power_w() const
    {
        return boltzmann * noise_temperature_k * bandwidth_hz * std::pow(10.0, noise_figure_db / 10.0);
    }

    void PropagationParams::validate() const
    {
        require(carrier_freq_ghz > 0.0, "carrier_freq_ghz must be positive");
        require(area_km > 0.0, "area_km must be positive");
        require(d0_m > 0.0 && d0_m < d1_m, "path loss breakpoints need 0 < d0_m < d1_m");
        require(ap_height_m > 0.0 && user_height_m > 0.0, "antenna heights must be positive");
        require(shadow_sigma_db >= 0.0, "shadow_sigma_db must be non-negative");
        require(shadow_decorr_m > 0.0, "shadow_decorr_m must be positive");
        require(shadow_mix_delta >= 0.0 && shadow_mix_delta <= 1.0, "shadow_mix_delta must lie in [0,1]");
        require(bandwidth_hz > 0.0 && noise_temperature_k > 0.0, "noise parameters must be positive");
    }

    double snr_from_power(double watts, const PropagationParams &params)
    {
        require(watts >= 0.0, "transmit power must be non-negative");
        return watts / params.noise_power_w();
    }

    std::string to_string(Protocol p)
    {
        switch (p)
        {
        case Protocol::p1_closed_form: return "P1-ClosedForm";
        case Protocol::p1_sic: return "P1-SIC";
        case Protocol::p1_mmse: return "P1-MMSE";
        case Protocol::p2_sic: return "P2-SIC";
        case Protocol::p2_mmse: return "P2-MMSE";
        case Protocol::perfect_csi: return "PerfectCSI";
        case Protocol::up_approx: return "UpApprox";
        }
        return "?";
    }

    std::string to_string(PcMode p)
    {
        switch (p)
        {
        case PcMode::uniform: return "uniform";
        case PcMode::maxmin: return "maxmin";
        case PcMode::sca: return "sca";
        }
        return "?";
    }

    std::string to_string(MmseForm f)
    {
        return f == MmseForm::standard ? "standard" : "printed";
    }

    Protocol parse_protocol(const std::string &s)
    {
        for (Protocol p : {Protocol::p1_closed_form, Protocol::p1_sic, Protocol::p1_mmse, Protocol::p2_sic,
                           Protocol::p2_mmse, Protocol::perfect_csi, Protocol::up_approx})
            if (to_string(p) == s)
                return p;
        throw InvalidArgument("unknown protocol '" + s + "'");
    }

    PcMode parse_pc_mode(const std::string &s)
    {
        for (PcMode p : {PcMode::uniform, PcMode::maxmin, PcMode::sca})
            if (to_string(p) == s)
                return p;
        throw InvalidArgument("unknown pc_mode '" + s + "'");
    }

    MmseForm parse_mmse_form(const std::string &s)
    {
        if (s == "standard")
            return MmseForm::standard;
        if (s == "printed")
            return MmseForm::printed;
        throw InvalidArgument("unknown mmse_form '" + s + "'");
    }

    bool uses_downlink_pilots(Protocol p)
    {
        return p == Protocol::p2_sic || p == Protocol::p2_mmse || p == Protocol::perfect_csi ||
               p == Protocol::up_approx;
    }

    SystemConfig SystemConfig::resolved() const
    {
        SystemConfig c = *this;
        if (c.tau_u == 0)
            c.tau_u = c.K * c.N;
        if (c.tau_d == 0)
            c.tau_d = c.K * c.N;
        if (c.rho == 0.0)
            c.rho = snr_from_power(default_data_power_w, c.propagation);
        if (c.rho_u == 0.0)
            c.rho_u = snr_from_power(default_uplink_pilot_power_w, c.propagation);
        if (c.rho_d == 0.0)
            c.rho_d = snr_from_power(default_downlink_pilot_power_w, c.propagation);
        return c;
    }

    bool SystemConfig::needs_downlink_pilots() const
    {
        return std::any_of(protocols.begin(), protocols.end(), uses_downlink_pilots);
    }

    void SystemConfig::validate() const
    {
        propagation.validate();
        require(M >= 1 && K >= 1 && L >= 1 && N >= 1, "M, K, L, N must be positive");
        require(tau_u >= N, "tau_u must be at least N");
        require(tau_c > 0, "tau_c must be positive");
        require(tau_u < tau_c, "tau_u must be below tau_c");
        if (needs_downlink_pilots())
        {
            require(tau_d >= K * N, "tau_d must be at least K*N");
            require(tau_u + tau_d < tau_c, "tau_u + tau_d must be below tau_c");
        }
        require(rho > 0.0 && rho_u > 0.0 && rho_d > 0.0, "SNRs must be positive");
        require(n_drops >= 1, "n_drops must be positive");
        require(n_realizations >= 2, "n_realizations must be at least 2");
        require(n_batches >= 2 && n_batches <= n_realizations, "n_batches must lie in [2, n_realizations]");
        require(!protocols.empty(), "at least one protocol is required");
        require(!pc_modes.empty(), "at least one pc_mode is required");
        require(tol_t > 0.0, "tol_t must be positive");
        for (PcMode p : pc_modes)
        {
            if (p == PcMode::maxmin)
                require(tau_u >= K * N, "max-min power control requires mutually orthogonal uplink pilots");
            if (p == PcMode::sca)
                require(L == 1 && N == 1 && tau_u >= K, "sca power control requires L = N = 1 and orthogonal pilots");
        }
        for (Protocol p : protocols)
            if (p == Protocol::up_approx)
                require(L == 1 && N == 1 && tau_u >= K, "UpApprox requires L = N = 1 and orthogonal pilots");
    }
}
