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

#ifndef CFMIMO_CONFIG_HPP
#define CFMIMO_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace cfmimo
{
    /// Propagation and noise constants. Defaults follow the usual cell-free simulation setup.
    struct PropagationParams
    {
        double carrier_freq_ghz = 1.9;
        double area_km = 1.0;          // side of the square service area
        double d0_m = 10.0;            // below d0 the path loss is flat
        double d1_m = 50.0;            // 20 dB/decade between d0 and d1, 35 dB/decade beyond
        double ap_height_m = 15.0;
        double user_height_m = 1.65;
        double shadow_sigma_db = 8.0;
        double shadow_decorr_m = 100.0;
        double shadow_mix_delta = 0.5;
        double noise_figure_db = 9.0;
        double bandwidth_hz = 20e6;
        double noise_temperature_k = 290.0;

        double area_m() const { return 1000.0 * area_km; }

        /// Thermal noise power k_B * T0 * B * NF in watts.
        double noise_power_w() const;

        void validate() const;
    };

    /// Normalized SNR of a transmit power (W) against the receiver noise floor.
    double snr_from_power(double watts, const PropagationParams &params);

    enum class Protocol
    {
        p1_closed_form, // Protocol 1, closed form, MMSE-SIC
        p1_sic,         // Protocol 1, Monte Carlo of the statistical-CSI bound
        p1_mmse,        // Protocol 1, per-stream linear MMSE
        p2_sic,         // Protocol 2 (downlink pilots), MMSE-SIC
        p2_mmse,        // Protocol 2, per-stream linear MMSE
        perfect_csi,    // perfect CSI bound
        up_approx       // single-antenna approximation of the perfect CSI bound
    };

    enum class PcMode
    {
        uniform, // full per-AP power shared over users
        maxmin,  // max-min fairness for Protocol 1, reused for every other protocol
        sca      // successive approximation of the perfect CSI approximation (L = N = 1)
    };

    /// Linear MMSE covariance: textbook form, or the inverse placement exactly as printed.
    enum class MmseForm
    {
        standard,
        printed
    };

    std::string to_string(Protocol p);
    std::string to_string(PcMode p);
    std::string to_string(MmseForm f);
    Protocol parse_protocol(const std::string &s);
    PcMode parse_pc_mode(const std::string &s);
    MmseForm parse_mmse_form(const std::string &s);

    bool uses_downlink_pilots(Protocol p);

    struct SystemConfig
    {
        int M = 50;
        int K = 10;
        int L = 4;
        int N = 2;
        int tau_u = 0; // 0 selects K*N
        int tau_d = 0; // 0 selects K*N
        int tau_c = 300;

        // Normalized SNRs. Defaults: 200 mW data, 100 mW uplink pilot, 200 mW downlink pilot.
        double rho = 0.0;
        double rho_u = 0.0;
        double rho_d = 0.0;

        PropagationParams propagation;

        int n_drops = 200;
        int n_realizations = 2000;
        int n_batches = 20; // batches for Monte Carlo standard errors
        std::uint64_t seed = 1;

        std::vector<Protocol> protocols{Protocol::p1_closed_form};
        std::vector<PcMode> pc_modes{PcMode::uniform};
        MmseForm mmse_form = MmseForm::standard;
        double tol_t = 1e-4;

        /// Copy with automatic fields (pilot lengths, SNRs) filled in.
        SystemConfig resolved() const;

        /// Throws InvalidArgument on any violated invariant. Expects a resolved config.
        void validate() const;

        bool needs_downlink_pilots() const;
    };

    inline constexpr double default_data_power_w = 0.2;
    inline constexpr double default_uplink_pilot_power_w = 0.1;
    inline constexpr double default_downlink_pilot_power_w = 0.2;
}

#endif
