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
#include <numeric>
#include <sstream>
#include <string>

#include "doctest.h"

#include "cfmimo/harness.hpp"

using namespace cfmimo;
using namespace cfmimo::harness;

namespace
{
    SystemConfig small_config()
    {
        SystemConfig c;
        c.M = 8;
        c.K = 3;
        c.L = 2;
        c.N = 2;
        c.n_drops = 3;
        c.n_realizations = 40;
        c.n_batches = 4;
        c.seed = 99;
        c.protocols = {Protocol::p1_closed_form, Protocol::p1_sic, Protocol::p2_sic};
        c.pc_modes = {PcMode::uniform, PcMode::maxmin};
        return c;
    }
}

TEST_CASE("95%-likely value of 1..100 is 5")
{
    std::vector<double> v(100);
    std::iota(v.begin(), v.end(), 1.0);
    std::reverse(v.begin(), v.end());
    const CdfSummary s = cdf_summary(v);
    CHECK(s.likely95() == 5.0);
    CHECK(s.median() == 50.0);
    CHECK(s.percentile(1.0) == 100.0);
    CHECK(s.percentile(0.01) == 1.0);
    CHECK(s.cdf(5.0) == doctest::Approx(0.05));
    CHECK(s.cdf(0.5) == 0.0);
}

TEST_CASE("percentile index is ceil(p n) - 1")
{
    const CdfSummary s(std::vector<double>{3.0, 1.0, 2.0});
    CHECK(s.likely95() == 1.0);
    CHECK(s.median() == 2.0);
    const CdfSummary t(std::vector<double>(20, 0.0));
    CHECK(t.likely95() == 0.0);
}

TEST_CASE("configuration survives a JSON round trip")
{
    SystemConfig c = small_config();
    c.tau_c = 250;
    c.mmse_form = MmseForm::printed;
    c.propagation.shadow_sigma_db = 6.5;
    c.rho = 123.456789012345678;
    const SystemConfig back = config_from_json(config_json(c));
    CHECK(config_json(back) == config_json(c));
    CHECK(back.rho == c.rho);
    CHECK(back.protocols == c.protocols);
}

TEST_CASE("config parser rejects unknown keys, bad versions and duplicate power settings")
{
    CHECK_THROWS_AS(config_from_json(R"({"schema_version": 1, "M": 3, "bogus": 1})"), InvalidArgument);
    CHECK_THROWS_AS(config_from_json(R"({"schema_version": 2})"), InvalidArgument);
    CHECK_THROWS_AS(config_from_json(R"({"M": 3})"), InvalidArgument);
    CHECK_THROWS_AS(config_from_json("{"), InvalidArgument);
    CHECK_THROWS_AS(config_from_json(R"({"schema_version": 1, "rho": 5, "data_power_w": 0.2})"), InvalidArgument);
    const SystemConfig c = config_from_json(R"({"schema_version": 1, "data_power_w": 0.2})");
    CHECK(c.rho == doctest::Approx(snr_from_power(0.2, c.propagation)));
}

TEST_CASE("drop evaluation is a pure function of config and drop index")
{
    const SystemConfig c = small_config().resolved();
    const DropRecord a = evaluate_drop(c, 1);
    const DropRecord b = evaluate_drop(c, 1);
    REQUIRE(a.entries.size() == 6);
    for (std::size_t i = 0; i < a.entries.size(); ++i)
        CHECK(a.entries[i].se == b.entries[i].se);
    CHECK(a.entries[0].pc_mode == PcMode::uniform);
    CHECK(a.entries[3].pc_mode == PcMode::maxmin);
    CHECK(a.entries[1].protocol == Protocol::p1_sic);
    const DropRecord other = evaluate_drop(c, 2);
    CHECK(other.entries[0].se != a.entries[0].se);
}

TEST_CASE("experiment output: CSV layout, pools and JSON summary")
{
    const SystemConfig c = small_config();
    const ExperimentResult r = run_experiment(c, 2);
    std::ostringstream os;
    write_csv(os, r);
    const std::string csv = os.str();
    CHECK(csv.rfind("drop_id,user_id,protocol,pc_mode,se_bits_per_hz\n", 0) == 0);
    const auto lines = std::count(csv.begin(), csv.end(), '\n');
    CHECK(lines == 1 + 3 * 3 * 6);
    CHECK(r.pool(Protocol::p2_sic, PcMode::maxmin).size() == 9);
    CHECK_THROWS(r.pool(Protocol::perfect_csi, PcMode::uniform));
    const std::string js = summary_json(r);
    CHECK(js.find("\"likely95\"") != std::string::npos);
    CHECK(js.find("\"git_describe\"") != std::string::npos);
}

TEST_CASE("max-min power control lifts the weakest closed-form user")
{
    SystemConfig c = small_config();
    c.protocols = {Protocol::p1_closed_form};
    const ExperimentResult r = run_experiment(c, 1);
    for (const DropRecord &d : r.drops)
    {
        const auto &u = d.entries[0].se;
        const auto &m = d.entries[1].se;
        CHECK(*std::min_element(m.begin(), m.end()) >= *std::min_element(u.begin(), u.end()) - 1e-9);
    }
}

TEST_CASE("float formatting round-trips")
{
    const double v = 0.1 + 0.2;
    CHECK(std::stod(format_double(v)) == v);
    CHECK(format_double(std::nan("")) == "nan");
}
