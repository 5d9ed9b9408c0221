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

// Acceptance gate at full size. Usage: acceptance [id ...]

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <vector>

#include "cfmimo/validation.hpp"

int main(int argc, char **argv)
{
    using namespace cfmimo::validation;
    std::vector<int> ids;
    for (int i = 1; i < argc; ++i)
        ids.push_back(std::atoi(argv[i]));

    CheckOptions o;
    std::vector<CheckResult> results;
    int failed = 0;
    for (const CheckInfo &info : all_checks())
    {
        if (!ids.empty() && std::find(ids.begin(), ids.end(), info.id) == ids.end())
            continue;
        const CheckResult r = run_battery(o, {info.id}).front();
        std::cout << format_result(r) << std::endl;
        failed += r.pass ? 0 : 1;
        results.push_back(r);
    }
    std::cout << results.size() - failed << " of " << results.size() << " criteria passed\n";
    return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
