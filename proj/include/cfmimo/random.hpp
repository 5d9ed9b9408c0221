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

#ifndef CFMIMO_RANDOM_HPP
#define CFMIMO_RANDOM_HPP

#include <cstdint>
#include <initializer_list>
#include <random>

#include "cfmimo/types.hpp"

namespace cfmimo
{
    /// Purpose tags for stream derivation. Values are part of the reproducibility contract.
    enum class StreamPurpose : std::uint64_t
    {
        geometry = 1,
        shadowing = 2,
        pilots = 3,
        channel = 4,
        uplink_noise = 5,
        downlink_noise = 6,
        symbols = 7,
        test = 99
    };

    std::uint64_t splitmix64(std::uint64_t x);

    /// Counter-based key derivation: hashes the path into the master seed one word at a time.
    std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

    /// Seeded Gaussian and uniform source. One instance per independent stream.
    class RandomStream
    {
    public:
        explicit RandomStream(std::uint64_t seed);

        /// Stream keyed by (master, drop, purpose, index); independent of scheduling.
        static RandomStream derive(std::uint64_t master, std::uint64_t drop, StreamPurpose purpose,
                                   std::uint64_t index = 0);

        double uniform();                 // U[0,1)
        double normal();                  // N(0,1)
        cdouble complex_normal(double variance = 1.0); // CN(0, variance)

        /// Fills `out` with i.i.d. CN(0, variance) entries, column-major order.
        void fill_complex_normal(CMatrix &out, double variance = 1.0);
        CMatrix complex_normal_matrix(Eigen::Index rows, Eigen::Index cols, double variance = 1.0);

        std::uint64_t seed() const { return seed_; }
        std::mt19937_64 &engine() { return engine_; }

    private:
        std::uint64_t seed_;
        std::mt19937_64 engine_;
        std::normal_distribution<double> normal_{0.0, 1.0};
        std::uniform_real_distribution<double> uniform_{0.0, 1.0};
    };
}

#endif
