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

#include "cfmimo/random.hpp"

#include <cmath>

namespace cfmimo
{
    std::uint64_t splitmix64(std::uint64_t x)
    {
        x += 0x9E3779B97F4A7C15ULL;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
        return x ^ (x >> 31);
    }

    std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path)
    {
        std::uint64_t h = splitmix64(master);
        for (std::uint64_t word : path)
            h = splitmix64(h ^ splitmix64(word + 0x632BE59BD9B4E019ULL));
        return h;
    }

    RandomStream::RandomStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    RandomStream RandomStream::derive(std::uint64_t master, std::uint64_t drop, StreamPurpose purpose,
                                      std::uint64_t index)
    {
        return RandomStream(derive_seed(master, {drop, static_cast<std::uint64_t>(purpose), index}));
    }

    double RandomStream::uniform() { return uniform_(engine_); }

    double RandomStream::normal() { return normal_(engine_); }

    cdouble RandomStream::complex_normal(double variance)
    {
        const double s = std::sqrt(0.5 * variance);
        const double re = normal_(engine_);
        const double im = normal_(engine_);
        return {s * re, s * im};
    }

    void RandomStream::fill_complex_normal(CMatrix &out, double variance)
    {
        const double s = std::sqrt(0.5 * variance);
        cdouble *p = out.data();
        const Eigen::Index n = out.size();
        for (Eigen::Index i = 0; i < n; ++i)
        {
            const double re = normal_(engine_);
            const double im = normal_(engine_);
            p[i] = cdouble(s * re, s * im);
        }
    }

    CMatrix RandomStream::complex_normal_matrix(Eigen::Index rows, Eigen::Index cols, double variance)
    {
        CMatrix out(rows, cols);
        fill_complex_normal(out, variance);
        return out;
    }
}
