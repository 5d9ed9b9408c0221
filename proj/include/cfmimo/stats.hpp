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

#ifndef CFMIMO_STATS_HPP
#define CFMIMO_STATS_HPP

#include <cstddef>
#include <vector>

#include "cfmimo/types.hpp"

namespace cfmimo::stats
{
    /// Sum in a fixed balanced binary tree. Result depends only on the element order.
    template <typename T>
    T pairwise_sum(const std::vector<T> &v, std::size_t lo, std::size_t hi)
    {
        if (hi - lo == 1)
            return v[lo];
        const std::size_t mid = lo + (hi - lo) / 2;
        T left = pairwise_sum(v, lo, mid);
        left += pairwise_sum(v, mid, hi);
        return left;
    }

    template <typename T>
    T pairwise_sum(const std::vector<T> &v)
    {
        require(!v.empty(), "pairwise_sum of an empty sequence");
        return pairwise_sum(v, 0, v.size());
    }

    /// Mean with a batch-means standard error, for vector-valued per-realization samples.
    class BatchMean
    {
    public:
        BatchMean(std::size_t dim, int n_batches, int n_samples);

        void add(const std::vector<double> &sample); // samples must arrive in order

        std::vector<double> mean() const;
        std::vector<double> standard_error() const;
        int count() const { return count_; }

    private:
        std::size_t dim_;
        int n_batches_, per_batch_;
        int count_ = 0;
        std::vector<std::vector<double>> sums_; // per batch
        std::vector<int> counts_;
    };

    /// Kolmogorov-Smirnov distance between a sample and a normal law.
    double ks_distance_normal(std::vector<double> sample, double mean, double stddev);
}

#endif
