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

#include <algorithm>
#include <cmath>

#include "cfmimo/stats.hpp"

namespace cfmimo::stats
{
    BatchMean::BatchMean(std::size_t dim, int n_batches, int n_samples) : dim_(dim), n_batches_(n_batches)
    {
        require(n_batches >= 1 && n_samples >= n_batches, "need at least one sample per batch");
        per_batch_ = (n_samples + n_batches - 1) / n_batches;
        sums_.assign(static_cast<std::size_t>(n_batches), std::vector<double>(dim, 0.0));
        counts_.assign(static_cast<std::size_t>(n_batches), 0);
    }

    void BatchMean::add(const std::vector<double> &sample)
    {
        require(sample.size() == dim_, "sample dimension mismatch");
        const auto b = static_cast<std::size_t>(std::min(count_ / per_batch_, n_batches_ - 1));
        for (std::size_t i = 0; i < dim_; ++i)
            sums_[b][i] += sample[i];
        ++counts_[b];
        ++count_;
    }

    std::vector<double> BatchMean::mean() const
    {
        require(count_ > 0, "no samples accumulated");
        std::vector<double> out(dim_);
        std::vector<double> parts(sums_.size());
        for (std::size_t i = 0; i < dim_; ++i)
        {
            for (std::size_t b = 0; b < sums_.size(); ++b)
                parts[b] = sums_[b][i];
            out[i] = pairwise_sum(parts) / count_;
        }
        return out;
    }

    std::vector<double> BatchMean::standard_error() const
    {
        const std::vector<double> mu = mean();
        std::vector<double> out(dim_, 0.0);
        int used = 0;
        for (std::size_t b = 0; b < sums_.size(); ++b)
            if (counts_[b] > 0)
                ++used;
        if (used < 2)
            return out;
        for (std::size_t i = 0; i < dim_; ++i)
        {
            double ss = 0.0;
            for (std::size_t b = 0; b < sums_.size(); ++b)
            {
                if (counts_[b] == 0)
                    continue;
                const double d = sums_[b][i] / counts_[b] - mu[i];
                ss += d * d;
            }
            out[i] = std::sqrt(ss / (used - 1) / used);
        }
        return out;
    }

    double ks_distance_normal(std::vector<double> sample, double mean, double stddev)
    {
        require(!sample.empty() && stddev > 0.0, "KS distance needs samples and a positive stddev");
        std::sort(sample.begin(), sample.end());
        const double n = static_cast<double>(sample.size());
        double worst = 0.0;
        for (std::size_t i = 0; i < sample.size(); ++i)
        {
            const double f = 0.5 * std::erfc(-(sample[i] - mean) / (stddev * std::sqrt(2.0)));
            worst = std::max({worst, std::fabs(f - i / n), std::fabs((i + 1) / n - f)});
        }
        return worst;
    }
}
