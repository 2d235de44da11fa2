// SPDX-License-Identifier: Apache-2.0
//
// sibcast - system-information broadcast simulator for massive MIMO links
// Copyright (C) 2026 The sibcast authors
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

// Small statistics helpers shared by the unit tests and the acceptance suite.

#ifndef SIBCAST_TESTS_STAT_UTIL_HPP
#define SIBCAST_TESTS_STAT_UTIL_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace stat_util
{
    struct MeanSe
    {
        double mean = 0.0;
        double se = 0.0;
    };

    inline MeanSe mean_se(const std::vector<double> &x)
    {
        MeanSe r;
        const double n = static_cast<double>(x.size());
        for (double v : x)
            r.mean += v;
        r.mean /= n;
        double ss = 0.0;
        for (double v : x)
            ss += (v - r.mean) * (v - r.mean);
        r.se = std::sqrt(ss / (n - 1.0) / n);
        return r;
    }

    // sup |F_n - F| against a continuous reference CDF
    inline double ks_one_sample(std::vector<double> x, const std::function<double(double)> &cdf)
    {
        std::sort(x.begin(), x.end());
        const double n = static_cast<double>(x.size());
        double d = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i)
        {
            const double F = cdf(x[i]);
            d = std::max({d, (i + 1) / n - F, F - i / n});
        }
        return d;
    }

    inline double ks_two_sample(std::vector<double> a, std::vector<double> b)
    {
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        const double n = static_cast<double>(a.size()), m = static_cast<double>(b.size());
        std::size_t i = 0, j = 0;
        double d = 0.0;
        while (i < a.size() && j < b.size())
        {
            const double v = std::min(a[i], b[j]);
            while (i < a.size() && a[i] <= v)
                ++i;
            while (j < b.size() && b[j] <= v)
                ++j;
            d = std::max(d, std::abs(i / n - j / m));
        }
        return d;
    }

    // Asymptotic Kolmogorov critical values: c(alpha) sqrt((n + m) / (n m)),
    // c(0.01) = 1.6276, c(0.05) = 1.3581.
    inline double ks_critical_two_sample(std::size_t n, std::size_t m, double c_alpha = 1.6276)
    {
        return c_alpha * std::sqrt(static_cast<double>(n + m) / (static_cast<double>(n) * static_cast<double>(m)));
    }

    inline double ks_critical_one_sample(std::size_t n, double c_alpha = 1.6276)
    {
        return c_alpha / std::sqrt(static_cast<double>(n));
    }
}

#endif
