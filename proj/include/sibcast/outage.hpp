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

#ifndef SIBCAST_OUTAGE_HPP
#define SIBCAST_OUTAGE_HPP

#include "codes.hpp"
#include "rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace sibcast
{
    // (1/L) sum_l rate log2(1 + SNR_l)
    inline double supported_rate(std::span<const double> snrs, double code_rate)
    {
        if (snrs.empty())
            throw std::invalid_argument("supported_rate: empty SNR list");
        double acc = 0.0;
        for (double s : snrs)
        {
            if (!(s >= 0.0))
                throw std::invalid_argument("supported_rate: SNR must be non-negative");
            acc += std::log2(1.0 + s);
        }
        return code_rate * acc / static_cast<double>(snrs.size());
    }

    inline double supported_rate(std::span<const double> snrs, const OstbcCode &code)
    {
        return supported_rate(snrs, code.rate());
    }

    // Minimum sample count for a resolvable epsilon-quantile.
    inline std::size_t min_outage_samples(double eps)
    {
        return static_cast<std::size_t>(std::ceil(100.0 / eps - 1e-9));
    }

    namespace detail
    {
        inline std::size_t quantile_index(std::size_t N, double eps)
        {
            const auto k = static_cast<std::size_t>(std::ceil(eps * static_cast<double>(N) - 1e-9));
            return std::clamp<std::size_t>(k, 1, N) - 1;
        }

        // Order statistic at 1-based rank ceil(eps N); reorders the buffer.
        inline double quantile_inplace(std::vector<double> &v, double eps)
        {
            const auto idx = quantile_index(v.size(), eps);
            std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(idx), v.end());
            return v[idx];
        }
    }

    // Empirical epsilon-quantile of the supported rate, lower order-statistic convention.
    inline double outage_capacity(std::span<const double> samples, double eps, bool enforce_resolution = true)
    {
        if (!(eps > 0.0 && eps < 1.0))
            throw std::invalid_argument("outage_capacity: eps must lie in (0, 1)");
        if (samples.empty())
            throw std::invalid_argument("outage_capacity: no samples");
        if (enforce_resolution && samples.size() < min_outage_samples(eps))
            throw std::invalid_argument("outage_capacity: need at least 100/eps samples");
        std::vector<double> v(samples.begin(), samples.end());
        return detail::quantile_inplace(v, eps);
    }

    // Pre-log penalty for the pilot phase.
    inline double outage_rate(double C_eps, int tau_c, int tau_p)
    {
        if (tau_p < 0 || tau_p >= tau_c)
            throw std::invalid_argument("outage_rate: need 0 <= tau_p < tau_c");
        return (static_cast<double>(tau_c - tau_p) / tau_c) * C_eps;
    }

    namespace detail
    {
        // One bootstrap replicate of the order statistic of 1-based rank k from
        // sorted data. Rather than drawing N indices, the multinomial resample
        // counts are generated one sorted position at a time as conditional
        // binomials, stopping once k draws have landed. Same law as naive
        // resampling at O(k) cost instead of O(N).
        inline double bootstrap_order_statistic(std::span<const double> sorted, std::size_t k, RandomStream &rng)
        {
            const std::size_t N = sorted.size();
            const bool from_top = k > N / 2;
            const std::size_t need = from_top ? N - k + 1 : k;
            long long remaining = static_cast<long long>(N);
            std::size_t landed = 0;
            for (std::size_t j = 0; j < N; ++j)
            {
                const double p = 1.0 / static_cast<double>(N - j);
                long long c = remaining;
                if (p < 1.0)
                    c = std::binomial_distribution<long long>(remaining, p)(rng.engine());
                remaining -= c;
                landed += static_cast<std::size_t>(c);
                if (landed >= need)
                    return from_top ? sorted[N - 1 - j] : sorted[j];
            }
            return from_top ? sorted.front() : sorted.back();
        }

        inline double percentile_halfwidth(std::vector<double> &est)
        {
            std::sort(est.begin(), est.end());
            auto at = [&](double q)
            {
                const double pos = q * static_cast<double>(est.size() - 1);
                const auto lo = static_cast<std::size_t>(std::floor(pos));
                const auto hi = std::min<std::size_t>(lo + 1, est.size() - 1);
                return est[lo] + (pos - static_cast<double>(lo)) * (est[hi] - est[lo]);
            };
            return 0.5 * (at(0.975) - at(0.025));
        }
    }

    // Half-width of the 95% percentile-bootstrap interval of the epsilon-quantile,
    // for data that is already sorted ascending.
    inline double bootstrap_halfwidth_sorted(std::span<const double> sorted, double eps, std::uint64_t seed,
                                             int resamples = 200)
    {
        if (sorted.empty() || resamples < 2)
            return std::numeric_limits<double>::quiet_NaN();
        RandomStream rng(seed);
        const std::size_t k = detail::quantile_index(sorted.size(), eps) + 1;
        std::vector<double> est(resamples);
        for (auto &x : est)
            x = detail::bootstrap_order_statistic(sorted, k, rng);
        return detail::percentile_halfwidth(est);
    }

    inline double bootstrap_halfwidth(std::span<const double> samples, double eps, std::uint64_t seed,
                                      int resamples = 200)
    {
        std::vector<double> v(samples.begin(), samples.end());
        std::sort(v.begin(), v.end());
        return bootstrap_halfwidth_sorted(v, eps, seed, resamples);
    }

    // Reference implementation by explicit resampling; O(N) per replicate.
    inline double bootstrap_halfwidth_naive(std::span<const double> samples, double eps, std::uint64_t seed,
                                            int resamples = 200)
    {
        if (samples.empty() || resamples < 2)
            return std::numeric_limits<double>::quiet_NaN();
        RandomStream rng(seed);
        const std::size_t N = samples.size();
        std::vector<double> est(resamples), buf(N);
        for (auto &x : est)
        {
            for (std::size_t i = 0; i < N; ++i)
                buf[i] = samples[rng.index_below(N)];
            x = detail::quantile_inplace(buf, eps);
        }
        return detail::percentile_halfwidth(est);
    }

    struct OutageResult
    {
        double eps = 0.01;
        double C_eps = 0.0;
        double R_eps = 0.0;
        double prelog = 1.0;
        std::size_t n_samples = 0;
        double halfwidth = 0.0; // on R_eps
    };

    // Outage statistics of a rate sample with an arbitrary pre-log factor in (0, 1].
    inline OutageResult evaluate_outage_prelog(std::span<const double> rates, double eps, double prelog,
                                               std::uint64_t bootstrap_seed, int resamples = 200)
    {
        if (!(prelog > 0.0 && prelog <= 1.0))
            throw std::invalid_argument("evaluate_outage: pre-log factor must lie in (0, 1]");
        if (!(eps > 0.0 && eps < 1.0))
            throw std::invalid_argument("evaluate_outage: eps must lie in (0, 1)");
        if (rates.size() < min_outage_samples(eps))
            throw std::invalid_argument("evaluate_outage: need at least 100/eps samples");
        std::vector<double> sorted(rates.begin(), rates.end());
        std::sort(sorted.begin(), sorted.end());
        OutageResult r;
        r.eps = eps;
        r.C_eps = sorted[detail::quantile_index(sorted.size(), eps)];
        r.prelog = prelog;
        r.R_eps = prelog * r.C_eps;
        r.n_samples = sorted.size();
        r.halfwidth = prelog * bootstrap_halfwidth_sorted(sorted, eps, bootstrap_seed, resamples);
        return r;
    }

    inline OutageResult evaluate_outage(std::span<const double> rates, double eps, int tau_c, int tau_p,
                                        std::uint64_t bootstrap_seed, int resamples = 200)
    {
        if (tau_p < 0 || tau_p >= tau_c)
            throw std::invalid_argument("evaluate_outage: need 0 <= tau_p < tau_c");
        return evaluate_outage_prelog(rates, eps, static_cast<double>(tau_c - tau_p) / tau_c, bootstrap_seed,
                                      resamples);
    }

    // Data uses left when L intervals' worth of pilots share one coherence interval.
    struct SplitBudget
    {
        int data_uses = 0;
        double prelog = 0.0;
    };

    inline SplitBudget split_budget(int tau_c, int L, int n_t)
    {
        if (L < 1 || n_t < 1)
            throw std::invalid_argument("split_budget: L and n_t must be positive");
        if (static_cast<long long>(L) * n_t >= tau_c)
            throw std::invalid_argument("split_budget: pilots fill the coherence interval");
        const int d = tau_c - L * n_t;
        return {d, static_cast<double>(d) / tau_c};
    }

    inline double split_total_bits(int tau_c, int L, int n_t, double C_eps_L)
    {
        return split_budget(tau_c, L, n_t).data_uses * C_eps_L;
    }

    // Smallest L (1-based) with L tau_c R_eps(L) >= N_b. rates[L-1] = R_eps(L).
    // Returns 0 when N_b is out of reach within the table.
    inline int min_intervals_for_message(double N_b, std::span<const double> rates, int tau_c)
    {
        if (N_b <= 0.0)
            return 1;
        for (std::size_t i = 0; i < rates.size(); ++i)
            if (static_cast<double>(i + 1) * tau_c * rates[i] >= N_b)
                return static_cast<int>(i + 1);
        return 0;
    }

    // Index of the code needing the fewest intervals; ties go to the larger code
    // (later entries are assumed larger). Returns -1 if no code reaches N_b.
    inline int preferred_code(std::span<const int> L_min)
    {
        int best = -1;
        for (std::size_t i = 0; i < L_min.size(); ++i)
        {
            if (L_min[i] <= 0)
                continue;
            if (best < 0 || L_min[i] <= L_min[best])
                best = static_cast<int>(i);
        }
        return best;
    }
}

#endif
