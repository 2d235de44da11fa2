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

#include <catch_amalgamated.hpp>
#include <sibcast/outage.hpp>

#include <numeric>

using namespace sibcast;

TEST_CASE("Supported rate")
{
    const std::vector<double> one{1.0}, two{0.0, 3.0}, zeros{0.0, 0.0, 0.0};
    CHECK(supported_rate(one, make_code(CodeId::C2)) == Catch::Approx(1.0));
    CHECK(supported_rate(two, 1.0) == Catch::Approx(1.0));
    CHECK(supported_rate(zeros, 0.5) == 0.0);
    CHECK(supported_rate(one, make_code(CodeId::C8)) == Catch::Approx(0.5));
    CHECK_THROWS_AS(supported_rate(std::vector<double>{}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(supported_rate(std::vector<double>{-0.1}, 1.0), std::invalid_argument);
}

TEST_CASE("Outage capacity is the lower order statistic")
{
    std::vector<double> v(1000);
    std::iota(v.begin(), v.end(), 1.0);
    // 1000 samples sit below the resolution guard for eps = 0.01
    CHECK_THROWS_AS(outage_capacity(v, 0.01), std::invalid_argument);
    CHECK(outage_capacity(v, 0.01, false) == 10.0);
    std::reverse(v.begin(), v.end());
    CHECK(outage_capacity(v, 0.01, false) == 10.0);

    const std::vector<double> flat(20000, 0.37);
    for (double eps : {0.01, 0.1, 0.5})
        CHECK(outage_capacity(flat, eps) == 0.37);

    std::vector<double> sym(201);
    for (int i = 0; i <= 200; ++i)
        sym[i] = i - 100.0;
    CHECK(outage_capacity(sym, 0.5) == 0.0);

    CHECK(min_outage_samples(0.01) == 10000);
    CHECK_THROWS_AS(outage_capacity(std::vector<double>(9999, 1.0), 0.01), std::invalid_argument);
    CHECK_NOTHROW(outage_capacity(std::vector<double>(9999, 1.0), 0.01, false));
    CHECK_THROWS_AS(outage_capacity(flat, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(outage_capacity(flat, 1.0), std::invalid_argument);
}

TEST_CASE("Outage capacity grows with eps")
{
    RandomStream rng(17);
    std::vector<double> x(50000);
    for (auto &s : x)
        s = std::log2(1.0 + std::norm(rng.complex_gaussian()));
    double prev = -1.0;
    for (double eps = 0.01; eps < 0.99; eps += 0.02)
    {
        const double c = outage_capacity(x, eps);
        CHECK(c >= prev);
        prev = c;
    }
}

TEST_CASE("Pre-log scaling")
{
    CHECK(outage_rate(0.13, 256, 0) == 0.13);
    CHECK(outage_rate(0.130, 256, 8) == Catch::Approx(0.1259375));
    CHECK(outage_rate(0.4, 256, 128) == Catch::Approx(0.2));
    double prev = 1e9;
    for (int tp = 0; tp < 256; tp += 5)
    {
        CHECK(outage_rate(1.0, 256, tp) <= prev);
        prev = outage_rate(1.0, 256, tp);
    }
    CHECK_THROWS_AS(outage_rate(1.0, 256, 256), std::invalid_argument);
    CHECK_THROWS_AS(outage_rate(1.0, 256, -1), std::invalid_argument);
}

TEST_CASE("Exact bootstrap matches explicit resampling")
{
    RandomStream rng(3);
    std::vector<double> x(20000);
    for (auto &s : x)
        s = std::norm(rng.complex_gaussian());
    std::vector<double> sorted = x;
    std::sort(sorted.begin(), sorted.end());

    SECTION("replicate law")
    {
        // replicate order statistics from both methods against each other
        const std::size_t k = detail::quantile_index(x.size(), 0.01) + 1;
        std::vector<double> fast, naive, buf(x.size());
        RandomStream a(1), b(2);
        for (int t = 0; t < 600; ++t)
        {
            fast.push_back(detail::bootstrap_order_statistic(sorted, k, a));
            for (auto &v : buf)
                v = x[b.index_below(x.size())];
            naive.push_back(detail::quantile_inplace(buf, 0.01));
        }
        std::sort(fast.begin(), fast.end());
        std::sort(naive.begin(), naive.end());
        // medians and spreads agree closely
        CHECK(fast[300] == Catch::Approx(naive[300]).epsilon(0.02));
        CHECK(fast[540] - fast[60] == Catch::Approx(naive[540] - naive[60]).epsilon(0.25));
    }
    SECTION("upper-tail ranks use the mirrored walk")
    {
        const std::size_t k = detail::quantile_index(x.size(), 0.99) + 1;
        RandomStream a(5);
        double acc = 0.0;
        for (int t = 0; t < 200; ++t)
            acc += detail::bootstrap_order_statistic(sorted, k, a);
        CHECK(acc / 200 == Catch::Approx(sorted[k - 1]).epsilon(0.03));
    }
    SECTION("half-widths")
    {
        const double hf = bootstrap_halfwidth(x, 0.01, 9, 400);
        const double hn = bootstrap_halfwidth_naive(x, 0.01, 9, 400);
        CHECK(hf > 0.0);
        CHECK(hf == Catch::Approx(hn).epsilon(0.3));
        CHECK(bootstrap_halfwidth(std::vector<double>(20000, 2.0), 0.01, 1) == 0.0);
        CHECK(std::isnan(bootstrap_halfwidth(std::vector<double>{}, 0.01, 1)));
    }
    SECTION("evaluate_outage")
    {
        const auto r = evaluate_outage(x, 0.01, 256, 8, 11);
        CHECK(r.C_eps == sorted[199]);
        CHECK(r.R_eps == Catch::Approx(r.C_eps * 248.0 / 256.0));
        CHECK(r.n_samples == 20000);
        CHECK(r.halfwidth > 0.0);
        CHECK(r.halfwidth < r.R_eps);
        const auto again = evaluate_outage(x, 0.01, 256, 8, 11);
        CHECK(again.halfwidth == r.halfwidth);
        CHECK_THROWS_AS(evaluate_outage(x, 0.01, 256, 256, 1), std::invalid_argument);
        CHECK_THROWS_AS(evaluate_outage_prelog(x, 0.01, 1.5, 1), std::invalid_argument);
        CHECK_THROWS_AS(evaluate_outage(std::vector<double>(100, 1.0), 0.01, 256, 8, 1), std::invalid_argument);
    }
}

TEST_CASE("Averaging over intervals concentrates the supported rate")
{
    RandomStream rng(23);
    const int N = 20000;
    double prev = 0.0;
    for (int L : {1, 2, 4, 8, 16})
    {
        std::vector<double> rates(N);
        std::vector<double> snr(L);
        for (auto &r : rates)
        {
            for (auto &s : snr)
                s = 2.0 * std::norm(rng.complex_gaussian());
            r = supported_rate(snr, 1.0);
        }
        const auto res = evaluate_outage_prelog(rates, 0.01, 1.0, 1);
        CHECK(res.C_eps >= prev - 2.0 * res.halfwidth);
        prev = res.C_eps;
    }
}

TEST_CASE("Split coherence interval")
{
    CHECK(split_budget(256, 1, 8).data_uses == 248);
    CHECK(split_budget(256, 4, 2).data_uses == 248);
    CHECK(split_budget(256, 4, 2).prelog == Catch::Approx(248.0 / 256.0));
    CHECK_THROWS_AS(split_budget(256, 32, 8), std::invalid_argument);
    CHECK_THROWS_AS(split_budget(256, 0, 8), std::invalid_argument);
    CHECK(split_total_bits(256, 2, 4, 0.5) == Catch::Approx(124.0));
}

TEST_CASE("Minimum intervals for a message")
{
    const std::vector<double> rates{0.1, 0.12, 0.13, 0.14};
    const double one = 256 * 0.1;
    CHECK(min_intervals_for_message(0.0, rates, 256) == 1);
    CHECK(min_intervals_for_message(one, rates, 256) == 1);
    CHECK(min_intervals_for_message(one + 1e-9, rates, 256) == 2);
    CHECK(min_intervals_for_message(3 * 256 * 0.13, rates, 256) == 3);
    CHECK(min_intervals_for_message(1e6, rates, 256) == 0);
}

TEST_CASE("Preferred code")
{
    CHECK(preferred_code(std::vector<int>{9, 5, 3, 4, 6}) == 2);
    CHECK(preferred_code(std::vector<int>{9, 5, 3, 3, 6}) == 3);
    CHECK(preferred_code(std::vector<int>{0, 5, 0, 5, 0}) == 3);
    CHECK(preferred_code(std::vector<int>{0, 0}) == -1);
}
