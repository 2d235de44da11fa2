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
#include <sibcast/codes.hpp>

#include <sstream>

using namespace sibcast;

TEST_CASE("Code table dimensions")
{
    const int expect[5][3] = {{1, 1, 1}, {2, 2, 2}, {4, 4, 3}, {8, 16, 8}, {12, 128, 64}};
    for (std::size_t i = 0; i < all_code_ids.size(); ++i)
    {
        const auto code = make_code(all_code_ids[i]);
        CHECK(code.n_t() == expect[i][0]);
        CHECK(code.tau_d() == expect[i][1]);
        CHECK(code.n_s() == expect[i][2]);
        CHECK(code.symbol_energy() == Catch::Approx(double(expect[i][1]) / (expect[i][2] * expect[i][0])));
    }
    CHECK(make_code(CodeId::C4).rate() == Catch::Approx(0.75));
    CHECK(make_code(CodeId::C12).rate() == Catch::Approx(0.5));
}

TEST_CASE("Every code satisfies the OSTBC identities")
{
    for (auto id : all_code_ids)
    {
        const auto rep = validate_code(make_code(id), 1000, 100, 7);
        INFO(to_string(id) << " max violation " << rep.max_violation());
        CHECK(rep.max_violation() < 1e-10);
        CHECK(rep.symbol_draws == 1000);
    }
}

TEST_CASE("Alamouti codeword layout")
{
    const auto code = make_code(CodeId::C2);
    const std::vector<cd> s{{1.0, 2.0}, {-0.5, 0.25}};
    const CMat X = encode(code, s);
    CHECK(std::abs(X(0, 0) - s[0]) < 1e-15);
    CHECK(std::abs(X(0, 1) - s[1]) < 1e-15);
    CHECK(std::abs(X(1, 0) + std::conj(s[1])) < 1e-15);
    CHECK(std::abs(X(1, 1) - std::conj(s[0])) < 1e-15);
}

TEST_CASE("Encoding is real-linear and checks the symbol count")
{
    RandomStream rng(3);
    for (auto id : all_code_ids)
    {
        const auto code = make_code(id);
        const CVec a = rng.complex_gaussian_vector(code.n_s());
        const CVec b = rng.complex_gaussian_vector(code.n_s());
        const double alpha = 0.7, beta = -1.3;
        const CMat lhs = encode(code, CVec(alpha * a + beta * b));
        const CMat rhs = alpha * encode(code, a) + beta * encode(code, b);
        CHECK(max_abs(lhs - rhs) < 1e-12);
        CHECK_THROWS_AS(encode(code, CVec::Zero(code.n_s() + 1)), std::invalid_argument);
    }
}

TEST_CASE("Codeword energy averages to tau_d")
{
    RandomStream rng(11);
    for (auto id : {CodeId::C2, CodeId::C4, CodeId::C8})
    {
        const auto code = make_code(id);
        const int N = 20000;
        double acc = 0.0;
        for (int t = 0; t < N; ++t)
        {
            const CVec s = rng.complex_gaussian_vector(code.n_s(), code.symbol_energy());
            acc += encode(code, s).squaredNorm();
        }
        CHECK(acc / N == Catch::Approx(code.tau_d()).epsilon(0.03));
    }
}

TEST_CASE("Hurwitz-Radon numbers")
{
    const std::pair<int, int> table[] = {{1, 1}, {2, 2}, {4, 4}, {8, 8}, {16, 9}, {32, 10}, {64, 12}, {128, 16}, {12, 4}};
    for (auto [p, rho] : table)
        CHECK(hurwitz_radon_number(p) == rho);
}

TEST_CASE("Hurwitz-Radon families are orthogonal, skew and anticommuting")
{
    for (int p = 1; p <= 64; p *= 2)
    {
        const auto fam = hurwitz_radon_family(p);
        REQUIRE(static_cast<int>(fam.size()) == hurwitz_radon_number(p) - 1);
        const RMat I = RMat::Identity(p, p);
        for (std::size_t i = 0; i < fam.size(); ++i)
        {
            CHECK((fam[i].transpose() * fam[i] - I).cwiseAbs().maxCoeff() < 1e-14);
            CHECK((fam[i] + fam[i].transpose()).cwiseAbs().maxCoeff() < 1e-14);
            for (std::size_t j = i + 1; j < fam.size(); ++j)
                CHECK((fam[i] * fam[j] + fam[j] * fam[i]).cwiseAbs().maxCoeff() < 1e-14);
        }
    }
    CHECK_THROWS_AS(hurwitz_radon_family(12), std::invalid_argument);
    CHECK_THROWS_AS(hurwitz_radon_family(128), std::invalid_argument);
}

TEST_CASE("Code ids parse from several spellings")
{
    CHECK(parse_code_id("C8") == CodeId::C8);
    CHECK(parse_code_id("c12") == CodeId::C12);
    CHECK(parse_code_id("4") == CodeId::C4);
    CHECK_FALSE(parse_code_id("C3").has_value());
    CHECK_FALSE(parse_code_id("").has_value());
}

TEST_CASE("Sparse views and supports agree with the dense basis")
{
    for (auto id : all_code_ids)
    {
        const auto code = make_code(id);
        for (int n = 0; n < code.n_s(); ++n)
        {
            CMat rebuilt = CMat::Zero(code.tau_d(), code.n_t());
            for (const auto &e : code.A_sparse(n))
                rebuilt(e.row, e.col) += e.value;
            CHECK(max_abs(rebuilt - code.A(n)) == 0.0);
            for (int r = 0; r < code.tau_d(); ++r)
            {
                const bool nonzero = code.A(n).row(r).cwiseAbs().maxCoeff() > 0.0;
                const auto &sup = code.A_support(n);
                CHECK(nonzero == std::binary_search(sup.begin(), sup.end(), r));
            }
        }
    }
}

TEST_CASE("Isotropic kernels match the dense definition")
{
    for (auto id : {CodeId::C2, CodeId::C4, CodeId::C8})
    {
        const auto code = make_code(id);
        CMat T = CMat::Zero(code.tau_d(), code.tau_d());
        for (int k = 0; k < code.n_s(); ++k)
            T += code.A(k) * code.A(k).adjoint() + code.B(k) * code.B(k).adjoint();
        for (int n = 0; n < code.n_s(); ++n)
        {
            CHECK(max_abs(code.isotropic_kernel_A(n) - code.A(n).adjoint() * T * code.A(n)) < 1e-12);
            CHECK(max_abs(code.isotropic_kernel_B(n) - code.B(n).adjoint() * T * code.B(n)) < 1e-12);
        }
    }
}

TEST_CASE("Code export lists every basis matrix")
{
    std::ostringstream os;
    write_code(os, make_code(CodeId::C4));
    const std::string s = os.str();
    CHECK(s.rfind("code C4 n_t=4 tau_d=4 n_s=3\n", 0) == 0);
    CHECK(s.find("A 3\n") != std::string::npos);
    CHECK(s.find("B 3\n") != std::string::npos);
    CHECK(s.find("A 4\n") == std::string::npos);
}
