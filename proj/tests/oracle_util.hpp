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

// Brute-force moment oracle for the detector output. Simulates the whole data
// phase (symbols, channel error, interfering codewords, noise) with dense
// matrices and measures the gain on s_n and the residual power directly.

#ifndef SIBCAST_TESTS_ORACLE_UTIL_HPP
#define SIBCAST_TESTS_ORACLE_UTIL_HPP

#include <sibcast/link.hpp>
#include <sibcast/multicell.hpp>

#include <vector>

namespace oracle
{
    using namespace sibcast;

    struct SymbolMoments
    {
        cd gain;            // E[s_hat_n conj(s_n)] / E|s_n|^2
        double gain_se_re = 0.0;
        double gain_se_im = 0.0;
        double residual = 0.0; // E|s_hat_n - g_model s_n|^2
        double residual_se = 0.0;
    };

    struct GaussianLaw
    {
        CVec mean;
        CMat factor;
    };

    inline GaussianLaw to_law(const ConditionalLaw &l)
    {
        return {l.mean, psd_factor(hermitian_part(l.cov))};
    }

    // g_model[n] is the gain predicted by the closed form; the residual is
    // measured around it, so a wrong gain shows up in both statistics.
    struct Moments
    {
        std::vector<SymbolMoments> symbols;
        SymbolMoments pooled; // same statistics averaged over the symbols of each draw
    };

    inline Moments simulate(const OstbcCode &code, const CVec &h_hat, double rho_d,
                                               const GaussianLaw &error, const std::vector<GaussianLaw> &interferers,
                                               const std::vector<cd> &g_model, int draws, std::uint64_t seed)
    {
        const int ns = code.n_s(), tau = code.tau_d();
        const double Es = code.symbol_energy();
        const double sr = std::sqrt(rho_d);
        RandomStream rng(seed);

        std::vector<CVec> a(ns), b(ns);
        for (int n = 0; n < ns; ++n)
        {
            a[n] = code.A(n) * h_hat;
            b[n] = code.B(n) * h_hat;
        }
        std::vector<double> sre(ns + 1, 0.0), sim(ns + 1, 0.0), sre2(ns + 1, 0.0), sim2(ns + 1, 0.0),
            z1(ns + 1, 0.0), z2(ns + 1, 0.0);
        for (int t = 0; t < draws; ++t)
        {
            const CVec s = rng.complex_gaussian_vector(ns, Es);
            const CVec e = error.mean + error.factor * rng.complex_gaussian_vector(error.factor.cols());
            CVec y = sr * encode(code, s) * (h_hat - e) + rng.complex_gaussian_vector(tau);
            for (const auto &law : interferers)
            {
                const CVec hk = law.mean + law.factor * rng.complex_gaussian_vector(law.factor.cols());
                y += sr * encode(code, rng.complex_gaussian_vector(ns, Es)) * hk;
            }
            cd gp = 0.0;
            double zp = 0.0;
            for (int n = 0; n < ns; ++n)
            {
                const cd sh{a[n].dot(y).real(), b[n].dot(y).imag()};
                const cd g = sh * std::conj(s(n)) / Es;
                sre[n] += g.real();
                sim[n] += g.imag();
                sre2[n] += g.real() * g.real();
                sim2[n] += g.imag() * g.imag();
                const double z = std::norm(sh - g_model[n] * s(n));
                z1[n] += z;
                z2[n] += z * z;
                gp += g / double(ns);
                zp += z / ns;
            }
            sre[ns] += gp.real();
            sim[ns] += gp.imag();
            sre2[ns] += gp.real() * gp.real();
            sim2[ns] += gp.imag() * gp.imag();
            z1[ns] += zp;
            z2[ns] += zp * zp;
        }
        const double N = draws;
        auto se = [N](double s1, double s2) { return std::sqrt(std::max(0.0, s2 / N - (s1 / N) * (s1 / N)) / (N - 1)); };
        std::vector<SymbolMoments> out(ns + 1);
        for (int n = 0; n <= ns; ++n)
        {
            out[n].gain = {sre[n] / N, sim[n] / N};
            out[n].gain_se_re = se(sre[n], sre2[n]);
            out[n].gain_se_im = se(sim[n], sim2[n]);
            out[n].residual = z1[n] / N;
            out[n].residual_se = se(z1[n], z2[n]);
        }
        Moments m;
        m.pooled = out.back();
        out.pop_back();
        m.symbols = std::move(out);
        return m;
    }

    // Largest z-score over symbols, or of the symbol average when `pooled`.
    struct Comparison
    {
        double z_gain_re = 0.0;
        double z_gain_im = 0.0;
        double z_residual = 0.0;
        double worst() const { return std::max({z_gain_re, z_gain_im, z_residual}); }
    };

    inline Comparison compare(const SnrBreakdown &model, const Moments &mc, double rho_d, bool pooled)
    {
        const double sr = std::sqrt(rho_d);
        const int ns = static_cast<int>(mc.symbols.size());
        Comparison c;
        auto gain = [&](int n) { return sr * model.hhat_norm2 + model.c[n]; };
        auto residual = [&](int n) { return model.U[n] + model.interference[n] + model.hhat_norm2; };
        if (pooled)
        {
            cd g = 0.0;
            double r = 0.0;
            for (int n = 0; n < ns; ++n)
            {
                g += gain(n) / double(ns);
                r += residual(n) / ns;
            }
            const auto &p = mc.pooled;
            c.z_gain_re = std::abs(p.gain.real() - g.real()) / p.gain_se_re;
            c.z_gain_im = std::abs(p.gain.imag() - g.imag()) / p.gain_se_im;
            c.z_residual = std::abs(p.residual - r) / p.residual_se;
            return c;
        }
        for (int n = 0; n < ns; ++n)
        {
            const auto &m = mc.symbols[n];
            c.z_gain_re = std::max(c.z_gain_re, std::abs(m.gain.real() - gain(n).real()) / m.gain_se_re);
            c.z_gain_im = std::max(c.z_gain_im, std::abs(m.gain.imag() - gain(n).imag()) / m.gain_se_im);
            c.z_residual = std::max(c.z_residual, std::abs(m.residual - residual(n)) / m.residual_se);
        }
        return c;
    }

    inline std::vector<cd> model_gains(const SnrBreakdown &model, double rho_d)
    {
        std::vector<cd> g;
        for (const auto &c : model.c)
            g.push_back(std::sqrt(rho_d) * model.hhat_norm2 + c);
        return g;
    }

    // A random correlated single-cell configuration.
    struct SingleConfig
    {
        OstbcCode code;
        CMat C_h, C_e;
        CVec h_hat;
        double rho_d;
        std::string label;
    };

    inline SingleConfig random_single(int index, std::uint64_t seed)
    {
        RandomStream rng(seed, 0x0ac1e, index);
        const CodeId ids[] = {CodeId::C1, CodeId::C2, CodeId::C4, CodeId::C8, CodeId::C12};
        const CodeId id = ids[index % 5];
        const int Ms[] = {24, 48, 120};
        const int M = Ms[rng.index_below(3)];
        OstbcCode code = make_code(id);
        const int nt = code.n_t();
        const double r_abs = rng.uniform(0.3, 0.95), arg = rng.uniform(-pi, pi);
        const double beta = rng.uniform(0.05, 2.0);
        const double rho_p = std::pow(10.0, rng.uniform(-0.5, 1.5));
        const double rho_d = std::pow(10.0, rng.uniform(-0.5, 1.0));
        const bool meng = rng.uniform() < 0.5;
        const CMat phi = meng ? drm_meng(M, nt).phi : drm_rand(M, nt, rng).phi;
        SingleConfig c{code, effective_covariance(phi, CovarianceSpec::exponential(M, beta, r_abs, arg)),
                       ls_error_covariance(nt, nt, rho_p), CVec(), rho_d, ""};
        c.h_hat = psd_factor(c.C_h + c.C_e) * rng.complex_gaussian_vector(nt);
        c.label = code.name() + " M=" + std::to_string(M) + (meng ? " meng" : " rand") +
                  " |r|=" + std::to_string(r_abs) + " rho_p=" + std::to_string(rho_p) + " rho_d=" + std::to_string(rho_d);
        return c;
    }

    struct MultiConfig
    {
        OstbcCode code;
        MultiCellStatistics st;
        CVec h_hat;
        double rho_d;
        std::string label;
    };

    inline MultiConfig random_multi(int index, std::uint64_t seed)
    {
        RandomStream rng(seed, 0x0ac1f, index);
        const CodeId ids[] = {CodeId::C1, CodeId::C2, CodeId::C4, CodeId::C8};
        OstbcCode code = make_code(ids[index % 4]);
        const int reuses[] = {1, 3, 4};
        const int reuse = reuses[rng.index_below(3)];
        const int M = rng.uniform() < 0.5 ? 24 : 48;
        const int nt = code.n_t();
        const UserGeometry geo{CellShape::Hexagon};
        const auto u = place_user(geo, rng);
        const double r_abs = rng.uniform(0.3, 0.95);
        const double rho_p = std::pow(10.0, rng.uniform(0.0, 1.5));
        const double rho_d = std::pow(10.0, rng.uniform(-0.5, 0.5));
        const auto grid = build_grid(reuse);
        const auto specs = multicell_specs(grid, geo, M, r_abs, u.x, u.y);
        MultiConfig c{code, multicell_statistics(grid, specs, drm_meng(M, nt).phi, nt, rho_p), CVec(), rho_d, ""};
        c.h_hat = psd_factor(c.st.C_h + c.st.C_e + c.st.C_sigma()) * rng.complex_gaussian_vector(nt);
        c.label = code.name() + " reuse=" + std::to_string(reuse) + " M=" + std::to_string(M) +
                  " d=" + std::to_string(u.distance) + " |r|=" + std::to_string(r_abs);
        return c;
    }

    inline int draws_for(const OstbcCode &code, int base)
    {
        return code.tau_d() > 16 ? base / 5 : base;
    }

    inline Comparison check_single(const SingleConfig &c, int base_draws, std::uint64_t seed, bool pooled)
    {
        const auto model = symbol_snr(c.code, c.C_h, c.C_e, c.h_hat, c.rho_d);
        const auto m = conditional_moments(c.C_h, c.C_e, c.h_hat);
        const auto mc = simulate(c.code, c.h_hat, c.rho_d, {m.mean, psd_factor(m.R)}, {}, model_gains(model, c.rho_d),
                                 draws_for(c.code, base_draws), seed);
        return compare(model, mc, c.rho_d, pooled);
    }

    inline Comparison check_multi(const MultiConfig &c, int base_draws, std::uint64_t seed, bool pooled)
    {
        const auto model = mc_symbol_snr(c.code, c.st, c.h_hat, c.rho_d);
        const auto laws = multicell_laws(c.st, c.h_hat);
        std::vector<GaussianLaw> ints;
        for (const auto &l : laws.interferers)
            ints.push_back(to_law(l));
        const auto mc = simulate(c.code, c.h_hat, c.rho_d, to_law(laws.error), ints, model_gains(model, c.rho_d),
                                 draws_for(c.code, base_draws), seed);
        return compare(model, mc, c.rho_d, pooled);
    }
}

#endif
