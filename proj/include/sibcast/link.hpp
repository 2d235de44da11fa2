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

#ifndef SIBCAST_LINK_HPP
#define SIBCAST_LINK_HPP

#include "channel.hpp"
#include "codes.hpp"
#include "drm.hpp"
#include "linalg.hpp"
#include "rng.hpp"

#include <algorithm>
#include <optional>
#include <span>
#include <vector>

namespace sibcast
{
    // ---------------------------------------------------------------------
    // Pilot phase
    // ---------------------------------------------------------------------

    struct PilotConfig
    {
        int tau_p = 1;
        double rho_p = 1.0;
        CMat X_p;
    };

    // Leading tau_p x n_t block of the tau_p-point DFT matrix scaled so that
    // X_p^H X_p = (tau_p / n_t) I. Every entry has modulus 1/sqrt(n_t).
    inline CMat make_pilot_matrix(int n_t, int tau_p)
    {
        if (n_t < 1)
            throw std::invalid_argument("make_pilot_matrix: n_t must be positive");
        if (tau_p < n_t)
            throw std::invalid_argument("make_pilot_matrix: tau_p must be at least n_t");
        CMat X(tau_p, n_t);
        const double s = 1.0 / std::sqrt(static_cast<double>(n_t));
        for (int i = 0; i < tau_p; ++i)
            for (int j = 0; j < n_t; ++j)
                X(i, j) = s * std::polar(1.0, -2.0 * pi * static_cast<double>((i * j) % tau_p) / tau_p);
        return X;
    }

    inline PilotConfig make_pilot_config(int n_t, int tau_p, double rho_p)
    {
        return {tau_p, rho_p, make_pilot_matrix(n_t, tau_p)};
    }

    // h_hat = (sqrt(rho_p) X_p^H X_p)^{-1} X_p^H y_p
    inline CVec ls_estimate(const CVec &y_p, const CMat &X_p, double rho_p)
    {
        if (y_p.size() != X_p.rows())
            throw std::invalid_argument("ls_estimate: pilot observation has wrong length");
        if (!(rho_p > 0.0))
            throw std::invalid_argument("ls_estimate: pilot power must be positive");
        const CMat G = std::sqrt(rho_p) * (X_p.adjoint() * X_p);
        Eigen::FullPivLU<CMat> lu(G);
        if (!lu.isInvertible())
            throw numerical_error("ls_estimate: X_p^H X_p is singular");
        return lu.solve(X_p.adjoint() * y_p);
    }

    // C_e = n_t / (rho_p tau_p) I for a semi-unitary pilot.
    inline CMat ls_error_covariance(int n_t, int tau_p, double rho_p)
    {
        return (static_cast<double>(n_t) / (rho_p * tau_p)) * CMat::Identity(n_t, n_t);
    }

    // ---------------------------------------------------------------------
    // Conditional moments of the estimation error
    // ---------------------------------------------------------------------

    namespace detail
    {
        // X = A^{-1} B for Hermitian PSD A. Falls back to an eigendecomposition with
        // eigenvalues floored at 1e-12 tr(A)/n when A is (numerically) singular.
        inline CMat psd_solve(const CMat &A, const CMat &B)
        {
            Eigen::LLT<CMat> llt(A);
            if (llt.info() == Eigen::Success)
            {
                CMat X = llt.solve(B);
                if (X.allFinite())
                    return X;
            }
            Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(A));
            if (es.info() != Eigen::Success)
                throw numerical_error("psd_solve: eigendecomposition failed");
            const double floor = std::max(1e-12 * A.trace().real() / A.rows(), 1e-300);
            const RVec inv = es.eigenvalues().cwiseMax(floor).cwiseInverse();
            return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().adjoint() * B;
        }
    }

    struct ConditionalMoments
    {
        CMat U;              // C_e (C_e + C_h)^{-1}
        CMat R;              // (C_e^{-1} + C_h^{-1})^{-1}
        CVec mean;           // E[e | h_hat] = U h_hat
        CMat second;         // E[e e^H | h_hat]
        CMat pseudo_second;  // E[e e^T | h_hat]
    };

    // e | h_hat ~ CN(U h_hat, R). R is evaluated as C_e - C_e (C_e + C_h)^{-1} C_e,
    // which equals the inverse-sum form and stays finite for rank-deficient C_h.
    inline ConditionalMoments conditional_moments(const CMat &C_h, const CMat &C_e, const CVec &h_hat)
    {
        if (C_h.rows() != C_e.rows() || C_h.rows() != h_hat.size() || C_h.rows() != C_h.cols())
            throw std::invalid_argument("conditional_moments: dimension mismatch");
        const CMat S = C_h + C_e;
        const CMat SinvCe = detail::psd_solve(S, C_e); // S^{-1} C_e
        ConditionalMoments m;
        m.U = SinvCe.adjoint();                        // C_e S^{-1}
        m.R = hermitian_part(C_e - C_e * SinvCe);
        m.mean = m.U * h_hat;
        m.second = m.R + m.mean * m.mean.adjoint();
        m.pseudo_second = m.mean * m.mean.transpose();
        return m;
    }

    // h_hat_mmse = C_h (C_h + C_e)^{-1} h_hat_ls
    inline CVec mmse_estimate(const CMat &C_h, const CMat &C_e, const CVec &h_hat)
    {
        const CMat S = C_h + C_e;
        return C_h * detail::psd_solve(S, h_hat);
    }

    // Law of a complex Gaussian vector x given the channel estimate.
    // The isotropic form (mean = u h_hat, cov = r I) arises whenever C_h and the
    // error covariance are both scaled identities; it enables a closed-form
    // shortcut in the SNR evaluation.
    struct ConditionalLaw
    {
        CVec mean;
        CMat cov;
        bool isotropic = false;
        double u = 0.0;
        double r = 0.0;

        static ConditionalLaw general(CVec mean, CMat cov) { return {std::move(mean), std::move(cov), false, 0.0, 0.0}; }
        static ConditionalLaw make_isotropic(double u, double r, const CVec &h_hat)
        {
            const auto n = h_hat.size();
            return {u * h_hat, r * CMat::Identity(n, n), true, u, r};
        }
    };

    // ---------------------------------------------------------------------
    // Data phase
    // ---------------------------------------------------------------------

    // y = sqrt(rho_d) X h + w
    inline CVec receive(const CMat &X, const CVec &h, double rho_d, RandomStream &rng)
    {
        return std::sqrt(rho_d) * X * h + rng.complex_gaussian_vector(X.rows());
    }

    // s_hat_n = Re(h_hat^H A_n^H y) + i Im(h_hat^H B_n^H y)
    inline std::vector<cd> detect_symbols(const OstbcCode &code, const CVec &h_hat, const CVec &y)
    {
        if (h_hat.size() != code.n_t() || y.size() != code.tau_d())
            throw std::invalid_argument("detect_symbols: dimension mismatch");
        std::vector<cd> s(code.n_s());
        for (int n = 0; n < code.n_s(); ++n)
        {
            const cd a = (code.A(n) * h_hat).dot(y);
            const cd b = (code.B(n) * h_hat).dot(y);
            s[n] = {a.real(), b.imag()};
        }
        return s;
    }

    struct SnrBreakdown
    {
        std::vector<cd> c;                // part of eta_1 (+ eta_3) correlated with s_n, per unit symbol
        std::vector<double> U;            // uncorrelated estimation-error power
        std::vector<double> interference; // data interference power from other cells
        std::vector<double> snr;          // per-symbol SNR
        double snr_ostbc = 0.0;           // min_n snr
        double hhat_norm2 = 0.0;

        double relative_spread() const
        {
            double hi = 0.0;
            for (double v : snr)
                hi = std::max(hi, v);
            return snr_ostbc > 0.0 ? hi / snr_ostbc - 1.0 : 0.0;
        }
    };

    namespace detail
    {
        // Second-moment sums for the processed error term built from a conditional law:
        //   mean_sq = sum_k Re(a^H A_k m)^2 + Im(a^H B_k m)^2 + Im(b^H A_k m)^2 + Re(b^H B_k m)^2
        //   var     = (a^H S a + b^H S b) / 2,  S = sum_k A_k C A_k^H + B_k C B_k^H
        // with a = A_n h_hat, b = B_n h_hat. Also returns the k = n projections.
        class LawProjector
        {
        public:
            LawProjector(const OstbcCode &code, const ConditionalLaw &law) : code_(code), law_(law)
            {
                const int tau = code.tau_d(), ns = code.n_s();
                V_ = CMat::Zero(tau, ns);
                W_ = CMat::Zero(tau, ns);
                S_ = CMat::Zero(tau, tau);
                for (int k = 0; k < ns; ++k)
                {
                    for (const auto &e : code.A_sparse(k))
                        V_(e.row, k) += e.value * law.mean(e.col);
                    for (const auto &e : code.B_sparse(k))
                        W_(e.row, k) += e.value * law.mean(e.col);
                    for (const auto *sp : {&code.A_sparse(k), &code.B_sparse(k)})
                        for (const auto &x : *sp)
                            for (const auto &y : *sp)
                                S_(x.row, y.row) += x.value * law.cov(x.col, y.col) * std::conj(y.value);
                }
            }

            struct Result
            {
                double mean_sq = 0.0;
                double var = 0.0;
                cd aAn, aBn, bAn, bBn; // a^H A_n m, a^H B_n m, b^H A_n m, b^H B_n m
            };

            Result project(int n, const CVec &a, const CVec &b) const
            {
                const int ns = code_.n_s();
                const auto &sa = code_.A_support(n);
                const auto &sb = code_.B_support(n);
                Result res;
                for (int k = 0; k < ns; ++k)
                {
                    cd aV = 0.0, aW = 0.0, bV = 0.0, bW = 0.0;
                    for (int i : sa)
                    {
                        aV += std::conj(a(i)) * V_(i, k);
                        aW += std::conj(a(i)) * W_(i, k);
                    }
                    for (int i : sb)
                    {
                        bV += std::conj(b(i)) * V_(i, k);
                        bW += std::conj(b(i)) * W_(i, k);
                    }
                    res.mean_sq += aV.real() * aV.real() + aW.imag() * aW.imag() + bV.imag() * bV.imag() +
                                   bW.real() * bW.real();
                    if (k == n)
                    {
                        res.aAn = aV;
                        res.aBn = aW;
                        res.bAn = bV;
                        res.bBn = bW;
                    }
                }
                double qa = 0.0, qb = 0.0;
                for (int i : sa)
                    for (int j : sa)
                        qa += (std::conj(a(i)) * S_(i, j) * a(j)).real();
                for (int i : sb)
                    for (int j : sb)
                        qb += (std::conj(b(i)) * S_(i, j) * b(j)).real();
                res.var = 0.5 * (qa + qb);
                return res;
            }

        private:
            const OstbcCode &code_;
            const ConditionalLaw &law_;
            CMat V_, W_, S_;
        };

        inline CVec sparse_apply(const SparseMatrix &sp, int rows, const CVec &x)
        {
            CVec y = CVec::Zero(rows);
            for (const auto &e : sp)
                y(e.row) += e.value * x(e.col);
            return y;
        }
    }

    // Per-symbol SNR of the detector output under worst-case (Gaussian) noise.
    //   error       law of the total estimation error h_hat - h given h_hat
    //   interferers laws of the other cells' channels given h_hat; each carries an
    //               independent codeword of the same code at power rho_d
    inline SnrBreakdown symbol_snr(const OstbcCode &code, const CVec &h_hat, double rho_d, const ConditionalLaw &error,
                                   std::span<const ConditionalLaw> interferers = {})
    {
        const int ns = code.n_s(), tau = code.tau_d();
        if (h_hat.size() != code.n_t())
            throw std::invalid_argument("symbol_snr: channel estimate has wrong length");
        if (rho_d < 0.0)
            throw std::invalid_argument("symbol_snr: data power must be non-negative");
        const double Es = code.symbol_energy();
        const double sr = std::sqrt(rho_d);
        const double h2 = h_hat.squaredNorm();

        SnrBreakdown out;
        out.hhat_norm2 = h2;
        out.c.resize(ns);
        out.U.resize(ns);
        out.interference.assign(ns, 0.0);
        out.snr.resize(ns);

        std::optional<detail::LawProjector> err_proj;
        if (!error.isotropic)
            err_proj.emplace(code, error);
        std::vector<detail::LawProjector> int_proj;
        int_proj.reserve(interferers.size());
        for (const auto &law : interferers)
            int_proj.emplace_back(code, law);

        for (int n = 0; n < ns; ++n)
        {
            cd c;
            double eta1;
            if (error.isotropic)
            {
                const double qa = h_hat.dot(code.isotropic_kernel_A(n) * h_hat).real();
                const double qb = h_hat.dot(code.isotropic_kernel_B(n) * h_hat).real();
                const double mean_sq = 2.0 * error.u * error.u * h2 * h2;
                const double var = 0.5 * error.r * (qa + qb);
                eta1 = rho_d * 0.5 * Es * (mean_sq + var);
                c = -sr * error.u * h2;
            }
            else
            {
                const CVec a = detail::sparse_apply(code.A_sparse(n), tau, h_hat);
                const CVec b = detail::sparse_apply(code.B_sparse(n), tau, h_hat);
                const auto p = err_proj->project(n, a, b);
                eta1 = rho_d * 0.5 * Es * (p.mean_sq + p.var);
                c = -0.5 * sr * cd(p.aAn.real() + p.bBn.real(), p.bAn.imag() + p.aBn.imag());
            }
            double eta4 = 0.0;
            if (!int_proj.empty())
            {
                const CVec a = detail::sparse_apply(code.A_sparse(n), tau, h_hat);
                const CVec b = detail::sparse_apply(code.B_sparse(n), tau, h_hat);
                for (const auto &proj : int_proj)
                {
                    const auto p = proj.project(n, a, b);
                    eta4 += rho_d * 0.5 * Es * (p.mean_sq + p.var);
                }
            }
            out.c[n] = c;
            out.U[n] = std::max(0.0, eta1 - Es * std::norm(c));
            out.interference[n] = eta4;
            const double denom = out.U[n] + eta4 + h2;
            out.snr[n] = denom > 0.0 ? Es * std::norm(sr * h2 + c) / denom : 0.0;
        }
        out.snr_ostbc = *std::min_element(out.snr.begin(), out.snr.end());
        return out;
    }

    // Single-cell convenience form: error law from (C_h, C_e); uses the isotropic
    // shortcut when both covariances are scaled identities.
    inline SnrBreakdown symbol_snr(const OstbcCode &code, const CMat &C_h, const CMat &C_e, const CVec &h_hat,
                                   double rho_d)
    {
        const auto n = C_h.rows();
        const double ch = C_h(0, 0).real(), ce = C_e(0, 0).real();
        const bool iso = max_abs(C_h - ch * CMat::Identity(n, n)) <= 1e-12 * std::max(ch, 1e-300) &&
                         max_abs(C_e - ce * CMat::Identity(n, n)) <= 1e-12 * std::max(ce, 1e-300) && ch + ce > 0.0;
        if (iso)
        {
            const double u = ce / (ch + ce);
            const double r = ce * ch / (ch + ce);
            return symbol_snr(code, h_hat, rho_d, ConditionalLaw::make_isotropic(u, r, h_hat));
        }
        const auto m = conditional_moments(C_h, C_e, h_hat);
        return symbol_snr(code, h_hat, rho_d, ConditionalLaw::general(m.mean, m.R));
    }

    // Closed form for i.i.d. statistics and square codes.
    inline double snr_square(double hhat_norm2, double beta, int n_t, int tau_d, int tau_p, double rho_p, double rho_d,
                             double Es)
    {
        const double pilot = beta * tau_p * rho_p;
        if (pilot + n_t <= 0.0)
            return 0.0;
        const double quality = pilot / (pilot + n_t);
        return Es * rho_d * hhat_norm2 / (rho_d * tau_d * beta / (n_t + pilot) + 1.0) * quality * quality;
    }

    // SNR without any assumed signal structure, from the MMSE estimate.
    inline double snr_general(double hmmse_norm2, double beta, int n_t, int tau_p, double rho_p, double rho_d)
    {
        return (rho_d / n_t) * hmmse_norm2 / (n_t * rho_d * beta / (n_t + tau_p * rho_p * beta) + 1.0);
    }

    // ---------------------------------------------------------------------
    // One coherence interval
    // ---------------------------------------------------------------------

    struct LinkRealization
    {
        CVec h;      // effective channel Phi g
        CVec h_hat;  // LS estimate
        CVec e;      // h_hat - h
        CMat C_h;
        CMat C_e;
        double rho_p = 0.0;
        double rho_d = 0.0;
    };

    // Draws g ~ CN(0, C_g), forms h = Phi g, transmits the pilot and estimates h.
    inline LinkRealization sample_link(const CMat &phi, const CovarianceSpec &spec, const PilotConfig &pilot,
                                       double rho_d, RandomStream &rng)
    {
        LinkRealization r;
        const CVec g = sample_channel(spec, rng);
        r.h = phi * g;
        r.C_h = effective_covariance(phi, spec);
        const int nt = static_cast<int>(phi.rows());
        r.C_e = ls_error_covariance(nt, pilot.tau_p, pilot.rho_p);
        const CVec y_p = std::sqrt(pilot.rho_p) * pilot.X_p * r.h + rng.complex_gaussian_vector(pilot.tau_p);
        r.h_hat = ls_estimate(y_p, pilot.X_p, pilot.rho_p);
        r.e = r.h_hat - r.h;
        r.rho_p = pilot.rho_p;
        r.rho_d = rho_d;
        return r;
    }
}

#endif
