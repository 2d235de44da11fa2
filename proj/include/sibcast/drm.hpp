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

#ifndef SIBCAST_DRM_HPP
#define SIBCAST_DRM_HPP

#include "channel.hpp"
#include "codes.hpp"
#include "linalg.hpp"
#include "rng.hpp"

#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace sibcast
{
    enum class DrmKind
    {
        Meng,
        Random,
        Dft
    };

    inline std::string to_string(DrmKind k)
    {
        switch (k)
        {
        case DrmKind::Meng:
            return "meng";
        case DrmKind::Random:
            return "rand";
        case DrmKind::Dft:
            return "dft";
        }
        return "?";
    }

    inline std::optional<DrmKind> parse_drm_kind(std::string_view s)
    {
        if (s == "meng" || s == "zc")
            return DrmKind::Meng;
        if (s == "rand" || s == "random")
            return DrmKind::Random;
        if (s == "dft")
            return DrmKind::Dft;
        return std::nullopt;
    }

    // How drm_dft treats a non-integer column index (M/(2 n_t))(2n-1).
    enum class DftIndexing
    {
        Strict, // reject
        Floor   // round down, recorded in Drm::snapped
    };

    // n_t x M dimension-reducing matrix mapping antenna ports onto physical antennas.
    struct Drm
    {
        CMat phi;
        DrmKind kind = DrmKind::Meng;
        int zc_root = 0;              // Meng only
        std::uint64_t seed = 0;       // Random only
        std::vector<int> dft_columns; // 1-based DFT column indices (Meng and Dft)
        bool snapped = false;

        int n_t() const { return static_cast<int>(phi.rows()); }
        int M() const { return static_cast<int>(phi.cols()); }
    };

    // Unit-norm column q (0-based frequency) of the M-point DFT matrix.
    inline CVec dft_column(int M, int q)
    {
        CVec f(M);
        const double s = 1.0 / std::sqrt(static_cast<double>(M));
        for (int m = 0; m < M; ++m)
            f(m) = s * std::polar(1.0, -2.0 * pi * static_cast<double>((static_cast<long long>(m) * q) % M) / M);
        return f;
    }

    // Zadoff-Chu sequence of length M and root u (gcd(u, M) = 1).
    inline CVec zadoff_chu(int M, int u)
    {
        CVec z(M);
        for (int m = 0; m < M; ++m)
        {
            const long long mm = static_cast<long long>(m);
            // phase numerator modulo 2M keeps the argument small for large m
            const long long num = (M % 2 == 0) ? (u * mm * mm) % (2LL * M) : (u * mm * (mm + 1)) % (2LL * M);
            z(m) = std::polar(1.0, -pi * static_cast<double>(num) / M);
        }
        return z;
    }

    // Phi^T = diag(z) F_sub: a unit-modulus Zadoff-Chu diagonal times n_t DFT columns
    // spaced M/n_t apart. Semi-unitary, equal column norms n_t/M, and equal power
    // toward every M-point DFT direction.
    inline Drm drm_meng(int M, int n_t)
    {
        if (n_t < 1 || n_t >= M)
            throw std::invalid_argument("drm_meng: need 1 <= n_t < M");
        if (M % n_t != 0)
            throw std::invalid_argument("drm_meng: n_t must divide M (M=" + std::to_string(M) +
                                        ", n_t=" + std::to_string(n_t) + ")");
        int root = 1;
        while (std::gcd(root, M) != 1)
            ++root;
        const CVec z = zadoff_chu(M, root);
        Drm d;
        d.kind = DrmKind::Meng;
        d.zc_root = root;
        d.phi.resize(n_t, M);
        const int spacing = M / n_t;
        for (int c = 0; c < n_t; ++c)
        {
            const CVec f = dft_column(M, c * spacing);
            d.phi.row(c) = z.cwiseProduct(f).transpose();
            d.dft_columns.push_back(c * spacing + 1);
        }
        return d;
    }

    // [I 0] Q with Q Haar-distributed: QR of an i.i.d. Gaussian matrix with the
    // diagonal phases of R moved into Q.
    inline Drm drm_rand(int M, int n_t, RandomStream &rng)
    {
        if (n_t < 1 || n_t >= M)
            throw std::invalid_argument("drm_rand: need 1 <= n_t < M");
        const CMat G = rng.complex_gaussian_matrix(M, M);
        Eigen::HouseholderQR<CMat> qr(G);
        CMat Q = qr.householderQ();
        const CMat &R = qr.matrixQR();
        for (int i = 0; i < M; ++i)
        {
            const double a = std::abs(R(i, i));
            const cd phase = a > 0.0 ? R(i, i) / a : cd(1.0);
            Q.col(i) *= phase;
        }
        Drm d;
        d.kind = DrmKind::Random;
        d.phi = Q.topRows(n_t);
        return d;
    }

    inline Drm drm_rand(int M, int n_t, std::uint64_t seed)
    {
        RandomStream rng(seed);
        Drm d = drm_rand(M, n_t, rng);
        d.seed = seed;
        return d;
    }

    // Rows are the unit-norm DFT columns with 1-based indices (M/(2 n_t))(2n-1).
    inline Drm drm_dft(int M, int n_t, DftIndexing indexing = DftIndexing::Strict)
    {
        if (n_t < 1 || n_t >= M)
            throw std::invalid_argument("drm_dft: need 1 <= n_t < M");
        const bool exact = M % (2 * n_t) == 0;
        if (!exact && indexing == DftIndexing::Strict)
            throw std::invalid_argument("drm_dft: M/(2 n_t) is not an integer (M=" + std::to_string(M) +
                                        ", n_t=" + std::to_string(n_t) + ")");
        Drm d;
        d.kind = DrmKind::Dft;
        d.snapped = !exact;
        d.phi.resize(n_t, M);
        for (int n = 1; n <= n_t; ++n)
        {
            // floor(M (2n-1) / (2 n_t)) in integer arithmetic
            const int column = static_cast<int>((static_cast<long long>(M) * (2 * n - 1)) / (2 * n_t));
            d.dft_columns.push_back(column);
            d.phi.row(n - 1) = dft_column(M, column - 1).transpose();
        }
        return d;
    }

    // C_h = Phi C_g Phi^H
    inline CMat effective_covariance(const CMat &phi, const CMat &C_g)
    {
        if (phi.cols() != C_g.rows() || C_g.rows() != C_g.cols())
            throw std::invalid_argument("effective_covariance: dimension mismatch");
        return hermitian_part(phi * C_g * phi.adjoint());
    }

    // Same as effective_covariance(phi, exp_covariance(spec)) in O(n_t^2 M).
    inline CMat effective_covariance(const CMat &phi, const CovarianceSpec &spec)
    {
        if (phi.cols() != spec.M)
            throw std::invalid_argument("effective_covariance: dimension mismatch");
        if (spec.is_iid())
            return hermitian_part(spec.beta * phi * phi.adjoint());
        const CMat CgPhiH = apply_covariance(spec, phi.adjoint());
        return hermitian_part(phi * CgPhiH);
    }

    inline void write_drm(std::ostream &os, const Drm &d)
    {
        os << "drm " << to_string(d.kind) << " n_t=" << d.n_t() << " M=" << d.M();
        if (d.kind == DrmKind::Meng)
            os << " zc_root=" << d.zc_root;
        if (d.kind == DrmKind::Random)
            os << " seed=" << d.seed;
        if (!d.dft_columns.empty())
        {
            os << " columns=";
            for (std::size_t i = 0; i < d.dft_columns.size(); ++i)
                os << (i ? "," : "") << d.dft_columns[i];
        }
        if (d.snapped)
            os << " snapped=1";
        os << '\n';
        write_matrix(os, d.phi);
    }
}

#endif
