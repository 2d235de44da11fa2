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

#ifndef SIBCAST_CODES_HPP
#define SIBCAST_CODES_HPP

#include "linalg.hpp"
#include "rng.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <iomanip>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sibcast
{
    enum class CodeId
    {
        C1,
        C2,
        C4,
        C8,
        C12
    };

    inline constexpr std::array<CodeId, 5> all_code_ids{CodeId::C1, CodeId::C2, CodeId::C4, CodeId::C8, CodeId::C12};

    struct CodeDimensions
    {
        int n_t;
        int tau_d;
        int n_s;
    };

    constexpr CodeDimensions code_dimensions(CodeId id)
    {
        switch (id)
        {
        case CodeId::C1:
            return {1, 1, 1};
        case CodeId::C2:
            return {2, 2, 2};
        case CodeId::C4:
            return {4, 4, 3};
        case CodeId::C8:
            return {8, 16, 8};
        case CodeId::C12:
            return {12, 128, 64};
        }
        return {0, 0, 0};
    }

    inline std::string to_string(CodeId id)
    {
        return "C" + std::to_string(code_dimensions(id).n_t);
    }

    // Accepts "C4", "c4" or "4".
    inline std::optional<CodeId> parse_code_id(std::string_view text)
    {
        if (!text.empty() && (text.front() == 'C' || text.front() == 'c'))
            text.remove_prefix(1);
        for (CodeId id : all_code_ids)
            if (text == std::to_string(code_dimensions(id).n_t))
                return id;
        return std::nullopt;
    }

    struct SparseEntry
    {
        int row;
        int col;
        cd value;
    };
    using SparseMatrix = std::vector<SparseEntry>;

    inline SparseMatrix to_sparse(const CMat &M, double tol = 1e-15)
    {
        SparseMatrix s;
        for (Eigen::Index i = 0; i < M.rows(); ++i)
            for (Eigen::Index j = 0; j < M.cols(); ++j)
                if (std::abs(M(i, j)) > tol)
                    s.push_back({static_cast<int>(i), static_cast<int>(j), M(i, j)});
        return s;
    }

    // A linear space-time block code X = sum_n (Re s_n A_n + i Im s_n B_n).
    // Immutable once built; shared read-only by Monte Carlo workers.
    class OstbcCode
    {
    public:
        OstbcCode(std::string name, int n_t, int tau_d, std::vector<CMat> A, std::vector<CMat> B)
            : name_(std::move(name)), n_t_(n_t), tau_d_(tau_d), A_(std::move(A)), B_(std::move(B))
        {
            if (A_.size() != B_.size() || A_.empty())
                throw std::invalid_argument("OstbcCode: A and B must be non-empty lists of equal length");
            for (std::size_t n = 0; n < A_.size(); ++n)
            {
                if (A_[n].rows() != tau_d || A_[n].cols() != n_t || B_[n].rows() != tau_d || B_[n].cols() != n_t)
                    throw std::invalid_argument("OstbcCode: basis matrix has wrong dimensions");
                A_sparse_.push_back(to_sparse(A_[n]));
                B_sparse_.push_back(to_sparse(B_[n]));
                A_support_.push_back(row_support(A_sparse_.back()));
                B_support_.push_back(row_support(B_sparse_.back()));
            }
            precompute_isotropic_kernels();
        }

        const std::string &name() const { return name_; }
        int n_t() const { return n_t_; }
        int tau_d() const { return tau_d_; }
        int n_s() const { return static_cast<int>(A_.size()); }
        double rate() const { return static_cast<double>(n_s()) / tau_d_; }
        // Per-symbol energy making E[tr(X^H X)] = tau_d.
        double symbol_energy() const { return static_cast<double>(tau_d_) / (n_s() * n_t_); }

        const CMat &A(int n) const { return A_[n]; }
        const CMat &B(int n) const { return B_[n]; }
        const std::vector<CMat> &A() const { return A_; }
        const std::vector<CMat> &B() const { return B_; }
        const SparseMatrix &A_sparse(int n) const { return A_sparse_[n]; }
        const SparseMatrix &B_sparse(int n) const { return B_sparse_[n]; }
        // Sorted rows holding a nonzero of A_n (B_n).
        const std::vector<int> &A_support(int n) const { return A_support_[n]; }
        const std::vector<int> &B_support(int n) const { return B_support_[n]; }

        // A_n^H T A_n and B_n^H T B_n with T = sum_k (A_k A_k^H + B_k B_k^H).
        // Used by the isotropic-error SNR path.
        const CMat &isotropic_kernel_A(int n) const { return kA_[n]; }
        const CMat &isotropic_kernel_B(int n) const { return kB_[n]; }

    private:
        static std::vector<int> row_support(const SparseMatrix &sp)
        {
            std::vector<int> rows;
            for (const auto &e : sp)
                rows.push_back(e.row);
            std::sort(rows.begin(), rows.end());
            rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
            return rows;
        }

        void precompute_isotropic_kernels()
        {
            CMat T = CMat::Zero(tau_d_, tau_d_);
            for (int k = 0; k < n_s(); ++k)
            {
                for (const auto *sp : {&A_sparse_[k], &B_sparse_[k]})
                    for (const auto &x : *sp)
                        for (const auto &y : *sp)
                            if (x.col == y.col)
                                T(x.row, y.row) += x.value * std::conj(y.value);
            }
            for (int n = 0; n < n_s(); ++n)
            {
                kA_.push_back(A_[n].adjoint() * T * A_[n]);
                kB_.push_back(B_[n].adjoint() * T * B_[n]);
            }
        }

        std::string name_;
        int n_t_;
        int tau_d_;
        std::vector<CMat> A_, B_;
        std::vector<SparseMatrix> A_sparse_, B_sparse_;
        std::vector<std::vector<int>> A_support_, B_support_;
        std::vector<CMat> kA_, kB_;
    };

    // ---------------------------------------------------------------------
    // Hurwitz-Radon families
    // ---------------------------------------------------------------------

    // rho(p) for p = 2^(4a+b) * odd: 8a + 2^b
    inline int hurwitz_radon_number(int p)
    {
        if (p <= 0)
            throw std::invalid_argument("hurwitz_radon_number: p must be positive");
        int m = 0;
        while (p % 2 == 0)
        {
            p /= 2;
            ++m;
        }
        const int a = m / 4, b = m % 4;
        return 8 * a + (1 << b);
    }

    namespace detail
    {
        // Letters of a tensor word: I, X = [[0,1],[1,0]], Z = [[1,0],[0,-1]], J = [[0,1],[-1,0]].
        enum class Pauli : std::uint8_t
        {
            I,
            X,
            Z,
            J
        };

        inline RMat pauli_matrix(Pauli p)
        {
            RMat m(2, 2);
            switch (p)
            {
            case Pauli::I:
                m << 1, 0, 0, 1;
                break;
            case Pauli::X:
                m << 0, 1, 1, 0;
                break;
            case Pauli::Z:
                m << 1, 0, 0, -1;
                break;
            case Pauli::J:
                m << 0, 1, -1, 0;
                break;
            }
            return m;
        }

        inline RMat kron(const RMat &a, const RMat &b)
        {
            RMat out(a.rows() * b.rows(), a.cols() * b.cols());
            for (Eigen::Index i = 0; i < a.rows(); ++i)
                for (Eigen::Index j = 0; j < a.cols(); ++j)
                    out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
            return out;
        }

        // Two words anticommute iff an odd number of positions hold distinct non-identity letters.
        inline bool anticommute(const std::vector<Pauli> &u, const std::vector<Pauli> &v)
        {
            int count = 0;
            for (std::size_t i = 0; i < u.size(); ++i)
                if (u[i] != Pauli::I && v[i] != Pauli::I && u[i] != v[i])
                    ++count;
            return count % 2 == 1;
        }

        inline bool select_words(const std::vector<std::vector<Pauli>> &candidates, std::size_t start, std::size_t need,
                                 std::vector<std::size_t> &chosen)
        {
            if (chosen.size() == need)
                return true;
            for (std::size_t i = start; i < candidates.size(); ++i)
            {
                bool ok = true;
                for (std::size_t c : chosen)
                    if (!anticommute(candidates[i], candidates[c]))
                    {
                        ok = false;
                        break;
                    }
                if (!ok)
                    continue;
                chosen.push_back(i);
                if (select_words(candidates, i + 1, need, chosen))
                    return true;
                chosen.pop_back();
            }
            return false;
        }
    }

    // Family {G_2..G_rho} of p x p real matrices that are orthogonal, skew-symmetric
    // and pairwise anticommuting. Built as tensor products of 2x2 signed permutations:
    // a word is skew-symmetric iff it has an odd number of J letters, and a
    // deterministic depth-first search picks rho(p)-1 mutually anticommuting words.
    inline std::vector<RMat> hurwitz_radon_family(int p)
    {
        if (p < 1 || p > 64 || (p & (p - 1)) != 0)
            throw std::invalid_argument("hurwitz_radon_family: p must be a power of two in [1, 64]");
        int m = 0;
        while ((1 << m) < p)
            ++m;
        const std::size_t need = static_cast<std::size_t>(hurwitz_radon_number(p) - 1);

        std::vector<std::vector<detail::Pauli>> candidates;
        const int total = 1 << (2 * m);
        for (int code = 0; code < total; ++code)
        {
            std::vector<detail::Pauli> word(m);
            int j_count = 0;
            for (int pos = 0; pos < m; ++pos)
            {
                word[pos] = static_cast<detail::Pauli>((code >> (2 * (m - 1 - pos))) & 3);
                if (word[pos] == detail::Pauli::J)
                    ++j_count;
            }
            if (j_count % 2 == 1)
                candidates.push_back(std::move(word));
        }

        std::vector<std::size_t> chosen;
        if (!detail::select_words(candidates, 0, need, chosen))
            throw numerical_error("hurwitz_radon_family: search failed");

        std::vector<RMat> family;
        for (std::size_t idx : chosen)
        {
            RMat g = RMat::Identity(1, 1);
            for (detail::Pauli letter : candidates[idx])
                g = detail::kron(g, detail::pauli_matrix(letter));
            family.push_back(std::move(g));
        }
        return family;
    }

    // ---------------------------------------------------------------------
    // Code construction
    // ---------------------------------------------------------------------

    namespace detail
    {
        // One codeword entry: +-s_k or +-conj(s_k); symbol < 0 marks a zero.
        struct TemplateEntry
        {
            int symbol;
            int sign;
            bool conjugate;
        };

        inline OstbcCode from_template(std::string name, int tau, int n_t, int n_s,
                                       const std::vector<std::vector<TemplateEntry>> &rows)
        {
            std::vector<CMat> A(n_s, CMat::Zero(tau, n_t)), B(n_s, CMat::Zero(tau, n_t));
            for (int i = 0; i < tau; ++i)
                for (int j = 0; j < n_t; ++j)
                {
                    const TemplateEntry &e = rows[i][j];
                    if (e.symbol < 0)
                        continue;
                    // s = re + i im, conj(s) = re - i im
                    A[e.symbol](i, j) = static_cast<double>(e.sign);
                    B[e.symbol](i, j) = static_cast<double>(e.conjugate ? -e.sign : e.sign);
                }
            return OstbcCode(std::move(name), n_t, tau, std::move(A), std::move(B));
        }

        // Rate-1/2 complex code from a p x n_t real orthogonal design in p variables:
        // X = [G(s); G(conj s)] / sqrt(2), where column c of G(x) is G_c x.
        inline OstbcCode from_real_design(std::string name, int p, int n_t)
        {
            std::vector<RMat> family = hurwitz_radon_family(p);
            if (static_cast<int>(family.size()) + 1 < n_t)
                throw std::invalid_argument("from_real_design: Hurwitz-Radon number too small");
            std::vector<RMat> columns;
            columns.push_back(RMat::Identity(p, p));
            for (int c = 1; c < n_t; ++c)
                columns.push_back(family[c - 1]);

            const double scale = 1.0 / std::sqrt(2.0);
            std::vector<CMat> A, B;
            for (int n = 0; n < p; ++n)
            {
                CMat An = CMat::Zero(2 * p, n_t), Bn = CMat::Zero(2 * p, n_t);
                for (int c = 0; c < n_t; ++c)
                    for (int i = 0; i < p; ++i)
                    {
                        const double g = columns[c](i, n);
                        An(i, c) = scale * g;
                        An(p + i, c) = scale * g;
                        Bn(i, c) = scale * g;
                        Bn(p + i, c) = -scale * g;
                    }
                A.push_back(std::move(An));
                B.push_back(std::move(Bn));
            }
            return OstbcCode(std::move(name), n_t, 2 * p, std::move(A), std::move(B));
        }
    }

    inline OstbcCode make_code(CodeId id)
    {
        using detail::TemplateEntry;
        constexpr TemplateEntry zero{-1, 0, false};
        const std::string name = to_string(id);
        switch (id)
        {
        case CodeId::C1:
            return detail::from_template(name, 1, 1, 1, {{{0, 1, false}}});
        case CodeId::C2:
            // [ s1     s2  ]
            // [ -s2*   s1* ]
            return detail::from_template(name, 2, 2, 2,
                                         {{{0, 1, false}, {1, 1, false}},
                                          {{1, -1, true}, {0, 1, true}}});
        case CodeId::C4:
            // [ s1    s2    s3    0  ]
            // [ -s2*  s1*   0     s3 ]
            // [ -s3*  0     s1*  -s2 ]
            // [ 0    -s3*   s2*   s1 ]
            return detail::from_template(name, 4, 4, 3,
                                         {{{0, 1, false}, {1, 1, false}, {2, 1, false}, zero},
                                          {{1, -1, true}, {0, 1, true}, zero, {2, 1, false}},
                                          {{2, -1, true}, zero, {0, 1, true}, {1, -1, false}},
                                          {zero, {2, -1, true}, {1, 1, true}, {0, 1, false}}});
        case CodeId::C8:
            return detail::from_real_design(name, 8, 8);
        case CodeId::C12:
            return detail::from_real_design(name, 64, 12);
        }
        throw std::invalid_argument("make_code: unknown code id");
    }

    inline CMat encode(const OstbcCode &code, std::span<const cd> symbols)
    {
        if (static_cast<int>(symbols.size()) != code.n_s())
            throw std::invalid_argument("encode: expected " + std::to_string(code.n_s()) + " symbols, got " +
                                        std::to_string(symbols.size()));
        CMat X = CMat::Zero(code.tau_d(), code.n_t());
        for (int n = 0; n < code.n_s(); ++n)
            X += symbols[n].real() * code.A(n) + (I_unit * symbols[n].imag()) * code.B(n);
        return X;
    }

    inline CMat encode(const OstbcCode &code, const CVec &symbols)
    {
        return encode(code, std::span<const cd>(symbols.data(), static_cast<std::size_t>(symbols.size())));
    }

    // ---------------------------------------------------------------------
    // Validation
    // ---------------------------------------------------------------------

    struct CodeValidationReport
    {
        double unit_A = 0.0;         // max |A_n^H A_n - I|
        double unit_B = 0.0;         // max |B_n^H B_n - I|
        double anticommute_A = 0.0;  // max |A_n^H A_k + A_k^H A_n|, n != k
        double anticommute_B = 0.0;  // max |B_n^H B_k + B_k^H B_n|, n != k
        double cross_AB = 0.0;       // max |A_n^H B_k - B_k^H A_n|
        double orthogonality = 0.0;  // max |X^H X - sum|s|^2 I| over random symbols
        double real_quadratic = 0.0; // max |Re(v^H A_n^H A_k v) - delta_nk |v|^2|
        double imag_cross = 0.0;     // max |Im(v^H A_n^H B_k v)|
        int symbol_draws = 0;
        int vector_draws = 0;

        double max_violation() const
        {
            return std::max({unit_A, unit_B, anticommute_A, anticommute_B, cross_AB, orthogonality, real_quadratic,
                             imag_cross});
        }
    };

    inline CodeValidationReport validate_code(const OstbcCode &code, int symbol_draws = 1000, int vector_draws = 100,
                                              std::uint64_t seed = 0x5eed)
    {
        CodeValidationReport rep;
        rep.symbol_draws = symbol_draws;
        rep.vector_draws = vector_draws;
        const int ns = code.n_s(), nt = code.n_t();
        const CMat I = CMat::Identity(nt, nt);

        for (int n = 0; n < ns; ++n)
        {
            rep.unit_A = std::max(rep.unit_A, max_abs(code.A(n).adjoint() * code.A(n) - I));
            rep.unit_B = std::max(rep.unit_B, max_abs(code.B(n).adjoint() * code.B(n) - I));
            for (int k = 0; k < ns; ++k)
            {
                rep.cross_AB = std::max(rep.cross_AB,
                                        max_abs(code.A(n).adjoint() * code.B(k) - code.B(k).adjoint() * code.A(n)));
                if (k == n)
                    continue;
                rep.anticommute_A = std::max(
                    rep.anticommute_A, max_abs(code.A(n).adjoint() * code.A(k) + code.A(k).adjoint() * code.A(n)));
                rep.anticommute_B = std::max(
                    rep.anticommute_B, max_abs(code.B(n).adjoint() * code.B(k) + code.B(k).adjoint() * code.B(n)));
            }
        }

        RandomStream rng(seed);
        for (int t = 0; t < symbol_draws; ++t)
        {
            CVec s = rng.complex_gaussian_vector(ns);
            CMat X = encode(code, s);
            rep.orthogonality = std::max(rep.orthogonality, max_abs(X.adjoint() * X - s.squaredNorm() * I));
        }
        for (int t = 0; t < vector_draws; ++t)
        {
            CVec v = rng.complex_gaussian_vector(nt);
            const double v2 = v.squaredNorm();
            for (int n = 0; n < ns; ++n)
            {
                CVec an = code.A(n) * v;
                for (int k = 0; k < ns; ++k)
                {
                    const cd aa = an.dot(code.A(k) * v); // v^H A_n^H A_k v
                    const cd ab = an.dot(code.B(k) * v); // v^H A_n^H B_k v
                    rep.real_quadratic = std::max(rep.real_quadratic, std::abs(aa.real() - (n == k ? v2 : 0.0)));
                    rep.imag_cross = std::max(rep.imag_cross, std::abs(ab.imag()));
                }
            }
        }
        return rep;
    }

    // ---------------------------------------------------------------------
    // Text export: one block per basis matrix, rows of "re,im" pairs.
    // ---------------------------------------------------------------------

    inline void write_matrix(std::ostream &os, const CMat &M)
    {
        const auto flags = os.flags();
        const auto prec = os.precision();
        os << std::setprecision(17);
        for (Eigen::Index i = 0; i < M.rows(); ++i)
        {
            for (Eigen::Index j = 0; j < M.cols(); ++j)
                os << (j ? " " : "") << M(i, j).real() << ',' << M(i, j).imag();
            os << '\n';
        }
        os.flags(flags);
        os.precision(prec);
    }

    inline void write_code(std::ostream &os, const OstbcCode &code)
    {
        os << "code " << code.name() << " n_t=" << code.n_t() << " tau_d=" << code.tau_d() << " n_s=" << code.n_s()
           << '\n';
        for (int n = 0; n < code.n_s(); ++n)
        {
            os << "A " << n + 1 << '\n';
            write_matrix(os, code.A(n));
            os << "B " << n + 1 << '\n';
            write_matrix(os, code.B(n));
        }
    }
}

#endif
