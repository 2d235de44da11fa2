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

#ifndef SIBCAST_LINALG_HPP
#define SIBCAST_LINALG_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace sibcast
{
    using cd = std::complex<double>;
    using CMat = Eigen::MatrixXcd;
    using CVec = Eigen::VectorXcd;
    using RMat = Eigen::MatrixXd;
    using RVec = Eigen::VectorXd;

    inline constexpr double pi = 3.14159265358979323846;
    inline constexpr cd I_unit{0.0, 1.0};

    // Raised when a numerical routine cannot produce a meaningful result
    // (non-PSD covariance, singular system). Maps to CLI exit code 3.
    class numerical_error : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    inline double max_abs(const CMat &A)
    {
        return A.size() == 0 ? 0.0 : A.cwiseAbs().maxCoeff();
    }

    inline bool is_hermitian(const CMat &A, double tol = 1e-10)
    {
        return A.rows() == A.cols() && max_abs(A - A.adjoint()) <= tol * std::max(1.0, max_abs(A));
    }

    // Factor F with F F^H = C for a Hermitian positive semi-definite C.
    // Cholesky first; on failure falls back to an eigendecomposition with
    // small negative eigenvalues clamped to zero.
    inline CMat psd_factor(const CMat &C)
    {
        if (C.rows() != C.cols())
            throw std::invalid_argument("psd_factor: matrix is not square");
        const Eigen::Index n = C.rows();
        if (n == 0)
            return CMat(0, 0);

        const double scale = std::max(max_abs(C), 1e-300);
        if (!is_hermitian(C, 1e-9))
            throw numerical_error("psd_factor: matrix is not Hermitian");

        Eigen::LLT<CMat> llt(C);
        if (llt.info() == Eigen::Success)
        {
            CMat L = llt.matrixL();
            if (L.allFinite())
                return L;
        }

        Eigen::SelfAdjointEigenSolver<CMat> es(C);
        if (es.info() != Eigen::Success)
            throw numerical_error("psd_factor: eigendecomposition failed");
        RVec ev = es.eigenvalues();
        if (ev.minCoeff() < -1e-9 * scale * static_cast<double>(n))
            throw numerical_error("psd_factor: matrix is not positive semi-definite");
        ev = ev.cwiseMax(0.0);
        return es.eigenvectors() * ev.cwiseSqrt().asDiagonal();
    }

    // Solve (A) X = B for Hermitian positive definite A.
    inline CMat hpd_solve(const CMat &A, const CMat &B)
    {
        Eigen::LLT<CMat> llt(A);
        if (llt.info() != Eigen::Success)
            throw numerical_error("hpd_solve: matrix is not positive definite");
        return llt.solve(B);
    }

    inline CMat hermitian_part(const CMat &A)
    {
        return 0.5 * (A + A.adjoint());
    }
}

#endif
