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

#ifndef SIBCAST_CHANNEL_HPP
#define SIBCAST_CHANNEL_HPP

#include "linalg.hpp"
#include "rng.hpp"

#include <cmath>
#include <stdexcept>

namespace sibcast
{
    enum class CorrelationKind
    {
        Iid,
        Exponential
    };

    // Second-order statistics of the physical channel g in C^M.
    struct CovarianceSpec
    {
        int M = 1;
        double beta = 1.0;
        CorrelationKind kind = CorrelationKind::Iid;
        double r_abs = 0.0;
        double r_arg = 0.0;

        static CovarianceSpec iid(int M, double beta) { return {M, beta, CorrelationKind::Iid, 0.0, 0.0}; }
        static CovarianceSpec exponential(int M, double beta, double r_abs, double r_arg)
        {
            return {M, beta, CorrelationKind::Exponential, r_abs, r_arg};
        }

        bool is_iid() const { return kind == CorrelationKind::Iid || r_abs == 0.0; }
        cd r() const { return std::polar(r_abs, r_arg); }

        void check() const
        {
            if (M < 1)
                throw std::invalid_argument("CovarianceSpec: M must be positive");
            if (beta < 0.0)
                throw std::invalid_argument("CovarianceSpec: beta must be non-negative");
            if (kind == CorrelationKind::Exponential && !(r_abs >= 0.0 && r_abs <= 1.0))
                throw std::invalid_argument("CovarianceSpec: |r| must lie in [0, 1]");
        }
    };

    // C_g(i,j) = beta |r|^{|j-i|} exp(i arg(r) (j-i))
    inline CMat exp_covariance(const CovarianceSpec &spec)
    {
        spec.check();
        if (spec.is_iid())
            return spec.beta * CMat::Identity(spec.M, spec.M);
        CMat C(spec.M, spec.M);
        for (int i = 0; i < spec.M; ++i)
            for (int j = 0; j < spec.M; ++j)
            {
                const int d = j - i;
                C(i, j) = spec.beta * std::pow(spec.r_abs, std::abs(d)) * std::polar(1.0, spec.r_arg * d);
            }
        return C;
    }

    // C_g * X without forming C_g. The exponential model is Toeplitz with
    // geometric off-diagonals, so each column is two first-order recursions.
    inline CMat apply_covariance(const CovarianceSpec &spec, const CMat &X)
    {
        spec.check();
        if (X.rows() != spec.M)
            throw std::invalid_argument("apply_covariance: dimension mismatch");
        if (spec.is_iid())
            return spec.beta * X;
        const cd r = spec.r();
        const cd rc = std::conj(r);
        const int M = spec.M;
        CMat out(M, X.cols());
        for (Eigen::Index c = 0; c < X.cols(); ++c)
        {
            // upper(i) = sum_{j>=i} r^{j-i} x_j
            CVec upper(M);
            upper(M - 1) = X(M - 1, c);
            for (int i = M - 2; i >= 0; --i)
                upper(i) = X(i, c) + r * upper(i + 1);
            // lower(i) = sum_{j<i} conj(r)^{i-j} x_j
            cd lower = 0.0;
            for (int i = 0; i < M; ++i)
            {
                if (i > 0)
                    lower = rc * (lower + X(i - 1, c));
                out(i, c) = spec.beta * (upper(i) + lower);
            }
        }
        return out;
    }

    // g = F z with F F^H = C_g, z i.i.d. CN(0, 1).
    inline CVec sample_channel(const CMat &C_g, RandomStream &rng)
    {
        const CMat F = psd_factor(C_g);
        return F * rng.complex_gaussian_vector(F.cols());
    }

    // Same law as sample_channel(exp_covariance(spec)) in O(M): the exponential
    // model is a first-order autoregression g_j = conj(r) g_{j-1} + innovation.
    inline CVec sample_channel(const CovarianceSpec &spec, RandomStream &rng)
    {
        spec.check();
        CVec g(spec.M);
        if (spec.is_iid())
        {
            for (int i = 0; i < spec.M; ++i)
                g(i) = rng.complex_gaussian(spec.beta);
            return g;
        }
        const cd rc = std::conj(spec.r());
        const double innovation = spec.beta * std::max(0.0, 1.0 - spec.r_abs * spec.r_abs);
        g(0) = rng.complex_gaussian(spec.beta);
        for (int i = 1; i < spec.M; ++i)
            g(i) = rc * g(i - 1) + rng.complex_gaussian(innovation);
        return g;
    }

    // ---------------------------------------------------------------------
    // Geometry and large-scale fading
    // ---------------------------------------------------------------------

    enum class CellShape
    {
        Disk,    // radius 1
        Hexagon, // flat-top, circumradius 1
        Edge     // users on the unit circle (cell edge), uniform in angle
    };

    struct UserGeometry
    {
        CellShape shape = CellShape::Disk;
        double exclusion_radius = 0.035;
        double pathloss_exponent = 3.8;
        double cell_edge_snr_db = -5.0;

        // beta at distance d: beta0 d^-alpha, with beta0 the cell-edge SNR at unit transmit power.
        double beta_at(double distance) const
        {
            return std::pow(10.0, cell_edge_snr_db / 10.0) * std::pow(distance, -pathloss_exponent);
        }

        void check() const
        {
            if (!(exclusion_radius >= 0.0 && exclusion_radius < (shape == CellShape::Hexagon ? std::sqrt(3.0) / 2 : 1.0)))
                throw std::invalid_argument("UserGeometry: exclusion radius must be smaller than the cell");
        }
    };

    inline bool inside_hexagon(double x, double y)
    {
        const double s3 = std::sqrt(3.0);
        const double ax = std::abs(x), ay = std::abs(y);
        return ay <= s3 / 2 && s3 * ax + ay <= s3;
    }

    struct UserPlacement
    {
        double x = 0.0;
        double y = 0.0;
        double distance = 1.0;
        double beta = 0.0;
        // Azimuth seen from a linear array on the x-axis, measured from broadside (+y).
        double arg_r = 0.0;
    };

    inline double broadside_angle(double dx, double dy)
    {
        return std::atan2(dx, dy);
    }

    inline UserPlacement place_at(const UserGeometry &geometry, double x, double y)
    {
        UserPlacement u;
        u.x = x;
        u.y = y;
        u.distance = std::hypot(x, y);
        u.beta = geometry.beta_at(u.distance);
        u.arg_r = broadside_angle(x, y);
        return u;
    }

    inline UserPlacement place_user(const UserGeometry &geometry, RandomStream &rng)
    {
        geometry.check();
        const double r0 = geometry.exclusion_radius;
        switch (geometry.shape)
        {
        case CellShape::Edge:
        {
            const double phi = rng.uniform(-pi, pi);
            return place_at(geometry, std::sin(phi), std::cos(phi));
        }
        case CellShape::Disk:
            for (;;)
            {
                const double x = rng.uniform(-1.0, 1.0), y = rng.uniform(-1.0, 1.0);
                const double d2 = x * x + y * y;
                if (d2 <= 1.0 && d2 >= r0 * r0)
                    return place_at(geometry, x, y);
            }
        case CellShape::Hexagon:
        {
            const double h = std::sqrt(3.0) / 2;
            for (;;)
            {
                const double x = rng.uniform(-1.0, 1.0), y = rng.uniform(-h, h);
                if (inside_hexagon(x, y) && x * x + y * y >= r0 * r0)
                    return place_at(geometry, x, y);
            }
        }
        }
        throw std::invalid_argument("place_user: unknown cell shape");
    }
}

#endif
