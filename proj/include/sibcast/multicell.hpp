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

#ifndef SIBCAST_MULTICELL_HPP
#define SIBCAST_MULTICELL_HPP

#include "channel.hpp"
#include "codes.hpp"
#include "drm.hpp"
#include "link.hpp"
#include "rng.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>
#include <vector>

namespace sibcast
{
    struct Cell
    {
        int q = 0; // axial coordinates
        int r = 0;
        double x = 0.0;
        double y = 0.0;
        int ring = 0;
        int pilot_group = 0;
    };

    // Home cell at index 0 followed by the first (6) and second (12) rings of
    // flat-top hexagons with unit circumradius.
    struct CellGrid
    {
        std::vector<Cell> cells;
        int reuse = 1;
        std::vector<int> contaminating; // indices into cells, excluding the home cell

        int interferers() const { return static_cast<int>(cells.size()) - 1; }
        bool is_contaminating(int k) const
        {
            return std::find(contaminating.begin(), contaminating.end(), k) != contaminating.end();
        }
        int pilot_uses(int n_t) const { return reuse * n_t; }
    };

    inline CellGrid build_grid(int reuse)
    {
        if (reuse != 1 && reuse != 3 && reuse != 4)
            throw std::invalid_argument("build_grid: pilot reuse must be 1, 3 or 4");
        CellGrid g;
        g.reuse = reuse;
        for (int ring = 0; ring <= 2; ++ring)
            for (int q = -2; q <= 2; ++q)
                for (int r = -2; r <= 2; ++r)
                {
                    const int dist = (std::abs(q) + std::abs(r) + std::abs(q + r)) / 2;
                    if (dist != ring)
                        continue;
                    Cell c;
                    c.q = q;
                    c.r = r;
                    c.ring = ring;
                    c.x = 1.5 * q;
                    c.y = std::sqrt(3.0) * (r + 0.5 * q);
                    switch (reuse)
                    {
                    case 1:
                        c.pilot_group = 0;
                        break;
                    case 3:
                        c.pilot_group = ((q - r) % 3 + 3) % 3;
                        break;
                    default:
                        c.pilot_group = 2 * (((q % 2) + 2) % 2) + ((r % 2) + 2) % 2;
                        break;
                    }
                    g.cells.push_back(c);
                }
        for (int k = 1; k < static_cast<int>(g.cells.size()); ++k)
            if (g.cells[k].pilot_group == g.cells[0].pilot_group)
                g.contaminating.push_back(k);
        return g;
    }

    // Channel statistics of one user position (in home-cell coordinates).
    struct MultiCellStatistics
    {
        CMat C_h;              // home effective channel
        CMat C_e;              // LS noise error
        std::vector<CMat> C_k; // interferer k = 1..K effective channels (index k-1)
        std::vector<bool> contaminating;
        std::vector<double> beta_k;

        CMat C_sigma() const
        {
            CMat S = CMat::Zero(C_h.rows(), C_h.cols());
            for (std::size_t k = 0; k < C_k.size(); ++k)
                if (contaminating[k])
                    S += C_k[k];
            return S;
        }

        // Same statistics with every interferer's large-scale fading scaled by s.
        MultiCellStatistics scaled_interference(double s) const
        {
            MultiCellStatistics out = *this;
            for (std::size_t k = 0; k < C_k.size(); ++k)
            {
                out.C_k[k] *= s;
                out.beta_k[k] *= s;
            }
            return out;
        }
    };

    // Every base station carries the same array orientation and DRM; the
    // correlation phase follows the user's bearing from each array.
    inline std::vector<CovarianceSpec> multicell_specs(const CellGrid &grid, const UserGeometry &geometry, int M,
                                                       double r_abs, double ux, double uy)
    {
        std::vector<CovarianceSpec> specs;
        for (const auto &c : grid.cells)
        {
            const double dx = ux - c.x, dy = uy - c.y;
            const double beta = geometry.beta_at(std::hypot(dx, dy));
            specs.push_back(r_abs > 0.0 ? CovarianceSpec::exponential(M, beta, r_abs, broadside_angle(dx, dy))
                                        : CovarianceSpec::iid(M, beta));
        }
        return specs;
    }

    inline MultiCellStatistics multicell_statistics(const CellGrid &grid, const std::vector<CovarianceSpec> &specs,
                                                    const CMat &phi, int tau_p, double rho_p)
    {
        if (specs.size() != grid.cells.size())
            throw std::invalid_argument("multicell_statistics: one covariance per cell required");
        MultiCellStatistics st;
        const int nt = static_cast<int>(phi.rows());
        st.C_h = effective_covariance(phi, specs[0]);
        st.C_e = ls_error_covariance(nt, tau_p, rho_p);
        for (std::size_t k = 1; k < specs.size(); ++k)
        {
            st.C_k.push_back(effective_covariance(phi, specs[k]));
            st.contaminating.push_back(grid.is_contaminating(static_cast<int>(k)));
            st.beta_k.push_back(specs[k].beta);
        }
        return st;
    }

    struct MultiCellRealization
    {
        CVec h;
        std::vector<CVec> h_k; // all K interferers
        CVec h_sigma;          // sum over the contaminating set
        CVec e;
        CVec h_hat;            // h + e + h_sigma
    };

    // Pilot phase with synchronous contamination: every contaminating cell
    // sends the home pilot matrix at the same power.
    inline CVec mc_estimate(const CVec &h, const CVec &h_sigma, const CMat &X_p, double rho_p, const CVec &w)
    {
        const CVec y_p = std::sqrt(rho_p) * X_p * (h + h_sigma) + w;
        return ls_estimate(y_p, X_p, rho_p);
    }

    inline MultiCellRealization sample_multicell(const CellGrid &grid, const std::vector<CovarianceSpec> &specs,
                                                 const CMat &phi, const PilotConfig &pilot, RandomStream &rng)
    {
        MultiCellRealization r;
        r.h = phi * sample_channel(specs[0], rng);
        r.h_sigma = CVec::Zero(r.h.size());
        for (std::size_t k = 1; k < specs.size(); ++k)
        {
            r.h_k.push_back(phi * sample_channel(specs[k], rng));
            if (grid.is_contaminating(static_cast<int>(k)))
                r.h_sigma += r.h_k.back();
        }
        const CVec w = rng.complex_gaussian_vector(pilot.tau_p);
        r.h_hat = mc_estimate(r.h, r.h_sigma, pilot.X_p, pilot.rho_p, w);
        r.e = r.h_hat - r.h - r.h_sigma;
        return r;
    }

    // Laws given h_hat_mc for the total error (e + h_sigma) and every interferer,
    // by Gaussian conditioning on h_hat_mc ~ CN(0, C_h + C_e + C_sigma).
    struct MultiCellLaws
    {
        ConditionalLaw error;
        std::vector<ConditionalLaw> interferers;
    };

    inline MultiCellLaws multicell_laws(const MultiCellStatistics &st, const CVec &h_hat)
    {
        const CMat Cs = st.C_sigma();
        const CMat Chat = st.C_h + st.C_e + Cs;
        const CMat Ceps = st.C_e + Cs;
        const CVec z = detail::psd_solve(Chat, h_hat);  // C_hat^{-1} h_hat
        const CMat ZE = detail::psd_solve(Chat, Ceps);  // C_hat^{-1} C_eps
        MultiCellLaws laws;
        laws.error = ConditionalLaw::general(Ceps * z, hermitian_part(Ceps - Ceps * ZE));
        for (std::size_t k = 0; k < st.C_k.size(); ++k)
        {
            if (st.contaminating[k])
            {
                const CMat Zk = detail::psd_solve(Chat, st.C_k[k]);
                laws.interferers.push_back(
                    ConditionalLaw::general(st.C_k[k] * z, hermitian_part(st.C_k[k] - st.C_k[k] * Zk)));
            }
            else
            {
                laws.interferers.push_back(ConditionalLaw::general(CVec::Zero(h_hat.size()), st.C_k[k]));
            }
        }
        return laws;
    }

    // SNR of the home user with pilot contamination and data interference from
    // all other cells (same code, same data power, codeword-synchronous).
    inline SnrBreakdown mc_symbol_snr(const OstbcCode &code, const MultiCellStatistics &st, const CVec &h_hat,
                                      double rho_d)
    {
        const auto laws = multicell_laws(st, h_hat);
        return symbol_snr(code, h_hat, rho_d, laws.error, laws.interferers);
    }
}

#endif
