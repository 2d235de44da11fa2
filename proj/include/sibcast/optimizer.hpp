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

#ifndef SIBCAST_OPTIMIZER_HPP
#define SIBCAST_OPTIMIZER_HPP

#include "channel.hpp"
#include "codes.hpp"
#include "link.hpp"
#include "rng.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace sibcast
{
    // Energy spent in one coherence interval:
    //   tau_p rho_p + data_uses rho_d = tau_c rho_bar
    // Normally data_uses = tau_c - tau_p. With pilot reuse the home cell is silent
    // during the other groups' pilots, so data_uses = tau_c - p tau_p.
    struct EnergyBudget
    {
        // Channel uses may be fractional when a block of uses is spread over
        // several coherence intervals.
        double tau_c = 256.0;
        double tau_p = 1.0;
        double data_uses = 255.0;
        double rho_bar = 1.0;

        static EnergyBudget single_cell(double tau_c, double tau_p, double rho_bar = 1.0)
        {
            return {tau_c, tau_p, tau_c - tau_p, rho_bar};
        }

        double total() const { return tau_c * rho_bar; }
        double max_pilot_power() const { return total() / tau_p; }
        double data_power(double rho_p) const { return (total() - tau_p * rho_p) / data_uses; }
        double pilot_power(double rho_d) const { return (total() - data_uses * rho_d) / tau_p; }
        bool feasible(double rho_p) const { return rho_p > 0.0 && data_power(rho_p) > 0.0; }

        void check() const
        {
            if (tau_p < 1.0 || data_uses < 1.0 || tau_p + data_uses > tau_c * (1.0 + 1e-12))
                throw std::invalid_argument("EnergyBudget: need tau_p >= 1, data_uses >= 1 and tau_p + data_uses <= tau_c");
            if (!(rho_bar > 0.0))
                throw std::invalid_argument("EnergyBudget: nominal power must be positive");
        }
    };

    // beta_eps with P(beta < beta_eps) = eps for a uniformly placed user.
    inline double beta_percentile(const UserGeometry &geometry, double eps, int draws = 1000000,
                                  std::uint64_t seed = 0x5eed)
    {
        geometry.check();
        if (!(eps > 0.0 && eps < 1.0))
            throw std::invalid_argument("beta_percentile: eps must lie in (0, 1)");
        switch (geometry.shape)
        {
        case CellShape::Edge:
            return geometry.beta_at(1.0);
        case CellShape::Disk:
        {
            // P(d > d*) = (1 - d*^2) / (1 - r0^2) for area-uniform placement
            const double r0 = geometry.exclusion_radius;
            return geometry.beta_at(std::sqrt(1.0 - eps * (1.0 - r0 * r0)));
        }
        case CellShape::Hexagon:
        {
            RandomStream rng(seed);
            std::vector<double> d(draws);
            for (auto &x : d)
                x = place_user(geometry, rng).distance;
            // small beta <=> large distance
            const auto k = static_cast<std::size_t>(std::ceil((1.0 - eps) * draws)) - 1;
            std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), d.end());
            return geometry.beta_at(d[k]);
        }
        }
        throw std::invalid_argument("beta_percentile: unknown cell shape");
    }

    // epsilon-quantile of ||h_hat||^2 / (beta + C_e) for an n_t-dimensional
    // i.i.d. estimate: a Gamma(n_t, 1) variable (chi^2(2 n_t) / 2).
    inline double norm_quantile(int n_t, double eps)
    {
        return boost::math::gamma_p_inv(static_cast<double>(n_t), eps);
    }

    struct PilotPowerChoice
    {
        double rho_p = 1.0;
        double rho_d = 1.0;
        double objective = 0.0; // predicted outage rate at beta_eps
    };

    struct OptimizerTrace
    {
        std::vector<double> rho_p;
        std::vector<double> objective;
    };

    // Outage rate predicted by the base station's simplified model at (beta, rho_p).
    inline double heuristic_outage_rate(const OstbcCode &code, const EnergyBudget &budget, double beta, double eps,
                                        double rho_p)
    {
        if (!budget.feasible(rho_p))
            return 0.0;
        const double rho_d = budget.data_power(rho_p);
        const int nt = code.n_t();
        const double ce = nt / (rho_p * budget.tau_p);
        const double h2 = (beta + ce) * norm_quantile(nt, eps);
        const double snr = snr_square(h2, beta, nt, code.tau_d(), budget.tau_p, rho_p, rho_d, code.symbol_energy());
        return (budget.data_uses / budget.tau_c) * code.rate() * std::log2(1.0 + snr);
    }

    namespace detail
    {
        // Golden-section maximization of f on [a, b].
        inline double golden_max(const std::function<double(double)> &f, double a, double b, double rel_tol)
        {
            const double g = 0.5 * (std::sqrt(5.0) - 1.0);
            double c = b - g * (b - a), d = a + g * (b - a);
            double fc = f(c), fd = f(d);
            while (std::abs(b - a) > rel_tol * std::max(1.0, std::abs(0.5 * (a + b))))
            {
                if (fc >= fd)
                {
                    b = d;
                    d = c;
                    fd = fc;
                    c = b - g * (b - a);
                    fc = f(c);
                }
                else
                {
                    a = c;
                    c = d;
                    fc = fd;
                    d = a + g * (b - a);
                    fd = f(d);
                }
            }
            return 0.5 * (a + b);
        }
    }

    // Maximizes heuristic_outage_rate over log10(rho_p) in [-2, 4] (clipped to
    // the budget), with golden-section runs on the full range and on three
    // equal sub-brackets; the best end point wins.
    inline PilotPowerChoice optimize_pilot_power(const OstbcCode &code, const EnergyBudget &budget, double eps,
                                                 double beta_eps, OptimizerTrace *trace = nullptr)
    {
        budget.check();
        if (!(beta_eps > 0.0))
            throw std::invalid_argument("optimize_pilot_power: beta_eps must be positive");
        const double lo = -2.0;
        const double hi = std::min(4.0, std::log10(budget.max_pilot_power()) - 1e-9);
        if (!(hi > lo))
            throw std::invalid_argument("optimize_pilot_power: infeasible energy budget");

        auto f = [&](double x)
        {
            const double rp = std::pow(10.0, x);
            const double v = heuristic_outage_rate(code, budget, beta_eps, eps, rp);
            if (trace)
            {
                trace->rho_p.push_back(rp);
                trace->objective.push_back(v);
            }
            return v;
        };

        double best_x = detail::golden_max(f, lo, hi, 1e-4);
        double best_v = f(best_x);
        const double w = (hi - lo) / 3.0;
        for (int s = 0; s < 3; ++s)
        {
            const double x = detail::golden_max(f, lo + s * w, lo + (s + 1) * w, 1e-4);
            const double v = f(x);
            if (v > best_v)
            {
                best_v = v;
                best_x = x;
            }
        }
        PilotPowerChoice c;
        c.rho_p = std::pow(10.0, best_x);
        c.rho_d = budget.data_power(c.rho_p);
        c.objective = best_v;
        return c;
    }

    // rho_p = rho_d = rho_bar scaled so the budget holds.
    inline PilotPowerChoice baseline_pilot_power(const EnergyBudget &budget)
    {
        budget.check();
        const double rho = budget.total() / (budget.tau_p + budget.data_uses);
        return {rho, rho, 0.0};
    }
}

#endif
