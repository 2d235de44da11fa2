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

#ifndef SIBCAST_EXPERIMENTS_HPP
#define SIBCAST_EXPERIMENTS_HPP

#include "channel.hpp"
#include "codes.hpp"
#include "drm.hpp"
#include "link.hpp"
#include "multicell.hpp"
#include "optimizer.hpp"
#include "outage.hpp"
#include "parallel.hpp"
#include "rng.hpp"

#include <array>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace sibcast
{
    // Raised for anything wrong with the requested scenario (CLI exit code 2).
    class config_error : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    // ---------------------------------------------------------------------
    // CSV tables
    // ---------------------------------------------------------------------

    using CsvCell = std::variant<std::string, long long, double>;

    inline std::string format_cell(const CsvCell &c)
    {
        if (const auto *s = std::get_if<std::string>(&c))
            return *s;
        if (const auto *i = std::get_if<long long>(&c))
            return std::to_string(*i);
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.8e", std::get<double>(c));
        return buf;
    }

    struct CsvTable
    {
        std::string name; // file stem
        std::vector<std::string> columns;
        std::vector<std::vector<CsvCell>> rows;

        CsvTable() = default;
        CsvTable(std::string n, std::vector<std::string> c) : name(std::move(n)), columns(std::move(c)) {}

        void add(std::vector<CsvCell> row)
        {
            if (row.size() != columns.size())
                throw std::logic_error("CsvTable: row width does not match header of " + name);
            rows.push_back(std::move(row));
        }

        std::size_t column(std::string_view c) const
        {
            for (std::size_t i = 0; i < columns.size(); ++i)
                if (columns[i] == c)
                    return i;
            throw std::out_of_range("CsvTable: no column " + std::string(c));
        }

        void write(std::ostream &os) const
        {
            for (std::size_t i = 0; i < columns.size(); ++i)
                os << (i ? "," : "") << columns[i];
            os << '\n';
            for (const auto &r : rows)
            {
                for (std::size_t i = 0; i < r.size(); ++i)
                    os << (i ? "," : "") << format_cell(r[i]);
                os << '\n';
            }
        }

        std::string str() const
        {
            std::ostringstream os;
            write(os);
            return os.str();
        }
    };

    using ResultSet = std::vector<CsvTable>;

    inline void write_results(const ResultSet &results, const std::filesystem::path &dir)
    {
        std::filesystem::create_directories(dir);
        for (const auto &t : results)
        {
            std::ofstream f(dir / (t.name + ".csv"), std::ios::binary);
            if (!f)
                throw std::runtime_error("cannot write " + (dir / (t.name + ".csv")).string());
            t.write(f);
        }
    }

    // ---------------------------------------------------------------------
    // Scenario configuration
    // ---------------------------------------------------------------------

    struct ScenarioConfig
    {
        std::string figure = "fig4a";
        std::vector<int> M{120};
        std::vector<CodeId> codes{all_code_ids.begin(), all_code_ids.end()};
        double r_abs = 0.0;
        DrmKind drm = DrmKind::Meng;
        double eps = 0.01;
        int tau_c = 256;
        UserGeometry geometry{};
        std::vector<int> L{1};
        std::vector<int> N_b{};
        std::vector<int> reuse{1, 3, 4};
        std::size_t trials = 100000;
        std::uint64_t seed = 1;
        bool optimize_pilots = true;
        int drm_realizations = 10;
        int bootstrap_resamples = 200;
        int workers = 0; // 0: SIBCAST_WORKERS or hardware concurrency

        void validate() const;
    };

    struct FigureInfo
    {
        std::string id;
        std::string description;
        std::string parameters;
        std::string runtime;
    };

    inline const std::vector<FigureInfo> &figure_table()
    {
        static const std::vector<FigureInfo> t{
            {"fig2", "SNR CDF for the meng, dft and rand DRMs (best/worst of 10 rand draws)",
             "M=24:C2 and M=120:C8, |r|=0.9, cell-edge users, 2e5 trials", "~2 min"},
            {"fig3", "SNR CDF and outage rate with optimized vs equal pilot power",
             "C2 and C8, i.i.d., M=120, disk users, 2e5 trials", "~30 s"},
            {"fig4a", "outage rate vs M for i.i.d. fading (OSTBC, square and general bounds)",
             "M=24..120 step 24, all codes, disk users, 1e5 trials", "~3 min"},
            {"fig4b", "outage rate vs M for correlated fading with the meng DRM",
             "M=24..120 step 24, all codes, |r|=0.9, disk users, 1e5 trials", "~15 min"},
            {"fig5", "outage rate when coding over L coherence intervals", "L=1..64, all codes, i.i.d., 1e5 trials",
             "~10 min"},
            {"fig6", "minimum number of coherence intervals for an N_b-bit message",
             "N_b=25..2000 step 25, L<=64, all codes, i.i.d., 1e5 trials", "~10 min"},
            {"fig8", "total bits over 256 channel uses split across L coherence intervals",
             "L=1..32, all codes, i.i.d., 1e5 trials", "~15 min"},
            {"fig9", "multi-cell outage rate for pilot reuse 1, 3, 4 and a hexagonal single cell",
             "C1,C2,C4,C8, M=120, |r|=0.9, 19 cells, 1e5 trials", "~20 min"},
        };
        return t;
    }

    inline const FigureInfo &figure_info(std::string_view id)
    {
        for (const auto &f : figure_table())
            if (f.id == id)
                return f;
        throw config_error("unknown figure '" + std::string(id) + "' (see `sim list`)");
    }

    inline std::vector<int> int_range(int first, int last, int step = 1)
    {
        std::vector<int> v;
        for (int x = first; x <= last; x += step)
            v.push_back(x);
        return v;
    }

    inline ScenarioConfig default_config(std::string_view figure)
    {
        figure_info(figure);
        ScenarioConfig c;
        c.figure = std::string(figure);
        if (figure == "fig2")
        {
            c.M = {24, 120};
            c.codes = {CodeId::C2, CodeId::C8};
            c.r_abs = 0.9;
            c.geometry.shape = CellShape::Edge;
            c.trials = 200000;
        }
        else if (figure == "fig3")
        {
            c.M = {120};
            c.codes = {CodeId::C2, CodeId::C8};
            c.trials = 200000;
        }
        else if (figure == "fig4a")
        {
            c.M = int_range(24, 120, 24);
        }
        else if (figure == "fig4b")
        {
            c.M = int_range(24, 120, 24);
            c.r_abs = 0.9;
        }
        else if (figure == "fig5")
        {
            c.L = int_range(1, 64);
        }
        else if (figure == "fig6")
        {
            c.L = int_range(1, 64);
            c.N_b = int_range(25, 2000, 25);
        }
        else if (figure == "fig8")
        {
            c.L = int_range(1, 32);
        }
        else if (figure == "fig9")
        {
            c.codes = {CodeId::C1, CodeId::C2, CodeId::C4, CodeId::C8};
            c.r_abs = 0.9;
            c.geometry.shape = CellShape::Hexagon;
        }
        return c;
    }

    namespace detail
    {
        inline std::string trim(std::string_view s)
        {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string_view::npos)
                return {};
            const auto e = s.find_last_not_of(" \t\r");
            return std::string(s.substr(b, e - b + 1));
        }

        inline std::vector<std::string> split(std::string_view s, char sep)
        {
            std::vector<std::string> out;
            std::size_t start = 0;
            for (;;)
            {
                const auto p = s.find(sep, start);
                out.push_back(trim(s.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start)));
                if (p == std::string_view::npos)
                    break;
                start = p + 1;
            }
            return out;
        }

        template <class T>
        T parse_number(const std::string &key, const std::string &v)
        {
            std::istringstream is(v);
            T x{};
            is >> x;
            if (is.fail() || !is.eof())
                throw config_error("config: '" + key + "' expects a number, got '" + v + "'");
            return x;
        }

        // "1,2,5" or "first:last[:step]" or a mix separated by commas
        inline std::vector<int> parse_int_list(const std::string &key, const std::string &v)
        {
            std::vector<int> out;
            for (const auto &item : split(v, ','))
            {
                if (item.empty())
                    throw config_error("config: empty entry in '" + key + "'");
                const auto parts = split(item, ':');
                if (parts.size() == 1)
                    out.push_back(parse_number<int>(key, parts[0]));
                else if (parts.size() <= 3)
                {
                    const int a = parse_number<int>(key, parts[0]), b = parse_number<int>(key, parts[1]);
                    const int s = parts.size() == 3 ? parse_number<int>(key, parts[2]) : 1;
                    if (s <= 0 || b < a)
                        throw config_error("config: bad range '" + item + "' in '" + key + "'");
                    for (int x = a; x <= b; x += s)
                        out.push_back(x);
                }
                else
                    throw config_error("config: bad range '" + item + "' in '" + key + "'");
            }
            return out;
        }

        inline bool parse_bool(const std::string &key, const std::string &v)
        {
            if (v == "on" || v == "true" || v == "1" || v == "yes")
                return true;
            if (v == "off" || v == "false" || v == "0" || v == "no")
                return false;
            throw config_error("config: '" + key + "' expects on|off, got '" + v + "'");
        }
    }

    inline void set_config_value(ScenarioConfig &c, const std::string &key, const std::string &v)
    {
        using namespace detail;
        if (key == "figure")
        {
            figure_info(v);
            c.figure = v;
        }
        else if (key == "M")
            c.M = parse_int_list(key, v);
        else if (key == "codes")
        {
            c.codes.clear();
            for (const auto &s : split(v, ','))
            {
                const auto id = parse_code_id(s);
                if (!id)
                    throw config_error("config: unknown code '" + s + "'");
                c.codes.push_back(*id);
            }
        }
        else if (key == "r_abs")
            c.r_abs = parse_number<double>(key, v);
        else if (key == "drm")
        {
            const auto k = parse_drm_kind(v);
            if (!k)
                throw config_error("config: unknown DRM '" + v + "' (meng|rand|dft)");
            c.drm = *k;
        }
        else if (key == "eps")
            c.eps = parse_number<double>(key, v);
        else if (key == "tau_c")
            c.tau_c = parse_number<int>(key, v);
        else if (key == "cell_edge_snr_db")
            c.geometry.cell_edge_snr_db = parse_number<double>(key, v);
        else if (key == "exclusion_radius")
            c.geometry.exclusion_radius = parse_number<double>(key, v);
        else if (key == "pathloss_exponent")
            c.geometry.pathloss_exponent = parse_number<double>(key, v);
        else if (key == "cell_shape")
        {
            if (v == "disk")
                c.geometry.shape = CellShape::Disk;
            else if (v == "hexagon")
                c.geometry.shape = CellShape::Hexagon;
            else if (v == "edge")
                c.geometry.shape = CellShape::Edge;
            else
                throw config_error("config: unknown cell shape '" + v + "' (disk|hexagon|edge)");
        }
        else if (key == "L")
            c.L = parse_int_list(key, v);
        else if (key == "N_b")
            c.N_b = parse_int_list(key, v);
        else if (key == "reuse")
            c.reuse = parse_int_list(key, v);
        else if (key == "trials")
        {
            const auto t = parse_number<long long>(key, v);
            if (t < 0)
                throw config_error("config: trials must be positive");
            c.trials = static_cast<std::size_t>(t);
        }
        else if (key == "seed")
            c.seed = parse_number<std::uint64_t>(key, v);
        else if (key == "optimize_pilots")
            c.optimize_pilots = parse_bool(key, v);
        else if (key == "drm_realizations")
            c.drm_realizations = parse_number<int>(key, v);
        else if (key == "bootstrap_resamples")
            c.bootstrap_resamples = parse_number<int>(key, v);
        else if (key == "workers")
            c.workers = parse_number<int>(key, v);
        else
            throw config_error("config: unknown key '" + key + "'");
    }

    // Flat `key = value` lines; `#` starts a comment.
    inline void apply_config_text(ScenarioConfig &c, std::string_view text)
    {
        std::istringstream is{std::string(text)};
        std::string line;
        int lineno = 0;
        while (std::getline(is, line))
        {
            ++lineno;
            if (const auto h = line.find('#'); h != std::string::npos)
                line.erase(h);
            const auto t = detail::trim(line);
            if (t.empty())
                continue;
            const auto eq = t.find('=');
            if (eq == std::string::npos)
                throw config_error("config line " + std::to_string(lineno) + ": expected key = value");
            const auto key = detail::trim(std::string_view(t).substr(0, eq));
            const auto val = detail::trim(std::string_view(t).substr(eq + 1));
            if (key.empty() || val.empty())
                throw config_error("config line " + std::to_string(lineno) + ": empty key or value");
            set_config_value(c, key, val);
        }
    }

    inline void ScenarioConfig::validate() const
    {
        figure_info(figure);
        if (trials == 0)
            throw config_error("trials must be positive");
        if (!(eps > 0.0 && eps < 1.0))
            throw config_error("eps must lie in (0, 1)");
        if (trials < min_outage_samples(eps))
            throw config_error("trials must be at least 100/eps = " + std::to_string(min_outage_samples(eps)));
        if (codes.empty() || M.empty())
            throw config_error("codes and M must be non-empty");
        if (!(r_abs >= 0.0 && r_abs <= 1.0))
            throw config_error("r_abs must lie in [0, 1]");
        if (tau_c < 2)
            throw config_error("tau_c must be at least 2");
        for (int m : M)
            if (m < 1)
                throw config_error("M must be positive");
        for (int l : L)
            if (l < 1)
                throw config_error("L entries must be positive");
        for (int p : reuse)
            if (p != 1 && p != 3 && p != 4)
                throw config_error("reuse entries must be 1, 3 or 4");
        if (drm_realizations < 1)
            throw config_error("drm_realizations must be positive");
        if (bootstrap_resamples < 2)
            throw config_error("bootstrap_resamples must be at least 2");
        for (auto id : codes)
        {
            const auto d = code_dimensions(id);
            if (d.tau_d + d.n_t > tau_c)
                throw config_error("code " + to_string(id) + " does not fit in tau_c");
        }
        if (figure == "fig2" && M.size() != codes.size())
            throw config_error("fig2 pairs M and codes entry by entry; give equally many");
        try
        {
            geometry.check();
        }
        catch (const std::invalid_argument &e)
        {
            throw config_error(e.what());
        }
    }

    // ---------------------------------------------------------------------
    // Shared simulation pieces
    // ---------------------------------------------------------------------

    namespace detail
    {
        inline std::uint64_t tag(const std::string &label) { return stream_tag(label); }

        inline Drm make_drm(DrmKind kind, int M, int n_t, std::uint64_t seed, DftIndexing dft = DftIndexing::Strict)
        {
            try
            {
                switch (kind)
                {
                case DrmKind::Meng:
                    return drm_meng(M, n_t);
                case DrmKind::Random:
                    return drm_rand(M, n_t, seed);
                case DrmKind::Dft:
                    return drm_dft(M, n_t, dft);
                }
            }
            catch (const std::invalid_argument &e)
            {
                throw config_error(e.what());
            }
            throw config_error("unknown DRM");
        }

        // Probability levels reported for CDF figures.
        inline std::vector<double> cdf_levels()
        {
            std::vector<double> p;
            for (double dec : {1e-4, 1e-3, 1e-2, 1e-1})
                for (double m : {1.0, 2.0, 5.0})
                    p.push_back(m * dec);
            for (int i = 1; i <= 9; ++i)
                if (i != 1 && i != 2 && i != 5)
                    p.push_back(0.1 * i);
            p.push_back(0.95);
            p.push_back(0.99);
            std::sort(p.begin(), p.end());
            return p;
        }

        inline double to_db(double x) { return 10.0 * std::log10(std::max(x, 1e-300)); }
    }

    // Pilot/data powers for one code under the configured policy.
    struct PilotPlan
    {
        int tau_p = 1;       // pilot uses carrying the home pilot
        double rho_p = 1.0;
        double rho_d = 1.0;
        double prelog = 1.0; // data_uses / tau_c
        bool optimized = false;
    };

    inline PilotPlan plan_pilots(const OstbcCode &code, const EnergyBudget &budget, double eps, double beta_eps,
                                 bool optimize)
    {
        PilotPlan p;
        p.tau_p = static_cast<int>(budget.tau_p);
        const auto c = optimize ? optimize_pilot_power(code, budget, eps, beta_eps) : baseline_pilot_power(budget);
        p.rho_p = c.rho_p;
        p.rho_d = c.rho_d;
        p.prelog = budget.data_uses / budget.tau_c;
        p.optimized = optimize;
        return p;
    }

    // A single-cell link with a fixed code, DRM and pilot plan.
    struct SingleCellLink
    {
        const OstbcCode *code = nullptr;
        CMat phi;
        UserGeometry geometry;
        double r_abs = 0.0;
        PilotPlan plan;
        PilotConfig pilot;
        CMat C_e;

        SingleCellLink(const OstbcCode &c, CMat phi_, const UserGeometry &g, double r, const PilotPlan &p)
            : code(&c), phi(std::move(phi_)), geometry(g), r_abs(r), plan(p)
        {
            pilot = make_pilot_config(c.n_t(), p.tau_p, p.rho_p);
            C_e = ls_error_covariance(c.n_t(), p.tau_p, p.rho_p);
        }

        int M() const { return static_cast<int>(phi.cols()); }

        // Large-scale state of one user: held fixed across that user's coherence intervals.
        struct User
        {
            UserPlacement where;
            CMat C_h;
            CMat F; // F F^H = C_h
        };

        User draw_user(RandomStream &rng) const
        {
            User u;
            u.where = place_user(geometry, rng);
            const auto spec = r_abs > 0.0 ? CovarianceSpec::exponential(M(), u.where.beta, r_abs, u.where.arg_r)
                                          : CovarianceSpec::iid(M(), u.where.beta);
            u.C_h = effective_covariance(phi, spec);
            u.F = psd_factor(u.C_h);
            return u;
        }

        // One coherence interval: fresh small-scale fading, pilot phase, LS estimate.
        struct Interval
        {
            CVec h;
            CVec h_hat;
        };

        Interval draw_interval(const User &u, RandomStream &rng) const
        {
            Interval iv;
            iv.h = u.F * rng.complex_gaussian_vector(u.F.cols());
            const CVec y_p = std::sqrt(pilot.rho_p) * pilot.X_p * iv.h + rng.complex_gaussian_vector(pilot.tau_p);
            iv.h_hat = ls_estimate(y_p, pilot.X_p, pilot.rho_p);
            return iv;
        }

        double snr_ostbc(const User &u, const Interval &iv) const
        {
            return symbol_snr(*code, u.C_h, C_e, iv.h_hat, plan.rho_d).snr_ostbc;
        }

        double snr_square(const User &u, const Interval &iv) const
        {
            return sibcast::snr_square(iv.h_hat.squaredNorm(), u.where.beta, code->n_t(), code->tau_d(), plan.tau_p,
                                       plan.rho_p, plan.rho_d, code->symbol_energy());
        }

        double snr_general(const User &u, const Interval &iv) const
        {
            const CVec hm = mmse_estimate(u.C_h, C_e, iv.h_hat);
            return sibcast::snr_general(hm.squaredNorm(), u.where.beta, code->n_t(), plan.tau_p, plan.rho_p,
                                        plan.rho_d);
        }

        double rate(double snr) const { return code->rate() * std::log2(1.0 + snr); }
    };

    namespace detail
    {
        inline double beta_eps_for(const ScenarioConfig &cfg, const UserGeometry &g)
        {
            return beta_percentile(g, cfg.eps, 1000000, derive_seed(cfg.seed, tag("beta_percentile"), 0));
        }

        inline void add_cdf_rows(CsvTable &t, const std::vector<CsvCell> &prefix, std::vector<double> snr,
                                 const ScenarioConfig &cfg, std::uint64_t boot_seed)
        {
            std::sort(snr.begin(), snr.end());
            for (double p : cdf_levels())
            {
                if (p * static_cast<double>(snr.size()) < 1.0)
                    continue;
                const double q = snr[quantile_index(snr.size(), p)];
                RandomStream rng(derive_seed(boot_seed, tag("cdf"), static_cast<std::uint64_t>(p * 1e6)));
                const std::size_t k = quantile_index(snr.size(), p) + 1;
                std::vector<double> est(cfg.bootstrap_resamples);
                for (auto &x : est)
                    x = to_db(bootstrap_order_statistic(snr, k, rng));
                auto row = prefix;
                row.push_back(p);
                row.push_back(to_db(q));
                row.push_back(percentile_halfwidth(est));
                row.push_back(static_cast<long long>(snr.size()));
                t.add(std::move(row));
            }
        }

        inline double snr_quantile_db(std::vector<double> snr, double p) { return to_db(quantile_inplace(snr, p)); }

        inline double snr_quantile_halfwidth_db(std::vector<double> snr, double p, std::uint64_t seed, int resamples)
        {
            std::sort(snr.begin(), snr.end());
            std::vector<double> db(snr.size());
            for (std::size_t i = 0; i < snr.size(); ++i)
                db[i] = to_db(snr[i]);
            return bootstrap_halfwidth_sorted(db, p, seed, resamples);
        }
    }

    // ---------------------------------------------------------------------
    // Figures
    // ---------------------------------------------------------------------

    // DRM comparison on cell-edge users with correlated fading.
    inline ResultSet run_fig2(const ScenarioConfig &cfg)
    {
        CsvTable summary{"fig2", {"figure", "M", "code", "drm", "variant", "drm_seed", "snr_db_at_eps", "ci_halfwidth",
                                  "n_trials"}};
        CsvTable cdf{"fig2_cdf", {"figure", "M", "code", "drm", "variant", "drm_seed", "cdf", "snr_db", "ci_halfwidth",
                                  "n_trials"}};
        const double beta_eps = detail::beta_eps_for(cfg, cfg.geometry);
        for (std::size_t s = 0; s < cfg.M.size(); ++s)
        {
            const int M = cfg.M[s];
            const OstbcCode code = make_code(cfg.codes[s]);
            const auto plan = plan_pilots(code, EnergyBudget::single_cell(cfg.tau_c, code.n_t()), cfg.eps, beta_eps,
                                          cfg.optimize_pilots);
            const std::string scen = "fig2/M=" + std::to_string(M) + "/" + code.name();

            struct Candidate
            {
                Drm drm;
                std::string variant;
            };
            std::vector<Candidate> cands;
            cands.push_back({detail::make_drm(DrmKind::Meng, M, code.n_t(), 0), ""});
            cands.push_back({detail::make_drm(DrmKind::Dft, M, code.n_t(), 0, DftIndexing::Floor), ""});
            for (int j = 0; j < cfg.drm_realizations; ++j)
                cands.push_back({detail::make_drm(DrmKind::Random, M, code.n_t(),
                                                  derive_seed(cfg.seed, detail::tag(scen + "/drm_rand"), j)),
                                 "r" + std::to_string(j)});

            std::vector<std::vector<double>> samples;
            std::vector<double> p_eps;
            for (const auto &c : cands)
            {
                const SingleCellLink link(code, c.drm.phi, cfg.geometry, cfg.r_abs, plan);
                // identical user/fading streams for every DRM: paired comparison
                auto snr = run_trials<double>(
                    cfg.trials,
                    [&](std::size_t t)
                    {
                        RandomStream rng(cfg.seed, detail::tag(scen), t);
                        const auto u = link.draw_user(rng);
                        return link.snr_ostbc(u, link.draw_interval(u, rng));
                    },
                    cfg.workers);
                p_eps.push_back(detail::snr_quantile_db(snr, cfg.eps));
                samples.push_back(std::move(snr));
            }
            const std::uint64_t boot = derive_seed(cfg.seed, detail::tag(scen + "/bootstrap"), 0);
            for (std::size_t i = 0; i < cands.size(); ++i)
            {
                const auto &c = cands[i];
                const std::string variant = c.variant + (c.drm.snapped ? "snapped" : "");
                summary.add({cfg.figure, (long long)M, code.name(), to_string(c.drm.kind), variant,
                             (long long)c.drm.seed, p_eps[i],
                             detail::snr_quantile_halfwidth_db(samples[i], cfg.eps, boot + i, cfg.bootstrap_resamples),
                             (long long)cfg.trials});
            }
            // CDF curves: meng, dft, and the best and worst random draws at the eps-quantile
            std::size_t best = 2, worst = 2;
            for (std::size_t i = 2; i < cands.size(); ++i)
            {
                if (p_eps[i] > p_eps[best])
                    best = i;
                if (p_eps[i] < p_eps[worst])
                    worst = i;
            }
            const std::vector<std::pair<std::size_t, std::string>> curves{
                {0, ""}, {1, cands[1].drm.snapped ? "snapped" : ""}, {best, "best"}, {worst, "worst"}};
            for (const auto &[i, variant] : curves)
                detail::add_cdf_rows(cdf,
                                     {cfg.figure, (long long)M, code.name(), to_string(cands[i].drm.kind), variant,
                                      (long long)cands[i].drm.seed},
                                     samples[i], cfg, boot + 1000 + i);
        }
        return {summary, cdf};
    }

    // Optimized vs equal pilot power on i.i.d. channels.
    inline ResultSet run_fig3(const ScenarioConfig &cfg)
    {
        CsvTable summary{"fig3", {"figure", "M", "code", "pilot", "rho_p", "rho_d", "R_eps", "ci_halfwidth", "n_trials"}};
        CsvTable cdf{"fig3_cdf", {"figure", "M", "code", "pilot", "rho_p", "rho_d", "cdf", "snr_db", "ci_halfwidth",
                                  "n_trials"}};
        const double beta_eps = detail::beta_eps_for(cfg, cfg.geometry);
        const int M = cfg.M.front();
        for (auto id : cfg.codes)
        {
            const OstbcCode code = make_code(id);
            const auto budget = EnergyBudget::single_cell(cfg.tau_c, code.n_t());
            const Drm drm = detail::make_drm(cfg.drm, M, code.n_t(), derive_seed(cfg.seed, detail::tag("drm"), 0));
            const std::string scen = "fig3/M=" + std::to_string(M) + "/" + code.name();
            for (bool opt : {true, false})
            {
                const auto plan = plan_pilots(code, budget, cfg.eps, beta_eps, opt);
                const SingleCellLink link(code, drm.phi, cfg.geometry, cfg.r_abs, plan);
                const auto snr = run_trials<double>(
                    cfg.trials,
                    [&](std::size_t t)
                    {
                        RandomStream rng(cfg.seed, detail::tag(scen), t);
                        const auto u = link.draw_user(rng);
                        return link.snr_ostbc(u, link.draw_interval(u, rng));
                    },
                    cfg.workers);
                std::vector<double> rates(snr.size());
                for (std::size_t i = 0; i < snr.size(); ++i)
                    rates[i] = link.rate(snr[i]);
                const std::string label = opt ? "optimized" : "baseline";
                const std::uint64_t boot = derive_seed(cfg.seed, detail::tag(scen + "/" + label), 1);
                const auto o = evaluate_outage_prelog(rates, cfg.eps, plan.prelog, boot, cfg.bootstrap_resamples);
                summary.add({cfg.figure, (long long)M, code.name(), label, plan.rho_p, plan.rho_d, o.R_eps, o.halfwidth,
                             (long long)o.n_samples});
                detail::add_cdf_rows(cdf, {cfg.figure, (long long)M, code.name(), label, plan.rho_p, plan.rho_d}, snr,
                                     cfg, boot + 7);
            }
        }
        return {summary, cdf};
    }

    // Outage rate per (M, code): OSTBC bound and, for i.i.d. fading, the
    // square-code and structure-free bounds.
    inline ResultSet run_fig4(const ScenarioConfig &cfg)
    {
        CsvTable t{cfg.figure, {"figure", "M", "code", "metric", "rho_p", "rho_d", "R_eps", "ci_halfwidth", "n_trials"}};
        const double beta_eps = detail::beta_eps_for(cfg, cfg.geometry);
        const bool iid = cfg.r_abs == 0.0;
        for (int M : cfg.M)
            for (auto id : cfg.codes)
            {
                const OstbcCode code = make_code(id);
                const auto plan = plan_pilots(code, EnergyBudget::single_cell(cfg.tau_c, code.n_t()), cfg.eps, beta_eps,
                                              cfg.optimize_pilots);
                const Drm drm = detail::make_drm(cfg.drm, M, code.n_t(), derive_seed(cfg.seed, detail::tag("drm"), M));
                const SingleCellLink link(code, drm.phi, cfg.geometry, cfg.r_abs, plan);
                const std::string scen = cfg.figure + "/M=" + std::to_string(M) + "/" + code.name();
                const auto res = run_trials<std::array<double, 3>>(
                    cfg.trials,
                    [&](std::size_t i)
                    {
                        RandomStream rng(cfg.seed, detail::tag(scen), i);
                        const auto u = link.draw_user(rng);
                        const auto iv = link.draw_interval(u, rng);
                        std::array<double, 3> r{link.rate(link.snr_ostbc(u, iv)), 0.0, 0.0};
                        if (iid)
                        {
                            r[1] = link.rate(link.snr_square(u, iv));
                            r[2] = std::log2(1.0 + link.snr_general(u, iv));
                        }
                        return r;
                    },
                    cfg.workers);
                const std::vector<std::string> metrics =
                    iid ? std::vector<std::string>{"ostbc", "square", "general"} : std::vector<std::string>{"ostbc"};
                for (std::size_t m = 0; m < metrics.size(); ++m)
                {
                    std::vector<double> v(res.size());
                    for (std::size_t i = 0; i < res.size(); ++i)
                        v[i] = res[i][m];
                    const auto o = evaluate_outage_prelog(v, cfg.eps, plan.prelog,
                                                          derive_seed(cfg.seed, detail::tag(scen + "/" + metrics[m]), 1),
                                                          cfg.bootstrap_resamples);
                    t.add({cfg.figure, (long long)M, code.name(), metrics[m], plan.rho_p, plan.rho_d, o.R_eps,
                           o.halfwidth, (long long)o.n_samples});
                }
            }
        return {t};
    }

    // Outage rate when a codeword spans L independent coherence intervals of the
    // same user; every interval carries its own n_t pilots. Returns, per code,
    // the OutageResult for each entry of cfg.L.
    inline std::map<CodeId, std::vector<OutageResult>> multi_interval_rates(const ScenarioConfig &cfg)
    {
        std::map<CodeId, std::vector<OutageResult>> out;
        const double beta_eps = detail::beta_eps_for(cfg, cfg.geometry);
        const int M = cfg.M.front();
        const int L_max = *std::max_element(cfg.L.begin(), cfg.L.end());
        for (auto id : cfg.codes)
        {
            const OstbcCode code = make_code(id);
            const auto plan = plan_pilots(code, EnergyBudget::single_cell(cfg.tau_c, code.n_t()), cfg.eps, beta_eps,
                                          cfg.optimize_pilots);
            const Drm drm = detail::make_drm(cfg.drm, M, code.n_t(), derive_seed(cfg.seed, detail::tag("drm"), M));
            const SingleCellLink link(code, drm.phi, cfg.geometry, cfg.r_abs, plan);
            const std::string scen = "intervals/M=" + std::to_string(M) + "/" + code.name();
            // running means over the first L intervals, for every requested L
            const auto res = run_trials<std::vector<double>>(
                cfg.trials,
                [&](std::size_t i)
                {
                    RandomStream rng(cfg.seed, detail::tag(scen), i);
                    const auto u = link.draw_user(rng);
                    std::vector<double> prefix(L_max);
                    double acc = 0.0;
                    for (int l = 0; l < L_max; ++l)
                    {
                        acc += link.rate(link.snr_ostbc(u, link.draw_interval(u, rng)));
                        prefix[l] = acc / (l + 1);
                    }
                    std::vector<double> r;
                    r.reserve(cfg.L.size());
                    for (int L : cfg.L)
                        r.push_back(prefix[L - 1]);
                    return r;
                },
                cfg.workers);
            auto &dst = out[id];
            std::vector<double> v(res.size());
            for (std::size_t j = 0; j < cfg.L.size(); ++j)
            {
                for (std::size_t i = 0; i < res.size(); ++i)
                    v[i] = res[i][j];
                dst.push_back(evaluate_outage_prelog(v, cfg.eps, plan.prelog,
                                                     derive_seed(cfg.seed, detail::tag(scen + "/boot"), cfg.L[j]),
                                                     cfg.bootstrap_resamples));
            }
        }
        return out;
    }

    inline ResultSet run_fig5(const ScenarioConfig &cfg)
    {
        CsvTable t{"fig5", {"figure", "M", "code", "L", "R_eps", "ci_halfwidth", "n_trials"}};
        const auto rates = multi_interval_rates(cfg);
        for (auto id : cfg.codes)
            for (std::size_t j = 0; j < cfg.L.size(); ++j)
            {
                const auto &o = rates.at(id)[j];
                t.add({cfg.figure, (long long)cfg.M.front(), to_string(id), (long long)cfg.L[j], o.R_eps, o.halfwidth,
                       (long long)o.n_samples});
            }
        return {t};
    }

    // Minimum number of intervals per code and message length. Requires cfg.L = 1..L_max.
    inline ResultSet run_fig6(const ScenarioConfig &cfg)
    {
        for (std::size_t j = 0; j < cfg.L.size(); ++j)
            if (cfg.L[j] != static_cast<int>(j) + 1)
                throw config_error("fig6 needs L = 1:L_max without gaps");
        if (cfg.N_b.empty())
            throw config_error("fig6 needs a non-empty N_b list");
        CsvTable t{"fig6", {"figure", "N_b", "code", "L_min", "preferred", "R_eps_at_L_min", "ci_halfwidth", "n_trials"}};
        const auto rates = multi_interval_rates(cfg);
        // codes ordered by size so the tie-break prefers the later (larger) one
        std::vector<CodeId> order = cfg.codes;
        std::sort(order.begin(), order.end(),
                  [](CodeId a, CodeId b) { return code_dimensions(a).n_t < code_dimensions(b).n_t; });
        for (int nb : cfg.N_b)
        {
            std::vector<int> lmin;
            for (auto id : order)
            {
                std::vector<double> r;
                for (const auto &o : rates.at(id))
                    r.push_back(o.R_eps);
                lmin.push_back(min_intervals_for_message(nb, r, cfg.tau_c));
            }
            const int pref = preferred_code(lmin);
            for (std::size_t c = 0; c < order.size(); ++c)
            {
                const auto &res = rates.at(order[c]);
                const double r_at = lmin[c] > 0 ? res[lmin[c] - 1].R_eps : std::nan("");
                const double hw = lmin[c] > 0 ? res[lmin[c] - 1].halfwidth : std::nan("");
                t.add({cfg.figure, (long long)nb, to_string(order[c]), (long long)lmin[c],
                       (long long)(pref == static_cast<int>(c)), r_at, hw, (long long)cfg.trials});
            }
        }
        return {t};
    }

    // Total bits over tau_c channel uses spread across L coherence intervals.
    // Each interval gets tau_c / L uses (n_t pilots, the rest data) and the same
    // per-interval energy budget; pilot powers are re-optimized for every L.
    inline ResultSet run_fig8(const ScenarioConfig &cfg)
    {
        CsvTable t{"fig8", {"figure", "code", "L", "L_n_t", "rho_p", "rho_d", "bits", "ci_halfwidth", "n_trials"}};
        const double beta_eps = detail::beta_eps_for(cfg, cfg.geometry);
        const int M = cfg.M.front();
        for (auto id : cfg.codes)
        {
            const OstbcCode code = make_code(id);
            const int nt = code.n_t();
            const Drm drm = detail::make_drm(cfg.drm, M, nt, derive_seed(cfg.seed, detail::tag("drm"), M));
            for (int L : cfg.L)
            {
                const double per = static_cast<double>(cfg.tau_c) / L;
                if (per - nt < code.tau_d())
                    continue; // no room for a single codeword per interval
                const EnergyBudget budget{per, static_cast<double>(nt), per - nt, 1.0};
                const auto plan = plan_pilots(code, budget, cfg.eps, beta_eps, cfg.optimize_pilots);
                const SingleCellLink link(code, drm.phi, cfg.geometry, cfg.r_abs, plan);
                const std::string scen = "fig8/" + code.name() + "/L=" + std::to_string(L);
                const auto rates = run_trials<double>(
                    cfg.trials,
                    [&](std::size_t i)
                    {
                        RandomStream rng(cfg.seed, detail::tag(scen), i);
                        const auto u = link.draw_user(rng);
                        double acc = 0.0;
                        for (int l = 0; l < L; ++l)
                            acc += link.rate(link.snr_ostbc(u, link.draw_interval(u, rng)));
                        return acc / L;
                    },
                    cfg.workers);
                const auto data_uses = split_budget(cfg.tau_c, L, nt).data_uses;
                const auto o = evaluate_outage_prelog(rates, cfg.eps, 1.0,
                                                      derive_seed(cfg.seed, detail::tag(scen + "/boot"), 1),
                                                      cfg.bootstrap_resamples);
                t.add({cfg.figure, code.name(), (long long)L, (long long)(L * nt), plan.rho_p, plan.rho_d,
                       data_uses * o.C_eps, data_uses * o.halfwidth, (long long)o.n_samples});
            }
        }
        return {t};
    }

    // Multi-cell outage rates for each pilot reuse, plus the hexagonal single cell.
    inline ResultSet run_fig9(const ScenarioConfig &cfg)
    {
        CsvTable t{"fig9", {"figure", "M", "code", "setup", "contaminating", "rho_p", "rho_d", "R_eps", "ci_halfwidth",
                            "n_trials"}};
        const double beta_eps = detail::beta_eps_for(cfg, cfg.geometry);
        const int M = cfg.M.front();
        for (auto id : cfg.codes)
        {
            const OstbcCode code = make_code(id);
            const int nt = code.n_t();
            const Drm drm = detail::make_drm(cfg.drm, M, nt, derive_seed(cfg.seed, detail::tag("drm"), M));
            // single cell (reuse 0 marks "no other cells")
            std::vector<int> setups{0};
            setups.insert(setups.end(), cfg.reuse.begin(), cfg.reuse.end());
            for (int p : setups)
            {
                const int groups = std::max(p, 1);
                if (groups * nt >= cfg.tau_c)
                    throw config_error("fig9: pilots fill the coherence interval");
                const EnergyBudget budget{static_cast<double>(cfg.tau_c), static_cast<double>(nt),
                                          static_cast<double>(cfg.tau_c - groups * nt), 1.0};
                const auto plan = plan_pilots(code, budget, cfg.eps, beta_eps, cfg.optimize_pilots);
                const std::string label = p == 0 ? "single" : "reuse" + std::to_string(p);
                const std::string scen = "fig9/" + code.name() + "/" + label;
                std::vector<double> rates;
                long long contaminating = 0;
                if (p == 0)
                {
                    const SingleCellLink link(code, drm.phi, cfg.geometry, cfg.r_abs, plan);
                    rates = run_trials<double>(
                        cfg.trials,
                        [&](std::size_t i)
                        {
                            RandomStream rng(cfg.seed, detail::tag(scen), i);
                            const auto u = link.draw_user(rng);
                            return link.rate(link.snr_ostbc(u, link.draw_interval(u, rng)));
                        },
                        cfg.workers);
                }
                else
                {
                    const CellGrid grid = build_grid(p);
                    contaminating = static_cast<long long>(grid.contaminating.size());
                    const PilotConfig pilot = make_pilot_config(nt, nt, plan.rho_p);
                    rates = run_trials<double>(
                        cfg.trials,
                        [&](std::size_t i)
                        {
                            RandomStream rng(cfg.seed, detail::tag(scen), i);
                            const auto u = place_user(cfg.geometry, rng);
                            const auto specs = multicell_specs(grid, cfg.geometry, M, cfg.r_abs, u.x, u.y);
                            const auto st = multicell_statistics(grid, specs, drm.phi, nt, plan.rho_p);
                            const auto r = sample_multicell(grid, specs, drm.phi, pilot, rng);
                            return code.rate() * std::log2(1.0 + mc_symbol_snr(code, st, r.h_hat, plan.rho_d).snr_ostbc);
                        },
                        cfg.workers);
                }
                const auto o = evaluate_outage_prelog(rates, cfg.eps, plan.prelog,
                                                      derive_seed(cfg.seed, detail::tag(scen + "/boot"), 1),
                                                      cfg.bootstrap_resamples);
                t.add({cfg.figure, (long long)M, code.name(), label, contaminating, plan.rho_p, plan.rho_d, o.R_eps,
                       o.halfwidth, (long long)o.n_samples});
            }
        }
        return {t};
    }

    inline ResultSet run(const ScenarioConfig &cfg)
    {
        cfg.validate();
        if (cfg.figure == "fig2")
            return run_fig2(cfg);
        if (cfg.figure == "fig3")
            return run_fig3(cfg);
        if (cfg.figure == "fig4a" || cfg.figure == "fig4b")
            return run_fig4(cfg);
        if (cfg.figure == "fig5")
            return run_fig5(cfg);
        if (cfg.figure == "fig6")
            return run_fig6(cfg);
        if (cfg.figure == "fig8")
            return run_fig8(cfg);
        if (cfg.figure == "fig9")
            return run_fig9(cfg);
        throw config_error("unknown figure '" + cfg.figure + "'");
    }

    inline CsvTable list_figures()
    {
        CsvTable t{"figures", {"figure", "description", "parameters", "expected_runtime"}};
        for (const auto &f : figure_table())
            t.add({f.id, "\"" + f.description + "\"", "\"" + f.parameters + "\"", f.runtime});
        return t;
    }
}

#endif
