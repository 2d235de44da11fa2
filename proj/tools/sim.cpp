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

// Command-line front end: runs figure experiments and dumps code/DRM data.

#include <sibcast/sibcast.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace
{
    constexpr int exit_config = 2;
    constexpr int exit_numerical = 3;

    int cmd_list()
    {
        sibcast::list_figures().write(std::cout);
        return 0;
    }

    int cmd_validate_codes(std::uint64_t seed)
    {
        bool ok = true;
        for (auto id : sibcast::all_code_ids)
        {
            const auto code = sibcast::make_code(id);
            const auto r = sibcast::validate_code(code, 1000, 100, seed);
            const bool pass = r.max_violation() < 1e-10;
            ok = ok && pass;
            std::printf("%-4s n_t=%-2d tau_d=%-3d n_s=%-2d max_violation=%.3e %s\n", code.name().c_str(), code.n_t(),
                        code.tau_d(), code.n_s(), r.max_violation(), pass ? "PASS" : "FAIL");
        }
        return ok ? 0 : 1;
    }

    int cmd_run(const std::string &figure, const std::string &config_file, const std::vector<std::string> &overrides,
                long long seed, long long trials, const std::string &out)
    {
        auto cfg = sibcast::default_config(figure);
        if (!config_file.empty())
        {
            std::ifstream f(config_file);
            if (!f)
                throw sibcast::config_error("cannot read config file " + config_file);
            std::stringstream ss;
            ss << f.rdbuf();
            sibcast::apply_config_text(cfg, ss.str());
        }
        for (const auto &kv : overrides)
            sibcast::apply_config_text(cfg, kv);
        if (seed >= 0)
            cfg.seed = static_cast<std::uint64_t>(seed);
        if (trials >= 0)
        {
            if (trials == 0)
                throw sibcast::config_error("trials must be positive");
            cfg.trials = static_cast<std::size_t>(trials);
        }
        if (cfg.figure != figure)
            throw sibcast::config_error("config file names figure " + cfg.figure + " but --figure is " + figure);
        const auto results = sibcast::run(cfg);
        sibcast::write_results(results, out);
        for (const auto &t : results)
            std::cerr << "wrote " << (std::filesystem::path(out) / (t.name + ".csv")).string() << " (" << t.rows.size()
                      << " rows)\n";
        return 0;
    }

    int cmd_optimize(const std::string &code_name, int tau_c, double eps, const std::string &shape, bool trace)
    {
        const auto id = sibcast::parse_code_id(code_name);
        if (!id)
            throw sibcast::config_error("unknown code " + code_name);
        const auto code = sibcast::make_code(*id);
        sibcast::ScenarioConfig cfg;
        sibcast::set_config_value(cfg, "cell_shape", shape);
        const double beta_eps = sibcast::beta_percentile(cfg.geometry, eps);
        sibcast::OptimizerTrace tr;
        const auto budget = sibcast::EnergyBudget::single_cell(tau_c, code.n_t());
        const auto c = sibcast::optimize_pilot_power(code, budget, eps, beta_eps, trace ? &tr : nullptr);
        std::printf("code=%s beta_eps=%.8e rho_p=%.8e rho_d=%.8e predicted_R_eps=%.8e\n", code.name().c_str(),
                    beta_eps, c.rho_p, c.rho_d, c.objective);
        if (trace)
        {
            std::printf("rho_p,objective\n");
            for (std::size_t i = 0; i < tr.rho_p.size(); ++i)
                std::printf("%.8e,%.8e\n", tr.rho_p[i], tr.objective[i]);
        }
        return 0;
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"sibcast: outage-rate simulator for CSI-free broadcast with orthogonal space-time block codes"};
    app.require_subcommand(1);

    auto *list = app.add_subcommand("list", "List the available figure experiments");

    std::uint64_t vseed = 1;
    auto *validate = app.add_subcommand("validate-codes", "Check the OSTBC identities for every code");
    validate->add_option("--seed", vseed, "Seed for the random symbol draws");

    std::string figure, config_file, out = "results";
    std::vector<std::string> overrides;
    long long seed = -1, trials = -1;
    auto *run = app.add_subcommand("run", "Run one figure experiment and write CSV files");
    run->add_option("--figure", figure, "Figure id (see `list`)")->required();
    run->add_option("--config", config_file, "Flat key = value configuration file");
    run->add_option("--set", overrides, "Override one configuration key (key=value), repeatable");
    run->add_option("--seed", seed, "Master seed");
    run->add_option("--trials", trials, "Monte Carlo trials");
    run->add_option("--out", out, "Output directory");

    std::string code_name = "C2";
    auto *export_code = app.add_subcommand("export-code", "Print the basis matrices of a code");
    export_code->add_option("--code", code_name)->required();

    int M = 24, n_t = 2;
    std::string drm_name = "meng";
    std::uint64_t drm_seed = 1;
    auto *export_drm = app.add_subcommand("export-drm", "Print a dimension-reducing matrix");
    export_drm->add_option("--kind", drm_name, "meng|rand|dft");
    export_drm->add_option("--M", M)->required();
    export_drm->add_option("--n_t", n_t)->required();
    export_drm->add_option("--seed", drm_seed, "Seed of the random DRM");

    int tau_c = 256;
    double eps = 0.01;
    std::string shape = "disk";
    bool trace = false;
    auto *optimize = app.add_subcommand("optimize", "Run the pilot-power heuristic for one code");
    optimize->add_option("--code", code_name)->required();
    optimize->add_option("--tau_c", tau_c);
    optimize->add_option("--eps", eps);
    optimize->add_option("--cell_shape", shape, "disk|hexagon|edge");
    optimize->add_flag("--trace", trace, "Print every objective evaluation");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : exit_config;
    }

    try
    {
        if (*list)
            return cmd_list();
        if (*validate)
            return cmd_validate_codes(vseed);
        if (*run)
            return cmd_run(figure, config_file, overrides, seed, trials, out);
        if (*export_code)
        {
            const auto id = sibcast::parse_code_id(code_name);
            if (!id)
                throw sibcast::config_error("unknown code " + code_name);
            sibcast::write_code(std::cout, sibcast::make_code(*id));
            return 0;
        }
        if (*export_drm)
        {
            const auto kind = sibcast::parse_drm_kind(drm_name);
            if (!kind)
                throw sibcast::config_error("unknown DRM " + drm_name);
            sibcast::Drm d;
            if (*kind == sibcast::DrmKind::Meng)
                d = sibcast::drm_meng(M, n_t);
            else if (*kind == sibcast::DrmKind::Random)
                d = sibcast::drm_rand(M, n_t, drm_seed);
            else
                d = sibcast::drm_dft(M, n_t);
            sibcast::write_drm(std::cout, d);
            return 0;
        }
        if (*optimize)
            return cmd_optimize(code_name, tau_c, eps, shape, trace);
    }
    catch (const sibcast::numerical_error &e)
    {
        std::cerr << "numerical error: " << e.what() << '\n';
        return exit_numerical;
    }
    catch (const std::invalid_argument &e)
    {
        std::cerr << "configuration error: " << e.what() << '\n';
        return exit_config;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
