// SPDX-License-Identifier: Apache-2.0
//
// dualpol: dual-structured precoding for dual-polarized massive MIMO downlinks
// Copyright (C) 2025 The dualpol authors
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

#include "dualpol/errors.hpp"
#include "dualpol/runner.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>

using namespace dualpol;

namespace
{
    enum Exit
    {
        ok = 0,
        config_failure = 2,
        numerical_failure = 3
    };

    int emit(const std::vector<ScenarioConfig> &configs, const std::string &out_path)
    {
        std::unique_ptr<std::ofstream> file;
        std::ostream *out = &std::cout;
        if (!out_path.empty())
        {
            file = std::make_unique<std::ofstream>(out_path, std::ios::trunc);
            if (!*file)
                throw config_error("out: cannot open '" + out_path + "' for writing");
            out = file.get();
        }
        // surface dimension errors before any output is written
        for (const auto &cfg : configs)
            check_geometry(cfg);
        write_csv_header(*out);
        for (const auto &cfg : configs)
        {
            for (const auto &row : run_config(cfg))
                write_csv_row(*out, row);
            out->flush();
        }
        if (!*out)
            throw config_error("out: write failed");
        return ok;
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"Dual-structured precoding simulator for dual-polarized massive MIMO downlinks"};
    app.require_subcommand(1);

    std::string config_path, out_path, preset_name;
    std::optional<std::uint64_t> seed;
    std::optional<arma::uword> trials;
    bool print_config = false;

    auto *run = app.add_subcommand("run", "Run a scenario config file and write CSV");
    run->add_option("--config", config_path, "Scenario config (key = value)")->required();
    run->add_option("--seed", seed, "Override the config seed");
    run->add_option("--trials", trials, "Override the number of Monte Carlo trials");
    run->add_option("--out", out_path, "CSV output path (default: config 'out' or stdout)");

    auto *pre = app.add_subcommand("preset", "Run a built-in figure preset");
    pre->add_option("name", preset_name, "Preset name (see list-presets)")->required();
    pre->add_option("--seed", seed, "Override the preset seed");
    pre->add_option("--trials", trials, "Override the number of Monte Carlo trials");
    pre->add_option("--out", out_path, "CSV output path (default: stdout)");
    pre->add_flag("--print-config", print_config, "Print the preset as config text instead of running it");

    auto *list = app.add_subcommand("list-presets", "List built-in presets");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int rc = app.exit(e);
        return rc == 0 ? ok : config_failure;
    }

    try
    {
        if (list->parsed())
        {
            for (const auto &n : preset_names())
                std::cout << n << '\n';
            return ok;
        }

        std::vector<ScenarioConfig> configs;
        if (run->parsed())
        {
            configs.push_back(load_config(config_path));
            if (out_path.empty())
                out_path = configs.front().out;
        }
        else
            configs = preset(preset_name);

        for (auto &c : configs)
        {
            if (seed)
                c.seed = *seed;
            if (trials)
                c.n_trials = *trials;
            c.validate();
        }

        if (print_config)
        {
            for (std::size_t i = 0; i < configs.size(); ++i)
                std::cout << (i ? "\n" : "") << to_config_text(configs[i]);
            return ok;
        }
        return emit(configs, out_path);
    }
    catch (const numerical_error &e)
    {
        std::cerr << "numerical error: " << e.what() << '\n';
        return numerical_failure;
    }
    catch (const config_error &e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return config_failure;
    }
    catch (const invalid_input &e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return config_failure;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return numerical_failure;
    }
}
