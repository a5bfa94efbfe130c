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

#include <numbers>

namespace dualpol
{
    namespace
    {
        constexpr double pi = std::numbers::pi;

        std::vector<double> snr_axis() { return {-5.0, 0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0}; }

        ScenarioConfig base(const std::string &id)
        {
            ScenarioConfig c;
            c.scenario_id = id;
            c.antennas = 120;
            c.groups = 4;
            c.users_per_group = 8;
            c.spread = pi / 12.0;
            c.n_trials = 200;
            c.seed = 2025;
            return c;
        }

        std::vector<ScenarioConfig> fig3()
        {
            std::vector<ScenarioConfig> out;
            struct Variant
            {
                const char *id;
                bool dual;
                double spacing;
            };
            for (const Variant v : {Variant{"fig3_dual_half", true, 0.5}, Variant{"fig3_single_half", false, 0.5},
                                    Variant{"fig3_single_quarter", false, 0.25}})
            {
                ScenarioConfig c = base(v.id);
                c.dual_pol = v.dual;
                c.spacing = v.spacing;
                c.spread = 8.0 * pi / 180.0;
                c.bbar = 14;
                c.chi = {0.1};
                c.snr_db = snr_axis();
                c.schemes = {"BD"};
                out.push_back(c);
            }
            return out;
        }

        std::vector<ScenarioConfig> fig4()
        {
            ScenarioConfig c = base("fig4");
            c.snr_db = snr_axis();
            c.chi = {0.0, 0.1};
            c.tau_sq = {0.0};
            c.grid = true;
            c.schemes = {"BD", "BDS", "ASYM_BD", "ASYM_BDS"};
            return {c};
        }

        std::vector<ScenarioConfig> fig5()
        {
            ScenarioConfig c = base("fig5");
            c.snr_db = snr_axis();
            c.chi = {0.0};
            c.tau_sq = {0.1};
            c.tau_rule = TauRule::squared;
            c.schemes = {"BD", "BDS", "ASYM_BD", "ASYM_BDS"};
            return {c};
        }

        std::vector<ScenarioConfig> fig6()
        {
            ScenarioConfig c = base("fig6");
            c.snr_db = {15.0};
            c.chi.clear();
            for (int i = 0; i <= 10; ++i)
                c.chi.push_back(0.1 * i);
            c.tau_sq = {0.0, 0.5, 1.0, 1.5};
            c.tau_rule = TauRule::squared;
            c.grid = true;
            c.schemes = {"BD", "BDS", "ASYM_BD", "ASYM_BDS", "APPROX_BD", "APPROX_BDS"};
            return {c};
        }

        std::vector<ScenarioConfig> fig8()
        {
            ScenarioConfig c = base("fig8");
            c.snr_db = {25.0};
            c.chi = {0.1, 0.2};
            c.n_bits.clear();
            for (arma::uword b = 20; b <= 120; b += 10)
                c.n_bits.push_back(b);
            c.grid = true;
            c.schemes = {"BD", "BDS", "SWITCH"};
            return {c};
        }

        std::vector<ScenarioConfig> fig9()
        {
            ScenarioConfig c = base("fig9");
            c.snr_db = snr_axis();
            c.chi_range = std::make_pair(0.0, 0.5);
            c.n_bits = {50, 65};
            c.grid = true;
            c.schemes = {"BD", "BDS", "SWITCH"};
            return {c};
        }

        std::vector<ScenarioConfig> fig11()
        {
            std::vector<ScenarioConfig> out;
            for (const double theta : {0.0, 0.22 * pi})
            {
                ScenarioConfig c = base(theta == 0.0 ? "fig11_aligned" : "fig11_mismatch");
                c.three_d = true;
                c.elev_elements = 10;
                c.azim_elements = 50;
                c.height = 60.0;
                c.distances = {30.0, 60.0, 100.0};
                // only the dominant elevation direction of each region is blocked
                c.elevation_rank = 1;
                c.snr_db = {25.0};
                c.chi.clear();
                for (int i = 0; i <= 10; ++i)
                    c.chi.push_back(0.1 * i);
                c.tau_range = std::make_pair(0.0, 1.0);
                c.tau_rule = TauRule::squared;
                c.theta_max = theta;
                c.schemes = {"BD", "BDS", "SWITCH"};
                if (theta > 0.0)
                    c.schemes.push_back("SWITCH_RAW");
                out.push_back(c);
            }
            return out;
        }
    }

    const std::vector<std::string> &preset_names()
    {
        static const std::vector<std::string> n{"fig3", "fig4", "fig5", "fig6", "fig8", "fig9", "fig11"};
        return n;
    }

    std::vector<ScenarioConfig> preset(const std::string &name)
    {
        std::vector<ScenarioConfig> out;
        if (name == "fig3")
            out = fig3();
        else if (name == "fig4")
            out = fig4();
        else if (name == "fig5")
            out = fig5();
        else if (name == "fig6")
            out = fig6();
        else if (name == "fig8")
            out = fig8();
        else if (name == "fig9")
            out = fig9();
        else if (name == "fig11")
            out = fig11();
        else
            throw config_error("preset: unknown name '" + name + "'");
        for (const auto &c : out)
        {
            c.validate();
            check_geometry(c);
        }
        return out;
    }
}
