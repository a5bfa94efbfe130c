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

#include "catch_amalgamated.hpp"

#include "dualpol/errors.hpp"
#include "dualpol/runner.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <sys/wait.h>

using namespace dualpol;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{
    constexpr double pi = std::numbers::pi;

    ScenarioConfig parse(const std::string &text)
    {
        std::istringstream in(text);
        return config_from_keys(KeyValueFile::parse(in));
    }

    // Small 2D cell that runs in milliseconds
    const char *small_text = R"(
scenario_id = tiny
antennas = 32
groups = 2
azimuths = [-pi/6, pi/6]
users_per_group = 4
snr_db = 0:10:20
chi = 0.1
schemes = BD, BDS, SWITCH
n_trials = 4
seed = 12
)";

    std::string csv(const std::vector<ResultRow> &rows)
    {
        std::ostringstream os;
        write_csv_header(os);
        for (const auto &r : rows)
            write_csv_row(os, r);
        return os.str();
    }

    std::filesystem::path scratch(const std::string &name)
    {
        return std::filesystem::temp_directory_path() / ("dualpol_test_" + name);
    }

    int cli(const std::string &args)
    {
        const std::string cmd = std::string("\"") + DUALPOL_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
        const int st = std::system(cmd.c_str());
        return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    }
}

TEST_CASE("config parser - numbers, lists and ranges")
{
    CHECK_THAT(parse_number("pi/12", "x"), WithinRel(pi / 12, 1e-15));
    CHECK_THAT(parse_number("0.22pi", "x"), WithinRel(0.22 * pi, 1e-15));
    CHECK_THAT(parse_number("2*pi", "x"), WithinRel(2 * pi, 1e-15));
    CHECK_THAT(parse_number("8deg", "x"), WithinRel(8 * pi / 180, 1e-15));
    CHECK_THAT(parse_number("-pi/6", "x"), WithinRel(-pi / 6, 1e-15));
    CHECK_THAT(parse_number("-3.5e1", "x"), WithinAbs(-35.0, 0.0));
    CHECK_THROWS_WITH(parse_number("abc", "spread"), ContainsSubstring("spread"));

    const auto c = parse(small_text);
    CHECK(c.scenario_id == "tiny");
    CHECK(c.antennas == 32);
    REQUIRE(c.azimuths.size() == 2);
    CHECK_THAT(c.azimuths[1], WithinRel(pi / 6, 1e-15));
    CHECK(c.snr_db == std::vector<double>{0.0, 10.0, 20.0});
    CHECK(c.schemes == std::vector<std::string>{"BD", "BDS", "SWITCH"});
    CHECK(c.n_trials == 4);
    CHECK(c.seed == 12);

    const auto r = parse("chi = 0:0.1:1\n");
    CHECK(r.chi.size() == 11);
    CHECK_THAT(r.chi.back(), WithinAbs(1.0, 1e-12));
}

TEST_CASE("config parser - errors name the offending field")
{
    CHECK_THROWS_WITH(parse("bogus = 1\n"), ContainsSubstring("bogus"));
    CHECK_THROWS_WITH(parse("chi = 0.1\nchi = 0.2\n"), ContainsSubstring("duplicate"));
    CHECK_THROWS_WITH(parse("no equals sign\n"), ContainsSubstring("key = value"));
    CHECK_THROWS_WITH(parse("antennas = 3.5\n"), ContainsSubstring("antennas"));
    CHECK_THROWS_WITH(parse("grid = maybe\n"), ContainsSubstring("grid"));
    CHECK_THROWS_WITH(parse("geometry = 4d\n"), ContainsSubstring("geometry"));
    CHECK_THROWS_WITH(parse("chi = 1:1:0\n"), ContainsSubstring("chi"));

    auto v = [](const std::string &t) { parse(t).validate(); };
    CHECK_THROWS_WITH(v("chi = 1.5\n"), ContainsSubstring("chi"));
    CHECK_THROWS_WITH(v("users_per_group = 3\n"), ContainsSubstring("users_per_group"));
    CHECK_THROWS_WITH(v("schemes = ZF\n"), ContainsSubstring("schemes"));
    CHECK_THROWS_WITH(v("snr_db = [0, 10]\nchi = [0, 0.1]\n"), ContainsSubstring("grid"));
    CHECK_NOTHROW(v("snr_db = [0, 10]\nchi = [0, 0.1]\ngrid = true\n"));
    CHECK_THROWS_WITH(v("dual_pol = false\nschemes = BDS\n"), ContainsSubstring("schemes"));
    CHECK_THROWS_WITH(v("chi_range = [0, 0.5]\nschemes = ASYM_BD\n"), ContainsSubstring("schemes"));
    CHECK_THROWS_WITH(v("tau_sq = -0.1\n"), ContainsSubstring("tau_sq"));
    CHECK_THROWS_AS(load_config("/nonexistent/file.cfg"), config_error);
}

TEST_CASE("config text - round trip")
{
    for (const auto &name : preset_names())
        for (const auto &cfg : preset(name))
        {
            const auto back = parse(to_config_text(cfg));
            CHECK(to_config_text(back) == to_config_text(cfg));
        }
    const auto c = parse(small_text);
    CHECK(to_config_text(parse(to_config_text(c))) == to_config_text(c));
}

TEST_CASE("run_config - rows, determinism and CSV layout")
{
    const auto cfg = parse(small_text);
    const auto rows = run_config(cfg);
    REQUIRE(rows.size() == 9);
    CHECK(rows[0].scheme == "BD");
    CHECK(rows[4].scheme == "BDS");
    CHECK(rows[4].snr_db == 10.0);
    for (const auto &r : rows)
    {
        CHECK(r.n_trials == 4);
        CHECK(r.seed == 12);
        CHECK(r.sum_rate > 0.0);
    }
    const std::string a = csv(rows);
    CHECK(a.substr(0, a.find('\n')) == "scenario_id,scheme,snr_db,chi,tau_sq,n_bits,sum_rate,stderr,n_trials,seed");
    CHECK(csv(run_config(cfg)) == a);

    auto other = cfg;
    other.seed = 13;
    CHECK(csv(run_config(other)) != a);

    auto none = cfg;
    none.schemes.clear();
    CHECK(run_config(none).empty());
}

TEST_CASE("run_config - deterministic-equivalent rows and unused fields")
{
    auto cfg = parse(small_text);
    cfg.schemes = {"ASYM_BD", "ASYM_BDS"};
    cfg.snr_db = {10.0};
    const auto rows = run_config(cfg);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].n_trials == 0);
    CHECK(rows[0].stderr_ == 0.0);

    cfg = parse(small_text);
    cfg.snr_db = {10.0};
    cfg.schemes = {"BD"};
    cfg.chi_range = std::make_pair(0.0, 0.5);
    const std::string line = csv(run_config(cfg));
    // chi drawn per trial and no bit budget: both columns left empty
    CHECK_THAT(line, ContainsSubstring("tiny,BD,10,,0,,"));
}

TEST_CASE("run_config - tau above one is clamped and flagged")
{
    auto cfg = parse(small_text);
    cfg.snr_db = {10.0};
    cfg.tau_sq = {1.5};
    cfg.schemes = {"BD"};
    const auto rows = run_config(cfg);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].tau_clamped);
    CHECK_THAT(csv(rows), ContainsSubstring("tiny[tau_clamped],BD"));
}

TEST_CASE("presets - built-in setups")
{
    const auto &names = preset_names();
    for (const char *n : {"fig3", "fig4", "fig5", "fig6", "fig8", "fig9", "fig11"})
        CHECK(std::find(names.begin(), names.end(), n) != names.end());

    const auto f4 = preset("fig4");
    REQUIRE(f4.size() == 1);
    CHECK(f4[0].antennas == 120);
    CHECK(f4[0].groups == 4);
    CHECK(f4[0].users_per_group == 8);
    CHECK_THAT(f4[0].spread, WithinRel(pi / 12, 1e-15));
    CHECK(f4[0].chi == std::vector<double>{0.0, 0.1});

    const auto f3 = preset("fig3");
    REQUIRE(f3.size() == 3);
    for (const auto &c : f3)
        CHECK(c.bbar.value_or(0) == 14);
    CHECK(f3[0].dual_pol);
    CHECK_FALSE(f3[1].dual_pol);
    CHECK_THAT(f3[2].spacing, WithinAbs(0.25, 0.0));

    const auto f11 = preset("fig11");
    REQUIRE(f11.size() == 2);
    CHECK(f11[0].three_d);
    CHECK(f11[0].elev_elements == 10);
    CHECK(f11[0].azim_elements == 50);
    CHECK(f11[0].distances == std::vector<double>{30.0, 60.0, 100.0});
    CHECK_THAT(f11[1].theta_max, WithinRel(0.22 * pi, 1e-15));

    CHECK_THROWS_AS(preset("fig99"), config_error);
}

TEST_CASE("command line - exit codes")
{
    CHECK(cli("list-presets") == 0);
    CHECK(cli("--help") == 0);
    CHECK(cli("") == 2);
    CHECK(cli("run") == 2);
    CHECK(cli("preset nope") == 2);
    CHECK(cli("run --config /nonexistent.cfg") == 2);

    const auto good = scratch("good.cfg");
    const auto out = scratch("out.csv");
    {
        std::ofstream f(good);
        f << small_text;
    }
    CHECK(cli("run --config " + good.string() + " --trials 2 --out " + out.string()) == 0);
    std::ifstream in(out);
    std::string header;
    std::getline(in, header);
    CHECK(header == "scenario_id,scheme,snr_db,chi,tau_sq,n_bits,sum_rate,stderr,n_trials,seed");
    int lines = 0;
    for (std::string l; std::getline(in, l);)
    {
        ++lines;
        CHECK_THAT(l, ContainsSubstring(",2,12"));
    }
    CHECK(lines == 9);

    const auto bad = scratch("bad.cfg");
    {
        std::ofstream f(bad);
        f << "antennas = 8\ngroups = 4\n";  // too few dimensions for eight users per group
    }
    CHECK(cli("run --config " + bad.string()) == 2);
    CHECK(cli("run --config " + good.string() + " --out /nonexistent/dir/x.csv") == 2);

    std::filesystem::remove(good);
    std::filesystem::remove(bad);
    std::filesystem::remove(out);
}
