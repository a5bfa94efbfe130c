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

#pragma once

#include "dualpol/precode.hpp"

#include <armadillo>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dualpol
{
    // Flat key-value text. One "key = value" per line, '#' starts a comment, lists are
    // written "[a, b, c]" or "a, b, c". Ranges "start:step:stop" expand to numeric lists.
    // Numbers accept a "pi" factor ("pi/12", "0.22pi") and a "deg" suffix.
    class KeyValueFile
    {
    public:
        static KeyValueFile parse(std::istream &in, const std::string &source = "<input>");
        static KeyValueFile load(const std::string &path);

        bool has(const std::string &key) const { return entries_.count(key) != 0; }
        const std::vector<std::string> &values(const std::string &key) const;
        std::vector<std::string> keys() const;

        std::string text(const std::string &key) const;
        double number(const std::string &key) const;
        arma::uword count(const std::string &key) const;
        bool flag(const std::string &key) const;
        std::vector<double> numbers(const std::string &key) const;

    private:
        std::map<std::string, std::vector<std::string>> entries_;
    };

    double parse_number(const std::string &token, const std::string &field);

    enum class TauRule
    {
        same,    // tau^2_BDS = tau^2_BD
        squared  // tau^2_BDS = (tau^2_BD)^2
    };

    struct ScenarioConfig
    {
        std::string scenario_id = "custom";
        bool three_d = false;

        // 2D geometry
        arma::uword antennas = 120;       // total elements M
        bool dual_pol = true;
        double spacing = 0.5;             // wavelengths
        arma::uword groups = 4;
        std::vector<double> azimuths;     // empty: -pi/4 + pi/6 g
        double spread = 0.0;              // set in the constructor
        arma::uword users_per_group = 8;
        std::optional<arma::uword> bbar;
        std::optional<arma::uword> r;
        BdsRegularizer bds_reg = BdsRegularizer::matched;

        // 3D geometry
        arma::uword elev_elements = 10;
        arma::uword azim_elements = 50;
        double height = 60.0;
        std::vector<double> distances{30.0, 60.0, 100.0};
        std::optional<arma::uword> elevation_rank;

        // sweep axes
        std::vector<double> snr_db{10.0};
        std::vector<double> chi{0.0};
        std::vector<double> tau_sq{0.0};
        std::vector<arma::uword> n_bits;  // non-empty: tau values follow from the bit budget
        std::optional<std::pair<double, double>> chi_range;
        std::optional<std::pair<double, double>> tau_range;
        TauRule tau_rule = TauRule::same;
        bool grid = false;

        double theta_max = 0.0;
        bool switch_chi_eff = true;

        std::vector<std::string> schemes{"BD", "BDS"};
        arma::uword n_trials = 100;
        std::uint64_t seed = 1;
        unsigned threads = 0;
        std::string out;

        ScenarioConfig();

        std::vector<double> group_azimuths() const;
        void validate() const;                     // throws config_error naming the field
    };

    const std::vector<std::string> &known_schemes();

    ScenarioConfig config_from_keys(const KeyValueFile &kv);
    ScenarioConfig load_config(const std::string &path);

    // Round-trips through config_from_keys
    std::string to_config_text(const ScenarioConfig &cfg);
}
