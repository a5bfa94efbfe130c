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

#include "dualpol/config.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace dualpol
{
    struct ResultRow
    {
        std::string scenario_id;
        std::string scheme;
        double snr_db = 0.0;
        std::optional<double> chi;      // empty when drawn per trial
        std::optional<double> tau_sq;   // axis value; empty when drawn per trial
        std::optional<arma::uword> n_bits;
        double sum_rate = 0.0;
        double stderr_ = 0.0;
        arma::uword n_trials = 0;       // 0 for deterministic-equivalent rows
        std::uint64_t seed = 0;
        bool tau_clamped = false;       // tau_sq above 1 was clamped in the channel model
    };

    const std::vector<std::string> &preset_names();

    // Built-in setups; a preset with several curve families yields several configs
    std::vector<ScenarioConfig> preset(const std::string &name);

    // Builds the cell (or 3D scene) once so dimensional constraints surface as config_error
    void check_geometry(const ScenarioConfig &cfg);

    std::vector<ResultRow> run_config(const ScenarioConfig &cfg);

    void write_csv_header(std::ostream &out);
    void write_csv_row(std::ostream &out, const ResultRow &row);
}
