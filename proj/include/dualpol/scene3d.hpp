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

#include "dualpol/corrstats.hpp"
#include "dualpol/metrics.hpp"
#include "dualpol/scenario.hpp"

#include <armadillo>
#include <optional>
#include <utility>
#include <vector>

namespace dualpol
{
    struct ElevationRegion
    {
        SpatialCovariance elevation;   // M_E x M_E
        arma::cx_vec q;                // unit norm, orthogonal to the other regions' subspaces
        double lambda_tilde = 0.0;     // q^H R q
        double distance = 0.0;
        double path_loss = 1.0;
        GroupScenario scenario;        // azimuth statistics; power is filled by reduce_to_2d
    };

    struct Scenario3D
    {
        arma::uword elev_elements = 0; // M_E
        arma::uword azim_elements = 0; // M_A dual-polarized pairs per row
        double total_power = 1.0;
        std::vector<ElevationRegion> regions;

        double region_power() const { return total_power / double(regions.size()); }
        arma::uword antennas() const { return 2 * elev_elements * azim_elements; }
    };

    // Geometry of a planar-array cell. Every region holds the same azimuth groups.
    struct Scene3DSpec
    {
        arma::uword elev_elements = 10;
        arma::uword azim_elements = 50;
        double spacing = 0.5;                 // wavelengths, both axes
        double height = 60.0;                 // meters
        std::vector<double> distances{30.0, 60.0, 100.0};
        std::vector<double> azimuths;         // group centers (rad)
        double spread = 0.0;                  // azimuth and elevation-ring angle (rad)
        arma::uword users_per_group = 8;
        std::optional<arma::uword> bbar;
        std::optional<arma::uword> r;
        std::optional<arma::uword> elevation_rank; // cap on the eigenvectors each region blocks
        double total_power = 1.0;
        double chi = 0.0;
        double tau_sq_bd = 0.0;
        double tau_sq_bds = 0.0;
        double theta_max = 0.0;
    };

    // 1 / (1 + (d / 60)^3)
    double path_loss(double distance);

    // Dominant direction of R_l restricted to the null space of the other regions' top
    // eigenvectors (rank_cap of them per region, or the effective rank)
    std::pair<arma::cx_vec, double> elevation_prefilter(const std::vector<SpatialCovariance> &regions, arma::uword l,
                                                        std::optional<arma::uword> rank_cap = std::nullopt);

    Scenario3D build_scene3d(const Scene3DSpec &spec);

    // 2D scenario of region l with the gain lambda_tilde * path_loss folded into the power
    GroupScenario reduce_to_2d(const Scenario3D &scene, arma::uword l);

    // Independent per-region pipelines on disjoint streams; per-trial sum rates are added
    std::vector<McSummary> run_3d(const Scenario3D &scene, const std::vector<Mode> &modes, arma::uword n_trials,
                                  std::uint64_t seed, const TrialOptions &opt = {});
}
