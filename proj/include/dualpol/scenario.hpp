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
#include "dualpol/precode.hpp"

#include <armadillo>
#include <memory>
#include <optional>
#include <vector>

namespace dualpol
{
    // Geometry-level description of a cell, before any statistics are computed
    struct CellSpec
    {
        ArrayLayout array;                 // positions of the M/2 dual-polarized pairs (or M single elements)
        std::vector<GroupGeometry> groups;
        arma::uword users_per_group = 8;
        bool dual_pol = true;
        std::optional<arma::uword> bbar;   // default min(2 Nbar, 2 r) dual, min(2 Nbar, r) single
        std::optional<arma::uword> r;      // default min effective rank
        double rank_tol = default_rank_tol;
    };

    // Long-term statistics and outer precoders; shared by every operating point
    struct CellLayout
    {
        bool dual_pol = true;
        arma::uword antennas = 0;      // M
        arma::uword groups = 0;        // G
        arma::uword users_per_group = 0;
        arma::uword r = 0;
        arma::uword bbar = 0;
        std::vector<SpatialCovariance> cov;
        std::vector<Preprocessor> pre;

        arma::uword total_users() const { return groups * users_per_group; }
    };

    std::shared_ptr<const CellLayout> build_cell(const CellSpec &spec);

    // Same as build_cell but with covariances already at hand (3D regions, tests)
    std::shared_ptr<const CellLayout> build_cell(std::vector<SpatialCovariance> cov, arma::uword users_per_group,
                                                 bool dual_pol, std::optional<arma::uword> bbar,
                                                 std::optional<arma::uword> r);

    struct GroupScenario
    {
        std::shared_ptr<const CellLayout> cell;
        double power = 1.0;            // P over unit noise, any channel gain folded in
        double chi = 0.0;
        double tau_sq_bd = 0.0;
        double tau_sq_bds = 0.0;
        double theta_max = 0.0;        // polarization mismatch
        BdsRegularizer bds_reg = BdsRegularizer::matched;

        double alpha() const;          // Nbar / (bbar P)
        double bds_reg_value() const;  // regularizer inside the BDS inverse
        void validate() const;
    };
}
