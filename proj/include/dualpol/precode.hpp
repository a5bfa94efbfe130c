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

#include "dualpol/channel.hpp"
#include "dualpol/corrstats.hpp"

#include <armadillo>
#include <vector>

namespace dualpol
{
    struct GroupScenario;

    enum class Scheme
    {
        BD,
        BDS
    };

    const char *scheme_name(Scheme s);

    // Long-term outer precoder of one group. For a dual-polarized array the full matrix is
    // I2 (x) Bs; a single-polarized array uses Bs directly.
    struct Preprocessor
    {
        arma::cx_mat Bs; // M/2 x bbar/2 (dual) or M x bbar (single)
        arma::uword r = 0;
        arma::uword bbar = 0;
        bool dual_pol = true;

        arma::cx_mat full() const;
        // BDS block for tx polarization p: [Bs; 0] for p = 0, [0; Bs] for p = 1
        arma::cx_mat pol_block(arma::uword p) const;
    };

    struct BdsPreprocessor
    {
        arma::cx_mat Bv;
        arma::cx_mat Bh;
    };

    // Checks bbar against the group count, truncation rank and array size.
    // Throws config_error naming the violated inequality.
    void check_bd_dimensions(arma::uword half_array, arma::uword n_groups, arma::uword users_per_group,
                             arma::uword r, arma::uword bbar, arma::uword min_rank, bool dual_pol = true);

    Preprocessor bd_preprocessor(const std::vector<SpatialCovariance> &all_stats, arma::uword g,
                                 arma::uword r, arma::uword bbar, bool dual_pol = true);

    BdsPreprocessor bds_preprocessor(const Preprocessor &bd);

    struct InnerPrecoder
    {
        arma::cx_mat P;
        arma::cx_mat K; // (H H^H + reg I)^-1
        double xi_sq = 0.0;
        double alpha = 0.0;
        double reg = 0.0;
    };

    // RZF with K = (H H^H + reg I)^-1, P = xi K H, xi^2 = n_streams / tr(H^H K^H K H).
    // reg < 0 selects the default reg = rows * alpha.
    InnerPrecoder rzf_precoder(const arma::cx_mat &H_eff_hat, double alpha, arma::uword n_streams,
                               double reg = -1.0);

    // Per-group regularizer used by BDS: either the BD one (bbar * alpha) or half of it
    enum class BdsRegularizer
    {
        matched,
        printed
    };

    struct PrecoderSet
    {
        Scheme scheme = Scheme::BD;
        std::vector<arma::cx_mat> V;         // per group, M x n_users, xi included, user order kept
        std::vector<arma::vec> xi_sq;        // per group: 1 entry (BD) or 2 (BDS)
        std::vector<std::vector<InnerPrecoder>> inner;
    };

    PrecoderSet build_all(const GroupScenario &scenario, const std::vector<GroupChannel> &channels,
                          Scheme scheme, double tau_sq);

    // Total radiated power for equal per-stream power P/N
    double transmit_power(const PrecoderSet &pre, double power, arma::uword total_users);
}
