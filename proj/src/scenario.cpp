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

#include "dualpol/scenario.hpp"
#include "dualpol/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dualpol
{
    std::shared_ptr<const CellLayout> build_cell(std::vector<SpatialCovariance> cov, arma::uword users_per_group,
                                                 bool dual_pol, std::optional<arma::uword> bbar,
                                                 std::optional<arma::uword> r)
    {
        if (cov.empty())
            throw config_error("cell: at least one group is required");
        if (users_per_group == 0 || users_per_group % 2 != 0)
            throw config_error("cell: users_per_group must be even and positive");

        const arma::uword n = cov.front().size();
        arma::uword min_rank = cov.front().effective_rank;
        for (const auto &c : cov)
        {
            if (c.size() != n)
                throw config_error("cell: group covariances differ in size");
            min_rank = std::min(min_rank, c.effective_rank);
        }
        const arma::uword G = cov.size();

        arma::uword rr = r.value_or(min_rank);
        if (rr == 0 || rr > min_rank)
            throw config_error("cell: r must lie in [1, min effective rank = " + std::to_string(min_rank) + "]");

        arma::uword bb;
        if (bbar)
            bb = *bbar;
        else
            bb = dual_pol ? std::min(2 * users_per_group, 2 * rr) : std::min(2 * users_per_group, rr);

        // Shrink a defaulted r until the other groups leave a large enough null space
        const arma::uword per_block = dual_pol ? bb / 2 : bb;
        if (!r && G > 1)
            while (rr > 1 && per_block + (G - 1) * rr > n)
                --rr;

        check_bd_dimensions(n, G, users_per_group, rr, bb, min_rank, dual_pol);

        auto cell = std::make_shared<CellLayout>();
        cell->dual_pol = dual_pol;
        cell->antennas = dual_pol ? 2 * n : n;
        cell->groups = G;
        cell->users_per_group = users_per_group;
        cell->r = rr;
        cell->bbar = bb;
        cell->cov = std::move(cov);
        cell->pre.reserve(G);
        for (arma::uword g = 0; g < G; ++g)
            cell->pre.push_back(bd_preprocessor(cell->cov, g, rr, bb, dual_pol));
        return cell;
    }

    std::shared_ptr<const CellLayout> build_cell(const CellSpec &spec)
    {
        if (spec.groups.empty())
            throw config_error("cell: no groups given");
        std::vector<SpatialCovariance> cov;
        cov.reserve(spec.groups.size());
        for (const auto &g : spec.groups)
            cov.push_back(one_ring_covariance(g, spec.array, spec.rank_tol));
        return build_cell(std::move(cov), spec.users_per_group, spec.dual_pol, spec.bbar, spec.r);
    }

    double GroupScenario::alpha() const
    {
        return double(cell->users_per_group) / (double(cell->bbar) * power);
    }

    double GroupScenario::bds_reg_value() const
    {
        const double full = double(cell->bbar) * alpha();
        return bds_reg == BdsRegularizer::matched ? full : 0.5 * full;
    }

    void GroupScenario::validate() const
    {
        if (!cell)
            throw config_error("scenario: missing cell layout");
        if (!(power > 0.0) || !std::isfinite(power))
            throw config_error("scenario: power must be positive");
        if (!(chi >= 0.0 && chi <= 1.0))
            throw config_error("scenario: chi must lie in [0,1]");
        if (!(tau_sq_bd >= 0.0 && tau_sq_bd <= 1.0) || !(tau_sq_bds >= 0.0 && tau_sq_bds <= 1.0))
            throw config_error("scenario: tau^2 must lie in [0,1]");
        if (!(theta_max >= 0.0 && theta_max <= 1.5707963267948966 + 1e-12))
            throw config_error("scenario: theta_max must lie in [0, pi/2]");
    }
}
