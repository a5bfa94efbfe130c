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

#include "dualpol/precode.hpp"
#include "dualpol/errors.hpp"
#include "dualpol/scenario.hpp"

#include <string>

namespace dualpol
{
    const char *scheme_name(Scheme s)
    {
        return s == Scheme::BD ? "BD" : "BDS";
    }

    arma::cx_mat Preprocessor::full() const
    {
        if (!dual_pol)
            return Bs;
        arma::cx_mat B(2 * Bs.n_rows, 2 * Bs.n_cols, arma::fill::zeros);
        B.submat(0, 0, Bs.n_rows - 1, Bs.n_cols - 1) = Bs;
        B.submat(Bs.n_rows, Bs.n_cols, 2 * Bs.n_rows - 1, 2 * Bs.n_cols - 1) = Bs;
        return B;
    }

    arma::cx_mat Preprocessor::pol_block(arma::uword p) const
    {
        if (!dual_pol || p > 1)
            throw invalid_input("pol_block: dual-polarized preprocessor and p in {0,1} required");
        arma::cx_mat B(2 * Bs.n_rows, Bs.n_cols, arma::fill::zeros);
        B.rows(p * Bs.n_rows, p * Bs.n_rows + Bs.n_rows - 1) = Bs;
        return B;
    }

    void check_bd_dimensions(arma::uword half_array, arma::uword n_groups, arma::uword users_per_group,
                             arma::uword r, arma::uword bbar, arma::uword min_rank, bool dual_pol)
    {
        const auto s = [](arma::uword v) { return std::to_string(v); };
        if (r == 0 || r > min_rank)
            throw config_error("r = " + s(r) + " violates 1 <= r <= min effective rank = " + s(min_rank));
        if (dual_pol && bbar % 2 != 0)
            throw config_error("bbar = " + s(bbar) + " must be even for a dual-polarized array");
        if (bbar < users_per_group)
            throw config_error("Nbar <= bbar violated: Nbar = " + s(users_per_group) + ", bbar = " + s(bbar));
        const arma::uword used = (n_groups - 1) * r;
        if (used >= half_array)
            throw config_error("(G-1) r = " + s(used) + " leaves no null space in " + s(half_array) + " positions");
        const arma::uword null_dim = half_array - used;
        const arma::uword cap = dual_pol ? 2 * null_dim : null_dim;
        if (bbar > cap)
            throw config_error("bbar <= " + std::string(dual_pol ? "2(M/2 - (G-1) r)" : "M - (G-1) r") + " violated: bbar = " +
                               s(bbar) + ", bound = " + s(cap));
        if (dual_pol && bbar > 2 * min_rank)
            throw config_error("bbar <= 2 r_g violated: bbar = " + s(bbar) + ", bound = " + s(2 * min_rank));
        // Single-polarized baselines may keep columns beyond the rank (they carry no energy)
        // as long as every user still has a dimension of its own
        if (!dual_pol && users_per_group > min_rank)
            throw config_error("Nbar <= r_g violated: Nbar = " + s(users_per_group) + ", r_g = " + s(min_rank));
    }

    Preprocessor bd_preprocessor(const std::vector<SpatialCovariance> &all_stats, arma::uword g,
                                 arma::uword r, arma::uword bbar, bool dual_pol)
    {
        if (g >= all_stats.size())
            throw invalid_input("bd_preprocessor: group index out of range");
        const arma::uword n = all_stats[g].size();
        arma::uword min_rank = all_stats[g].effective_rank;
        for (const auto &c : all_stats)
            min_rank = std::min(min_rank, c.effective_rank);
        check_bd_dimensions(n, all_stats.size(), 0, r, bbar, min_rank, dual_pol); // user count is checked by the caller

        const arma::uword cols = dual_pol ? bbar / 2 : bbar;
        Preprocessor out;
        out.r = r;
        out.bbar = bbar;
        out.dual_pol = dual_pol;

        if (all_stats.size() == 1)
        {
            out.Bs = all_stats[g].eigvecs.cols(0, cols - 1);
            return out;
        }

        arma::cx_mat U_other(n, 0);
        for (arma::uword l = 0; l < all_stats.size(); ++l)
            if (l != g)
                U_other = arma::join_rows(U_other, all_stats[l].eigvecs.cols(0, r - 1));

        arma::cx_mat Ul, Vr;
        arma::vec sv;
        if (!arma::svd(Ul, sv, Vr, U_other))
            throw numerical_error("bd_preprocessor: SVD failed");
        const arma::uword k = arma::uword(arma::accu(sv > 1e-10 * sv.max()));
        if (k >= n || n - k < cols)
            throw config_error("bd_preprocessor: null space of the other groups is smaller than bbar/2");
        const arma::cx_mat E0 = Ul.cols(k, n - 1);

        arma::cx_mat Rt = E0.t() * all_stats[g].matrix * E0;
        Rt = 0.5 * (Rt + Rt.t());
        arma::vec val;
        arma::cx_mat vec;
        if (!arma::eig_sym(val, vec, Rt))
            throw numerical_error("bd_preprocessor: eigensolver failed");
        const arma::cx_mat F = arma::fliplr(vec).eval().cols(0, cols - 1);
        out.Bs = E0 * F;
        return out;
    }

    BdsPreprocessor bds_preprocessor(const Preprocessor &bd)
    {
        return {bd.pol_block(0), bd.pol_block(1)};
    }

    InnerPrecoder rzf_precoder(const arma::cx_mat &H_eff_hat, double alpha, arma::uword n_streams, double reg)
    {
        if (!(alpha > 0.0))
            throw invalid_input("rzf_precoder: alpha must be positive");
        if (H_eff_hat.n_cols != n_streams)
            throw invalid_input("rzf_precoder: column count must equal the stream count");

        InnerPrecoder out;
        out.alpha = alpha;
        out.reg = reg < 0.0 ? double(H_eff_hat.n_rows) * alpha : reg;
        arma::cx_mat A = H_eff_hat * H_eff_hat.t();
        A.diag() += out.reg;
        A = 0.5 * (A + A.t());
        if (!arma::inv_sympd(out.K, A))
            throw numerical_error("rzf_precoder: regularized Gram matrix is not invertible");
        const arma::cx_mat P0 = out.K * H_eff_hat;
        const double tr = arma::accu(arma::square(arma::abs(P0)));
        if (!(tr > 0.0) || !std::isfinite(tr))
            throw numerical_error("rzf_precoder: degenerate channel, zero normalization trace");
        out.xi_sq = double(n_streams) / tr;
        out.P = std::sqrt(out.xi_sq) * P0;
        return out;
    }

    PrecoderSet build_all(const GroupScenario &sc, const std::vector<GroupChannel> &channels,
                          Scheme scheme, double tau_sq)
    {
        const CellLayout &cell = *sc.cell;
        if (channels.size() != cell.groups)
            throw invalid_input("build_all: one channel per group is required");
        if (scheme == Scheme::BDS && !cell.dual_pol)
            throw invalid_input("build_all: BDS requires a dual-polarized array");

        const double alpha = sc.alpha();
        const arma::uword nbar = cell.users_per_group;
        PrecoderSet out;
        out.scheme = scheme;
        out.V.resize(cell.groups);
        out.xi_sq.resize(cell.groups);
        out.inner.resize(cell.groups);

        for (arma::uword g = 0; g < cell.groups; ++g)
        {
            const Preprocessor &pre = cell.pre[g];
            if (channels[g].n_users() != nbar)
                throw invalid_input("build_all: channel user count does not match the cell");
            if (scheme == Scheme::BD)
            {
                const arma::cx_mat B = pre.full();
                const arma::cx_mat Hhat = csit_channel(cell.cov[g], channels[g], tau_sq);
                auto in = rzf_precoder(B.t() * Hhat, alpha, nbar, double(cell.bbar) * alpha);
                out.V[g] = B * in.P;
                out.xi_sq[g] = arma::vec{in.xi_sq};
                out.inner[g].push_back(std::move(in));
            }
            else
            {
                const arma::uword half = nbar / 2;
                out.V[g].set_size(cell.antennas, nbar);
                out.xi_sq[g].set_size(2);
                for (arma::uword p = 0; p < 2; ++p)
                {
                    // co-polarized CSIT only
                    const arma::cx_mat Hpp = csit_block(cell.cov[g], channels[g], tau_sq, p, p);
                    auto in = rzf_precoder(pre.Bs.t() * Hpp, alpha, half, sc.bds_reg_value());
                    out.V[g].cols(p * half, p * half + half - 1) = pre.pol_block(p) * in.P;
                    out.xi_sq[g](p) = in.xi_sq;
                    out.inner[g].push_back(std::move(in));
                }
            }
        }
        return out;
    }

    double transmit_power(const PrecoderSet &pre, double power, arma::uword total_users)
    {
        double acc = 0.0;
        for (const auto &V : pre.V)
            acc += arma::accu(arma::square(arma::abs(V)));
        return power / double(total_users) * acc;
    }
}
