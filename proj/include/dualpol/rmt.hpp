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
#include "dualpol/scenario.hpp"

#include <armadillo>
#include <cstddef>
#include <vector>

namespace dualpol
{
    // Resolvent of (1/M) H H^H + S - z I where column j of H has covariance R[j] and
    // appears count[j] times
    struct FixedPointProblem
    {
        std::vector<arma::cx_mat> R;
        std::vector<double> count;
        arma::cx_mat S; // empty means zero
        double z = -1.0;
        double M = 1.0;
    };

    struct FixedPointResult
    {
        arma::vec e;
        arma::cx_mat T;
        std::size_t iterations = 0;
        double residual = 0.0;
    };

    FixedPointResult solve_fixed_point(const FixedPointProblem &problem, double tol = 1e-10,
                                       std::size_t max_iter = 1000);

    // Deterministic equivalent of the per-class SINR. All per-class matrices are G x 2
    // with column 0 for vertically and column 1 for horizontally polarized users.
    struct AsymptoticSolution
    {
        Scheme scheme = Scheme::BD;
        double power = 0.0;
        double chi = 0.0;
        double tau_sq = 0.0;
        arma::uword groups = 0;
        arma::uword users_per_group = 0;

        arma::mat m;          // fixed-point value at z = -alpha
        arma::mat m_prime;    // derivative entering the normalization
        arma::mat psi;        // Psi per group (BD: same in both columns) or per subgroup
        arma::mat xi_sq;
        arma::mat upsilon;    // own-group intra term (same subgroup for BDS)
        arma::mat cross;      // BDS: sum over q != p of xi_gq^2 Upsilon_ggpq; BD: 0
        arma::mat inter;      // sum over other groups of xi^2 Upsilon
        arma::mat sinr;

        double sum_rate = 0.0;
        std::size_t iterations = 0;
        double residual = 0.0;

        double mean_sinr() const { return arma::mean(arma::vectorise(sinr)); }
    };

    // Normalization of the BDS power scalar: the power-consistent form P / (2 G Psi) or
    // the literal P / (G Psi)
    enum class BdsNormalization
    {
        consistent,
        literal
    };

    AsymptoticSolution asym_bd(const GroupScenario &sc);
    AsymptoticSolution asym_bd_simplified(const GroupScenario &sc);
    AsymptoticSolution asym_bds(const GroupScenario &sc, BdsNormalization norm = BdsNormalization::consistent);

    // Constant-in-chi approximation of BD
    AsymptoticSolution approx_bd_chi(const AsymptoticSolution &base, double chi);

    // gamma(chi) = gamma(0) / (1 + c0 chi)
    double bds_c0(const AsymptoticSolution &base);
    AsymptoticSolution approx_bds_chi(const AsymptoticSolution &base, double chi);

    // Sum over classes of (Nbar/2) log2(1 + sinr)
    double class_sum_rate(const arma::mat &sinr, arma::uword users_per_group);
}
