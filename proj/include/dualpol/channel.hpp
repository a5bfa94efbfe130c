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

#include <armadillo>
#include <cstdint>
#include <random>

namespace dualpol
{
    // Reproducible random stream keyed by (seed, stream, substream)
    class Rng
    {
    public:
        Rng(std::uint64_t seed, std::uint64_t stream = 0, std::uint64_t substream = 0);

        double normal() { return normal_(engine_); }
        double uniform(double lo, double hi);
        arma::cx_mat complex_gaussian(arma::uword rows, arma::uword cols); // unit variance per entry

    private:
        std::mt19937_64 engine_;
        std::normal_distribution<double> normal_;
    };

    struct PolarizationModel
    {
        double chi = 0.0; // inverse XPD
    };

    // One coherence block for one group. Users 0..n/2-1 are vertically polarized,
    // the rest horizontally. The channel is stored in white form: H = A (scale .* G)
    // with A = I2 (x) U Lambda^(1/2) truncated to the effective rank r_g.
    struct GroupChannel
    {
        bool dual_pol = true;
        arma::cx_mat G;      // (npol*r_g) x n_users
        arma::cx_mat Z;      // CSIT error, same shape as G
        arma::mat scale;     // npol x n_users gain on each polarization block
        arma::cx_mat H;      // M x n_users

        arma::uword n_users() const { return G.n_cols; }
        arma::uword block_rank() const { return dual_pol ? G.n_rows / 2 : G.n_rows; }
        bool vertical(arma::uword k) const { return k < n_users() / 2; }
    };

    arma::cx_mat corrupt_csit(const arma::cx_mat &G, double tau, Rng &rng);

    GroupChannel draw_channel(const SpatialCovariance &stats, const PolarizationModel &pol,
                              arma::uword n_users, Rng &rng, bool dual_pol = true);

    // Each user gets its own orientation error theta ~ U[-theta_max, theta_max]
    GroupChannel draw_mismatched_channel(const SpatialCovariance &stats, const PolarizationModel &pol,
                                         double theta_max, arma::uword n_users, Rng &rng);

    // A (scale .* X) for any white matrix X of the shape of G
    arma::cx_mat color(const SpatialCovariance &stats, const GroupChannel &ch, const arma::cx_mat &X);

    // Corrupted white factor sqrt(1-tau^2) G + tau Z, with tau^2 given
    arma::cx_mat csit_factor(const GroupChannel &ch, double tau_sq);

    // Transmit-side CSIT: the channel rebuilt from the corrupted factor
    arma::cx_mat csit_channel(const SpatialCovariance &stats, const GroupChannel &ch, double tau_sq);

    // Block (tx polarization p) x (users of polarization q) of the CSIT channel, M/2 x n/2.
    // Only the corresponding rows and columns of the white factor are read.
    arma::cx_mat csit_block(const SpatialCovariance &stats, const GroupChannel &ch, double tau_sq,
                            arma::uword p, arma::uword q);
}
