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

#include "dualpol/channel.hpp"
#include "dualpol/errors.hpp"

#include <cmath>
#include <numbers>

namespace dualpol
{
    namespace
    {
        std::mt19937_64 seeded(std::uint64_t seed, std::uint64_t stream, std::uint64_t sub)
        {
            std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32),
                              std::uint32_t(stream), std::uint32_t(stream >> 32),
                              std::uint32_t(sub), std::uint32_t(sub >> 32)};
            return std::mt19937_64(seq);
        }

        // U Lambda^(1/2) restricted to the effective rank
        arma::cx_mat coloring(const SpatialCovariance &stats)
        {
            const arma::uword r = stats.effective_rank;
            arma::vec amp = arma::sqrt(arma::clamp(stats.eigvals.head(r), 0.0, arma::datum::inf));
            arma::cx_mat L = stats.eigvecs.cols(0, r - 1);
            L.each_row() %= arma::conv_to<arma::cx_rowvec>::from(amp.t());
            return L;
        }

        void check_users(arma::uword n_users, const SpatialCovariance &stats)
        {
            if (n_users == 0 || n_users % 2 != 0)
                throw invalid_input("draw_channel: user count must be even and positive");
            if (stats.effective_rank == 0)
                throw invalid_input("draw_channel: covariance has zero effective rank");
        }

        void check_chi(double chi)
        {
            if (!(chi >= 0.0 && chi <= 1.0))
                throw invalid_input("draw_channel: chi must lie in [0,1]");
        }

        void finish(const SpatialCovariance &stats, GroupChannel &ch, Rng &rng)
        {
            ch.Z = rng.complex_gaussian(ch.G.n_rows, ch.G.n_cols);
            ch.H = color(stats, ch, ch.G);
        }
    }

    Rng::Rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream)
        : engine_(seeded(seed, stream, substream)), normal_(0.0, 1.0) {}

    double Rng::uniform(double lo, double hi)
    {
        std::uniform_real_distribution<double> u(lo, hi);
        return u(engine_);
    }

    arma::cx_mat Rng::complex_gaussian(arma::uword rows, arma::uword cols)
    {
        arma::cx_mat X(rows, cols);
        const double s = std::sqrt(0.5);
        // column-major fill keeps the draw order independent of matrix layout tricks
        for (arma::uword j = 0; j < cols; ++j)
            for (arma::uword i = 0; i < rows; ++i)
            {
                const double re = normal_(engine_);
                const double im = normal_(engine_);
                X(i, j) = {s * re, s * im};
            }
        return X;
    }

    arma::cx_mat corrupt_csit(const arma::cx_mat &G, double tau, Rng &rng)
    {
        if (!(tau >= 0.0 && tau <= 1.0))
            throw invalid_input("corrupt_csit: tau must lie in [0,1]");
        if (tau == 0.0)
            return G;
        return std::sqrt(1.0 - tau * tau) * G + tau * rng.complex_gaussian(G.n_rows, G.n_cols);
    }

    GroupChannel draw_channel(const SpatialCovariance &stats, const PolarizationModel &pol,
                              arma::uword n_users, Rng &rng, bool dual_pol)
    {
        check_users(n_users, stats);
        check_chi(pol.chi);
        const arma::uword r = stats.effective_rank;
        GroupChannel ch;
        ch.dual_pol = dual_pol;
        if (dual_pol)
        {
            ch.G = rng.complex_gaussian(2 * r, n_users);
            ch.scale.ones(2, n_users);
            const double x = std::sqrt(pol.chi);
            for (arma::uword k = 0; k < n_users; ++k)
                ch.scale(ch.vertical(k) ? 1 : 0, k) = x;
        }
        else
        {
            ch.G = rng.complex_gaussian(r, n_users);
            ch.scale.ones(1, n_users);
        }
        finish(stats, ch, rng);
        return ch;
    }

    GroupChannel draw_mismatched_channel(const SpatialCovariance &stats, const PolarizationModel &pol,
                                         double theta_max, arma::uword n_users, Rng &rng)
    {
        check_users(n_users, stats);
        check_chi(pol.chi);
        if (!(theta_max >= 0.0 && theta_max <= std::numbers::pi / 2 + 1e-15))
            throw invalid_input("draw_mismatched_channel: theta_max must lie in [0, pi/2]");

        const arma::uword r = stats.effective_rank;
        GroupChannel ch;
        ch.G = rng.complex_gaussian(2 * r, n_users);
        ch.scale.set_size(2, n_users);
        const double x = std::sqrt(pol.chi);
        for (arma::uword k = 0; k < n_users; ++k)
        {
            const double t = theta_max > 0.0 ? rng.uniform(-theta_max, theta_max) : 0.0;
            const double c = std::cos(t), s = std::sin(t);
            if (ch.vertical(k))
            {
                ch.scale(0, k) = c - x * s;
                ch.scale(1, k) = s + x * c;
            }
            else
            {
                ch.scale(0, k) = x * c - s;
                ch.scale(1, k) = x * s + c;
            }
        }
        finish(stats, ch, rng);
        return ch;
    }

    arma::cx_mat color(const SpatialCovariance &stats, const GroupChannel &ch, const arma::cx_mat &X)
    {
        const arma::cx_mat L = coloring(stats);
        const arma::uword r = L.n_cols, n = X.n_cols, half = L.n_rows;
        if (X.n_rows != (ch.dual_pol ? 2 * r : r))
            throw invalid_input("color: white factor does not match the covariance rank");

        if (!ch.dual_pol)
        {
            arma::cx_mat S = X;
            S.each_row() %= arma::conv_to<arma::cx_rowvec>::from(ch.scale.row(0));
            return L * S;
        }
        arma::cx_mat H(2 * half, n);
        for (arma::uword p = 0; p < 2; ++p)
        {
            arma::cx_mat S = X.rows(p * r, p * r + r - 1);
            S.each_row() %= arma::conv_to<arma::cx_rowvec>::from(ch.scale.row(p));
            H.rows(p * half, p * half + half - 1) = L * S;
        }
        return H;
    }

    arma::cx_mat csit_factor(const GroupChannel &ch, double tau_sq)
    {
        if (!(tau_sq >= 0.0 && tau_sq <= 1.0))
            throw invalid_input("csit_factor: tau^2 must lie in [0,1]");
        if (tau_sq == 0.0)
            return ch.G;
        return std::sqrt(1.0 - tau_sq) * ch.G + std::sqrt(tau_sq) * ch.Z;
    }

    arma::cx_mat csit_channel(const SpatialCovariance &stats, const GroupChannel &ch, double tau_sq)
    {
        return color(stats, ch, csit_factor(ch, tau_sq));
    }

    arma::cx_mat csit_block(const SpatialCovariance &stats, const GroupChannel &ch, double tau_sq,
                            arma::uword p, arma::uword q)
    {
        if (!ch.dual_pol || p > 1 || q > 1)
            throw invalid_input("csit_block: dual-polarized channel and p, q in {0,1} required");
        if (!(tau_sq >= 0.0 && tau_sq <= 1.0))
            throw invalid_input("csit_block: tau^2 must lie in [0,1]");

        const arma::cx_mat L = coloring(stats);
        const arma::uword r = L.n_cols, half = ch.n_users() / 2;
        const arma::uword c0 = q * half, c1 = c0 + half - 1;
        arma::cx_mat X = ch.G.submat(p * r, c0, p * r + r - 1, c1);
        if (tau_sq > 0.0)
            X = std::sqrt(1.0 - tau_sq) * X + std::sqrt(tau_sq) * ch.Z.submat(p * r, c0, p * r + r - 1, c1);
        X.each_row() %= arma::conv_to<arma::cx_rowvec>::from(ch.scale.submat(p, c0, p, c1));
        return L * X;
    }
}
