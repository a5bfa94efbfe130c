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

#include "catch_amalgamated.hpp"

#include "dualpol/corrstats.hpp"
#include "dualpol/errors.hpp"

#include <cmath>
#include <complex>
#include <numbers>

using namespace dualpol;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{
    constexpr double pi = std::numbers::pi;

    // Composite midpoint rule with many nodes; independent of the adaptive kernel
    arma::cx_mat brute_one_ring(double center, double spread, const ArrayLayout &a, int nodes = 20000)
    {
        const arma::uword n = a.size();
        arma::cx_mat R(n, n, arma::fill::zeros);
        const double h = 2.0 * spread / nodes;
        for (int k = 0; k < nodes; ++k)
        {
            const double ang = center - spread + (k + 0.5) * h;
            arma::cx_vec v(n);
            for (arma::uword m = 0; m < n; ++m)
            {
                const double ph = pi * (std::cos(ang) * a.positions(0, m) + std::sin(ang) * a.positions(1, m));
                v(m) = std::polar(1.0, -ph);
            }
            R += v * v.t();
        }
        return R / double(nodes);
    }
}

TEST_CASE("integrate_simpson - polynomial and oscillatory integrands")
{
    const auto cubic = integrate_simpson([](double x) { return std::complex<double>(x * x * x, 1.0); }, 0.0, 2.0);
    CHECK_THAT(cubic.real(), WithinAbs(4.0, 1e-12));
    CHECK_THAT(cubic.imag(), WithinAbs(2.0, 1e-12));

    const auto osc = integrate_simpson([](double x) { return std::exp(std::complex<double>(0.0, 40.0 * x)); }, 0.0, 1.0);
    const auto exact = (std::exp(std::complex<double>(0.0, 40.0)) - 1.0) / std::complex<double>(0.0, 40.0);
    CHECK(std::abs(osc - exact) < 1e-9);
}

TEST_CASE("integrate_simpson - exhausted depth raises numerical_error")
{
    auto spiky = [](double x) { return std::complex<double>(1.0 / std::sqrt(std::abs(x - 0.3) + 1e-300), 0.0); };
    CHECK_THROWS_AS(integrate_simpson(spiky, 0.0, 1.0, 1e-14, 6), numerical_error);
}

TEST_CASE("ula - positions on the y-axis")
{
    const auto a = ArrayLayout::ula(4, 0.5);
    REQUIRE(a.size() == 4);
    CHECK(arma::accu(arma::abs(a.positions.row(0))) == 0.0);
    CHECK_THAT(a.positions(1, 3), WithinAbs(1.5, 1e-15));
    CHECK_THROWS_AS(ArrayLayout::ula(0, 0.5), invalid_input);
    CHECK_THROWS_AS(ArrayLayout::ula(3, -1.0), invalid_input);
}

TEST_CASE("one_ring_covariance - matches brute-force quadrature")
{
    const auto a = ArrayLayout::ula(12, 0.5);
    GroupGeometry g;
    g.azimuth = pi / 7;
    g.spread = pi / 12;
    const auto R = one_ring_covariance(g, a);
    const arma::cx_mat ref = brute_one_ring(g.azimuth, g.spread, a);
    CHECK(arma::abs(R.matrix - ref).max() < 1e-7);
    CHECK(arma::abs(R.matrix - R.matrix.t()).max() == 0.0);
    CHECK(arma::abs(arma::real(R.matrix.diag()) - 1.0).max() < 1e-12);
}

TEST_CASE("one_ring_covariance - eigensystem sorted and consistent")
{
    const auto a = ArrayLayout::ula(60, 0.5);
    GroupGeometry g;
    g.azimuth = -pi / 4;
    g.spread = pi / 12;
    const auto R = one_ring_covariance(g, a);
    CHECK_THAT(arma::accu(R.eigvals), WithinRel(60.0, 1e-10));
    for (arma::uword k = 1; k < R.eigvals.n_elem; ++k)
        CHECK(R.eigvals(k) <= R.eigvals(k - 1));
    const arma::cx_mat back = R.eigvecs * arma::diagmat(arma::conv_to<arma::cx_vec>::from(R.eigvals)) * R.eigvecs.t();
    CHECK(arma::abs(back - R.matrix).max() < 1e-10);
}

TEST_CASE("one_ring_covariance - effective ranks of the default four-group cell")
{
    // Oracle: eigenvalues above 1e-6 * max from LAPACK on the brute-force matrix
    const auto a = ArrayLayout::ula(60, 0.5);
    const arma::uvec expected{11, 13, 13, 11};
    for (arma::uword gi = 0; gi < 4; ++gi)
    {
        GroupGeometry g;
        g.azimuth = -pi / 4 + pi / 6 * double(gi);
        g.spread = pi / 12;
        const auto R = one_ring_covariance(g, a);
        const arma::vec ev = arma::eig_sym(arma::cx_mat(brute_one_ring(g.azimuth, g.spread, a, 40000)));
        const arma::uword oracle = arma::accu(ev > 1e-6 * ev.max());
        CHECK(R.effective_rank == oracle);
        CHECK(R.effective_rank == expected(gi));
    }
}

TEST_CASE("one_ring_covariance - rejects invalid geometry")
{
    const auto a = ArrayLayout::ula(4, 0.5);
    GroupGeometry g;
    g.spread = 0.0;
    CHECK_THROWS_AS(one_ring_covariance(g, a), invalid_input);
    g.spread = pi / 2;
    CHECK_THROWS_AS(one_ring_covariance(g, a), invalid_input);
}

TEST_CASE("eigendecompose - rejects non-Hermitian input")
{
    arma::cx_mat A(2, 2, arma::fill::zeros);
    A(0, 1) = 1.0;
    CHECK_THROWS_AS(eigendecompose(A), invalid_input);
}

TEST_CASE("steering_covariance - rank one with unit diagonal")
{
    const auto R = steering_covariance(0.3, ArrayLayout::ula(8, 0.5));
    CHECK(R.effective_rank == 1);
    CHECK_THAT(R.eigvals(0), WithinRel(8.0, 1e-12));
}

TEST_CASE("elevation_covariance - zero ring radius falls back to a single ray")
{
    const auto v = ArrayLayout::ula(10, 0.5);
    const auto R = elevation_covariance(60.0, 100.0, 0.0, v);
    CHECK(R.effective_rank == 1);
    const auto ref = steering_covariance(std::atan(0.6), v);
    CHECK(arma::abs(R.matrix - ref.matrix).max() < 1e-12);
}

TEST_CASE("elevation_covariance - interval spanned by the ring")
{
    const auto v = ArrayLayout::ula(10, 0.5);
    const double d = 60.0, s = d * std::tan(pi / 12);
    const auto R = elevation_covariance(60.0, d, s, v);
    const double lo = std::atan(60.0 / d), hi = std::atan(60.0 / (d - s));
    const arma::cx_mat ref = brute_one_ring(0.5 * (lo + hi), 0.5 * (hi - lo), v);
    CHECK(arma::abs(R.matrix - ref).max() < 1e-7);
    CHECK_THROWS_AS(elevation_covariance(60.0, 10.0, 20.0, v), invalid_input);
}

TEST_CASE("mismatch_effective_stats - closed forms")
{
    const auto aligned = mismatch_effective_stats(0.3, 0.0);
    CHECK_THAT(aligned.c_eff, WithinAbs(1.0, 1e-15));
    CHECK_THAT(aligned.chi_eff, WithinAbs(0.3, 1e-15));

    // theta_max = pi/4, chi = 0: E[cos^2] = 1/2 + 1/pi
    const auto m = mismatch_effective_stats(0.0, pi / 4);
    CHECK_THAT(m.c_eff, WithinAbs(0.5 + 1.0 / pi, 1e-14));
    CHECK_THAT(m.chi_eff, WithinAbs((0.5 - 1.0 / pi) / (0.5 + 1.0 / pi), 1e-14));
    CHECK_THAT(m.chi_eff, WithinAbs(0.22203, 1e-5));

    CHECK_THROWS_AS(mismatch_effective_stats(1.5, 0.1), invalid_input);
    CHECK_THROWS_AS(mismatch_effective_stats(0.1, 2.0), invalid_input);
}

TEST_CASE("mismatch_effective_stats - agrees with sampled rotation gains")
{
    const double chi = 0.2, tmax = 0.22 * pi;
    std::mt19937_64 eng(7);
    std::uniform_real_distribution<double> u(-tmax, tmax);
    double co = 0.0, cross = 0.0;
    const int n = 400000;
    for (int i = 0; i < n; ++i)
    {
        const double t = u(eng), c = std::cos(t), s = std::sin(t);
        // vertical user: gains on (V, H) ports after rotation
        co += std::pow(c, 2) + chi * std::pow(s, 2);
        cross += std::pow(s, 2) + chi * std::pow(c, 2);
    }
    const auto m = mismatch_effective_stats(chi, tmax);
    CHECK_THAT(co / n, WithinAbs(m.c_eff, 2e-3));
    CHECK_THAT(cross / co, WithinAbs(m.chi_eff, 3e-3));
}
