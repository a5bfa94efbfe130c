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

#include "dualpol/errors.hpp"
#include "dualpol/modeswitch.hpp"

#include <cmath>
#include <limits>
#include <numbers>

using namespace dualpol;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{
    const AsymptoticSolution &base()
    {
        static const AsymptoticSolution b = []
        {
            CellSpec s;
            s.array = ArrayLayout::ula(60, 0.5);
            for (int g = 0; g < 4; ++g)
            {
                GroupGeometry gg;
                gg.azimuth = -std::numbers::pi / 4 + std::numbers::pi / 6 * g;
                gg.spread = std::numbers::pi / 12;
                s.groups.push_back(gg);
            }
            GroupScenario sc;
            sc.cell = build_cell(s);
            sc.power = std::pow(10.0, 2.5);
            return asym_bds(sc);
        }();
        return b;
    }
}

TEST_CASE("tau_from_bits - distortion bounds")
{
    CHECK_THAT(tau_from_bits({21, 11}, Scheme::BD), WithinRel(0.5, 1e-15));
    CHECK_THAT(tau_from_bits({20, 11}, Scheme::BDS), WithinRel(0.25, 1e-15));
    CHECK_THROWS_AS(tau_from_bits({0, 11}, Scheme::BD), invalid_input);
    CHECK_THROWS_AS(tau_from_bits({5, 1}, Scheme::BDS), invalid_input);
}

TEST_CASE("switch_threshold_bits - shape in chi and r")
{
    const auto &b = base();
    CHECK(std::isinf(switch_threshold_bits(b, 0.0, 11)));
    double prev = std::numeric_limits<double>::infinity();
    for (double chi : {0.05, 0.1, 0.2, 0.5, 1.0})
    {
        const double t = switch_threshold_bits(b, chi, 11);
        CHECK(t < prev);
        prev = t;
    }
    CHECK(switch_threshold_bits(b, 0.2, 12) > switch_threshold_bits(b, 0.2, 11));
    const double X = switch_margin(b);
    CHECK(X > 0.0);
    CHECK_THAT(switch_threshold_bits(b, 0.1, 11), WithinRel(21.0 * (std::log2(1.0 + X) - std::log2(0.1)), 1e-14));
    CHECK_THROWS_AS(switch_threshold_bits(b, 1.5, 11), invalid_input);
}

TEST_CASE("select_mode - single transition in bits and in chi")
{
    const auto &b = base();
    CHECK(select_mode({1, 11}, 1.0, b).mode == Scheme::BDS);
    CHECK(select_mode({100000, 11}, 1.0, b).mode == Scheme::BD);
    int flips = 0;
    Scheme last = Scheme::BDS;
    for (arma::uword n = 1; n <= 200; ++n)
    {
        const Scheme s = select_mode({n, 11}, 0.2, b).mode;
        flips += s != last;
        last = s;
    }
    CHECK(flips == 1);
    CHECK(select_mode({500, 11}, 0.0, b).mode == Scheme::BDS);
}

TEST_CASE("select_mode - bit form and chi form agree")
{
    const auto &b = base();
    for (arma::uword n : {10u, 40u, 60u, 80u, 120u})
        for (double chi : {0.01, 0.1, 0.2, 0.4, 0.9})
        {
            const FeedbackBudget bud{n, 11};
            const auto bits = select_mode(bud, chi, b);
            const auto tau = select_mode_tau(tau_from_bits(bud, Scheme::BD), chi, b);
            CHECK(bits.mode == tau.mode);
            CHECK((bits.margin >= 0.0) == (tau.margin >= 0.0));
        }
    CHECK(std::isnan(select_mode_tau(0.2, 0.1, b).threshold_bits));
    CHECK(std::isinf(select_mode_tau(0.2, 0.0, b).threshold_bits));
    CHECK_THROWS_AS(select_mode_tau(1.2, 0.1, b), invalid_input);
}

TEST_CASE("chi_bound_exact - close to tau^2 when the intra term dominates")
{
    const auto &b = base();
    for (double t : {0.1, 0.2})
    {
        const double bound = chi_bound_exact(b, t);
        CHECK(bound > 0.5 * t);
        CHECK(bound < 1.5 * t);
    }
}
