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

#include "dualpol/modeswitch.hpp"
#include "dualpol/errors.hpp"

#include <cmath>
#include <limits>

namespace dualpol
{
    double tau_from_bits(const FeedbackBudget &b, Scheme scheme)
    {
        if (b.n_bits < 1 || b.r < 1)
            throw invalid_input("tau_from_bits: n_bits and r must be at least 1");
        if (scheme == Scheme::BD)
            return std::exp2(-double(b.n_bits) / double(2 * b.r - 1));
        if (b.r == 1)
            throw invalid_input("tau_from_bits: BDS needs r > 1");
        return std::exp2(-double(b.n_bits) / double(b.r - 1));
    }

    double switch_margin(const AsymptoticSolution &base)
    {
        if (base.groups == 0)
            throw invalid_input("switch_margin: empty base solution");
        double acc = 0.0;
        for (arma::uword g = 0; g < base.groups; ++g)
            for (int p = 0; p < 2; ++p)
            {
                const double d = std::pow(1.0 + base.m(g, p), 2);
                const double B0 = base.xi_sq(g, p) * base.upsilon(g, p);
                acc += (d - 1.0) / (B0 * d);
            }
        return acc / double(2 * base.groups);
    }

    double switch_threshold_bits(const AsymptoticSolution &base, double chi, arma::uword r)
    {
        if (!(chi >= 0.0 && chi <= 1.0))
            throw invalid_input("switch_threshold_bits: chi must lie in [0,1]");
        if (r < 1)
            throw invalid_input("switch_threshold_bits: r must be at least 1");
        if (chi == 0.0)
            return std::numeric_limits<double>::infinity();
        return double(2 * r - 1) * (std::log2(1.0 + switch_margin(base)) - std::log2(chi));
    }

    ModeDecision select_mode(const FeedbackBudget &budget, double chi, const AsymptoticSolution &base)
    {
        ModeDecision d;
        d.chi_used = chi;
        d.threshold_bits = switch_threshold_bits(base, chi, budget.r);
        d.margin = d.threshold_bits - double(budget.n_bits);
        d.mode = double(budget.n_bits) <= d.threshold_bits ? Scheme::BDS : Scheme::BD;
        return d;
    }

    ModeDecision select_mode_tau(double tau_sq_bd, double chi, const AsymptoticSolution &base)
    {
        if (!(tau_sq_bd >= 0.0 && tau_sq_bd <= 1.0))
            throw invalid_input("select_mode_tau: tau^2 must lie in [0,1]");
        ModeDecision d;
        d.chi_used = chi;
        const double bound = (1.0 + switch_margin(base)) * tau_sq_bd;
        d.threshold_bits = chi > 0.0 ? std::numeric_limits<double>::quiet_NaN() : std::numeric_limits<double>::infinity();
        d.margin = bound - chi;
        d.mode = chi <= bound ? Scheme::BDS : Scheme::BD;
        return d;
    }

    double chi_bound_exact(const AsymptoticSolution &base, double tau_sq)
    {
        const double c0 = bds_c0(base);
        double acc = 0.0;
        for (arma::uword g = 0; g < base.groups; ++g)
            for (int p = 0; p < 2; ++p)
            {
                const double D0 = std::pow(1.0 + base.m(g, p), 2) - 1.0;
                const double B0 = base.xi_sq(g, p) * base.upsilon(g, p);
                const double E0 = base.inter(g, p);
                const double rest = (1.0 + E0) * (D0 + 1.0);
                acc += (B0 * D0 + B0 + rest) * tau_sq / (c0 * (B0 * D0 * tau_sq * tau_sq + B0 + rest));
            }
        return acc / double(2 * base.groups);
    }
}
