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
#include "dualpol/rmt.hpp"

#include <armadillo>

namespace dualpol
{
    struct FeedbackBudget
    {
        arma::uword n_bits = 1;
        arma::uword r = 1;
    };

    struct ModeDecision
    {
        Scheme mode = Scheme::BD;
        double threshold_bits = 0.0; // +inf when chi = 0
        double chi_used = 0.0;
        double margin = 0.0;         // threshold_bits - n_bits (bit form) or chi bound - chi (chi form)
    };

    // RVQ distortion bound taken with equality: 2^(-n / (2r - 1)) for BD, 2^(-n / (r - 1)) for BDS
    double tau_from_bits(const FeedbackBudget &budget, Scheme scheme);

    // E_{g,p}[((1+m)^2 - 1) / (xi^2 Upsilon (1+m)^2)] from a BDS solution at chi = 0
    double switch_margin(const AsymptoticSolution &base);

    // (2r - 1) (log2(1 + margin) - log2 chi); +inf for chi = 0
    double switch_threshold_bits(const AsymptoticSolution &base, double chi, arma::uword r);

    // BDS iff n_bits <= threshold
    ModeDecision select_mode(const FeedbackBudget &budget, double chi, const AsymptoticSolution &base);

    // Equivalent rule in terms of the BD CSIT error: BDS iff chi <= (1 + margin) tau^2.
    // No bit budget is involved, so threshold_bits is NaN (or +inf at chi = 0).
    ModeDecision select_mode_tau(double tau_sq_bd, double chi, const AsymptoticSolution &base);

    // Largest chi for which BDS wins according to the un-simplified inequality, which keeps the
    // inter-group term E0 and uses c0
    double chi_bound_exact(const AsymptoticSolution &base, double tau_sq);
}
