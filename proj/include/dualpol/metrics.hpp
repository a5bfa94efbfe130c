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
#include "dualpol/precode.hpp"
#include "dualpol/scenario.hpp"

#include <armadillo>
#include <cstdint>
#include <functional>
#include <utility>
#include <optional>
#include <vector>

namespace dualpol
{
    struct AsymptoticSolution;

    // Per-user powers, users ordered group by group (vertical users first in each group)
    struct SinrReport
    {
        arma::vec signal;
        arma::vec intra;  // same group (BD) or same subgroup (BDS)
        arma::vec cross;  // other subgroup of the same group (BDS only, zero for BD)
        arma::vec inter;  // other groups
        arma::vec noise;
        arma::vec sinr;
        arma::vec rate;
        double sum_rate = 0.0;
    };

    // Generic evaluation of any precoder set with equal stream power P/N and unit noise
    SinrReport evaluate_sinr(const std::vector<GroupChannel> &channels, const PrecoderSet &pre, double power);

    SinrReport sinr_bd(const std::vector<GroupChannel> &channels, const PrecoderSet &pre, double power);
    SinrReport sinr_bds(const std::vector<GroupChannel> &channels, const PrecoderSet &pre, double power);

    enum class Mode
    {
        BD,
        BDS,
        SWITCH
    };

    const char *mode_name(Mode m);

    struct McSummary
    {
        Mode mode = Mode::BD;
        arma::uword n_trials = 0;
        double mean = 0.0;
        double stderr_ = 0.0;
        double mean_sinr = 0.0;      // average over trials of the per-user mean SINR
        double bds_fraction = 0.0;   // SWITCH only: share of trials run in BDS mode
        std::vector<double> samples; // per-trial sum rates
    };

    // How the switching rule sees the channel and what drives the per-trial randomness
    struct TrialOptions
    {
        std::optional<std::pair<double, double>> chi_range;   // chi ~ U[lo, hi] per trial
        std::optional<std::pair<double, double>> tau_range;   // tau^2_BD ~ U[lo, hi] per trial
        bool bds_tau_squared = true;          // tau^2_BDS = (tau^2_BD)^2 when tau is random
        std::optional<arma::uword> n_bits;    // feedback bits; sets both tau values
        bool switch_uses_chi_eff = true;      // mismatch: decide with chi_eff instead of chi
        unsigned threads = 0;                 // 0: take the environment setting
        std::uint64_t substream = 0;          // separates independent pipelines sharing a seed
    };

    // Per-trial outcome for a set of modes, all evaluated on the same draws
    struct TrialOutcome
    {
        std::vector<double> sum_rate;
        std::vector<double> mean_sinr;
        bool switched_to_bds = false;
    };

    // One coherence block: draws channels from rng and evaluates every requested mode.
    // base is needed for SWITCH (asymptotic BDS solution at chi = 0).
    TrialOutcome run_trial(const GroupScenario &sc, double chi, double tau_sq_bd, double tau_sq_bds,
                           const std::vector<Mode> &modes, const AsymptoticSolution *base, Rng &rng,
                           bool switch_uses_chi_eff = true);

    std::vector<McSummary> run_paired(const GroupScenario &sc, const std::vector<Mode> &modes,
                                      arma::uword n_trials, std::uint64_t seed, const TrialOptions &opt = {});

    McSummary run_monte_carlo(const GroupScenario &sc, Mode mode, arma::uword n_trials, std::uint64_t seed,
                              const TrialOptions &opt = {});

    // Mean and standard error (sample std / sqrt(n)), compensated summation
    std::pair<double, double> mean_stderr(const std::vector<double> &x);

    // Worker count: DUALPOL_THREADS if set, else hardware concurrency
    unsigned thread_count(unsigned requested = 0);

    // Runs f(i) for i in [0, n) on up to thread_count() workers
    void parallel_for(arma::uword n, unsigned threads, const std::function<void(arma::uword)> &f);
}
