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

#include "dualpol/metrics.hpp"
#include "dualpol/errors.hpp"
#include "dualpol/modeswitch.hpp"
#include "dualpol/rmt.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

namespace dualpol
{
    const char *mode_name(Mode m)
    {
        switch (m)
        {
        case Mode::BD:
            return "BD";
        case Mode::BDS:
            return "BDS";
        default:
            return "SWITCH";
        }
    }

    SinrReport evaluate_sinr(const std::vector<GroupChannel> &channels, const PrecoderSet &pre, double power)
    {
        if (channels.size() != pre.V.size() || channels.empty())
            throw invalid_input("evaluate_sinr: channel and precoder group counts differ");
        const arma::uword G = channels.size(), nbar = channels.front().n_users();
        const arma::uword N = G * nbar, half = nbar / 2;

        arma::cx_mat H, V;
        for (arma::uword g = 0; g < G; ++g)
        {
            H = arma::join_rows(H, channels[g].H);
            V = arma::join_rows(V, pre.V[g]);
        }
        if (H.n_rows != V.n_rows)
            throw invalid_input("evaluate_sinr: antenna counts differ");

        const arma::mat Pw = power / double(N) * arma::square(arma::abs(H.t() * V));
        SinrReport rep;
        for (arma::vec *v : {&rep.signal, &rep.intra, &rep.cross, &rep.inter, &rep.noise, &rep.sinr, &rep.rate})
            v->zeros(N);
        rep.noise.ones();

        const bool subgroups = pre.scheme == Scheme::BDS;
        for (arma::uword u = 0; u < N; ++u)
        {
            const arma::uword g = u / nbar, pu = (u % nbar) / half;
            for (arma::uword j = 0; j < N; ++j)
            {
                const double x = Pw(u, j);
                if (j == u)
                    rep.signal(u) = x;
                else if (j / nbar != g)
                    rep.inter(u) += x;
                else if (subgroups && (j % nbar) / half != pu)
                    rep.cross(u) += x;
                else
                    rep.intra(u) += x;
            }
        }
        rep.sinr = rep.signal / (rep.intra + rep.cross + rep.inter + rep.noise);
        rep.rate = arma::log2(1.0 + rep.sinr);
        rep.sum_rate = arma::accu(rep.rate);
        return rep;
    }

    SinrReport sinr_bd(const std::vector<GroupChannel> &channels, const PrecoderSet &pre, double power)
    {
        if (pre.scheme != Scheme::BD)
            throw invalid_input("sinr_bd: precoders were not built in BD mode");
        return evaluate_sinr(channels, pre, power);
    }

    SinrReport sinr_bds(const std::vector<GroupChannel> &channels, const PrecoderSet &pre, double power)
    {
        if (pre.scheme != Scheme::BDS)
            throw invalid_input("sinr_bds: precoders were not built in BDS mode");
        return evaluate_sinr(channels, pre, power);
    }

    std::pair<double, double> mean_stderr(const std::vector<double> &x)
    {
        if (x.empty())
            return {0.0, 0.0};
        // Kahan sums keep the reduction independent of trial count scale
        auto ksum = [](const std::vector<double> &v, auto &&f)
        {
            double s = 0.0, c = 0.0;
            for (double a : v)
            {
                const double y = f(a) - c;
                const double t = s + y;
                c = (t - s) - y;
                s = t;
            }
            return s;
        };
        const double n = double(x.size());
        const double mean = ksum(x, [](double a) { return a; }) / n;
        if (x.size() < 2)
            return {mean, 0.0};
        const double var = ksum(x, [mean](double a) { return (a - mean) * (a - mean); }) / (n - 1.0);
        return {mean, std::sqrt(var / n)};
    }

    unsigned thread_count(unsigned requested)
    {
        if (requested > 0)
            return requested;
        if (const char *env = std::getenv("DUALPOL_THREADS"))
        {
            const long v = std::strtol(env, nullptr, 10);
            if (v > 0)
                return unsigned(v);
        }
        return std::max(1u, std::thread::hardware_concurrency());
    }

    void parallel_for(arma::uword n, unsigned threads, const std::function<void(arma::uword)> &f)
    {
        const unsigned workers = std::min<arma::uword>(thread_count(threads), std::max<arma::uword>(n, 1));
        if (workers <= 1)
        {
            for (arma::uword i = 0; i < n; ++i)
                f(i);
            return;
        }
        std::atomic<arma::uword> next{0};
        std::exception_ptr err;
        std::mutex err_mutex;
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&]
                              {
                for (arma::uword i = next++; i < n; i = next++)
                {
                    try
                    {
                        f(i);
                    }
                    catch (...)
                    {
                        std::lock_guard<std::mutex> lk(err_mutex);
                        if (!err)
                            err = std::current_exception();
                        next = n;
                    }
                } });
        for (auto &t : pool)
            t.join();
        if (err)
            std::rethrow_exception(err);
    }

    TrialOutcome run_trial(const GroupScenario &sc, double chi, double tau_sq_bd, double tau_sq_bds,
                           const std::vector<Mode> &modes, const AsymptoticSolution *base, Rng &rng,
                           bool switch_uses_chi_eff)
    {
        const CellLayout &cell = *sc.cell;
        std::vector<GroupChannel> ch;
        ch.reserve(cell.groups);
        const PolarizationModel pol{chi};
        for (arma::uword g = 0; g < cell.groups; ++g)
        {
            if (sc.theta_max > 0.0)
                ch.push_back(draw_mismatched_channel(cell.cov[g], pol, sc.theta_max, cell.users_per_group, rng));
            else
                ch.push_back(draw_channel(cell.cov[g], pol, cell.users_per_group, rng, cell.dual_pol));
        }

        std::optional<SinrReport> rep[2];
        auto eval = [&](Scheme s) -> const SinrReport &
        {
            auto &slot = rep[s == Scheme::BD ? 0 : 1];
            if (!slot)
            {
                const double tau = s == Scheme::BD ? tau_sq_bd : tau_sq_bds;
                slot = evaluate_sinr(ch, build_all(sc, ch, s, tau), sc.power);
            }
            return *slot;
        };

        TrialOutcome out;
        for (Mode m : modes)
        {
            Scheme s;
            if (m == Mode::SWITCH)
            {
                if (!base)
                    throw invalid_input("run_trial: SWITCH needs a base asymptotic solution");
                double chi_dec = chi;
                if (sc.theta_max > 0.0 && switch_uses_chi_eff)
                    chi_dec = mismatch_effective_stats(chi, sc.theta_max).chi_eff;
                s = select_mode_tau(tau_sq_bd, chi_dec, *base).mode;
                out.switched_to_bds = s == Scheme::BDS;
            }
            else
                s = m == Mode::BD ? Scheme::BD : Scheme::BDS;
            const SinrReport &r = eval(s);
            out.sum_rate.push_back(r.sum_rate);
            out.mean_sinr.push_back(arma::mean(r.sinr));
        }
        return out;
    }

    std::vector<McSummary> run_paired(const GroupScenario &sc, const std::vector<Mode> &modes,
                                      arma::uword n_trials, std::uint64_t seed, const TrialOptions &opt)
    {
        sc.validate();
        if (n_trials < 1)
            throw invalid_input("run_paired: n_trials must be at least 1");
        const bool need_base = std::find(modes.begin(), modes.end(), Mode::SWITCH) != modes.end();
        std::optional<AsymptoticSolution> base;
        if (need_base)
        {
            GroupScenario s0 = sc;
            s0.chi = 0.0;
            s0.theta_max = 0.0;
            base = asym_bds(s0);
        }

        const arma::uword K = modes.size();
        std::vector<std::vector<double>> rates(K, std::vector<double>(n_trials));
        std::vector<std::vector<double>> sinrs(K, std::vector<double>(n_trials));
        std::vector<char> bds(n_trials, 0);

        parallel_for(n_trials, opt.threads, [&](arma::uword i)
                     {
            Rng rng(seed, i, opt.substream);
            double chi = sc.chi;
            if (opt.chi_range)
                chi = rng.uniform(opt.chi_range->first, opt.chi_range->second);
            double tbd = sc.tau_sq_bd, tbds = sc.tau_sq_bds;
            if (opt.n_bits)
            {
                const FeedbackBudget b{*opt.n_bits, sc.cell->r};
                tbd = tau_from_bits(b, Scheme::BD);
                tbds = tau_from_bits(b, Scheme::BDS);
            }
            else if (opt.tau_range)
            {
                tbd = rng.uniform(opt.tau_range->first, opt.tau_range->second);
                tbds = opt.bds_tau_squared ? tbd * tbd : tbd;
            }
            const auto o = run_trial(sc, chi, tbd, tbds, modes, base ? &*base : nullptr, rng, opt.switch_uses_chi_eff);
            for (arma::uword k = 0; k < K; ++k)
            {
                rates[k][i] = o.sum_rate[k];
                sinrs[k][i] = o.mean_sinr[k];
            }
            bds[i] = o.switched_to_bds; });

        std::vector<McSummary> out(K);
        for (arma::uword k = 0; k < K; ++k)
        {
            out[k].mode = modes[k];
            out[k].n_trials = n_trials;
            std::tie(out[k].mean, out[k].stderr_) = mean_stderr(rates[k]);
            out[k].mean_sinr = mean_stderr(sinrs[k]).first;
            if (modes[k] == Mode::SWITCH)
                out[k].bds_fraction = double(std::count(bds.begin(), bds.end(), 1)) / double(n_trials);
            out[k].samples = std::move(rates[k]);
        }
        return out;
    }

    McSummary run_monte_carlo(const GroupScenario &sc, Mode mode, arma::uword n_trials, std::uint64_t seed,
                              const TrialOptions &opt)
    {
        return run_paired(sc, {mode}, n_trials, seed, opt).front();
    }
}
