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

#include "dualpol/runner.hpp"
#include "dualpol/errors.hpp"
#include "dualpol/metrics.hpp"
#include "dualpol/modeswitch.hpp"
#include "dualpol/rmt.hpp"
#include "dualpol/scene3d.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace dualpol
{
    namespace
    {
        struct Geometry
        {
            std::shared_ptr<const CellLayout> cell;
            std::optional<Scenario3D> scene;
        };

        Geometry build_geometry(const ScenarioConfig &c)
        {
            Geometry g;
            if (c.three_d)
            {
                Scene3DSpec s;
                s.elev_elements = c.elev_elements;
                s.azim_elements = c.azim_elements;
                s.spacing = c.spacing;
                s.height = c.height;
                s.distances = c.distances;
                s.azimuths = c.group_azimuths();
                s.spread = c.spread;
                s.users_per_group = c.users_per_group;
                s.bbar = c.bbar;
                s.r = c.r;
                s.elevation_rank = c.elevation_rank;
                g.scene = build_scene3d(s);
                return g;
            }
            CellSpec spec;
            spec.array = ArrayLayout::ula(c.dual_pol ? c.antennas / 2 : c.antennas, c.spacing);
            for (double az : c.group_azimuths())
            {
                GroupGeometry gg;
                gg.azimuth = az;
                gg.spread = c.spread;
                spec.groups.push_back(gg);
            }
            spec.users_per_group = c.users_per_group;
            spec.dual_pol = c.dual_pol;
            spec.bbar = c.bbar;
            spec.r = c.r;
            g.cell = build_cell(spec);
            return g;
        }

        bool has(const std::vector<std::string> &v, const char *s) { return std::find(v.begin(), v.end(), s) != v.end(); }

        struct Point
        {
            double snr_db;
            std::optional<double> chi;
            std::optional<double> tau_sq;
            std::optional<arma::uword> n_bits;
        };

        std::vector<Point> sweep(const ScenarioConfig &c)
        {
            std::vector<std::optional<double>> chis, taus;
            std::vector<std::optional<arma::uword>> bits;
            if (c.chi_range)
                chis.push_back(std::nullopt);
            else
                chis.assign(c.chi.begin(), c.chi.end());
            if (!c.n_bits.empty() || c.tau_range)
                taus.push_back(std::nullopt);
            else
                taus.assign(c.tau_sq.begin(), c.tau_sq.end());
            if (c.n_bits.empty())
                bits.push_back(std::nullopt);
            else
                bits.assign(c.n_bits.begin(), c.n_bits.end());

            std::vector<Point> pts;
            for (double s : c.snr_db)
                for (const auto &x : chis)
                    for (const auto &t : taus)
                        for (const auto &b : bits)
                            pts.push_back({s, x, t, b});
            return pts;
        }

        // Scenario at one sweep point; the 3D variant is produced per region later
        GroupScenario scenario_at(const ScenarioConfig &c, const std::shared_ptr<const CellLayout> &cell,
                                  const Point &p, bool &clamped)
        {
            GroupScenario sc;
            sc.cell = cell;
            sc.power = std::pow(10.0, p.snr_db / 10.0);
            sc.chi = p.chi.value_or(0.0);
            sc.theta_max = c.theta_max;
            sc.bds_reg = c.bds_reg;
            clamped = false;
            if (p.n_bits)
            {
                const FeedbackBudget b{*p.n_bits, cell->r};
                sc.tau_sq_bd = tau_from_bits(b, Scheme::BD);
                sc.tau_sq_bds = cell->r > 1 ? tau_from_bits(b, Scheme::BDS) : sc.tau_sq_bd;
            }
            else if (p.tau_sq)
            {
                double t = *p.tau_sq;
                if (t > 1.0)
                {
                    t = 1.0;
                    clamped = true;
                }
                sc.tau_sq_bd = t;
                sc.tau_sq_bds = c.tau_rule == TauRule::squared ? t * t : t;
            }
            return sc;
        }

        Scenario3D scene_at(const Scenario3D &base, const GroupScenario &sc)
        {
            Scenario3D s = base;
            s.total_power = sc.power;
            for (auto &r : s.regions)
            {
                r.scenario.chi = sc.chi;
                r.scenario.tau_sq_bd = sc.tau_sq_bd;
                r.scenario.tau_sq_bds = sc.tau_sq_bds;
                r.scenario.theta_max = sc.theta_max;
                r.scenario.bds_reg = sc.bds_reg;
            }
            return s;
        }

        double asymptotic_rate(const std::string &scheme, const GroupScenario &sc)
        {
            if (scheme == "ASYM_BD")
                return asym_bd(sc).sum_rate;
            if (scheme == "ASYM_BDS")
                return asym_bds(sc).sum_rate;
            GroupScenario s0 = sc;
            s0.chi = 0.0;
            if (scheme == "APPROX_BD")
                return approx_bd_chi(asym_bd(s0), sc.chi).sum_rate;
            return approx_bds_chi(asym_bds(s0), sc.chi).sum_rate;
        }
    }

    void check_geometry(const ScenarioConfig &cfg) { build_geometry(cfg); }

    std::vector<ResultRow> run_config(const ScenarioConfig &cfg)
    {
        cfg.validate();
        std::vector<ResultRow> rows;
        if (cfg.schemes.empty())
            return rows;
        const Geometry geo = build_geometry(cfg);
        const auto cell = geo.scene ? geo.scene->regions.front().scenario.cell : geo.cell;

        std::vector<Mode> modes;
        for (const auto &[name, mode] : {std::pair{"BD", Mode::BD}, std::pair{"BDS", Mode::BDS}, std::pair{"SWITCH", Mode::SWITCH}})
            if (has(cfg.schemes, name))
                modes.push_back(mode);
        const bool raw_switch = has(cfg.schemes, "SWITCH_RAW");

        for (const Point &p : sweep(cfg))
        {
            bool clamped = false;
            const GroupScenario sc = scenario_at(cfg, cell, p, clamped);
            sc.validate();
            std::optional<Scenario3D> scene;
            if (geo.scene)
                scene = scene_at(*geo.scene, sc);

            TrialOptions opt;
            opt.chi_range = cfg.chi_range;
            opt.tau_range = cfg.tau_range;
            opt.bds_tau_squared = cfg.tau_rule == TauRule::squared;
            opt.n_bits = p.n_bits;
            opt.switch_uses_chi_eff = cfg.switch_chi_eff;
            opt.threads = cfg.threads;

            auto mc = [&](const std::vector<Mode> &m, const TrialOptions &o)
            {
                return scene ? run_3d(*scene, m, cfg.n_trials, cfg.seed, o)
                             : run_paired(sc, m, cfg.n_trials, cfg.seed, o);
            };
            std::vector<McSummary> res;
            if (!modes.empty())
                res = mc(modes, opt);
            if (raw_switch)
            {
                TrialOptions o = opt;
                o.switch_uses_chi_eff = false;
                McSummary s = mc({Mode::SWITCH}, o).front();
                res.push_back(std::move(s));
            }

            ResultRow proto;
            proto.scenario_id = cfg.scenario_id;
            proto.snr_db = p.snr_db;
            proto.chi = p.chi;
            proto.tau_sq = p.n_bits ? std::optional<double>(sc.tau_sq_bd) : p.tau_sq;
            proto.n_bits = p.n_bits;
            proto.seed = cfg.seed;
            proto.tau_clamped = clamped;

            // rows follow the order of the scheme list
            for (const auto &name : cfg.schemes)
            {
                ResultRow row = proto;
                row.scheme = name;
                if (name.starts_with("ASYM") || name.starts_with("APPROX"))
                {
                    double rate = 0.0;
                    if (scene)
                        for (arma::uword l = 0; l < scene->regions.size(); ++l)
                            rate += asymptotic_rate(name, reduce_to_2d(*scene, l));
                    else
                        rate = asymptotic_rate(name, sc);
                    row.sum_rate = rate;
                }
                else
                {
                    const McSummary *s = nullptr;
                    if (name == "SWITCH_RAW")
                        s = &res.back();
                    else
                        for (std::size_t k = 0; k < modes.size(); ++k)
                            if (name == mode_name(modes[k]))
                                s = &res[k];
                    row.sum_rate = s->mean;
                    row.stderr_ = s->stderr_;
                    row.n_trials = s->n_trials;
                }
                if (!std::isfinite(row.sum_rate))
                    throw numerical_error("run: non-finite sum rate for " + name,
                                          std::numeric_limits<double>::quiet_NaN());
                rows.push_back(std::move(row));
            }
        }
        return rows;
    }

    void write_csv_header(std::ostream &out)
    {
        out << "scenario_id,scheme,snr_db,chi,tau_sq,n_bits,sum_rate,stderr,n_trials,seed\n";
    }

    void write_csv_row(std::ostream &out, const ResultRow &r)
    {
        auto num = [](double v)
        {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.10g", v);
            return std::string(buf);
        };
        out << r.scenario_id << (r.tau_clamped ? "[tau_clamped]" : "") << ',' << r.scheme << ',' << num(r.snr_db)
            << ',' << (r.chi ? num(*r.chi) : "") << ',' << (r.tau_sq ? num(*r.tau_sq) : "") << ','
            << (r.n_bits ? std::to_string(*r.n_bits) : "") << ',' << num(r.sum_rate) << ',' << num(r.stderr_)
            << ',' << r.n_trials << ',' << r.seed << '\n';
    }
}
