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

#include "dualpol/scene3d.hpp"
#include "dualpol/errors.hpp"

#include <cmath>
#include <string>

namespace dualpol
{
    double path_loss(double distance)
    {
        if (!(distance > 0.0) || !std::isfinite(distance))
            throw invalid_input("path_loss: distance must be positive");
        return 1.0 / (1.0 + std::pow(distance / 60.0, 3));
    }

    std::pair<arma::cx_vec, double> elevation_prefilter(const std::vector<SpatialCovariance> &regions, arma::uword l,
                                                        std::optional<arma::uword> rank_cap)
    {
        if (l >= regions.size())
            throw invalid_input("elevation_prefilter: region index out of range");
        const SpatialCovariance &own = regions[l];
        const arma::uword n = own.size();

        arma::cx_mat others(n, 0);
        for (arma::uword k = 0; k < regions.size(); ++k)
        {
            if (k == l)
                continue;
            if (regions[k].size() != n)
                throw invalid_input("elevation_prefilter: region sizes differ");
            arma::uword rk = regions[k].effective_rank;
            if (rank_cap)
                rk = std::min(rk, *rank_cap);
            others = arma::join_rows(others, regions[k].eigvecs.cols(0, rk - 1));
        }

        arma::cx_mat basis;
        if (others.n_cols == 0)
            basis = arma::eye<arma::cx_mat>(n, n);
        else
        {
            arma::cx_mat U, V;
            arma::vec s;
            if (!arma::svd(U, s, V, others))
                throw numerical_error("elevation_prefilter: SVD failed", 0.0);
            const double tol = 1e-10 * std::max(1.0, s.max());
            const arma::uword rank = arma::accu(s > tol);
            if (rank >= n)
                throw config_error("elevation_prefilter: region " + std::to_string(l) +
                                   " is infeasible, the other regions span the whole elevation space");
            basis = U.cols(rank, n - 1);
        }

        arma::cx_mat Rt = basis.t() * own.matrix * basis;
        Rt = 0.5 * (Rt + Rt.t());
        arma::vec ev;
        arma::cx_mat evec;
        if (!arma::eig_sym(ev, evec, Rt))
            throw numerical_error("elevation_prefilter: eigensolver failed", 0.0);
        arma::cx_vec q = basis * evec.col(evec.n_cols - 1);
        q /= arma::norm(q);
        const double lt = std::real(arma::cdot(q, own.matrix * q));
        return {q, std::max(lt, 0.0)};
    }

    Scenario3D build_scene3d(const Scene3DSpec &spec)
    {
        if (spec.distances.empty())
            throw config_error("scene3d: at least one region distance is required");
        if (spec.azimuths.empty())
            throw config_error("scene3d: at least one azimuth group is required");
        if (spec.elev_elements == 0 || spec.azim_elements == 0)
            throw config_error("scene3d: array dimensions must be positive");
        if (!(spec.height > 0.0))
            throw config_error("scene3d: height must be positive");

        const ArrayLayout vert = ArrayLayout::ula(spec.elev_elements, spec.spacing);
        std::vector<SpatialCovariance> elev;
        for (double d : spec.distances)
        {
            const double s = d * std::tan(spec.spread);
            if (!(d > s))
                throw config_error("scene3d: distance " + std::to_string(d) + " m lies inside its scattering ring");
            elev.push_back(elevation_covariance(spec.height, d, s, vert));
        }

        CellSpec cs;
        cs.array = ArrayLayout::ula(spec.azim_elements, spec.spacing);
        for (double az : spec.azimuths)
        {
            GroupGeometry g;
            g.azimuth = az;
            g.spread = spec.spread;
            cs.groups.push_back(g);
        }
        cs.users_per_group = spec.users_per_group;
        cs.bbar = spec.bbar;
        cs.r = spec.r;
        auto cell = build_cell(cs);

        Scenario3D out;
        out.elev_elements = spec.elev_elements;
        out.azim_elements = spec.azim_elements;
        out.total_power = spec.total_power;
        for (arma::uword l = 0; l < elev.size(); ++l)
        {
            ElevationRegion reg;
            reg.elevation = elev[l];
            std::tie(reg.q, reg.lambda_tilde) = elevation_prefilter(elev, l, spec.elevation_rank);
            reg.distance = spec.distances[l];
            reg.path_loss = path_loss(reg.distance);
            reg.scenario.cell = cell;
            reg.scenario.chi = spec.chi;
            reg.scenario.tau_sq_bd = spec.tau_sq_bd;
            reg.scenario.tau_sq_bds = spec.tau_sq_bds;
            reg.scenario.theta_max = spec.theta_max;
            out.regions.push_back(std::move(reg));
        }
        return out;
    }

    GroupScenario reduce_to_2d(const Scenario3D &scene, arma::uword l)
    {
        if (l >= scene.regions.size())
            throw invalid_input("reduce_to_2d: region index out of range");
        const ElevationRegion &reg = scene.regions[l];
        GroupScenario sc = reg.scenario;
        sc.power = scene.region_power() * reg.lambda_tilde * reg.path_loss;
        if (!(sc.power > 0.0))
            throw config_error("reduce_to_2d: region " + std::to_string(l) + " has zero effective gain");
        return sc;
    }

    std::vector<McSummary> run_3d(const Scenario3D &scene, const std::vector<Mode> &modes, arma::uword n_trials,
                                  std::uint64_t seed, const TrialOptions &opt)
    {
        if (scene.regions.empty())
            throw config_error("run_3d: no regions");
        std::vector<std::vector<McSummary>> per(scene.regions.size());
        for (arma::uword l = 0; l < scene.regions.size(); ++l)
        {
            TrialOptions o = opt;
            o.substream = opt.substream + l;
            per[l] = run_paired(reduce_to_2d(scene, l), modes, n_trials, seed, o);
        }

        std::vector<McSummary> out(modes.size());
        for (arma::uword k = 0; k < modes.size(); ++k)
        {
            std::vector<double> total(n_trials, 0.0);
            double sinr = 0.0, frac = 0.0;
            for (const auto &reg : per)
            {
                for (arma::uword i = 0; i < n_trials; ++i)
                    total[i] += reg[k].samples[i];
                sinr += reg[k].mean_sinr;
                frac += reg[k].bds_fraction;
            }
            out[k].mode = modes[k];
            out[k].n_trials = n_trials;
            std::tie(out[k].mean, out[k].stderr_) = mean_stderr(total);
            out[k].mean_sinr = sinr / double(per.size());
            out[k].bds_fraction = frac / double(per.size());
            out[k].samples = std::move(total);
        }
        return out;
    }
}
