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

#include "dualpol/corrstats.hpp"
#include "dualpol/errors.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <string>
#include <utility>

namespace dualpol
{
    using cx = std::complex<double>;

    ArrayLayout ArrayLayout::ula(arma::uword n, double spacing)
    {
        if (n == 0)
            throw invalid_input("ula: element count must be positive");
        if (!std::isfinite(spacing) || spacing <= 0.0)
            throw invalid_input("ula: spacing must be positive and finite");
        ArrayLayout a;
        a.positions.zeros(2, n);
        for (arma::uword k = 0; k < n; ++k)
            a.positions(1, k) = spacing * double(k);
        return a;
    }

    GroupGeometry GroupGeometry::from_ring(double azimuth, double scatter_radius, double distance)
    {
        if (!(distance > 0.0) || !(scatter_radius > 0.0))
            throw invalid_input("from_ring: radius and distance must be positive");
        GroupGeometry g;
        g.azimuth = azimuth;
        g.scatter_radius = scatter_radius;
        g.distance = distance;
        g.spread = std::atan(scatter_radius / distance);
        return g;
    }

    namespace
    {
        struct SimpsonCtx
        {
            const std::function<cx(double)> *f;
            bool converged = true;
            double residual = 0.0;
        };

        cx simpson_rec(SimpsonCtx &ctx, double a, double b, cx fa, cx fm, cx fb, cx whole, double tol, int depth)
        {
            const double m = 0.5 * (a + b);
            const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
            const cx flm = (*ctx.f)(lm), frm = (*ctx.f)(rm);
            const cx left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            const cx right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            const cx delta = left + right - whole;
            if (std::abs(delta) <= 15.0 * tol)
                return left + right + delta / 15.0;
            if (depth <= 0)
            {
                ctx.converged = false;
                ctx.residual = std::max(ctx.residual, std::abs(delta) / 15.0);
                return left + right + delta / 15.0;
            }
            return simpson_rec(ctx, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
                   simpson_rec(ctx, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
        }

        void check_hermitian(const arma::cx_mat &R, const char *who)
        {
            if (!R.is_square())
                throw invalid_input(std::string(who) + ": matrix must be square");
            if (!R.is_finite())
                throw invalid_input(std::string(who) + ": matrix has non-finite entries");
            const double scale = std::max(1.0, arma::norm(R, "fro"));
            if (arma::norm(R - R.t(), "fro") > 1e-9 * scale)
                throw invalid_input(std::string(who) + ": matrix is not Hermitian");
        }
    }

    cx integrate_simpson(const std::function<cx(double)> &f, double a, double b, double abs_tol, int max_depth)
    {
        if (!std::isfinite(a) || !std::isfinite(b))
            throw invalid_input("integrate_simpson: non-finite bounds");
        if (a == b)
            return cx(0.0);

        // Start from 16 panels so that oscillating integrands are not mistaken for flat ones
        constexpr int panels = 16;
        SimpsonCtx ctx{&f};
        cx total = 0.0;
        const double h = (b - a) / panels;
        for (int k = 0; k < panels; ++k)
        {
            const double lo = a + h * k, hi = (k + 1 == panels) ? b : a + h * (k + 1);
            const cx flo = f(lo), fhi = f(hi), fmid = f(0.5 * (lo + hi));
            const cx whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
            total += simpson_rec(ctx, lo, hi, flo, fmid, fhi, whole, abs_tol / panels, max_depth);
        }
        if (!ctx.converged)
            throw numerical_error("integrate_simpson: tolerance not reached", ctx.residual);
        return total;
    }

    Eigensystem eigendecompose(const arma::cx_mat &R, double rank_tol)
    {
        check_hermitian(R, "eigendecompose");
        if (!(rank_tol > 0.0) || rank_tol >= 1.0)
            throw invalid_input("eigendecompose: rank_tol must lie in (0,1)");

        arma::cx_mat herm = 0.5 * (R + R.t());
        arma::vec val;
        arma::cx_mat vec;
        if (!arma::eig_sym(val, vec, herm))
            throw numerical_error("eigendecompose: eigensolver failed");

        Eigensystem es;
        es.eigvals = arma::flipud(val);
        es.eigvecs = arma::fliplr(vec);
        const double top = es.eigvals.n_elem ? es.eigvals(0) : 0.0;
        es.effective_rank = top > 0.0 ? arma::uword(arma::accu(es.eigvals > rank_tol * top)) : 0;
        return es;
    }

    SpatialCovariance make_covariance(const arma::cx_mat &R, double rank_tol)
    {
        auto es = eigendecompose(R, rank_tol);
        SpatialCovariance c;
        c.matrix = R;
        c.eigvecs = std::move(es.eigvecs);
        c.eigvals = std::move(es.eigvals);
        c.effective_rank = es.effective_rank;
        return c;
    }

    SpatialCovariance one_ring_covariance(const GroupGeometry &geometry, const ArrayLayout &array,
                                          double rank_tol, double abs_tol)
    {
        if (array.size() == 0)
            throw invalid_input("one_ring_covariance: empty array");
        if (!array.positions.is_finite())
            throw invalid_input("one_ring_covariance: non-finite element position");
        if (!std::isfinite(geometry.azimuth) || !std::isfinite(geometry.spread))
            throw invalid_input("one_ring_covariance: non-finite geometry");
        if (!(geometry.spread > 0.0) || geometry.spread >= std::numbers::pi / 2)
            throw invalid_input("one_ring_covariance: spread must lie in (0, pi/2)");

        const double theta = geometry.azimuth, delta = geometry.spread;
        const arma::uword n = array.size();
        arma::cx_mat R(n, n, arma::fill::zeros);

        // Entries depend on the displacement only; ULAs reuse most of them
        std::map<std::pair<double, double>, cx> cache;
        for (arma::uword m = 0; m < n; ++m)
        {
            R(m, m) = 1.0;
            for (arma::uword k = m + 1; k < n; ++k)
            {
                const double dx = array.positions(0, m) - array.positions(0, k);
                const double dy = array.positions(1, m) - array.positions(1, k);
                auto key = std::make_pair(dx, dy);
                auto it = cache.find(key);
                cx val;
                if (it != cache.end())
                    val = it->second;
                else
                {
                    // substitute a = delta * t, t in [-1, 1]; the 1/(2 delta) weight becomes 1/2
                    auto f = [&](double t)
                    {
                        const double ang = delta * t + theta;
                        const double ph = std::numbers::pi * (std::cos(ang) * dx + std::sin(ang) * dy);
                        return 0.5 * cx(std::cos(ph), -std::sin(ph));
                    };
                    val = integrate_simpson(f, -1.0, 1.0, abs_tol);
                    cache.emplace(key, val);
                }
                R(m, k) = val;
                R(k, m) = std::conj(val);
            }
        }
        return make_covariance(R, rank_tol);
    }

    SpatialCovariance steering_covariance(double angle, const ArrayLayout &array, double rank_tol)
    {
        if (array.size() == 0)
            throw invalid_input("steering_covariance: empty array");
        arma::cx_vec a(array.size());
        for (arma::uword m = 0; m < array.size(); ++m)
        {
            const double ph = std::numbers::pi * (std::cos(angle) * array.positions(0, m) + std::sin(angle) * array.positions(1, m));
            a(m) = cx(std::cos(ph), -std::sin(ph));
        }
        arma::cx_mat R = a * a.t();
        R.diag().ones();
        return make_covariance(R, rank_tol);
    }

    SpatialCovariance elevation_covariance(double height, double distance, double scatter_radius,
                                           const ArrayLayout &vertical_array, double rank_tol)
    {
        if (!(height > 0.0) || !std::isfinite(height))
            throw invalid_input("elevation_covariance: height must be positive");
        if (!(scatter_radius >= 0.0) || !(distance > scatter_radius) || !std::isfinite(distance))
            throw invalid_input("elevation_covariance: need distance > scatter_radius >= 0");

        const double lo = std::atan(height / distance);
        const double hi = std::atan(height / (distance - scatter_radius));
        const double center = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        if (half <= 0.0)
            return steering_covariance(lo, vertical_array, rank_tol);

        GroupGeometry g;
        g.azimuth = center;
        g.spread = half;
        g.scatter_radius = scatter_radius;
        g.distance = distance;
        return one_ring_covariance(g, vertical_array, rank_tol);
    }

    MismatchStats mismatch_effective_stats(double chi, double theta_max)
    {
        if (!(chi >= 0.0 && chi <= 1.0))
            throw invalid_input("mismatch_effective_stats: chi must lie in [0,1]");
        if (!(theta_max >= 0.0 && theta_max <= std::numbers::pi / 2 + 1e-15))
            throw invalid_input("mismatch_effective_stats: theta_max must lie in [0, pi/2]");

        // E[cos^2] over U[-t, t] is 1/2 + sin(2t)/(4t)
        const double s = theta_max == 0.0 ? 0.5 : std::sin(2.0 * theta_max) / (4.0 * theta_max);
        MismatchStats out;
        out.theta_max = theta_max;
        out.c_eff = 0.5 + s + chi * (0.5 - s);
        out.chi_eff = (0.5 - s + chi * (0.5 + s)) / out.c_eff;
        return out;
    }
}
