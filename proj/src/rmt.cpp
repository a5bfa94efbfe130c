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

#include "dualpol/rmt.hpp"
#include "dualpol/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dualpol
{
    namespace
    {
        double tr(const arma::cx_mat &A) { return std::real(arma::trace(A)); }
        double tr(const arma::cx_mat &A, const arma::cx_mat &B) { return std::real(arma::trace(A * B)); }

        arma::cx_mat blockdiag(const arma::cx_mat &A, const arma::cx_mat &B)
        {
            arma::cx_mat out(A.n_rows + B.n_rows, A.n_cols + B.n_cols, arma::fill::zeros);
            out.submat(0, 0, A.n_rows - 1, A.n_cols - 1) = A;
            out.submat(A.n_rows, A.n_cols, out.n_rows - 1, out.n_cols - 1) = B;
            return out;
        }

        // Polarization-p user covariance seen through a dual block preprocessor Bs:
        // blockdiag(X, chi X) for p = 0, blockdiag(chi X, X) for p = 1
        arma::cx_mat pol_cov(const arma::cx_mat &X, double chi, arma::uword p)
        {
            return p == 0 ? blockdiag(X, chi * X) : blockdiag(chi * X, X);
        }

        arma::cx_mat compress(const arma::cx_mat &Bs, const arma::cx_mat &R)
        {
            arma::cx_mat X = Bs.t() * R * Bs;
            return 0.5 * (X + X.t());
        }

        void require_dual(const GroupScenario &sc, const char *who)
        {
            sc.validate();
            if (!sc.cell->dual_pol)
                throw invalid_input(std::string(who) + ": dual-polarized cell required");
        }

        void finish(AsymptoticSolution &s)
        {
            if (!s.sinr.is_finite())
                throw numerical_error("asymptotic SINR is not finite");
            s.sum_rate = class_sum_rate(s.sinr, s.users_per_group);
        }

        AsymptoticSolution blank(const GroupScenario &sc, Scheme scheme, double tau_sq)
        {
            AsymptoticSolution s;
            s.scheme = scheme;
            s.power = sc.power;
            s.chi = sc.chi;
            s.tau_sq = tau_sq;
            s.groups = sc.cell->groups;
            s.users_per_group = sc.cell->users_per_group;
            const arma::uword G = s.groups;
            for (arma::mat *m : {&s.m, &s.m_prime, &s.psi, &s.xi_sq, &s.upsilon, &s.cross, &s.inter, &s.sinr})
                m->zeros(G, 2);
            return s;
        }

        double gamma(double P, double N, double xi2, double tau_sq, double m, double own, double others)
        {
            const double d = (1.0 + m) * (1.0 + m);
            const double num = P / N * xi2 * (1.0 - tau_sq) * m * m;
            const double den = xi2 * own * (1.0 - tau_sq * (1.0 - d)) + (1.0 + others) * d;
            return num / den;
        }
    }

    FixedPointResult solve_fixed_point(const FixedPointProblem &pb, double tol, std::size_t max_iter)
    {
        if (!(pb.z < 0.0))
            throw invalid_input("solve_fixed_point: z must be negative");
        if (pb.R.size() != pb.count.size())
            throw invalid_input("solve_fixed_point: one count per covariance class required");
        if (!(pb.M > 0.0))
            throw invalid_input("solve_fixed_point: normalizer must be positive");

        arma::uword d = 0;
        if (!pb.R.empty())
            d = pb.R.front().n_rows;
        else if (!pb.S.is_empty())
            d = pb.S.n_rows;
        else
            throw invalid_input("solve_fixed_point: dimension undefined");
        for (const auto &R : pb.R)
            if (R.n_rows != d || R.n_cols != d)
                throw invalid_input("solve_fixed_point: covariance size mismatch");

        arma::cx_mat base(d, d, arma::fill::zeros);
        if (!pb.S.is_empty())
        {
            if (pb.S.n_rows != d || pb.S.n_cols != d)
                throw invalid_input("solve_fixed_point: shift size mismatch");
            base = pb.S;
        }
        base.diag() -= pb.z;

        auto resolvent = [&](const arma::vec &e)
        {
            arma::cx_mat A = base;
            for (std::size_t j = 0; j < pb.R.size(); ++j)
                A += (pb.count[j] / pb.M / (1.0 + e(j))) * pb.R[j];
            A = 0.5 * (A + A.t());
            arma::cx_mat T;
            if (!arma::inv_sympd(T, A))
                throw numerical_error("solve_fixed_point: resolvent is singular");
            return T;
        };

        FixedPointResult out;
        const std::size_t J = pb.R.size();
        out.e = arma::vec(J, arma::fill::value(1.0 / (-pb.z)));
        if (J == 0)
        {
            out.T = resolvent(out.e);
            return out;
        }

        double damping = 1.0, prev = arma::datum::inf;
        for (std::size_t it = 1; it <= max_iter; ++it)
        {
            const arma::cx_mat T = resolvent(out.e);
            arma::vec next(J);
            for (std::size_t j = 0; j < J; ++j)
                next(j) = tr(pb.R[j], T) / pb.M;
            const double res = arma::max(arma::abs(next - out.e) / arma::max(arma::ones(J), arma::abs(next)));
            // damp once the residual stops shrinking
            if (res > prev)
                damping = 0.5;
            prev = res;
            out.e = (1.0 - damping) * out.e + damping * next;
            out.iterations = it;
            out.residual = res;
            if (res < tol)
            {
                out.T = resolvent(out.e);
                return out;
            }
        }
        throw numerical_error("solve_fixed_point: no convergence after " + std::to_string(max_iter) + " iterations",
                              out.residual);
    }

    double class_sum_rate(const arma::mat &sinr, arma::uword users_per_group)
    {
        return 0.5 * double(users_per_group) * arma::accu(arma::log2(1.0 + sinr));
    }

    AsymptoticSolution asym_bd(const GroupScenario &sc)
    {
        require_dual(sc, "asym_bd");
        const CellLayout &cell = *sc.cell;
        const arma::uword G = cell.groups;
        const double nbar = double(cell.users_per_group), bbar = double(cell.bbar);
        const double P = sc.power, N = double(cell.total_users()), alpha = sc.alpha(), chi = sc.chi;
        AsymptoticSolution s = blank(sc, Scheme::BD, sc.tau_sq_bd);

        struct GroupState
        {
            arma::cx_mat Rb[2];
            arma::cx_mat T;
            arma::vec m;
            arma::mat IJ; // I - J
        };
        std::vector<GroupState> st(G);

        for (arma::uword g = 0; g < G; ++g)
        {
            const arma::cx_mat S = compress(cell.pre[g].Bs, cell.cov[g].matrix);
            auto &x = st[g];
            x.Rb[0] = pol_cov(S, chi, 0);
            x.Rb[1] = pol_cov(S, chi, 1);
            FixedPointProblem pb{{x.Rb[0], x.Rb[1]}, {nbar / 2, nbar / 2}, {}, -alpha, bbar};
            auto fp = solve_fixed_point(pb);
            s.iterations = std::max(s.iterations, fp.iterations);
            s.residual = std::max(s.residual, fp.residual);
            x.T = fp.T;
            x.m = fp.e;
            arma::mat J(2, 2);
            for (int p = 0; p < 2; ++p)
                for (int q = 0; q < 2; ++q)
                    J(p, q) = nbar / (2 * bbar) * tr(x.Rb[p] * x.T * x.Rb[q] * x.T) / (bbar * std::pow(1 + x.m(q), 2));
            x.IJ = arma::eye(2, 2) - J;
            if (std::abs(arma::det(x.IJ)) < 1e-14)
                throw numerical_error("asym_bd: I - J is singular");
        }

        for (arma::uword g = 0; g < G; ++g)
        {
            auto &x = st[g];
            arma::vec v(2);
            for (int p = 0; p < 2; ++p)
                v(p) = tr(x.Rb[p] * x.T * x.T) / bbar;
            const arma::vec mp = arma::solve(x.IJ, v);
            const double psi = P / double(G) / (2 * bbar) * (mp(0) / std::pow(1 + x.m(0), 2) + mp(1) / std::pow(1 + x.m(1), 2));
            for (int p = 0; p < 2; ++p)
            {
                s.m(g, p) = x.m(p);
                s.m_prime(g, p) = mp(p);
                s.psi(g, p) = psi;
                s.xi_sq(g, p) = P / (double(G) * psi);
            }
        }

        for (arma::uword g = 0; g < G; ++g)
        {
            auto &x = st[g];
            for (int p = 0; p < 2; ++p)
            {
                const int q = 1 - p;
                arma::vec v(2);
                for (int c = 0; c < 2; ++c)
                    v(c) = tr(x.Rb[c] * x.T * x.Rb[p] * x.T) / bbar;
                const arma::vec mpp = arma::solve(x.IJ, v);
                s.upsilon(g, p) = (nbar / 2 - 1) / bbar * P / N * mpp(p) / std::pow(1 + x.m(p), 2) +
                                  nbar / (2 * bbar) * P / N * mpp(q) / std::pow(1 + x.m(q), 2);

                double inter = 0.0;
                for (arma::uword l = 0; l < G; ++l)
                {
                    if (l == g)
                        continue;
                    const auto &y = st[l];
                    const arma::cx_mat Q = pol_cov(compress(cell.pre[l].Bs, cell.cov[g].matrix), chi, p);
                    for (int c = 0; c < 2; ++c)
                        v(c) = tr(y.Rb[c] * y.T * Q * y.T) / bbar;
                    const arma::vec ml = arma::solve(y.IJ, v);
                    const double ups = P / (2 * N) * nbar / bbar *
                                       (ml(0) / std::pow(1 + y.m(0), 2) + ml(1) / std::pow(1 + y.m(1), 2));
                    inter += s.xi_sq(l, 0) * ups;
                }
                s.inter(g, p) = inter;
                s.sinr(g, p) = gamma(P, N, s.xi_sq(g, p), s.tau_sq, x.m(p), s.upsilon(g, p), inter);
            }
        }
        finish(s);
        return s;
    }

    AsymptoticSolution asym_bd_simplified(const GroupScenario &sc)
    {
        require_dual(sc, "asym_bd_simplified");
        const CellLayout &cell = *sc.cell;
        const arma::uword G = cell.groups;
        const double nbar = double(cell.users_per_group), bbar = double(cell.bbar);
        const double P = sc.power, N = double(cell.total_users()), alpha = sc.alpha();
        const double w = 0.5 * (1.0 + sc.chi);
        AsymptoticSolution s = blank(sc, Scheme::BD, sc.tau_sq_bd);

        std::vector<arma::cx_mat> Rb(G), T(G);
        arma::vec m(G), den(G);
        for (arma::uword g = 0; g < G; ++g)
        {
            const arma::cx_mat S = compress(cell.pre[g].Bs, cell.cov[g].matrix);
            Rb[g] = w * blockdiag(S, S);
            FixedPointProblem pb{{Rb[g]}, {nbar}, {}, -alpha, bbar};
            auto fp = solve_fixed_point(pb);
            s.iterations = std::max(s.iterations, fp.iterations);
            s.residual = std::max(s.residual, fp.residual);
            T[g] = fp.T;
            m(g) = fp.e(0);
            den(g) = 1.0 - nbar / bbar * tr(Rb[g] * T[g] * Rb[g] * T[g]) / (bbar * std::pow(1 + m(g), 2));
        }

        for (arma::uword g = 0; g < G; ++g)
        {
            const double mp = tr(Rb[g] * T[g] * T[g]) / bbar / den(g);
            const double psi = P / double(G) / bbar * mp / std::pow(1 + m(g), 2);
            for (int p = 0; p < 2; ++p)
            {
                s.m(g, p) = m(g);
                s.m_prime(g, p) = mp;
                s.psi(g, p) = psi;
                s.xi_sq(g, p) = P / (double(G) * psi);
            }
        }

        for (arma::uword g = 0; g < G; ++g)
        {
            const double mgg = tr(Rb[g] * T[g] * Rb[g] * T[g]) / bbar / den(g);
            const double ups = (nbar - 1) / bbar * P / N * mgg / std::pow(1 + m(g), 2);
            double inter = 0.0;
            for (arma::uword l = 0; l < G; ++l)
            {
                if (l == g)
                    continue;
                const arma::cx_mat X = compress(cell.pre[l].Bs, cell.cov[g].matrix);
                const arma::cx_mat Q = w * blockdiag(X, X);
                const double mgl = tr(Rb[l] * T[l] * Q * T[l]) / bbar / den(l);
                inter += s.xi_sq(l, 0) * P / N * nbar / bbar * mgl / std::pow(1 + m(l), 2);
            }
            for (int p = 0; p < 2; ++p)
            {
                s.upsilon(g, p) = ups;
                s.inter(g, p) = inter;
                s.sinr(g, p) = gamma(P, N, s.xi_sq(g, p), s.tau_sq, m(g), ups, inter);
            }
        }
        finish(s);
        return s;
    }

    AsymptoticSolution asym_bds(const GroupScenario &sc, BdsNormalization norm)
    {
        require_dual(sc, "asym_bds");
        const CellLayout &cell = *sc.cell;
        const arma::uword G = cell.groups;
        const double nbar = double(cell.users_per_group), bbar = double(cell.bbar), half = 0.5 * bbar;
        const double P = sc.power, N = double(cell.total_users()), chi = sc.chi;
        const double a = sc.bds_reg_value() / half;
        AsymptoticSolution s = blank(sc, Scheme::BDS, sc.tau_sq_bds);

        // Both subgroups of a group share Bs and hence one resolvent
        std::vector<arma::cx_mat> S(G), T(G);
        arma::vec m(G), den(G);
        for (arma::uword g = 0; g < G; ++g)
        {
            S[g] = compress(cell.pre[g].Bs, cell.cov[g].matrix);
            FixedPointProblem pb{{S[g]}, {nbar / 2}, {}, -a, half};
            auto fp = solve_fixed_point(pb);
            s.iterations = std::max(s.iterations, fp.iterations);
            s.residual = std::max(s.residual, fp.residual);
            T[g] = fp.T;
            m(g) = fp.e(0);
            den(g) = 1.0 - nbar / bbar * tr(S[g] * T[g] * S[g] * T[g]) / (half * std::pow(1 + m(g), 2));
            if (std::abs(den(g)) < 1e-14)
                throw numerical_error("asym_bds: derivative denominator vanishes");
        }

        const double xi_div = norm == BdsNormalization::consistent ? 2.0 : 1.0;
        for (arma::uword g = 0; g < G; ++g)
        {
            const double mp = tr(S[g] * T[g] * T[g]) / half / den(g);
            const double psi = P / double(G) / bbar * mp / std::pow(1 + m(g), 2);
            const double mpp = tr(S[g] * T[g] * S[g] * T[g]) / half / den(g);
            const double ups = (nbar / 2 - 1) / half * P / N * mpp / std::pow(1 + m(g), 2);
            for (int p = 0; p < 2; ++p)
            {
                s.m(g, p) = m(g);
                s.m_prime(g, p) = mp;
                s.psi(g, p) = psi;
                s.xi_sq(g, p) = P / (xi_div * double(G) * psi);
                s.upsilon(g, p) = ups;
            }
        }

        for (arma::uword g = 0; g < G; ++g)
        {
            // X_l = Bs_l^H R_g Bs_l; the (l, q) interferer sees it scaled by 1 (q = p) or chi (q != p)
            std::vector<double> seen(G);
            for (arma::uword l = 0; l < G; ++l)
            {
                const arma::cx_mat X = l == g ? S[g] : compress(cell.pre[l].Bs, cell.cov[g].matrix);
                const double mglp = tr(S[l] * T[l] * X * T[l]) / half / den(l);
                seen[l] = P / N * nbar / bbar * mglp / std::pow(1 + m(l), 2);
            }
            for (int p = 0; p < 2; ++p)
            {
                const int q = 1 - p;
                const double cross = chi * s.xi_sq(g, q) * seen[g];
                double inter = 0.0;
                for (arma::uword l = 0; l < G; ++l)
                    if (l != g)
                        inter += s.xi_sq(l, p) * seen[l] + chi * s.xi_sq(l, q) * seen[l];
                s.cross(g, p) = cross;
                s.inter(g, p) = inter;
                s.sinr(g, p) = gamma(P, N, s.xi_sq(g, p), s.tau_sq, m(g), s.upsilon(g, p), cross + inter);
            }
        }
        finish(s);
        return s;
    }

    AsymptoticSolution approx_bd_chi(const AsymptoticSolution &base, double chi)
    {
        if (!(chi >= 0.0 && chi <= 1.0))
            throw invalid_input("approx_bd_chi: chi must lie in [0,1]");
        AsymptoticSolution s = base;
        s.chi = chi;
        return s;
    }

    double bds_c0(const AsymptoticSolution &base)
    {
        double acc = 0.0;
        for (arma::uword g = 0; g < base.groups; ++g)
            for (int p = 0; p < 2; ++p)
            {
                const double B0 = base.xi_sq(g, p) * base.upsilon(g, p);
                const double d = std::pow(1 + base.m(g, p), 2);
                acc += B0 / (B0 / d * (base.tau_sq * (d - 1.0) + 1.0) + 1.0);
            }
        return acc / double(2 * base.groups);
    }

    AsymptoticSolution approx_bds_chi(const AsymptoticSolution &base, double chi)
    {
        if (!(chi >= 0.0 && chi <= 1.0))
            throw invalid_input("approx_bds_chi: chi must lie in [0,1]");
        AsymptoticSolution s = base;
        s.chi = chi;
        s.sinr = base.sinr / (1.0 + bds_c0(base) * chi);
        s.sum_rate = class_sum_rate(s.sinr, s.users_per_group);
        return s;
    }
}
