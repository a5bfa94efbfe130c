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

#include <armadillo>
#include <complex>
#include <functional>

namespace dualpol
{
    // Element positions in units of the carrier wavelength, one column per position.
    // Dual-polarized pairs share a position, so a 2*n element array has n columns.
    struct ArrayLayout
    {
        arma::mat positions; // 2 x n
        double wavelength = 1.0;

        arma::uword size() const { return positions.n_cols; }

        // Uniform linear array along the y-axis
        static ArrayLayout ula(arma::uword n, double spacing);
    };

    struct GroupGeometry
    {
        double azimuth = 0.0; // center angle (rad)
        double spread = 0.0;  // half-width of the angular interval (rad)
        double scatter_radius = 0.0;
        double distance = 0.0;

        // Geometry where the spread follows from ring radius and distance
        static GroupGeometry from_ring(double azimuth, double scatter_radius, double distance);
    };

    struct SpatialCovariance
    {
        arma::cx_mat matrix;
        arma::cx_mat eigvecs; // columns sorted by descending eigenvalue
        arma::vec eigvals;
        arma::uword effective_rank = 0;

        arma::uword size() const { return matrix.n_rows; }
    };

    struct Eigensystem
    {
        arma::cx_mat eigvecs;
        arma::vec eigvals;
        arma::uword effective_rank = 0;
    };

    struct MismatchStats
    {
        double c_eff = 1.0;
        double chi_eff = 0.0;
        double theta_max = 0.0;
    };

    constexpr double default_rank_tol = 1e-6;

    // Adaptive Simpson on [a, b] for a complex integrand. Throws numerical_error if the
    // recursion depth is exhausted before the absolute tolerance is met.
    std::complex<double> integrate_simpson(const std::function<std::complex<double>(double)> &f,
                                           double a, double b, double abs_tol = 1e-10, int max_depth = 40);

    Eigensystem eigendecompose(const arma::cx_mat &R, double rank_tol = default_rank_tol);

    // Wraps a Hermitian matrix with its eigensystem
    SpatialCovariance make_covariance(const arma::cx_mat &R, double rank_tol = default_rank_tol);

    SpatialCovariance one_ring_covariance(const GroupGeometry &geometry, const ArrayLayout &array,
                                          double rank_tol = default_rank_tol, double abs_tol = 1e-10);

    // Plane-wave correlation at a single angle (zero spread limit)
    SpatialCovariance steering_covariance(double angle, const ArrayLayout &array,
                                          double rank_tol = default_rank_tol);

    SpatialCovariance elevation_covariance(double height, double distance, double scatter_radius,
                                           const ArrayLayout &vertical_array,
                                           double rank_tol = default_rank_tol);

    MismatchStats mismatch_effective_stats(double chi, double theta_max);
}
