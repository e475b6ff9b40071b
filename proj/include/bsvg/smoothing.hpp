// Copyright 2026 The bsvg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Minimum-square-derivative smoothing for cardinal B-splines.
//
// The cost (1/T) * integral ||x^(d)(u)||^2 du over the spline domain is a
// quadratic form c^T (G (x) I_D) c / T in the flattened controls. G is either
// the exact Gramian of the d-th basis derivatives, or the P-spline
// approximation D_d^T D_d built from forward differences.
//
// Closed operators act on the periodic control sequence (the controls before
// the k-1 wrap copies are appended); their Gramian is circulant.

#include <bsvg/core.hpp>

#include <span>

namespace bsvg {

enum class GramMode { exact, pspline };

struct GramOperator {
    Eigen::MatrixXd G;
    int order_d = 0;
    double span = 1.0; ///< T, the domain length used for normalisation
    GramMode mode = GramMode::exact;
    bool closed = false;

    int size() const noexcept { return static_cast<int>(G.rows()); }
};

/// Gauss-Legendre rule with `points` nodes on [0, 1].
void gauss_legendre01(int points, std::span<double> nodes, std::span<double> weights);

/// Exact Gramian for order k, derivative d and n controls (open: full control
/// sequence including end padding; closed: n periodic controls).
/// Errc::domain unless 1 <= d <= k - 1; Errc::invalid_argument if n is too small.
GramOperator gram_exact(int k, int d, int n, bool closed);

/// P-spline Gramian D_d^T D_d. Open: D_d is (n-d) x n; closed: n x n circulant.
/// `span` <= 0 selects the number of difference rows. Errc::invalid_argument if n <= d.
GramOperator gram_pspline(int d, int n, bool closed, double span = 0.0);

struct CostGrad {
    double value = 0.0;
    Eigen::VectorXd grad;
};

/// value = c^T (G (x) I_D) c / T, grad = 2 (G (x) I_D) c / T.
/// `c` holds `op.size()` points of dimension `dims`.
CostGrad smooth_cost(std::span<const double> c, const GramOperator& op, int dims = 3);

/// Dimensionless jerk of a uniformly timed polyline (one point per row):
/// (duration^5 / length^2) * integral ||x'''||^2 dt, estimated with third
/// differences. Errc::invalid_argument for fewer than 4 samples; Errc::domain
/// for a zero-length path.
double dimensionless_jerk(const Eigen::MatrixXd& polyline, double dt = 1.0);

} // namespace bsvg
