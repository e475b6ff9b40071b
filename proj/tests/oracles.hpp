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

// Independent reference computations used by the tests. Nothing here calls
// into the code paths it is used to check.

#include <bsvg/core.hpp>

#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

/// General Cox-de Boor recursion B_{i,k}(u) on an arbitrary knot vector,
/// with the 0/0 := 0 convention.
inline double cox_de_boor(const std::vector<double>& t, int i, int k, double u) {
    if (k == 1)
        return (t[i] <= u && u < t[i + 1]) ? 1.0 : 0.0;
    double left = 0.0, right = 0.0;
    const double dl = t[i + k - 1] - t[i];
    const double dr = t[i + k] - t[i + 1];
    if (dl != 0.0)
        left = (u - t[i]) / dl * cox_de_boor(t, i, k - 1, u);
    if (dr != 0.0)
        right = (t[i + k] - u) / dr * cox_de_boor(t, i + 1, k - 1, u);
    return left + right;
}

/// x(u) = sum c_i B_{i,k}(u) with knots t_i = i - p, evaluated directly.
/// At the right end of the domain the limit from the left is taken.
inline Eigen::RowVector3d spline_eval(const bsvg::Points& c, int p, double u) {
    const int n = static_cast<int>(c.rows());
    const int k = p + 1;
    std::vector<double> t(static_cast<size_t>(n + k));
    for (size_t i = 0; i < t.size(); ++i)
        t[i] = static_cast<double>(static_cast<int>(i) - p);
    const double end = n - p;
    if (u >= end)
        u = std::nextafter(end, 0.0);
    Eigen::RowVector3d x = Eigen::RowVector3d::Zero();
    for (int i = 0; i < n; ++i)
        x += c.row(i) * cox_de_boor(t, i, k, u);
    return x;
}

/// d-th derivative of the same spline through the basis identity
/// N_k^(d)(u) = sum_m (-1)^m C(d, m) N_{k-d}(u - m).
inline Eigen::RowVector3d spline_derivative_eval(const bsvg::Points& c, int p, int d, double u) {
    const int n = static_cast<int>(c.rows());
    const int k = p + 1;
    const int kd = k - d;
    std::vector<double> t(static_cast<size_t>(n + k + d + 1));
    for (size_t i = 0; i < t.size(); ++i)
        t[i] = static_cast<double>(static_cast<int>(i) - p);
    const double end = n - p;
    if (u >= end)
        u = std::nextafter(end, 0.0);
    Eigen::RowVector3d x = Eigen::RowVector3d::Zero();
    for (int i = 0; i < n; ++i) {
        double binom = 1.0, b = 0.0;
        for (int m = 0; m <= d; ++m) {
            b += ((m % 2) ? -binom : binom) * cox_de_boor(t, i + m, kd, u);
            binom = binom * (d - m) / (m + 1);
        }
        x += c.row(i) * b;
    }
    return x;
}

/// Central finite difference gradient of a scalar function of a vector.
inline Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                   Eigen::VectorXd x, double h) {
    Eigen::VectorXd g(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double x0 = x(i);
        x(i) = x0 + h;
        const double fp = f(x);
        x(i) = x0 - h;
        const double fm = f(x);
        x(i) = x0;
        g(i) = (fp - fm) / (2.0 * h);
    }
    return g;
}

/// max_i |a_i - b_i| / max(max_i |b_i|, floor)
inline double rel_error(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double floor = 1e-12) {
    const double scale = std::max(b.cwiseAbs().maxCoeff(), floor);
    return (a - b).cwiseAbs().maxCoeff() / scale;
}

namespace detail {
inline double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa,
                          double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double diff = left + right - whole;
    if (depth <= 0 || std::abs(diff) <= 15.0 * tol)
        return left + right + diff / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}
} // namespace detail

/// Adaptive Simpson quadrature.
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol = 1e-12, int depth = 40) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth);
}

inline bsvg::Points random_points(bsvg::Rng& rng, int n, double lo = 0.0, double hi = 1.0) {
    bsvg::Points p(n, 3);
    for (int i = 0; i < n; ++i)
        for (int d = 0; d < 3; ++d)
            p(i, d) = rng.uniform(lo, hi);
    return p;
}

} // namespace oracle
