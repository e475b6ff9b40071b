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

#include <bsvg/smoothing.hpp>
#include <bsvg/spline.hpp>

#include <cmath>
#include <numbers>
#include <vector>

namespace bsvg {

void gauss_legendre01(int points, std::span<double> nodes, std::span<double> weights) {
    if (points < 1 || nodes.size() < static_cast<size_t>(points) ||
        weights.size() < static_cast<size_t>(points))
        throw Error(Errc::invalid_argument, "gauss_legendre01: bad rule size");
    // Newton iteration on P_n from Chebyshev initial guesses.
    for (int i = 0; i < points; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (points + 0.5));
        double dp = 1.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int m = 2; m <= points; ++m) {
                const double p2 = ((2 * m - 1) * x * p1 - (m - 1) * p0) / m;
                p0 = p1;
                p1 = p2;
            }
            dp = points * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16)
                break;
        }
        // Recompute derivative at the converged node.
        double p0 = 1.0, p1 = x;
        for (int m = 2; m <= points; ++m) {
            const double p2 = ((2 * m - 1) * x * p1 - (m - 1) * p0) / m;
            p0 = p1;
            p1 = p2;
        }
        dp = points * (x * p1 - p0) / (x * x - 1.0);
        nodes[static_cast<size_t>(i)] = 0.5 * (1.0 - x);
        weights[static_cast<size_t>(i)] = 1.0 / ((1.0 - x * x) * dp * dp); // 2/((1-x^2)P'^2) scaled by 1/2
    }
}

namespace {

// Local Gramian over one unit span: L_rs = int_0^1 b_r^(d)(t) b_s^(d)(t) dt,
// where b_r(t) = N_k(t + p - r) is the weight of the span's r-th control.
Eigen::MatrixXd span_gramian(int k, int d) {
    const int p = k - 1;
    const int lower = p - d;
    const int q = k; // exact for polynomial degree <= 2k - 1 >= 2(p - d)
    std::vector<double> nodes(static_cast<size_t>(q)), weights(static_cast<size_t>(q));
    gauss_legendre01(q, nodes, weights);

    std::vector<double> binom(static_cast<size_t>(d) + 1, 1.0);
    for (int m = 1; m <= d; ++m)
        binom[static_cast<size_t>(m)] = binom[static_cast<size_t>(m) - 1] * (d - m + 1) / m;

    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(k, k);
    std::vector<double> w(static_cast<size_t>(lower) + 1);
    Eigen::VectorXd b(k);
    for (int g = 0; g < q; ++g) {
        span_basis(lower, nodes[static_cast<size_t>(g)], w);
        b.setZero();
        for (int i = 0; i <= lower; ++i)
            for (int m = 0; m <= d; ++m) {
                const double sign = ((d - m) % 2 == 0) ? 1.0 : -1.0;
                b(i + m) += w[static_cast<size_t>(i)] * sign * binom[static_cast<size_t>(m)];
            }
        L.noalias() += weights[static_cast<size_t>(g)] * b * b.transpose();
    }
    return L;
}

// Folds an (n + p) x (n + p) open-layout matrix onto n periodic controls.
Eigen::MatrixXd fold_periodic(const Eigen::MatrixXd& full, int n) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < full.rows(); ++i)
        for (Eigen::Index j = 0; j < full.cols(); ++j)
            out(i % n, j % n) += full(i, j);
    return out;
}

} // namespace

GramOperator gram_exact(int k, int d, int n, bool closed) {
    if (k < 1)
        throw Error(Errc::invalid_argument, "gram_exact: order must be >= 1");
    if (d < 1 || d > k - 1)
        throw Error(Errc::domain, "gram_exact: derivative order must satisfy 1 <= d <= k - 1");
    const int p = k - 1;
    if (!closed && n < k)
        throw Error(Errc::invalid_argument, "gram_exact: need n >= k controls");
    if (closed && n < 2)
        throw Error(Errc::invalid_argument, "gram_exact: need n >= 2 periodic controls");

    const Eigen::MatrixXd L = span_gramian(k, d);
    const int total = closed ? n + p : n;
    const int spans = total - p;
    Eigen::MatrixXd full = Eigen::MatrixXd::Zero(total, total);
    for (int j = 0; j < spans; ++j)
        full.block(j, j, k, k) += L;

    GramOperator op;
    op.G = closed ? fold_periodic(full, n) : std::move(full);
    op.G = 0.5 * (op.G + op.G.transpose()).eval();
    op.order_d = d;
    op.span = static_cast<double>(spans);
    op.mode = GramMode::exact;
    op.closed = closed;
    return op;
}

GramOperator gram_pspline(int d, int n, bool closed, double span) {
    if (d < 1)
        throw Error(Errc::domain, "gram_pspline: difference order must be >= 1");
    if (n <= d)
        throw Error(Errc::invalid_argument, "gram_pspline: need n > d");
    // D_1 applied d times.
    const int rows = closed ? n : n - d;
    Eigen::MatrixXd D = Eigen::MatrixXd::Identity(n, n);
    for (int s = 0; s < d; ++s) {
        const Eigen::Index r = closed ? n : D.rows() - 1;
        Eigen::MatrixXd next(r, n);
        for (Eigen::Index i = 0; i < r; ++i)
            next.row(i) = D.row((i + 1) % D.rows()) - D.row(i);
        D = std::move(next);
    }
    GramOperator op;
    op.G = D.transpose() * D;
    op.order_d = d;
    op.span = span > 0.0 ? span : static_cast<double>(rows);
    op.mode = GramMode::pspline;
    op.closed = closed;
    return op;
}

CostGrad smooth_cost(std::span<const double> c, const GramOperator& op, int dims) {
    const Eigen::Index n = op.G.rows();
    if (dims < 1 || static_cast<Eigen::Index>(c.size()) != n * dims)
        throw Error(Errc::dimension_mismatch, "smooth_cost: control vector does not match operator");
    using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    Eigen::Map<const RowMat> C(c.data(), n, dims);
    const RowMat GC = op.G * C;
    CostGrad out;
    out.value = (C.array() * GC.array()).sum() / op.span;
    out.grad.resize(n * dims);
    Eigen::Map<RowMat>(out.grad.data(), n, dims) = (2.0 / op.span) * GC;
    return out;
}

double dimensionless_jerk(const Eigen::MatrixXd& x, double dt) {
    const Eigen::Index s = x.rows();
    if (s < 4)
        throw Error(Errc::invalid_argument, "dimensionless_jerk: need at least 4 samples");
    if (!(dt > 0.0))
        throw Error(Errc::invalid_argument, "dimensionless_jerk: dt must be positive");
    double length = 0.0;
    for (Eigen::Index i = 0; i + 1 < s; ++i)
        length += (x.row(i + 1) - x.row(i)).norm();
    if (!(length > 0.0))
        throw Error(Errc::domain, "dimensionless_jerk: zero-length path");
    double integral = 0.0;
    const double inv = 1.0 / (dt * dt * dt);
    for (Eigen::Index i = 0; i + 3 < s; ++i) {
        const Eigen::RowVectorXd j =
            (x.row(i + 3) - 3.0 * x.row(i + 2) + 3.0 * x.row(i + 1) - x.row(i)) * inv;
        integral += j.squaredNorm() * dt;
    }
    const double duration = (s - 1) * dt;
    return std::pow(duration, 5) / (length * length) * integral;
}

} // namespace bsvg
