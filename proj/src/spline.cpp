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

#include <bsvg/spline.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace bsvg {

double Rng::normal() noexcept {
    const double u1 = uniform_open();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

int KeyPointPath::expanded_count() const {
    if (multiplicity.empty())
        return static_cast<int>(keypoints.rows());
    int total = 0;
    for (int m : multiplicity)
        total += m;
    return total;
}

double cardinal_basis(int k, double u) {
    if (k < 1)
        throw Error(Errc::invalid_argument, "cardinal_basis: order must be >= 1");
    if (!(u >= 0.0) || u >= static_cast<double>(k))
        return 0.0;
    // f[i] = N_r(u - i) for i = 0 .. k - r.
    std::vector<double> f(static_cast<size_t>(k), 0.0);
    for (int i = 0; i < k; ++i) {
        const double v = u - i;
        f[static_cast<size_t>(i)] = (v >= 0.0 && v < 1.0) ? 1.0 : 0.0;
    }
    for (int r = 2; r <= k; ++r) {
        const double inv = 1.0 / (r - 1);
        for (int i = 0; i <= k - r; ++i) {
            const double v = u - i;
            f[static_cast<size_t>(i)] = v * inv * f[static_cast<size_t>(i)] +
                                        (r - v) * inv * f[static_cast<size_t>(i) + 1];
        }
    }
    return f[0];
}

void span_basis(int degree, double t, std::span<double> out) {
    if (degree < 0 || out.size() < static_cast<size_t>(degree) + 1)
        throw Error(Errc::invalid_argument, "span_basis: output too small");
    out[0] = 1.0;
    for (int q = 1; q <= degree; ++q) {
        const double inv = 1.0 / q;
        // b^q[r] = ((t+q-r)/q) b^{q-1}[r-1] + ((1-t+r)/q) b^{q-1}[r]
        double prev = 0.0; // b^{q-1}[r-1]
        for (int r = 0; r <= q; ++r) {
            const double cur = r < q ? out[static_cast<size_t>(r)] : 0.0;
            out[static_cast<size_t>(r)] = (t + q - r) * inv * prev + (1.0 - t + r) * inv * cur;
            prev = cur;
        }
    }
}

namespace {

// Span index and local parameter for u in [0, spans].
std::pair<int, double> locate(double u, int spans) {
    int j = static_cast<int>(std::floor(u));
    j = std::clamp(j, 0, spans - 1);
    return {j, u - j};
}

} // namespace

SplineCurve::SplineCurve(Points control, int degree, bool closed)
    : control_(std::move(control)), degree_(degree), closed_(closed) {
    if (degree_ < 0)
        throw Error(Errc::invalid_argument, "SplineCurve: negative degree");
    if (control_.rows() < degree_ + 1)
        throw Error(Errc::invalid_argument,
                    "SplineCurve: need at least degree + 1 control points");
}

std::vector<double> SplineCurve::knots() const {
    std::vector<double> t(static_cast<size_t>(size() + order()));
    for (size_t i = 0; i < t.size(); ++i)
        t[i] = static_cast<double>(static_cast<int>(i) - degree_);
    return t;
}

Eigen::RowVector3d SplineCurve::eval(double u) const {
    if (!(u >= domain_begin() && u <= domain_end()))
        throw Error(Errc::domain, "SplineCurve::eval: parameter outside domain");
    const auto [j, t] = locate(u, spans());
    double w[32];
    if (degree_ >= 32)
        throw Error(Errc::unsupported, "SplineCurve::eval: degree too high");
    span_basis(degree_, t, std::span<double>(w, static_cast<size_t>(degree_) + 1));
    Eigen::RowVector3d x = Eigen::RowVector3d::Zero();
    for (int r = 0; r <= degree_; ++r)
        x += w[r] * control_.row(j + r);
    return x;
}

SplineCurve SplineCurve::derivative(int d) const {
    if (d < 1 || d > degree_)
        throw Error(Errc::domain, "SplineCurve::derivative: order must satisfy 1 <= d <= k - 1");
    Points diff = control_;
    for (int s = 0; s < d; ++s) {
        const Eigen::Index m = diff.rows() - 1;
        Points next(m, 3);
        for (Eigen::Index i = 0; i < m; ++i)
            next.row(i) = diff.row(i + 1) - diff.row(i);
        diff = std::move(next);
    }
    return SplineCurve(std::move(diff), degree_ - d, closed_);
}

int control_count(const KeyPointPath& path) {
    const int expanded = path.expanded_count();
    return path.closed ? expanded + path.degree : expanded + 2 * path.degree;
}

SparseMap keypoint_map(const KeyPointPath& path) {
    const int m = static_cast<int>(path.keypoints.rows());
    if (!path.multiplicity.empty() && static_cast<int>(path.multiplicity.size()) != m)
        throw Error(Errc::dimension_mismatch, "KeyPointPath: multiplicity size mismatch");
    std::vector<int> expanded;
    for (int i = 0; i < m; ++i) {
        const int r = path.multiplicity.empty() ? 1 : path.multiplicity[static_cast<size_t>(i)];
        if (r < 1)
            throw Error(Errc::invalid_argument, "KeyPointPath: multiplicity must be >= 1");
        expanded.insert(expanded.end(), static_cast<size_t>(r), i);
    }
    std::vector<int> rows;
    const int p = path.degree;
    if (path.closed) {
        rows = expanded;
        for (int i = 0; i < p; ++i)
            rows.push_back(expanded[static_cast<size_t>(i) % expanded.size()]);
    } else {
        rows.insert(rows.end(), static_cast<size_t>(p), expanded.front());
        rows.insert(rows.end(), expanded.begin(), expanded.end());
        rows.insert(rows.end(), static_cast<size_t>(p), expanded.back());
    }
    SparseMap map(static_cast<Eigen::Index>(rows.size()), m);
    map.reserve(Eigen::VectorXi::Constant(static_cast<Eigen::Index>(rows.size()), 1));
    for (size_t r = 0; r < rows.size(); ++r)
        map.insert(static_cast<Eigen::Index>(r), rows[r]) = 1.0;
    map.makeCompressed();
    return map;
}

SplineCurve build_spline(const KeyPointPath& path) {
    if (path.degree < 1)
        throw Error(Errc::invalid_argument, "build_spline: degree must be >= 1");
    const int m = static_cast<int>(path.keypoints.rows());
    if (m == 0)
        throw Error(Errc::invalid_argument, "build_spline: no key-points");
    const SparseMap map = keypoint_map(path);
    const int expanded = path.expanded_count();
    if (!path.closed && m < 2)
        throw Error(Errc::invalid_argument,
                    "build_spline: under-determined open path (need >= 2 key-points)");
    if (path.closed && expanded < 3)
        throw Error(Errc::invalid_argument,
                    "build_spline: under-determined closed path (need >= 3 key-points)");
    return SplineCurve(map * path.keypoints, path.degree, path.closed);
}

namespace {

std::vector<double> uniform_params(double span, int samples, bool include_end) {
    std::vector<double> u(static_cast<size_t>(samples));
    const double step = include_end ? span / (samples - 1) : span / samples;
    for (int s = 0; s < samples; ++s)
        u[static_cast<size_t>(s)] = s * step;
    if (include_end)
        u.back() = span;
    return u;
}

} // namespace

SamplingMap derivative_sampling_map(int degree, int n, int d, int samples, bool include_end) {
    if (samples < 2)
        throw Error(Errc::invalid_argument, "sampling_map: need at least 2 samples");
    if (degree < 0 || n < degree + 1)
        throw Error(Errc::invalid_argument, "sampling_map: too few control points");
    if (d < 0 || d > degree)
        throw Error(Errc::domain, "sampling_map: derivative order out of range");
    const int spans = n - degree;
    const int lower = degree - d;
    SamplingMap out;
    out.params = uniform_params(spans, samples, include_end);
    out.matrix.resize(samples, n);
    out.matrix.reserve(Eigen::VectorXi::Constant(samples, degree + 1));

    // Binomial difference weights: (Delta^d c)_i = sum_m (-1)^(d-m) C(d, m) c_{i+m}.
    std::vector<double> binom(static_cast<size_t>(d) + 1, 1.0);
    for (int m = 1; m <= d; ++m)
        binom[static_cast<size_t>(m)] = binom[static_cast<size_t>(m) - 1] * (d - m + 1) / m;

    std::vector<double> w(static_cast<size_t>(lower) + 1);
    std::vector<double> row(static_cast<size_t>(degree) + 1);
    for (int s = 0; s < samples; ++s) {
        const auto [j, t] = locate(out.params[static_cast<size_t>(s)], spans);
        span_basis(lower, t, w);
        std::fill(row.begin(), row.end(), 0.0);
        for (int i = 0; i <= lower; ++i)
            for (int m = 0; m <= d; ++m) {
                const double sign = ((d - m) % 2 == 0) ? 1.0 : -1.0;
                row[static_cast<size_t>(i + m)] += w[static_cast<size_t>(i)] * sign * binom[static_cast<size_t>(m)];
            }
        for (int r = 0; r <= degree; ++r)
            if (row[static_cast<size_t>(r)] != 0.0)
                out.matrix.insert(s, j + r) = row[static_cast<size_t>(r)];
    }
    out.matrix.makeCompressed();
    return out;
}

SamplingMap sampling_map(int degree, int n, int samples, bool include_end) {
    return derivative_sampling_map(degree, n, 0, samples, include_end);
}

SamplingMap sampling_map(const SplineCurve& spline, int samples, bool include_end) {
    return sampling_map(spline.degree(), spline.size(), samples, include_end);
}

} // namespace bsvg
