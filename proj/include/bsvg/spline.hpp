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

// Cardinal (uniform, integer-knot) B-splines built from key-points.
//
// A spline of degree p (order k = p + 1) with n control points uses the fixed
// knot vector t_i = i - p, i = 0 .. n + p, so every basis function is a
// translate of the single cardinal basis N_k. The evaluation domain is
// [t_{k-1}, t_{m-k}] = [0, n - p]; span j = [j, j + 1] is controlled by
// c_j .. c_{j+p}.

#include <bsvg/core.hpp>

#include <span>
#include <vector>

namespace bsvg {

/// User-facing curve description: key-points in (x, y, radius), each repeated
/// `multiplicity[i]` times in the control sequence.
struct KeyPointPath {
    Points keypoints;
    bool closed = false;
    int degree = 5;
    std::vector<int> multiplicity; ///< empty means all ones

    /// Number of key-points after multiplicity expansion.
    int expanded_count() const;
};

/// N_k(u) by the Cox-de Boor recursion on integer knots 0..k.
/// Zero outside [0, k). Throws Errc::invalid_argument for k < 1.
double cardinal_basis(int k, double u);

/// Weights of the k = degree + 1 active controls on one span at local
/// parameter t in [0, 1]: out[r] = N_k(t + degree - r), r = 0..degree.
/// The span's right end (t = 1) is evaluated by polynomial continuity.
void span_basis(int degree, double t, std::span<double> out);

class SplineCurve {
public:
    SplineCurve(Points control, int degree, bool closed);

    const Points& control() const noexcept { return control_; }
    int degree() const noexcept { return degree_; }
    int order() const noexcept { return degree_ + 1; }
    bool closed() const noexcept { return closed_; }
    int size() const noexcept { return static_cast<int>(control_.rows()); }

    /// Number of polynomial spans, n - p.
    int spans() const noexcept { return size() - degree_; }

    /// Integer knot vector [-p, ..., n].
    std::vector<double> knots() const;

    /// Evaluation domain [t_{k-1}, t_{m-k}] = [0, n - p].
    double domain_begin() const noexcept { return 0.0; }
    double domain_end() const noexcept { return static_cast<double>(spans()); }

    /// x(u) = sum_i c_i N_k(u - t_i). Errc::domain outside the domain.
    Eigen::RowVector3d eval(double u) const;

    /// The d-th derivative as a spline of order k - d whose controls are the
    /// d-th forward differences of the controls (unit knot spacing).
    /// Errc::domain unless 1 <= d <= k - 1.
    SplineCurve derivative(int d) const;

private:
    Points control_;
    int degree_;
    bool closed_;
};

/// Maps expanded key-points to spline controls (open: pad first/last key-point
/// k-1 extra times; closed: append the first k-1 expanded key-points).
/// The result is a (control count) x (key-point count) selection matrix.
SparseMap keypoint_map(const KeyPointPath& path);

/// Control point count produced by `build_spline` for `path`.
int control_count(const KeyPointPath& path);

/// Validates `path` and builds its spline. Errc::invalid_argument when the
/// path is under-determined (open: fewer than 2 key-points; closed: fewer
/// than 3 expanded key-points) or malformed.
SplineCurve build_spline(const KeyPointPath& path);

/// Fixed linear map from flattened controls to S samples at uniform parameters.
struct SamplingMap {
    SparseMap matrix;          ///< S x n, point level
    std::vector<double> params;

    int samples() const noexcept { return static_cast<int>(params.size()); }
    Points apply(const Points& control) const { return matrix * control; }
    /// A^T g.
    Points adjoint(const Points& grad) const { return matrix.transpose() * grad; }
};

/// Uniform samples over the domain. `include_end` = false drops the final
/// parameter (used for periodic sampling of closed curves).
/// Errc::invalid_argument for samples < 2.
SamplingMap sampling_map(int degree, int control_count, int samples, bool include_end = true);
SamplingMap sampling_map(const SplineCurve& spline, int samples, bool include_end = true);

/// Sampling map of the d-th derivative, expressed on the original controls.
SamplingMap derivative_sampling_map(int degree, int control_count, int d, int samples,
                                    bool include_end = true);

/// Samples per span used by default for rendering.
inline constexpr int default_samples_per_span = 8;

} // namespace bsvg
