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

// Linear bridge from cardinal B-splines to piecewise cubic Bezier chains.
//
// Each span of a degree-p spline is converted to a degree-p Bezier segment
// with the block S^p; consecutive blocks are stacked with a shift of p rows
// and one column so that junction points are a single shared row. Quintic
// chains are then reduced to cubic with the block R^{5,3}, stacked with a
// shift of 3 rows and 5 columns (shared junction row/column). The composed
// sparse map M = R S acts identically on x, y and radius.

#include <bsvg/core.hpp>

namespace bsvg {

/// (p+1) x (p+1) span conversion block. Supported degrees: 3 and 5.
Eigen::MatrixXd conversion_block(int degree);

/// (q+1) x (p+1) degree reduction block. Supported: (5, 3) and the identity (3, 3).
Eigen::MatrixXd reduction_block(int from_degree, int to_degree);

/// Stacks a (p+1) x (p+1) conversion block for `segments` spans:
/// (p*segments + 1) x (segments + p).
SparseMap stack_conversion(const Eigen::MatrixXd& block, int segments);

/// Stacks a (q+1) x (p+1) reduction block: (q*segments + 1) x (p*segments + 1).
SparseMap stack_reduction(const Eigen::MatrixXd& block, int segments);

/// Piecewise cubic chain; segment i uses points 3i .. 3i+3.
struct BezierChain {
    Points points; ///< (3 * segments + 1) x 3, rows are (x, y, radius)
    bool closed = false;

    int segments() const noexcept { return points.rows() > 0 ? static_cast<int>(points.rows() - 1) / 3 : 0; }
    Eigen::RowVector3d eval(int segment, double t) const;
};

class ConversionPipeline {
public:
    /// Precomputes M for a degree-p spline with `control_count` controls.
    ConversionPipeline(int degree, int control_count, bool closed = false);

    int degree() const noexcept { return degree_; }
    int segments() const noexcept { return segments_; }
    int control_count() const noexcept { return segments_ + degree_; }

    const SparseMap& conversion() const noexcept { return S_; }
    const SparseMap& reduction() const noexcept { return R_; }
    const SparseMap& matrix() const noexcept { return M_; }

    /// Cubic chain for the given controls. Errc::dimension_mismatch on size.
    BezierChain to_cubic(const Points& control) const;

    /// M^T grad, the gradient with respect to spline controls.
    Points backward(const Points& chain_grad) const;

private:
    int degree_;
    int segments_;
    bool closed_;
    SparseMap S_;
    SparseMap R_;
    SparseMap M_;
};

/// Samples a cubic chain at `per_segment` uniform parameters per segment plus
/// the final endpoint: (per_segment * segments + 1) x (3 * segments + 1).
SparseMap chain_sampling_matrix(int segments, int per_segment);

} // namespace bsvg
