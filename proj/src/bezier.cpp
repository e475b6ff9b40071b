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

#include <bsvg/bezier.hpp>

#include <vector>

namespace bsvg {

Eigen::MatrixXd conversion_block(int degree) {
    if (degree == 3) {
        Eigen::MatrixXd s(4, 4);
        s << 1, 4, 1, 0,
             0, 4, 2, 0,
             0, 2, 4, 0,
             0, 1, 4, 1;
        return s / 6.0;
    }
    if (degree == 5) {
        Eigen::MatrixXd s(6, 6);
        s << 1, 26, 66, 26, 1, 0,
             0, 16, 66, 36, 2, 0,
             0, 8, 60, 48, 4, 0,
             0, 4, 48, 60, 8, 0,
             0, 2, 36, 66, 16, 0,
             0, 1, 26, 66, 26, 1;
        return s / 120.0;
    }
    throw Error(Errc::unsupported, "conversion_block: supported degrees are 3 and 5");
}

Eigen::MatrixXd reduction_block(int from_degree, int to_degree) {
    if (from_degree == 3 && to_degree == 3)
        return Eigen::MatrixXd::Identity(4, 4);
    if (from_degree == 5 && to_degree == 3) {
        Eigen::MatrixXd r = Eigen::MatrixXd::Zero(4, 6);
        r(0, 0) = 1.0;
        r(1, 0) = -2.0 / 3.0;
        r(1, 1) = 5.0 / 3.0;
        r(2, 4) = 5.0 / 3.0;
        r(2, 5) = -2.0 / 3.0;
        r(3, 5) = 1.0;
        return r;
    }
    throw Error(Errc::unsupported, "reduction_block: supported pairs are (5,3) and (3,3)");
}

namespace {

// Places copies of `block` with the given row/column shifts. Overlapping
// entries belong to shared junction rows and are written once.
SparseMap stack_blocks(const Eigen::MatrixXd& block, int copies, int row_shift, int col_shift,
                       Eigen::Index rows, Eigen::Index cols) {
    std::vector<Eigen::Triplet<double>> triplets;
    std::vector<char> written(static_cast<size_t>(rows), 0);
    for (int c = 0; c < copies; ++c) {
        for (Eigen::Index i = 0; i < block.rows(); ++i) {
            const Eigen::Index r = c * row_shift + i;
            if (written[static_cast<size_t>(r)])
                continue;
            written[static_cast<size_t>(r)] = 1;
            for (Eigen::Index j = 0; j < block.cols(); ++j)
                if (block(i, j) != 0.0)
                    triplets.emplace_back(r, c * col_shift + j, block(i, j));
        }
    }
    SparseMap out(rows, cols);
    out.setFromTriplets(triplets.begin(), triplets.end());
    return out;
}

} // namespace

SparseMap stack_conversion(const Eigen::MatrixXd& block, int segments) {
    if (segments < 1)
        throw Error(Errc::invalid_argument, "stack_conversion: need at least one segment");
    if (block.rows() != block.cols() || block.rows() < 2)
        throw Error(Errc::dimension_mismatch, "stack_conversion: block must be square");
    const int p = static_cast<int>(block.rows()) - 1;
    return stack_blocks(block, segments, p, 1, p * segments + 1, segments + p);
}

SparseMap stack_reduction(const Eigen::MatrixXd& block, int segments) {
    if (segments < 1)
        throw Error(Errc::invalid_argument, "stack_reduction: need at least one segment");
    const int q = static_cast<int>(block.rows()) - 1;
    const int p = static_cast<int>(block.cols()) - 1;
    return stack_blocks(block, segments, q, p, q * segments + 1, p * segments + 1);
}

Eigen::RowVector3d BezierChain::eval(int segment, double t) const {
    if (segment < 0 || segment >= segments())
        throw Error(Errc::domain, "BezierChain::eval: segment out of range");
    const double s = 1.0 - t;
    const Eigen::Index b = 3 * segment;
    return s * s * s * points.row(b) + 3.0 * s * s * t * points.row(b + 1) +
           3.0 * s * t * t * points.row(b + 2) + t * t * t * points.row(b + 3);
}

ConversionPipeline::ConversionPipeline(int degree, int control_count, bool closed)
    : degree_(degree), segments_(control_count - degree), closed_(closed) {
    if (segments_ < 1)
        throw Error(Errc::invalid_argument, "ConversionPipeline: need more controls than the degree");
    S_ = stack_conversion(conversion_block(degree), segments_);
    R_ = stack_reduction(reduction_block(degree, 3), segments_);
    M_ = (R_ * S_).pruned();
}

BezierChain ConversionPipeline::to_cubic(const Points& control) const {
    if (control.rows() != M_.cols())
        throw Error(Errc::dimension_mismatch, "to_cubic: control count does not match pipeline");
    BezierChain chain;
    chain.points = M_ * control;
    chain.closed = closed_;
    return chain;
}

Points ConversionPipeline::backward(const Points& chain_grad) const {
    if (chain_grad.rows() != M_.rows())
        throw Error(Errc::dimension_mismatch, "backward: gradient does not match pipeline");
    return M_.transpose() * chain_grad;
}

SparseMap chain_sampling_matrix(int segments, int per_segment) {
    if (segments < 1 || per_segment < 1)
        throw Error(Errc::invalid_argument, "chain_sampling_matrix: bad sizes");
    const Eigen::Index rows = static_cast<Eigen::Index>(segments) * per_segment + 1;
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<size_t>(rows) * 4);
    for (int seg = 0; seg < segments; ++seg)
        for (int s = 0; s < per_segment; ++s) {
            const double t = static_cast<double>(s) / per_segment;
            const double u = 1.0 - t;
            const Eigen::Index r = static_cast<Eigen::Index>(seg) * per_segment + s;
            const Eigen::Index c = 3 * seg;
            const double w[4] = {u * u * u, 3.0 * u * u * t, 3.0 * u * t * t, t * t * t};
            for (int i = 0; i < 4; ++i)
                if (w[i] != 0.0)
                    triplets.emplace_back(r, c + i, w[i]);
        }
    triplets.emplace_back(rows - 1, 3 * segments, 1.0);
    SparseMap out(rows, 3 * segments + 1);
    out.setFromTriplets(triplets.begin(), triplets.end());
    return out;
}

} // namespace bsvg
