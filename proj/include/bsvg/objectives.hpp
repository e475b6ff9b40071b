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

// Image-space and geometric loss terms, the weighted combiner, and the
// socket for image gradients computed by an external process.

#include <bsvg/raster.hpp>

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace bsvg {

/// Relative loss weights. Unspecified weights are 1.
struct LossWeights {
    double smooth = 1.0;
    double box = 1.0;
    double repulsion = 1.0;
    double coverage = 1.0; ///< multiscale MSE
    double overlap = 1.0;
    double align = 1.0;
    double balance = 1.0;
    double external = 1.0;
};

struct ImageLoss {
    double value = 0.0;
    Canvas grad;
};

struct GeomLoss {
    double value = 0.0;
    Points2 grad;
};

/// Sum over pyramid levels of the per-level mean squared error
/// (mean over all pixels and channels of that level).
ImageLoss multiscale_mse(const Canvas& rendered, const Canvas& target, int levels = 4);

/// Blends a target towards the background: bg + opacity (target - bg).
/// Lower opacity asks for less ink.
Canvas apply_target_opacity(const Canvas& target, const Eigen::VectorXd& background, double opacity);

enum class BoxPenalty { relu, softplus };

/// sum_i 1^T [phi(b_min - p_i) + phi(p_i - b_max)] over the x, y columns.
GeomLoss bbox_loss(const Points2& points, const Eigen::Vector2d& b_min, const Eigen::Vector2d& b_max,
                   BoxPenalty phi = BoxPenalty::relu);

struct RepulsionOptions {
    double alpha = 2.0;  ///< exponent of the projected distance, >= 2
    double beta = 4.0;   ///< exponent of the distance
    int window = 2;      ///< index distance of excluded neighbours
    double eps = 1e-6;   ///< squared-distance guard, px^2
};

struct RepulsionLoss {
    double value = 0.0;
    Points2 grad_points;
    Points2 grad_tangents;
};

/// Tangent-point energy of one curve's samples:
///   sum_{i != j, |i - j| > window} |t_i^perp . (x_i - x_j)|^alpha / (|x_i - x_j|^2 + eps)^(beta / 2)
/// with t_i the unit tangent. Index distance is cyclic for closed curves.
/// Call once per curve; distinct curves never interact.
RepulsionLoss repulsion_loss(const Points2& points, const Points2& tangents, bool closed,
                             const RepulsionOptions& options = {});

/// sum over pixels of relu(v - 0.5) on a single-channel render.
ImageLoss overlap_cost(const Canvas& rendered);

/// Sum of absolute turning angles at interior centers.
GeomLoss alignment_cost(const Points2& centers, double eps = 1e-12);

/// Number of crossing pairs among non-adjacent polyline segments.
int self_intersections(const Points2& polyline, bool closed);

/// Accumulates weighted loss terms. A term with weight 0 is skipped
/// entirely, so disabling a term is indistinguishable from omitting it.
class LossCombiner {
public:
    /// `route` receives the weight and must add weight * d(term) to the
    /// caller's gradient buffers. Errc::numeric when `value` is not finite,
    /// naming the term; Errc::invalid_argument for a negative weight.
    void add(const std::string& name, double weight, double value,
             std::function<void(double)> route = {});

    double total() const noexcept { return total_; }

    /// Raw (unweighted) value per registered term, in registration order.
    const std::vector<std::pair<std::string, double>>& terms() const noexcept { return terms_; }

    /// Invokes every route callback in registration order.
    void route() const;

private:
    double total_ = 0.0;
    std::vector<std::pair<std::string, double>> terms_;
    std::vector<std::pair<double, std::function<void(double)>>> routes_;
};

struct ProviderResult {
    std::optional<double> loss;
    Canvas grad;
};

/// Maps a rendered image to an image-space gradient, optionally with a loss.
using GradientProvider = std::function<ProviderResult(int step, const Canvas& image)>;

/// Wire protocol, version 1, over the child's stdin/stdout:
///   request:  "BSVG-PROVIDER 1 STEP <step> PNG <nbytes>\n" then the PNG bytes
///   response: "BSVG-GRAD 1 <H> <W> <C> LOSS <value|none>\n" then H*W*C
///             little-endian float32 values, row-major, channel-interleaved
/// The child is started once and kept alive across requests. An empty line
/// on stdin asks it to exit.
class SubprocessProvider {
public:
    explicit SubprocessProvider(const std::string& command);
    ~SubprocessProvider();
    SubprocessProvider(const SubprocessProvider&) = delete;
    SubprocessProvider& operator=(const SubprocessProvider&) = delete;

    /// Errc::io on pipe failure or a malformed response,
    /// Errc::dimension_mismatch when the gradient shape differs from `image`,
    /// Errc::numeric for non-finite values.
    ProviderResult operator()(int step, const Canvas& image);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Adapts a shared SubprocessProvider to the GradientProvider signature.
GradientProvider make_subprocess_provider(const std::string& command);

} // namespace bsvg
