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

// Differentiable soft rasterizer for variable-width polyline strokes and
// filled closed polylines.
//
// Stroke coverage. Each polyline segment is a conical capsule with radius
// interpolated linearly between its end samples. Per pixel centre, signed
// distances sd_i = rho_i - r_i(t_i) to the nearby capsules are merged with a
// log-sum-exp smooth minimum of temperature `softmin`; with softmin weights
// pi_i the effective radius is r = sum pi_i r_i and
//
//     alpha = S(-sd) - S(-sd - 2 r)
//
// where S is the smoothstep ramp over the anti-aliasing band [-h, h],
// h = aa_band / 2. The second term makes coverage vanish as the radius goes
// to zero. Fill coverage is S(-sd) with sd the signed distance to the
// polyline, negative where the winding number is non-zero. Drawables are
// composited back to front with the "over" operator.
//
// Everything is computed per pixel in a fixed order, so results are
// bit-identical between runs.

#include <bsvg/core.hpp>

#include <span>
#include <vector>

namespace bsvg {

/// H x W x C float image, row-major, channel-interleaved.
struct Canvas {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<double> pixels;

    Canvas() = default;
    Canvas(int w, int h, int c, double fill = 0.0);

    double& at(int x, int y, int c = 0) {
        return pixels[(static_cast<size_t>(y) * width + x) * channels + c];
    }
    double at(int x, int y, int c = 0) const {
        return pixels[(static_cast<size_t>(y) * width + x) * channels + c];
    }
    size_t size() const noexcept { return pixels.size(); }
    bool same_shape(const Canvas& o) const noexcept {
        return width == o.width && height == o.height && channels == o.channels;
    }
};

enum class DrawKind { stroke, fill };

struct Drawable {
    Points2 polyline;       ///< S samples
    Eigen::VectorXd widths; ///< S radii (strokes only)
    DrawKind kind = DrawKind::stroke;
    Eigen::VectorXd color;  ///< one value per canvas channel
    double opacity = 1.0;
};

struct DrawableGrad {
    Points2 polyline;
    Eigen::VectorXd widths;
    Eigen::VectorXd color;
    double opacity = 0.0;
};

struct RasterSettings {
    double aa_band = 1.0;  ///< full width of the anti-aliasing ramp, px
    double softmin = 0.1;  ///< smooth-min temperature, px
    int tile = 16;
};

class Rasterizer {
public:
    explicit Rasterizer(RasterSettings settings = {});

    const RasterSettings& settings() const noexcept { return settings_; }

    /// Renders and retains intermediates for `backward`.
    /// Errc::invalid_argument for a zero-sized canvas or mismatched colors.
    Canvas render(std::span<const Drawable> scene, int width, int height,
                  const Eigen::VectorXd& background);

    /// Gradients of a scalar loss with respect to every drawable parameter,
    /// given dLoss/dCanvas. Errc::state when called before `render`.
    std::vector<DrawableGrad> backward(const Canvas& canvas_grad) const;

    /// Coverage of drawable `index` at pixel (x, y) from the last render.
    double coverage(size_t index, int x, int y) const;

private:
    struct Layer;

    RasterSettings settings_;
    int width_ = 0;
    int height_ = 0;
    int channels_ = 0;
    Eigen::VectorXd background_;
    std::vector<Drawable> scene_;
    std::vector<Layer> layers_;
    bool rendered_ = false;

public:
    ~Rasterizer();
    Rasterizer(Rasterizer&&) noexcept;
    Rasterizer& operator=(Rasterizer&&) noexcept;
};

/// Smooth signed distance of a stroke at `p`, the quantity whose zero level
/// set is the edge of the rendered stroke. Errc::invalid_argument for a fill.
double stroke_distance(const Drawable& stroke, const Eigen::Vector2d& p, double softmin);

/// Gaussian pyramid: level 0 is the input; each further level blurs with
/// sigma = 1 px (edge replication) then averages 2x2 blocks.
/// Errc::invalid_argument if a level would fall below 1 x 1.
std::vector<Canvas> downsample_blur(const Canvas& image, int levels);

/// Adjoint of `downsample_blur`: sums the back-projected per-level gradients
/// into a level-0 gradient.
Canvas downsample_blur_adjoint(const std::vector<Canvas>& level_grads);

} // namespace bsvg
