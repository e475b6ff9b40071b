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

// A scene is an ordered list of key-point paths, each drawn as a stroke or
// a filled area, over a background color.

#include <bsvg/raster.hpp>
#include <bsvg/spline.hpp>

#include <vector>

namespace bsvg {

struct ScenePath {
    KeyPointPath path;
    DrawKind kind = DrawKind::stroke;
    Eigen::VectorXd color;  ///< one value per canvas channel
    double opacity = 1.0;
    Eigen::VectorXd logits; ///< empty, or one logit per palette color
};

struct Scene {
    int width = 0;
    int height = 0;
    Eigen::VectorXd background; ///< defines the channel count (1 or 3)
    std::vector<ScenePath> paths;
    Eigen::MatrixXd palette;    ///< K x channels, empty when unquantized

    int channels() const noexcept { return static_cast<int>(background.size()); }
};

/// Errc::invalid_argument describing the first inconsistency found.
void validate_scene(const Scene& scene);

/// Linear map from a path's key-points (M x 3) to its render samples: the
/// spline is built, converted to a cubic chain, and each cubic segment is
/// sampled `samples_per_span` times plus the final end point.
SparseMap render_map(const KeyPointPath& path, int samples_per_span);

/// Render samples (x, y, radius) of one path.
Points path_samples(const KeyPointPath& path, int samples_per_span);

/// Drawables for every path. Quantized paths use the argmax palette color
/// when `hard_colors` is set.
std::vector<Drawable> scene_drawables(const Scene& scene, int samples_per_span, bool hard_colors = true);

Canvas render_scene(const Scene& scene, int samples_per_span, bool hard_colors = true,
                    const RasterSettings& settings = {});

} // namespace bsvg
