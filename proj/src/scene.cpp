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

#include <bsvg/scene.hpp>
#include <bsvg/bezier.hpp>
#include <bsvg/palette.hpp>

#include <string>

namespace bsvg {

void validate_scene(const Scene& s) {
    if (s.width < 1 || s.height < 1)
        throw Error(Errc::invalid_argument, "scene: canvas must be at least 1x1");
    const int C = s.channels();
    if (C != 1 && C != 3)
        throw Error(Errc::invalid_argument, "scene: background must have 1 or 3 channels");
    if (s.palette.size() > 0 && s.palette.cols() != C)
        throw Error(Errc::invalid_argument, "scene: palette channel count differs from the canvas");
    for (size_t i = 0; i < s.paths.size(); ++i) {
        const ScenePath& p = s.paths[i];
        const std::string where = "scene: path " + std::to_string(i) + ": ";
        if (p.path.degree != 3 && p.path.degree != 5)
            throw Error(Errc::invalid_argument, where + "degree must be 3 or 5");
        if (p.kind == DrawKind::fill && !p.path.closed)
            throw Error(Errc::invalid_argument, where + "filled paths must be closed");
        if (p.color.size() != C)
            throw Error(Errc::invalid_argument, where + "color channel count differs from the canvas");
        if (p.logits.size() > 0 && p.logits.size() != s.palette.rows())
            throw Error(Errc::invalid_argument, where + "logit count differs from the palette size");
        if (!p.path.keypoints.allFinite() || !p.color.allFinite())
            throw Error(Errc::invalid_argument, where + "non-finite values");
        if (!(p.opacity >= 0.0 && p.opacity <= 1.0))
            throw Error(Errc::invalid_argument, where + "opacity must lie in [0, 1]");
    }
}

SparseMap render_map(const KeyPointPath& path, int samples_per_span) {
    if (samples_per_span < 1)
        throw Error(Errc::invalid_argument, "render_map: samples per span must be >= 1");
    const SparseMap E = keypoint_map(path);
    const ConversionPipeline pipe(path.degree, static_cast<int>(E.rows()), path.closed);
    const SparseMap B = chain_sampling_matrix(pipe.segments(), samples_per_span);
    SparseMap out = B * pipe.matrix() * E;
    out.prune(0.0);
    out.makeCompressed();
    return out;
}

Points path_samples(const KeyPointPath& path, int samples_per_span) {
    return render_map(path, samples_per_span) * path.keypoints;
}

std::vector<Drawable> scene_drawables(const Scene& scene, int samples_per_span, bool hard_colors) {
    std::vector<Drawable> out;
    out.reserve(scene.paths.size());
    for (const ScenePath& p : scene.paths) {
        Drawable d;
        const Points s = path_samples(p.path, samples_per_span);
        d.polyline = s.leftCols<2>();
        d.widths = s.col(2);
        d.kind = p.kind;
        d.opacity = p.opacity;
        if (p.logits.size() > 0) {
            if (hard_colors) {
                d.color = hard_assign(p.logits, scene.palette);
            } else {
                Rng unused(0);
                d.color = soft_assign(p.logits, scene.palette, 1.0, 0.0, unused).color;
            }
        } else {
            d.color = p.color;
        }
        out.push_back(std::move(d));
    }
    return out;
}

Canvas render_scene(const Scene& scene, int samples_per_span, bool hard_colors, const RasterSettings& settings) {
    validate_scene(scene);
    Rasterizer r(settings);
    const auto drawables = scene_drawables(scene, samples_per_span, hard_colors);
    return r.render(drawables, scene.width, scene.height, scene.background);
}

} // namespace bsvg
