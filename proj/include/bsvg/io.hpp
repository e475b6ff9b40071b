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

// Scene files (JSON) and SVG 1.1 export and import.
//
// SVG has no variable-width strokes, so each stroke is written as a filled
// outline polygon: the sampled centreline offset left and right by the local
// radius, joined by round caps. The centreline itself is kept as a hidden
// constant-width path, and the full scene is embedded as JSON metadata so
// the file can be loaded back exactly.

#include <bsvg/scene.hpp>

#include <optional>
#include <string>
#include <vector>

namespace bsvg {

std::string scene_to_json(const Scene& scene);
/// Errc::parse on malformed JSON or missing fields; the scene is validated.
Scene scene_from_json(const std::string& text);

void save_scene(const std::string& path, const Scene& scene);
/// Loads a JSON scene, or an SVG written by `export_svg`.
Scene load_scene(const std::string& path);

/// Outline polygon of a variable-width stroke with round caps. Closed
/// centrelines (first sample equal to the last) give two rings, the inner
/// one reversed so that non-zero filling leaves the hole empty.
std::vector<Points2> stroke_outline(const Points2& centreline, const Eigen::VectorXd& radii, bool closed);

/// Moves outline vertices onto the zero level set of `stroke_distance`, so
/// the outline follows the rendered edge including smooth-min rounding.
void snap_outline(std::vector<Points2>& rings, const Drawable& stroke, double softmin);

struct SvgOptions {
    int samples_per_span = default_samples_per_span;
    bool metadata = true;
    double softmin = RasterSettings{}.softmin; ///< 0 keeps the plain offset outline
};

std::string export_svg(const Scene& scene, const SvgOptions& options = {});

/// Parses SVG path data into flattened subpaths. Curves are flattened with
/// `curve_samples` points per segment. Errc::parse on grammar violations.
struct PathData {
    std::vector<Points2> subpaths;
    std::vector<bool> closed;
};
PathData parse_path_data(const std::string& d, int curve_samples = default_samples_per_span);

struct SvgShape {
    PathData geometry;
    Eigen::VectorXd color; ///< RGB
    double opacity = 1.0;
    bool filled = true;
    bool hidden = false;
};

struct SvgDocument {
    int width = 0;
    int height = 0;
    Eigen::VectorXd background; ///< RGB, white when absent
    std::vector<SvgShape> shapes;
    std::optional<std::string> metadata;
};

/// Reads the subset of SVG written by `export_svg`: rect, path and g
/// elements with fill, fill-opacity, display and a metadata element.
SvgDocument parse_svg(const std::string& text, int curve_samples = default_samples_per_span);

/// Visible filled shapes as drawables with `channels` color channels (RGB
/// averaged for one channel). Subpaths of a shape are joined into one ring.
std::vector<Drawable> svg_drawables(const SvgDocument& doc, int channels);

/// The scene embedded in an exported SVG. Errc::unsupported without metadata.
Scene import_svg(const std::string& text);

} // namespace bsvg
