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

// Initial geometry: weighted Voronoi stippling, stipple tours, and
// Voronoi-cell areas ranked by saliency.

#include <bsvg/raster.hpp>
#include <bsvg/spline.hpp>

#include <vector>

namespace bsvg {

inline constexpr int default_stipple_iterations = 50;

/// Lloyd relaxation of `n` seeds towards the density-weighted centroids of
/// their pixel-grid Voronoi cells. Channel 0 of `density` is the weight.
/// Errc::invalid_argument for zero total mass or n < 1.
Points2 voronoi_stipple(const Canvas& density, int n, Rng& rng,
                        int iterations = default_stipple_iterations);

/// Index of the nearest seed for every pixel centre (row-major), ties to
/// the lowest index.
std::vector<int> label_pixels(const Points2& seeds, int width, int height);

/// Nearest-neighbour tour improved by 2-opt until no move shortens it.
/// Open paths run from the left-topmost point (smallest x, then smallest y)
/// to the bottom-rightmost point (largest x, then largest y); closed tours
/// are rotated to start at the left-topmost point.
std::vector<int> tsp_path(const Points2& points, bool open);

double tour_length(const Points2& points, const std::vector<int>& order, bool open);

struct AreaSeed {
    KeyPointPath path;
    double saliency = 0.0; ///< mean saliency over the cell's pixels
    Points2 polygon;       ///< clipped cell vertices, counter-clockwise
};

struct AreaSeedResult {
    std::vector<AreaSeed> areas; ///< increasing mean saliency
    int dropped = 0;             ///< degenerate cells removed
};

/// Sites from saliency-weighted stippling; each becomes a closed path whose
/// key-points are its Voronoi cell's vertices (clipped to the canvas), with
/// every edge split into `subdivide` pieces.
AreaSeedResult area_seeds(const Canvas& saliency, int n, Rng& rng, int degree = 5, int subdivide = 1,
                          int iterations = default_stipple_iterations);

/// Convex polygon of the half-plane intersection defining `site`'s cell.
Points2 voronoi_cell(const Points2& sites, int site, double width, double height);

double polygon_area(const Points2& polygon);

/// Sets every multiplicity to r. Errc::invalid_argument for r < 1.
KeyPointPath expand_multiplicity(KeyPointPath path, int r);

} // namespace bsvg
