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

#include <bsvg/seeding.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace bsvg {

namespace {

// Uniform bucket grid over the canvas for nearest-seed queries.
class SeedGrid {
public:
    SeedGrid(const Points2& seeds, int width, int height) : seeds_(seeds) {
        const double area = static_cast<double>(width) * height;
        cell_ = std::max(1.0, std::sqrt(area / std::max<Eigen::Index>(seeds.rows(), 1)));
        nx_ = std::max(1, static_cast<int>(std::ceil(width / cell_)));
        ny_ = std::max(1, static_cast<int>(std::ceil(height / cell_)));
        buckets_.assign(static_cast<size_t>(nx_) * ny_, {});
        for (Eigen::Index i = 0; i < seeds.rows(); ++i)
            buckets_[bucket(cx(seeds(i, 0)), cy(seeds(i, 1)))].push_back(static_cast<int>(i));
    }

    int nearest(double x, double y) const {
        const int bx = cx(x), by = cy(y);
        double best = std::numeric_limits<double>::infinity();
        int best_i = -1;
        const int max_ring = std::max(nx_, ny_);
        for (int r = 0; r <= max_ring; ++r) {
            for (int j = by - r; j <= by + r; ++j) {
                if (j < 0 || j >= ny_)
                    continue;
                const bool edge_row = (j == by - r || j == by + r);
                for (int i = bx - r; i <= bx + r; i += (edge_row ? 1 : 2 * std::max(r, 1))) {
                    if (i < 0 || i >= nx_)
                        continue;
                    for (int s : buckets_[bucket(i, j)]) {
                        const double dx = seeds_(s, 0) - x, dy = seeds_(s, 1) - y;
                        const double d = dx * dx + dy * dy;
                        if (d < best || (d == best && s < best_i)) {
                            best = d;
                            best_i = s;
                        }
                    }
                }
            }
            // Cells beyond ring r are at least r cells away.
            const double reach = r * cell_;
            if (best_i >= 0 && best <= reach * reach)
                break;
        }
        return best_i;
    }

private:
    int cx(double x) const { return std::clamp(static_cast<int>(std::floor(x / cell_)), 0, nx_ - 1); }
    int cy(double y) const { return std::clamp(static_cast<int>(std::floor(y / cell_)), 0, ny_ - 1); }
    size_t bucket(int i, int j) const { return static_cast<size_t>(j) * nx_ + i; }

    const Points2& seeds_;
    double cell_ = 1.0;
    int nx_ = 1, ny_ = 1;
    std::vector<std::vector<int>> buckets_;
};

} // namespace

std::vector<int> label_pixels(const Points2& seeds, int width, int height) {
    if (seeds.rows() < 1)
        throw Error(Errc::invalid_argument, "label_pixels: no seeds");
    const SeedGrid grid(seeds, width, height);
    std::vector<int> labels(static_cast<size_t>(width) * height);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            labels[static_cast<size_t>(y) * width + x] = grid.nearest(x + 0.5, y + 0.5);
    return labels;
}

Points2 voronoi_stipple(const Canvas& density, int n, Rng& rng, int iterations) {
    if (n < 1)
        throw Error(Errc::invalid_argument, "voronoi_stipple: need n >= 1");
    if (iterations < 0)
        throw Error(Errc::invalid_argument, "voronoi_stipple: negative iteration count");
    const int W = density.width, H = density.height;
    const size_t npx = static_cast<size_t>(W) * H;
    std::vector<double> w(npx);
    std::vector<double> cdf(npx);
    double total = 0.0;
    for (size_t i = 0; i < npx; ++i) {
        const double v = density.pixels[i * static_cast<size_t>(density.channels)];
        w[i] = std::isfinite(v) && v > 0.0 ? v : 0.0;
        total += w[i];
        cdf[i] = total;
    }
    if (!(total > 0.0))
        throw Error(Errc::invalid_argument, "voronoi_stipple: density has zero mass");

    // Initial seeds drawn from the density.
    Points2 seeds(n, 2);
    for (int s = 0; s < n; ++s) {
        const double u = rng.uniform() * total;
        const size_t idx = std::min<size_t>(
            static_cast<size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin()), npx - 1);
        seeds(s, 0) = static_cast<double>(idx % static_cast<size_t>(W)) + rng.uniform();
        seeds(s, 1) = static_cast<double>(idx / static_cast<size_t>(W)) + rng.uniform();
    }

    std::vector<double> mx(static_cast<size_t>(n)), my(static_cast<size_t>(n)), mass(static_cast<size_t>(n));
    for (int it = 0; it < iterations; ++it) {
        const std::vector<int> labels = label_pixels(seeds, W, H);
        std::fill(mx.begin(), mx.end(), 0.0);
        std::fill(my.begin(), my.end(), 0.0);
        std::fill(mass.begin(), mass.end(), 0.0);
        for (int y = 0; y < H; ++y)
            for (int x = 0; x < W; ++x) {
                const size_t i = static_cast<size_t>(y) * W + x;
                if (w[i] == 0.0)
                    continue;
                const auto l = static_cast<size_t>(labels[i]);
                mx[l] += w[i] * (x + 0.5);
                my[l] += w[i] * (y + 0.5);
                mass[l] += w[i];
            }
        double moved = 0.0;
        for (int s = 0; s < n; ++s) {
            const auto k = static_cast<size_t>(s);
            if (mass[k] <= 0.0)
                continue;
            const double nx = mx[k] / mass[k], ny = my[k] / mass[k];
            moved = std::max(moved, std::hypot(nx - seeds(s, 0), ny - seeds(s, 1)));
            seeds(s, 0) = nx;
            seeds(s, 1) = ny;
        }
        if (moved < 1e-9)
            break;
    }
    return seeds;
}

double tour_length(const Points2& p, const std::vector<int>& order, bool open) {
    double len = 0.0;
    const size_t n = order.size();
    for (size_t i = 0; i + 1 < n; ++i)
        len += (p.row(order[i]) - p.row(order[i + 1])).norm();
    if (!open && n > 1)
        len += (p.row(order[n - 1]) - p.row(order[0])).norm();
    return len;
}

std::vector<int> tsp_path(const Points2& p, bool open) {
    const int n = static_cast<int>(p.rows());
    if (n < 2)
        throw Error(Errc::invalid_argument, "tsp_path: need at least 2 points");
    auto left_top = [&](int a, int b) { return p(a, 0) < p(b, 0) || (p(a, 0) == p(b, 0) && p(a, 1) < p(b, 1)); };
    int start = 0;
    for (int i = 1; i < n; ++i)
        if (left_top(i, start))
            start = i;
    int end = -1;
    if (open) {
        for (int i = 0; i < n; ++i) {
            if (i == start)
                continue;
            if (end < 0 || left_top(end, i))
                end = i;
        }
    }
    auto dist = [&](int a, int b) { return (p.row(a) - p.row(b)).norm(); };

    // Nearest neighbour construction, ties to the lowest index.
    std::vector<int> order;
    order.reserve(static_cast<size_t>(n));
    std::vector<char> used(static_cast<size_t>(n), 0);
    order.push_back(start);
    used[static_cast<size_t>(start)] = 1;
    if (open)
        used[static_cast<size_t>(end)] = 1;
    const int free_count = open ? n - 2 : n - 1;
    for (int k = 0; k < free_count; ++k) {
        const int cur = order.back();
        int best = -1;
        double bd = std::numeric_limits<double>::infinity();
        for (int j = 0; j < n; ++j)
            if (!used[static_cast<size_t>(j)] && dist(cur, j) < bd) {
                bd = dist(cur, j);
                best = j;
            }
        order.push_back(best);
        used[static_cast<size_t>(best)] = 1;
    }
    if (open)
        order.push_back(end);

    // 2-opt. For open paths the endpoints stay fixed.
    const int m = n;
    bool improved = true;
    while (improved) {
        improved = false;
        for (int i = 1; i < m - 1; ++i) {
            const int jmax = open ? m - 2 : m - 1;
            for (int j = i + 1; j <= jmax; ++j) {
                const int a = order[static_cast<size_t>(i - 1)], b = order[static_cast<size_t>(i)];
                const int c = order[static_cast<size_t>(j)];
                const int d = order[static_cast<size_t>((j + 1) % m)];
                if (!open && j == m - 1 && i == 1)
                    continue; // reversing everything but the first point
                const double delta = dist(a, c) + dist(b, d) - dist(a, b) - dist(c, d);
                if (delta < -1e-12) {
                    std::reverse(order.begin() + i, order.begin() + j + 1);
                    improved = true;
                }
            }
        }
    }
    if (!open) {
        const auto it = std::find(order.begin(), order.end(), start);
        std::rotate(order.begin(), it, order.end());
    }
    return order;
}

double polygon_area(const Points2& poly) {
    double a = 0.0;
    const Eigen::Index n = poly.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Index j = (i + 1) % n;
        a += poly(i, 0) * poly(j, 1) - poly(j, 0) * poly(i, 1);
    }
    return 0.5 * a;
}

Points2 voronoi_cell(const Points2& sites, int site, double width, double height) {
    std::vector<Eigen::Vector2d> poly{{0, 0}, {width, 0}, {width, height}, {0, height}};
    const Eigen::Vector2d s = sites.row(site).transpose();
    std::vector<Eigen::Vector2d> next;
    for (Eigen::Index o = 0; o < sites.rows(); ++o) {
        if (o == site)
            continue;
        const Eigen::Vector2d q = sites.row(o).transpose();
        const Eigen::Vector2d nrm = q - s;
        if (nrm.squaredNorm() == 0.0)
            continue; // coincident sites: the lower index keeps the cell
        // Keep points with (x - mid) . nrm <= 0.
        const double off = nrm.dot(0.5 * (s + q));
        next.clear();
        const size_t m = poly.size();
        for (size_t i = 0; i < m; ++i) {
            const Eigen::Vector2d& a = poly[i];
            const Eigen::Vector2d& b = poly[(i + 1) % m];
            const double fa = nrm.dot(a) - off, fb = nrm.dot(b) - off;
            if (fa <= 0.0)
                next.push_back(a);
            if ((fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0))
                next.push_back(a + (fa / (fa - fb)) * (b - a));
        }
        poly.swap(next);
        if (poly.empty())
            break;
    }
    // Remove near-duplicate consecutive vertices.
    std::vector<Eigen::Vector2d> clean;
    for (const auto& v : poly)
        if (clean.empty() || (v - clean.back()).norm() > 1e-9)
            clean.push_back(v);
    while (clean.size() > 1 && (clean.front() - clean.back()).norm() <= 1e-9)
        clean.pop_back();
    Points2 out(static_cast<Eigen::Index>(clean.size()), 2);
    for (size_t i = 0; i < clean.size(); ++i)
        out.row(static_cast<Eigen::Index>(i)) = clean[i].transpose();
    return out;
}

AreaSeedResult area_seeds(const Canvas& saliency, int n, Rng& rng, int degree, int subdivide, int iterations) {
    if (n < 1)
        throw Error(Errc::invalid_argument, "area_seeds: need n >= 1");
    if (subdivide < 1)
        throw Error(Errc::invalid_argument, "area_seeds: subdivide must be >= 1");
    const int W = saliency.width, H = saliency.height;
    const size_t C = static_cast<size_t>(saliency.channels);
    // A small floor keeps every region reachable by the sampler.
    Canvas density(W, H, 1);
    double peak = 0.0;
    for (size_t i = 0; i < density.size(); ++i)
        peak = std::max(peak, saliency.pixels[i * C]);
    const double floor = peak > 0.0 ? 1e-3 * peak : 1.0;
    for (size_t i = 0; i < density.size(); ++i)
        density.pixels[i] = std::max(saliency.pixels[i * C], 0.0) + floor;
    const Points2 sites = voronoi_stipple(density, n, rng, iterations);

    const std::vector<int> labels = label_pixels(sites, W, H);
    std::vector<double> sum(static_cast<size_t>(n), 0.0), cnt(static_cast<size_t>(n), 0.0);
    for (size_t i = 0; i < labels.size(); ++i) {
        sum[static_cast<size_t>(labels[i])] += saliency.pixels[i * C];
        cnt[static_cast<size_t>(labels[i])] += 1.0;
    }

    AreaSeedResult res;
    for (int s = 0; s < n; ++s) {
        const Points2 poly = voronoi_cell(sites, s, W, H);
        if (poly.rows() < 3 || std::abs(polygon_area(poly)) < 1e-9) {
            ++res.dropped;
            continue;
        }
        AreaSeed a;
        a.polygon = poly;
        a.saliency = cnt[static_cast<size_t>(s)] > 0.0 ? sum[static_cast<size_t>(s)] / cnt[static_cast<size_t>(s)]
                                                        : 0.0;
        const Eigen::Index m = poly.rows();
        a.path.keypoints.resize(m * subdivide, 3);
        for (Eigen::Index i = 0; i < m; ++i) {
            const Eigen::RowVector2d p0 = poly.row(i), p1 = poly.row((i + 1) % m);
            for (int k = 0; k < subdivide; ++k) {
                const double t = static_cast<double>(k) / subdivide;
                const Eigen::RowVector2d v = p0 + t * (p1 - p0);
                a.path.keypoints.row(i * subdivide + k) << v.x(), v.y(), 0.0;
            }
        }
        a.path.closed = true;
        a.path.degree = degree;
        res.areas.push_back(std::move(a));
    }
    std::stable_sort(res.areas.begin(), res.areas.end(),
                     [](const AreaSeed& x, const AreaSeed& y) { return x.saliency < y.saliency; });
    return res;
}

KeyPointPath expand_multiplicity(KeyPointPath path, int r) {
    if (r < 1)
        throw Error(Errc::invalid_argument, "expand_multiplicity: r must be >= 1");
    path.multiplicity.assign(static_cast<size_t>(path.keypoints.rows()), r);
    return path;
}

} // namespace bsvg
