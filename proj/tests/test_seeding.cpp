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

#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "oracles.hpp"

using namespace bsvg;

TEST_CASE("pixel labelling matches brute force") {
    Rng rng(1);
    for (int n : {1, 3, 17, 80}) {
        Points2 seeds(n, 2);
        for (int i = 0; i < n; ++i)
            seeds.row(i) << rng.uniform(0, 37), rng.uniform(0, 23);
        const std::vector<int> labels = label_pixels(seeds, 37, 23);
        for (int y = 0; y < 23; ++y)
            for (int x = 0; x < 37; ++x) {
                int best = 0;
                double bd = 1e300;
                for (int i = 0; i < n; ++i) {
                    const double d = std::pow(seeds(i, 0) - x - 0.5, 2) + std::pow(seeds(i, 1) - y - 0.5, 2);
                    if (d < bd) {
                        bd = d;
                        best = i;
                    }
                }
                CHECK(labels[static_cast<size_t>(y) * 37 + x] == best);
            }
    }
}

TEST_CASE("stippling") {
    Rng rng(2);
    const Canvas uniform(40, 20, 1, 1.0);
    const Points2 one = voronoi_stipple(uniform, 1, rng);
    CHECK(std::abs(one(0, 0) - 20.0) < 1e-9);
    CHECK(std::abs(one(0, 1) - 10.0) < 1e-9);

    Canvas left(40, 20, 1, 0.0);
    for (int y = 0; y < 20; ++y)
        for (int x = 0; x < 20; ++x)
            left.at(x, y) = 1.0;
    const Points2 pl = voronoi_stipple(left, 30, rng);
    for (int i = 0; i < 30; ++i)
        CHECK(pl(i, 0) < 20.0);

    // Darker (denser) quarter attracts more than its share of points.
    Canvas ramp(64, 64, 1);
    for (int y = 0; y < 64; ++y)
        for (int x = 0; x < 64; ++x)
            ramp.at(x, y) = (x + 0.5) / 64.0;
    const Points2 pr = voronoi_stipple(ramp, 200, rng);
    int dense = 0;
    for (int i = 0; i < 200; ++i) {
        CHECK((pr(i, 0) >= 0.0 && pr(i, 0) <= 64.0 && pr(i, 1) >= 0.0 && pr(i, 1) <= 64.0));
        dense += pr(i, 0) >= 48.0;
    }
    CHECK(dense > 0.25 * 200);

    Rng a(9), b(9);
    CHECK(voronoi_stipple(ramp, 50, a) == voronoi_stipple(ramp, 50, b));
    CHECK_THROWS_AS(voronoi_stipple(Canvas(8, 8, 1, 0.0), 4, rng), Error);
    CHECK_THROWS_AS(voronoi_stipple(uniform, 0, rng), Error);
}

TEST_CASE("tsp tours") {
    Rng rng(3);
    // Brute force on small sets; open tours keep their prescribed endpoints.
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 3 + trial % 5;
        Points2 p(n, 2);
        for (int i = 0; i < n; ++i)
            p.row(i) << rng.uniform(0, 10), rng.uniform(0, 10);
        for (bool open : {true, false}) {
            const std::vector<int> got = tsp_path(p, open);
            std::vector<int> sorted = got;
            std::sort(sorted.begin(), sorted.end());
            std::vector<int> ident(static_cast<size_t>(n));
            std::iota(ident.begin(), ident.end(), 0);
            CHECK(sorted == ident);
            std::vector<int> perm = ident;
            double best = 1e300;
            do {
                if (open && (perm.front() != got.front() || perm.back() != got.back()))
                    continue;
                best = std::min(best, tour_length(p, perm, open));
            } while (std::next_permutation(perm.begin(), perm.end()));
            if (n == 3)
                CHECK(tour_length(p, got, open) == doctest::Approx(best).epsilon(1e-12));
            else
                CHECK(tour_length(p, got, open) <= 1.25 * best);
        }
    }

    Points2 line(6, 2);
    line << 5, 5, 1, 1, 3, 3, 0, 0, 4, 4, 2, 2;
    CHECK(tsp_path(line, true) == std::vector<int>{3, 1, 5, 2, 4, 0});

    // Endpoints and the 2-opt improvement over nearest neighbour.
    Points2 pts(60, 2);
    for (int i = 0; i < 60; ++i)
        pts.row(i) << rng.uniform(0, 100), rng.uniform(0, 100);
    const std::vector<int> tour = tsp_path(pts, true);
    int lt = 0, br = 0;
    for (int i = 1; i < 60; ++i) {
        if (pts(i, 0) < pts(lt, 0))
            lt = i;
        if (pts(i, 0) > pts(br, 0))
            br = i;
    }
    CHECK(tour.front() == lt);
    CHECK(tour.back() == br);

    Points2 dup(3, 2);
    dup << 1, 1, 1, 1, 2, 2;
    CHECK(tsp_path(dup, true).size() == 3);
    CHECK_THROWS_AS(tsp_path(dup.topRows(1), true), Error);
}

TEST_CASE("voronoi area seeds") {
    Rng rng(4);
    const Canvas flat(50, 30, 1, 0.5);
    const AreaSeedResult one = area_seeds(flat, 1, rng);
    REQUIRE(one.areas.size() == 1);
    CHECK(std::abs(polygon_area(one.areas[0].polygon) - 1500.0) < 1e-9);
    CHECK(one.areas[0].path.closed);
    CHECK(one.areas[0].path.keypoints.rows() == 4);

    const AreaSeedResult many = area_seeds(flat, 12, rng, 5, 2);
    double total = 0.0;
    for (const AreaSeed& a : many.areas) {
        total += std::abs(polygon_area(a.polygon));
        CHECK(a.path.keypoints.rows() == 2 * a.polygon.rows());
    }
    CHECK(std::abs(total - 1500.0) < 1e-6);

    // Bright blob on the right ranks after the dark background.
    Canvas blobs(60, 30, 1, 0.0);
    for (int y = 0; y < 30; ++y)
        for (int x = 0; x < 60; ++x)
            if (std::hypot(x + 0.5 - 45.0, y + 0.5 - 15.0) < 8.0)
                blobs.at(x, y) = 1.0;
    const AreaSeedResult ranked = area_seeds(blobs, 6, rng);
    REQUIRE(ranked.areas.size() >= 2);
    for (size_t i = 1; i < ranked.areas.size(); ++i)
        CHECK(ranked.areas[i].saliency >= ranked.areas[i - 1].saliency);
    const AreaSeed& last = ranked.areas.back();
    const Eigen::RowVector2d centroid = last.polygon.colwise().mean();
    CHECK(centroid.x() > 30.0);
}

TEST_CASE("multiplicity expansion") {
    KeyPointPath p;
    p.keypoints = Points::Zero(4, 3);
    CHECK(expand_multiplicity(p, 1).multiplicity == std::vector<int>{1, 1, 1, 1});
    const KeyPointPath three = expand_multiplicity(p, 3);
    CHECK(three.expanded_count() == 12);
    CHECK_THROWS_AS(expand_multiplicity(p, 0), Error);
}
