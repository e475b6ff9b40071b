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

#include <bsvg/image_io.hpp>
#include <bsvg/objectives.hpp>

#include <doctest.h>

#include <numbers>

#include "oracles.hpp"

using namespace bsvg;

namespace {

Canvas random_canvas(Rng& rng, int w, int h, int c) {
    Canvas out(w, h, c);
    for (double& v : out.pixels)
        v = rng.uniform();
    return out;
}

Eigen::VectorXd as_vec(const Points2& p) {
    Eigen::VectorXd v(p.size());
    for (Eigen::Index i = 0; i < p.rows(); ++i)
        v.segment(2 * i, 2) = p.row(i).transpose();
    return v;
}

Points2 from_vec(const Eigen::VectorXd& v) {
    Points2 p(v.size() / 2, 2);
    for (Eigen::Index i = 0; i < p.rows(); ++i)
        p.row(i) = v.segment(2 * i, 2).transpose();
    return p;
}

Points2 figure_eight(int n, double scale) {
    Points2 p(n, 2);
    for (int i = 0; i < n; ++i) {
        const double s = 2.0 * std::numbers::pi * i / n;
        p.row(i) << scale * std::sin(s), scale * std::sin(s) * std::cos(s);
    }
    return p;
}

Points2 figure_eight_tangents(int n, double scale) {
    Points2 p(n, 2);
    for (int i = 0; i < n; ++i) {
        const double s = 2.0 * std::numbers::pi * i / n;
        p.row(i) << scale * std::cos(s), scale * std::cos(2.0 * s);
    }
    return p;
}

Points2 circle(int n, double radius, double phase = 0.0) {
    Points2 p(n, 2);
    for (int i = 0; i < n; ++i) {
        const double s = 2.0 * std::numbers::pi * i / n + phase;
        p.row(i) << radius * std::cos(s), radius * std::sin(s);
    }
    return p;
}

Points2 circle_tangents(int n, double radius, double phase = 0.0) {
    Points2 p(n, 2);
    for (int i = 0; i < n; ++i) {
        const double s = 2.0 * std::numbers::pi * i / n + phase;
        p.row(i) << -radius * std::sin(s), radius * std::cos(s);
    }
    return p;
}

double polyline_length(const Points2& p) {
    double len = 0.0;
    for (Eigen::Index i = 0; i < p.rows(); ++i)
        len += (p.row((i + 1) % p.rows()) - p.row(i)).norm();
    return len;
}

} // namespace

TEST_CASE("multiscale MSE") {
    Rng rng(1);
    const Canvas a = random_canvas(rng, 16, 16, 1);
    const ImageLoss same = multiscale_mse(a, a, 3);
    CHECK(same.value == 0.0);
    CHECK(*std::max_element(same.grad.pixels.begin(), same.grad.pixels.end()) == 0.0);

    // One-level case is the plain MSE.
    Canvas b = a;
    b.at(3, 5) += 0.4;
    CHECK(multiscale_mse(a, b, 1).value == doctest::Approx(0.16 / 256.0).epsilon(1e-14));

    const Canvas t = random_canvas(rng, 16, 16, 3);
    const Canvas r = random_canvas(rng, 16, 16, 3);
    const ImageLoss l = multiscale_mse(r, t, 3);
    auto f = [&](const Eigen::VectorXd& x) {
        Canvas c = r;
        for (size_t i = 0; i < c.size(); ++i)
            c.pixels[i] = x(static_cast<Eigen::Index>(i));
        return multiscale_mse(c, t, 3).value;
    };
    const Eigen::VectorXd x0 = Eigen::Map<const Eigen::VectorXd>(r.pixels.data(), static_cast<Eigen::Index>(r.size()));
    const Eigen::VectorXd fd = oracle::fd_gradient(f, x0, 1e-5);
    const Eigen::VectorXd an =
        Eigen::Map<const Eigen::VectorXd>(l.grad.pixels.data(), static_cast<Eigen::Index>(l.grad.size()));
    CHECK(oracle::rel_error(an, fd) < 1e-6);

    CHECK_THROWS_AS(multiscale_mse(a, t, 2), Error);

    Eigen::VectorXd white = Eigen::VectorXd::Ones(1);
    const Canvas half = apply_target_opacity(a, white, 0.5);
    CHECK(half.at(2, 2) == doctest::Approx(1.0 + 0.5 * (a.at(2, 2) - 1.0)));
}

TEST_CASE("bounding box loss") {
    const Eigen::Vector2d lo(0, 0), hi(10, 20);
    Points2 inside(3, 2);
    inside << 1, 1, 5, 19, 9.9, 0.1;
    CHECK(bbox_loss(inside, lo, hi).value == 0.0);
    Points2 out(1, 2);
    out << 11, 21;
    CHECK(bbox_loss(out, lo, hi).value == 2.0);
    CHECK_THROWS_AS(bbox_loss(out, hi, lo), Error);

    Rng rng(2);
    Points2 p(6, 2);
    for (int i = 0; i < 6; ++i)
        p.row(i) << rng.uniform(-5, 15), rng.uniform(-5, 25);
    const GeomLoss g = bbox_loss(p, lo, hi, BoxPenalty::softplus);
    const Eigen::VectorXd fd = oracle::fd_gradient(
        [&](const Eigen::VectorXd& x) { return bbox_loss(from_vec(x), lo, hi, BoxPenalty::softplus).value; },
        as_vec(p), 1e-5);
    CHECK(oracle::rel_error(as_vec(g.grad), fd) < 1e-8);
}

TEST_CASE("repulsion energy") {
    // Separate curves do not interact: the loss is per curve.
    const Points2 c1 = circle(40, 10), c2 = circle(40, 10.01);
    const double e1 = repulsion_loss(c1, circle_tangents(40, 10), true).value;
    const double e2 = repulsion_loss(c2, circle_tangents(40, 10.01), true).value;
    CHECK(std::isfinite(e1));
    CHECK(e1 > 0.0);
    CHECK(e2 > 0.0);

    // Rotation invariance.
    const double rot = repulsion_loss(circle(40, 10, 0.37), circle_tangents(40, 10, 0.37), true).value;
    CHECK(rot == doctest::Approx(e1).epsilon(1e-10));

    // Figure eight against a circle of equal length and sample count.
    const Points2 eight = figure_eight(80, 20);
    const double r = polyline_length(eight) / (2.0 * std::numbers::pi);
    const double e_eight = repulsion_loss(eight, figure_eight_tangents(80, 20), true).value;
    const double e_loop = repulsion_loss(circle(80, r), circle_tangents(80, r), true).value;
    CHECK(e_eight > e_loop);

    // Divergence as two non-adjacent samples approach.
    Points2 pts(8, 2), tan(8, 2);
    for (int i = 0; i < 8; ++i) {
        pts.row(i) << i, 0;
        tan.row(i) << 1, 0;
    }
    RepulsionOptions opts;
    opts.eps = 1e-12;
    double prev = 0.0;
    for (double gap : {2.0, 1.0, 0.5, 0.1, 0.01}) {
        Points2 q = pts;
        q.row(5) << 1.0, gap; // approaches sample 1 from the side
        const double e = repulsion_loss(q, tan, false, opts).value;
        CHECK(e > prev);
        prev = e;
    }

    Rng rng(3);
    Points2 x(12, 2), t(12, 2);
    for (int i = 0; i < 12; ++i) {
        x.row(i) << rng.uniform(0, 10), rng.uniform(0, 10);
        t.row(i) << rng.uniform(-1, 1), rng.uniform(-1, 1);
    }
    for (bool closed : {false, true})
        for (double alpha : {2.0, 3.0}) {
            RepulsionOptions o;
            o.alpha = alpha;
            const RepulsionLoss L = repulsion_loss(x, t, closed, o);
            Eigen::VectorXd v0(48);
            v0 << as_vec(x), as_vec(t);
            Eigen::VectorXd an(48);
            an << as_vec(L.grad_points), as_vec(L.grad_tangents);
            const Eigen::VectorXd fd = oracle::fd_gradient(
                [&](const Eigen::VectorXd& v) {
                    return repulsion_loss(from_vec(v.head(24)), from_vec(v.tail(24)), closed, o).value;
                },
                v0, 1e-6);
            CHECK(oracle::rel_error(an, fd) < 1e-6);
        }
    CHECK_THROWS_AS(repulsion_loss(x.topRows(2), t.topRows(2), false), Error);
}

TEST_CASE("overlap and alignment") {
    Canvas c(4, 4, 1, 0.25);
    CHECK(overlap_cost(c).value == 0.0);
    c.at(1, 2) = 0.75;
    const ImageLoss o = overlap_cost(c);
    CHECK(o.value == 0.25);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 4; ++x)
            CHECK(o.grad.at(x, y) == ((x == 1 && y == 2) ? 1.0 : 0.0));

    Points2 line(4, 2);
    line << 0, 0, 1, 0, 2, 0, 3, 0;
    CHECK(alignment_cost(line).value == 0.0);
    Points2 zig(3, 2);
    zig << 0, 0, 1, 0, 1, 1;
    CHECK(alignment_cost(zig).value == doctest::Approx(std::numbers::pi / 2).epsilon(1e-15));

    Rng rng(8);
    Points2 p(7, 2);
    for (int i = 0; i < 7; ++i)
        p.row(i) << i * 3.0 + rng.uniform(-1, 1), rng.uniform(-2, 2);
    const GeomLoss g = alignment_cost(p);
    const Eigen::VectorXd fd = oracle::fd_gradient(
        [&](const Eigen::VectorXd& v) { return alignment_cost(from_vec(v)).value; }, as_vec(p), 1e-6);
    CHECK(oracle::rel_error(as_vec(g.grad), fd) < 1e-6);
}

TEST_CASE("self intersection count") {
    CHECK(self_intersections(figure_eight(64, 10), true) == 1);
    CHECK(self_intersections(circle(64, 10), true) == 0);
    Points2 z(4, 2);
    z << 0, 0, 2, 2, 2, 0, 0, 2;
    CHECK(self_intersections(z, false) == 1);
}

TEST_CASE("loss combiner") {
    LossCombiner one;
    double routed = 0.0;
    one.add("mse", 1.0, 3.5, [&](double w) { routed += w * 2.0; });
    CHECK(one.total() == 3.5);
    one.route();
    CHECK(routed == 2.0);

    LossCombiner scaled;
    routed = 0.0;
    scaled.add("mse", 4.0, 3.5, [&](double w) { routed += w * 2.0; });
    scaled.route();
    CHECK(scaled.total() == 14.0);
    CHECK(routed == 8.0);

    LossCombiner off;
    bool called = false;
    off.add("repulsion", 0.0, 1.0, [&](double) { called = true; });
    off.route();
    CHECK_FALSE(called);
    CHECK(off.total() == 0.0);
    CHECK(off.terms().empty());

    LossCombiner bad;
    try {
        bad.add("alignment", 1.0, std::nan(""));
        FAIL("expected an exception");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::numeric);
        CHECK(std::string(e.what()).find("alignment") != std::string::npos);
    }
    CHECK_THROWS_AS(bad.add("x", -1.0, 1.0), Error);
}

TEST_CASE("PNG round trip") {
    Rng rng(4);
    for (int c : {1, 3, 4})
        for (int depth : {8, 16}) {
            const Canvas img = random_canvas(rng, 9, 7, c);
            const Canvas back = decode_png(encode_png(img, depth));
            REQUIRE(back.same_shape(img));
            const double tol = depth == 8 ? 0.5 / 255.0 : 0.5 / 65535.0;
            for (size_t i = 0; i < img.size(); ++i)
                CHECK(std::abs(back.pixels[i] - img.pixels[i]) <= tol + 1e-12);
        }
    CHECK_THROWS_AS(decode_png({1, 2, 3}), Error);
    std::vector<std::uint8_t> truncated = encode_png(Canvas(4, 4, 1, 0.5));
    truncated.resize(truncated.size() / 2);
    CHECK_THROWS_AS(decode_png(truncated), Error);
}

TEST_CASE("subprocess gradient provider") {
    Rng rng(5);
    const Canvas img = random_canvas(rng, 12, 10, 3);
    {
        SubprocessProvider p(std::string(FAKE_PROVIDER));
        for (int step = 0; step < 3; ++step) {
            const ProviderResult r = p(step, img);
            REQUIRE(r.loss.has_value());
            REQUIRE(r.grad.same_shape(img));
            double loss = 0.0;
            for (size_t i = 0; i < img.size(); ++i) {
                const double d = img.pixels[i] - 0.5;
                loss += 0.5 * d * d;
                CHECK(std::abs(r.grad.pixels[i] - d) < 1e-4);
            }
            CHECK(*r.loss == doctest::Approx(loss).epsilon(1e-4));
        }
    }
    {
        SubprocessProvider p(std::string(FAKE_PROVIDER) + " noloss");
        CHECK_FALSE(p(0, img).loss.has_value());
    }
    {
        SubprocessProvider p(std::string(FAKE_PROVIDER) + " badheader");
        CHECK_THROWS_AS(p(0, img), Error);
    }
    {
        SubprocessProvider p(std::string(FAKE_PROVIDER) + " shape");
        try {
            p(0, img);
            FAIL("expected an exception");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::dimension_mismatch);
        }
    }
    {
        SubprocessProvider p(std::string(FAKE_PROVIDER) + " nan");
        CHECK_THROWS_AS(p(0, img), Error);
    }
    {
        SubprocessProvider p("/nonexistent/provider-binary");
        CHECK_THROWS_AS(p(0, img), Error);
    }
}
