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

#include <bsvg/raster.hpp>

#include <doctest.h>

#include <numbers>

#include "oracles.hpp"

using namespace bsvg;

namespace {

Drawable stroke(const Points2& pts, double r, double gray = 1.0) {
    Drawable d;
    d.polyline = pts;
    d.widths = Eigen::VectorXd::Constant(pts.rows(), r);
    d.kind = DrawKind::stroke;
    d.color = Eigen::VectorXd::Constant(1, gray);
    return d;
}

Drawable disk(double cx, double cy, double radius, int samples, double gray = 1.0) {
    Drawable d;
    d.polyline.resize(samples, 2);
    for (int i = 0; i < samples; ++i) {
        const double a = 2.0 * std::numbers::pi * i / samples;
        d.polyline.row(i) << cx + radius * std::cos(a), cy + radius * std::sin(a);
    }
    d.kind = DrawKind::fill;
    d.color = Eigen::VectorXd::Constant(1, gray);
    return d;
}

Points2 line(double x0, double y0, double x1, double y1, int n) {
    Points2 p(n, 2);
    for (int i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / (n - 1);
        p.row(i) << x0 + t * (x1 - x0), y0 + t * (y1 - y0);
    }
    return p;
}

const Eigen::VectorXd black = Eigen::VectorXd::Zero(1);

// Weighted pixel sum as a scalar loss.
double weighted(const Canvas& c, const Canvas& w) {
    double s = 0.0;
    for (size_t i = 0; i < c.size(); ++i)
        s += c.pixels[i] * w.pixels[i];
    return s;
}

} // namespace

TEST_CASE("empty scene and errors") {
    Rasterizer r;
    Eigen::VectorXd bg(3);
    bg << 0.2, 0.4, 0.6;
    const Canvas c = r.render({}, 7, 5, bg);
    for (int y = 0; y < 5; ++y)
        for (int x = 0; x < 7; ++x)
            for (int ch = 0; ch < 3; ++ch)
                CHECK(c.at(x, y, ch) == bg(ch));
    CHECK_THROWS_AS(r.render({}, 0, 5, bg), Error);
    Rasterizer fresh;
    CHECK_THROWS_AS(fresh.backward(Canvas(4, 4, 1)), Error);
    CHECK_THROWS_AS(r.backward(Canvas(4, 4, 3)), Error);
    const std::vector<Drawable> bad{stroke(line(0, 0, 3, 3, 3), 1.0)};
    CHECK_THROWS_AS(r.render(bad, 8, 8, bg), Error);
}

TEST_CASE("constant-width stroke profile") {
    Rasterizer r;
    const double radius = 4.0;
    const std::vector<Drawable> scene{stroke(line(4, 16, 28, 16, 7), radius, 0.8)};
    const Canvas c = r.render(scene, 32, 32, black);
    for (int y = 0; y < 32; ++y) {
        const double dy = std::abs(y + 0.5 - 16.0);
        const double v = c.at(16, y);
        if (dy < radius - 0.5)
            CHECK(v == doctest::Approx(0.8).epsilon(1e-12));
        else if (dy > radius + 0.5)
            CHECK(v == 0.0);
        else
            CHECK((v >= 0.0 && v <= 0.8));
    }
}

TEST_CASE("disk ink matches the analytic area") {
    Rasterizer r;
    const std::vector<Drawable> scene{disk(32, 32, 10, 256)};
    const Canvas c = r.render(scene, 64, 64, black);
    double ink = 0.0;
    for (double v : c.pixels)
        ink += v;
    const double area = std::numbers::pi * 100.0;
    CHECK(std::abs(ink - area) / area < 0.02);
}

TEST_CASE("zero width strokes vanish") {
    Rasterizer r;
    const std::vector<Drawable> scene{stroke(line(4, 4, 28, 20, 5), 0.0)};
    const Canvas c = r.render(scene, 32, 32, black);
    for (double v : c.pixels)
        CHECK(v == 0.0);
    // Negative radii are clamped to zero as well.
    std::vector<Drawable> neg{stroke(line(4, 4, 28, 20, 5), -2.0)};
    for (double v : r.render(neg, 32, 32, black).pixels)
        CHECK(v == 0.0);
}

TEST_CASE("stroke gradients match finite differences") {
    Rng rng(31);
    Drawable d;
    d.polyline.resize(6, 2);
    d.widths.resize(6);
    for (int i = 0; i < 6; ++i) {
        d.polyline.row(i) << 5.0 + 4.3 * i + rng.uniform(-1, 1), 16.0 + 6.0 * std::sin(i * 1.1);
        d.widths(i) = 1.5 + rng.uniform(0, 2.0);
    }
    d.color = Eigen::VectorXd::Constant(3, 0.0);
    d.color << 0.9, 0.3, 0.5;
    d.opacity = 0.85;
    Eigen::VectorXd bg(3);
    bg << 0.1, 0.2, 0.15;
    Canvas w(32, 32, 3);
    for (double& v : w.pixels)
        v = rng.uniform(-1, 1);

    Rasterizer r;
    std::vector<Drawable> scene{d};
    r.render(scene, 32, 32, bg);
    const DrawableGrad g = r.backward(w).front();

    // Pack every parameter into one vector.
    auto pack = [](const Drawable& x) {
        Eigen::VectorXd v(6 * 2 + 6 + 3 + 1);
        for (int i = 0; i < 6; ++i)
            v.segment(2 * i, 2) = x.polyline.row(i).transpose();
        v.segment(12, 6) = x.widths;
        v.segment(18, 3) = x.color;
        v(21) = x.opacity;
        return v;
    };
    auto unpack = [&](const Eigen::VectorXd& v) {
        Drawable x = d;
        for (int i = 0; i < 6; ++i)
            x.polyline.row(i) = v.segment(2 * i, 2).transpose();
        x.widths = v.segment(12, 6);
        x.color = v.segment(18, 3);
        x.opacity = v(21);
        return x;
    };
    auto f = [&](const Eigen::VectorXd& v) {
        Rasterizer rr;
        std::vector<Drawable> s{unpack(v)};
        return weighted(rr.render(s, 32, 32, bg), w);
    };
    Eigen::VectorXd an(22);
    for (int i = 0; i < 6; ++i)
        an.segment(2 * i, 2) = g.polyline.row(i).transpose();
    an.segment(12, 6) = g.widths;
    an.segment(18, 3) = g.color;
    an(21) = g.opacity;
    const Eigen::VectorXd fd = oracle::fd_gradient(f, pack(d), 1e-6);
    CHECK(oracle::rel_error(an, fd) < 1e-3);
}

TEST_CASE("fill and layered gradients match finite differences") {
    Rng rng(5);
    Drawable a = disk(14, 15, 8, 24, 0.7);
    for (int i = 0; i < a.polyline.rows(); ++i)
        a.polyline.row(i) += Eigen::RowVector2d(rng.uniform(-1, 1), rng.uniform(-1, 1));
    a.opacity = 0.9;
    Drawable b = stroke(line(3, 25, 29, 6, 5), 2.2, 0.2);
    b.widths(2) = 3.1;
    b.opacity = 0.6;
    Canvas w(32, 32, 1);
    for (double& v : w.pixels)
        v = rng.uniform(-1, 1);

    Rasterizer r;
    std::vector<Drawable> scene{a, b};
    r.render(scene, 32, 32, black);
    const auto grads = r.backward(w);

    const Eigen::Index na = a.polyline.rows(), nb = b.polyline.rows();
    auto unpack = [&](const Eigen::VectorXd& v) {
        std::vector<Drawable> s{a, b};
        for (Eigen::Index i = 0; i < na; ++i)
            s[0].polyline.row(i) = v.segment(2 * i, 2).transpose();
        for (Eigen::Index i = 0; i < nb; ++i) {
            s[1].polyline.row(i) = v.segment(2 * na + 2 * i, 2).transpose();
            s[1].widths(i) = v(2 * na + 2 * nb + i);
        }
        return s;
    };
    Eigen::VectorXd x0(2 * na + 3 * nb), an(2 * na + 3 * nb);
    for (Eigen::Index i = 0; i < na; ++i) {
        x0.segment(2 * i, 2) = a.polyline.row(i).transpose();
        an.segment(2 * i, 2) = grads[0].polyline.row(i).transpose();
    }
    for (Eigen::Index i = 0; i < nb; ++i) {
        x0.segment(2 * na + 2 * i, 2) = b.polyline.row(i).transpose();
        an.segment(2 * na + 2 * i, 2) = grads[1].polyline.row(i).transpose();
        x0(2 * na + 2 * nb + i) = b.widths(i);
        an(2 * na + 2 * nb + i) = grads[1].widths(i);
    }
    auto f = [&](const Eigen::VectorXd& v) {
        Rasterizer rr;
        return weighted(rr.render(unpack(v), 32, 32, black), w);
    };
    const Eigen::VectorXd fd = oracle::fd_gradient(f, x0, 1e-6);
    CHECK(oracle::rel_error(an, fd) < 1e-3);
}

TEST_CASE("mirror symmetry of position gradients") {
    Rasterizer r;
    Points2 pts(5, 2);
    pts << 6, 14, 11, 18, 16, 19, 21, 18, 26, 14;
    std::vector<Drawable> scene{stroke(pts, 2.0)};
    r.render(scene, 32, 32, black);
    const DrawableGrad g = r.backward(Canvas(32, 32, 1, 1.0)).front();
    for (int i = 0; i < 5; ++i) {
        CHECK(g.polyline(i, 0) == doctest::Approx(-g.polyline(4 - i, 0)).epsilon(1e-9).scale(1.0));
        CHECK(g.polyline(i, 1) == doctest::Approx(g.polyline(4 - i, 1)).epsilon(1e-9).scale(1.0));
    }
    CHECK(std::abs(g.polyline(0, 0)) > 1e-3);
}

TEST_CASE("occlusion") {
    Rasterizer r;
    Drawable under = stroke(line(10, 16, 22, 16, 4), 2.0, 0.3);
    Drawable cover = disk(16, 16, 12, 128, 1.0);
    std::vector<Drawable> scene{under, cover};
    const Canvas c1 = r.render(scene, 32, 32, black);
    const auto grads = r.backward(Canvas(32, 32, 1, 1.0));
    CHECK(grads[0].widths.cwiseAbs().maxCoeff() == 0.0);
    CHECK(grads[0].polyline.cwiseAbs().maxCoeff() == 0.0);

    std::vector<Drawable> alone{cover};
    Rasterizer r2;
    const Canvas c2 = r2.render(alone, 32, 32, black);
    for (int y = 8; y < 24; ++y)
        for (int x = 8; x < 24; ++x)
            CHECK(c1.at(x, y) == c2.at(x, y));
}

TEST_CASE("coverage is monotone in width") {
    Rasterizer r;
    Points2 pts(4, 2);
    pts << 4, 4, 12, 20, 20, 10, 28, 26;
    Canvas prev;
    for (double radius : {0.0, 0.2, 0.5, 1.0, 2.0, 3.5, 6.0}) {
        std::vector<Drawable> scene{stroke(pts, radius)};
        r.render(scene, 32, 32, black);
        Canvas cov(32, 32, 1);
        for (int y = 0; y < 32; ++y)
            for (int x = 0; x < 32; ++x)
                cov.at(x, y) = r.coverage(0, x, y);
        if (!prev.pixels.empty())
            for (size_t i = 0; i < cov.size(); ++i)
                CHECK(cov.pixels[i] >= prev.pixels[i]);
        prev = cov;
    }
}

TEST_CASE("gradient plateau away from the stroke") {
    Rasterizer r;
    std::vector<Drawable> scene{stroke(line(4, 4, 12, 4, 3), 1.5)};
    r.render(scene, 48, 48, black);
    Canvas g(48, 48, 1);
    const double reach = 1.5 + 0.5;
    for (int y = 0; y < 48; ++y)
        for (int x = 0; x < 48; ++x) {
            const double px = x + 0.5, py = y + 0.5;
            const double t = std::clamp((px - 4.0) / 8.0, 0.0, 1.0);
            const double dist = std::hypot(px - (4.0 + 8.0 * t), py - 4.0);
            if (dist > reach)
                g.at(x, y) = 1.0;
        }
    const DrawableGrad dg = r.backward(g).front();
    CHECK(dg.polyline.cwiseAbs().maxCoeff() == 0.0);
    CHECK(dg.widths.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("determinism") {
    Rng rng(3);
    std::vector<Drawable> scene;
    for (int k = 0; k < 5; ++k) {
        Points2 pts(12, 2);
        for (int i = 0; i < 12; ++i)
            pts.row(i) << rng.uniform(0, 64), rng.uniform(0, 64);
        scene.push_back(stroke(pts, rng.uniform(0.5, 4), rng.uniform()));
    }
    scene.push_back(disk(30, 30, 15, 64, 0.5));
    Rasterizer a, b;
    const Canvas ca = a.render(scene, 64, 64, black);
    const Canvas cb = b.render(scene, 64, 64, black);
    CHECK(ca.pixels == cb.pixels);
    const auto ga = a.backward(ca), gb = b.backward(cb);
    for (size_t i = 0; i < ga.size(); ++i) {
        CHECK(ga[i].polyline == gb[i].polyline);
        CHECK(ga[i].widths == gb[i].widths);
    }
}

TEST_CASE("pyramid") {
    Canvas flat(32, 24, 3, 0.37);
    for (const Canvas& level : downsample_blur(flat, 4))
        for (double v : level.pixels)
            CHECK(v == doctest::Approx(0.37).epsilon(1e-14));
    const auto levels = downsample_blur(flat, 4);
    CHECK(levels[3].width == 4);
    CHECK(levels[3].height == 3);
    CHECK_THROWS_AS(downsample_blur(flat, 6), Error);

    Rng rng(4);
    Canvas a(20, 20, 1), b(20, 20, 1), sum(20, 20, 1);
    for (size_t i = 0; i < a.size(); ++i) {
        a.pixels[i] = rng.uniform();
        b.pixels[i] = rng.uniform();
        sum.pixels[i] = a.pixels[i] + b.pixels[i];
    }
    const auto pa = downsample_blur(a, 3), pb = downsample_blur(b, 3), ps = downsample_blur(sum, 3);
    for (size_t l = 0; l < 3; ++l)
        for (size_t i = 0; i < ps[l].size(); ++i)
            CHECK(std::abs(ps[l].pixels[i] - pa[l].pixels[i] - pb[l].pixels[i]) < 1e-14);

    // Adjoint against finite differences of a weighted pyramid sum.
    std::vector<Canvas> w;
    for (const Canvas& level : pa) {
        Canvas c(level.width, level.height, 1);
        for (double& v : c.pixels)
            v = rng.uniform(-1, 1);
        w.push_back(c);
    }
    const Canvas adj = downsample_blur_adjoint(w);
    auto f = [&](const Eigen::VectorXd& x) {
        Canvas img(20, 20, 1);
        for (size_t i = 0; i < img.size(); ++i)
            img.pixels[i] = x(static_cast<Eigen::Index>(i));
        const auto p = downsample_blur(img, 3);
        double s = 0.0;
        for (size_t l = 0; l < 3; ++l)
            s += weighted(p[l], w[l]);
        return s;
    };
    const Eigen::VectorXd x0 = Eigen::Map<const Eigen::VectorXd>(a.pixels.data(), 400);
    const Eigen::VectorXd fd = oracle::fd_gradient(f, x0, 1e-4);
    const Eigen::VectorXd an = Eigen::Map<const Eigen::VectorXd>(adj.pixels.data(), 400);
    CHECK(oracle::rel_error(an, fd) < 1e-6);
}
