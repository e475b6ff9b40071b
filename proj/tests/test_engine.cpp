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

#include <bsvg/engine.hpp>

#include <doctest.h>

#include <cmath>

#include "oracles.hpp"

using namespace bsvg;
using namespace oracle;

namespace {

Canvas disk_target(int size, double radius) {
    Canvas t(size, size, 1, 1.0);
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x)
            if (std::hypot(x + 0.5 - size / 2.0, y + 0.5 - size / 2.0) < radius)
                t.at(x, y) = 0.0;
    return t;
}

Scene wave_scene(int size, int keypoints) {
    Scene s;
    s.width = s.height = size;
    s.background = Eigen::VectorXd::Ones(1);
    ScenePath p;
    p.path.keypoints.resize(keypoints, 3);
    for (int i = 0; i < keypoints; ++i) {
        const double t = static_cast<double>(i) / (keypoints - 1);
        p.path.keypoints.row(i) << 0.2 * size + 0.6 * size * t, 0.5 * size + 0.2 * size * std::sin(6.0 * t),
            1.0 + 0.5 * t;
    }
    p.color = Eigen::VectorXd::Zero(1);
    s.paths.push_back(p);
    return s;
}

Eigen::VectorXd flat_keys(const Scene& s) {
    std::vector<double> v;
    for (const ScenePath& p : s.paths)
        v.insert(v.end(), p.path.keypoints.data(), p.path.keypoints.data() + p.path.keypoints.size());
    return Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

void set_keys(Scene& s, const Eigen::VectorXd& v) {
    Eigen::Index at = 0;
    for (ScenePath& p : s.paths) {
        std::copy(v.data() + at, v.data() + at + p.path.keypoints.size(), p.path.keypoints.data());
        at += p.path.keypoints.size();
    }
}

} // namespace

TEST_CASE("adam") {
    Eigen::VectorXd x(3);
    x << 1.0, -2.0, 0.5;
    const Eigen::VectorXd x0 = x;
    AdamState st;
    for (int i = 0; i < 50; ++i)
        adam_step(x, Eigen::VectorXd::Zero(3), st, 0.1);
    CHECK(x == x0);

    // First step moves by lr regardless of gradient magnitude.
    for (double g : {1e-2, 1.0, 1e4}) {
        Eigen::VectorXd y = Eigen::VectorXd::Ones(1);
        AdamState s;
        adam_step(y, Eigen::VectorXd::Constant(1, g), s, 0.1);
        CHECK(std::abs(1.0 - y[0] - 0.1) < 1e-6);
    }

    // Quadratic bowl against a scalar reference.
    Eigen::VectorXd z = Eigen::VectorXd::Ones(1);
    AdamState sz;
    double r = 1.0, m = 0.0, v = 0.0;
    for (int t = 1; t <= 200; ++t) {
        adam_step(z, 2.0 * z, sz, 0.1);
        const double g = 2.0 * r;
        m = 0.9 * m + 0.1 * g;
        v = 0.999 * v + 0.001 * g * g;
        r -= 0.1 * (m / (1 - std::pow(0.9, t))) / (std::sqrt(v / (1 - std::pow(0.999, t))) + 1e-8);
    }
    CHECK(std::abs(z[0]) < 1e-2);
    CHECK(std::abs(z[0] - r) < 1e-12);

    CHECK_THROWS_AS(adam_step(z, Eigen::VectorXd::Zero(2), sz, 0.1), Error);
    CHECK_THROWS_AS(adam_step(z, Eigen::VectorXd::Constant(1, std::nan("")), sz, 0.1), Error);
}

TEST_CASE("cosine schedule") {
    CHECK(cosine_lr(0, 300, 1.0, 0.01) == 1.0);
    CHECK(cosine_lr(300, 300, 1.0, 0.01) == 0.01);
    CHECK(cosine_lr(150, 300, 1.0, 0.01) == doctest::Approx(0.505).epsilon(1e-14));
    double prev = 2.0;
    for (int s = 0; s <= 300; ++s) {
        const double lr = cosine_lr(s, 300, 1.0, 0.01);
        CHECK(lr <= prev);
        prev = lr;
    }
    CHECK_THROWS_AS(cosine_lr(301, 300, 1.0, 0.01), Error);
    CHECK_THROWS_AS(cosine_lr(0, 300, 0.01, 1.0), Error);
}

TEST_CASE("job validation") {
    OptimJob job;
    job.scene = wave_scene(32, 8);
    job.target = disk_target(32, 8);
    CHECK_NOTHROW(validate_job(job));
    OptimJob bad = job;
    bad.steps = 0;
    CHECK_THROWS_AS(validate_job(bad), Error);
    bad = job;
    bad.w_min = -1;
    CHECK_THROWS_AS(validate_job(bad), Error);
    bad = job;
    bad.scene.paths[0].path.degree = 3;
    CHECK_THROWS_AS(validate_job(bad), Error); // d = 3 needs degree >= 4
    bad = job;
    bad.target.reset();
    CHECK_THROWS_AS(validate_job(bad), Error);
    bad = job;
    bad.lr.widths = 0;
    CHECK_THROWS_AS(validate_job(bad), Error);
}

TEST_CASE("end-to-end gradient") {
    OptimJob job;
    job.scene = wave_scene(32, 7);
    // A closed filled area and a quantized stroke in the same scene.
    ScenePath area;
    area.path.closed = true;
    area.path.keypoints.resize(6, 3);
    for (int i = 0; i < 6; ++i) {
        const double a = 2.0 * std::numbers::pi * i / 6.0;
        area.path.keypoints.row(i) << 16 + 7 * std::cos(a), 16 + 6 * std::sin(a), 0.0;
    }
    area.kind = DrawKind::fill;
    area.color = Eigen::VectorXd::Constant(1, 0.3);
    area.opacity = 0.8;
    job.scene.paths.push_back(area);
    ScenePath q = wave_scene(32, 6).paths[0];
    q.path.keypoints.col(1).array() += 5.0;
    q.logits = Eigen::Vector3d(0.2, -0.1, 0.4);
    job.scene.paths.push_back(q);
    job.scene.palette = Eigen::Vector3d(0.1, 0.5, 0.9);
    job.target = disk_target(32, 9);
    job.terms = term_mse | term_smooth | term_box | term_repulsion | term_overlap | term_align | term_balance;
    job.weights.box = 0.5;
    job.weights.repulsion = 1e-3;
    job.weights.overlap = 1e-3;
    job.weights.align = 0.01;
    job.steps = 10;
    // Push a few samples outside the canvas so the box term is active.
    job.scene.paths[0].path.keypoints(0, 0) = -2.5;

    const Evaluator ev(job);
    CHECK(ev.columns().size() == 7);
    const Evaluator::Result r = ev.evaluate(job.scene, 3);
    const Eigen::VectorXd g = flat_keys(r.grad);
    auto f = [&](const Eigen::VectorXd& v) {
        Scene s = job.scene;
        set_keys(s, v);
        return ev.evaluate(s, 3).total;
    };
    const Eigen::VectorXd fd = fd_gradient(f, flat_keys(job.scene), 1e-5);
    CHECK(rel_error(g, fd) < 1e-3);

    // Color and logit chain.
    auto fc = [&](const Eigen::VectorXd& v) {
        Scene s = job.scene;
        s.paths[1].color[0] = v[0];
        s.paths[2].logits = v.tail(3);
        return ev.evaluate(s, 3).total;
    };
    Eigen::VectorXd cv(4), ca(4);
    cv << job.scene.paths[1].color[0], job.scene.paths[2].logits;
    ca << r.grad.paths[1].color[0], r.grad.paths[2].logits;
    CHECK(rel_error(ca, fd_gradient(fc, cv, 1e-6)) < 1e-3);
}

TEST_CASE("run behaviour") {
    OptimJob job;
    job.scene = wave_scene(32, 10);
    job.target = disk_target(32, 8);
    job.steps = 40;

    SUBCASE("all weights zero leaves parameters unchanged") {
        job.weights = {0, 0, 0, 0, 0, 0, 0, 0};
        const RunResult r = run(job);
        CHECK(r.scene.paths[0].path.keypoints == job.scene.paths[0].path.keypoints);
        CHECK(r.trace.size() == 41);
        CHECK(r.columns.empty());
    }
    SUBCASE("a zero weight equals an omitted term") {
        OptimJob a = job, b = job;
        a.weights.smooth = 0.0;
        b.terms &= ~static_cast<unsigned>(term_smooth);
        CHECK(trace_csv(run(a)) == trace_csv(run(b)));
        CHECK(run(a).scene.paths[0].path.keypoints == run(b).scene.paths[0].path.keypoints);
    }
    SUBCASE("coverage decreases and widths stay in bounds") {
        job.w_min = 0.0;
        job.w_max = 2.0;
        job.lr.widths = 0.5;
        int calls = 0;
        RunCallbacks cb;
        cb.on_step = [&](int, const Scene& s) {
            ++calls;
            const auto w = s.paths[0].path.keypoints.col(2);
            CHECK(w.minCoeff() >= 0.0);
            CHECK(w.maxCoeff() <= 2.0);
        };
        const RunResult r = run(job, cb);
        CHECK(calls == 40);
        CHECK(!r.aborted);
        CHECK(r.trace.back().values[0] < 0.8 * r.trace.front().values[0]);
        CHECK(r.scene.paths[0].path.keypoints.col(2).maxCoeff() == 2.0);
    }
    SUBCASE("reproducible traces") {
        job.terms |= term_repulsion;
        const std::string a = trace_csv(run(job));
        const std::string b = trace_csv(run(job));
        CHECK(a == b);
        CHECK(a.rfind("step,coverage,smooth,box,repulsion,total\n", 0) == 0);
    }
    SUBCASE("non-finite loss aborts with the last finite scene") {
        job.terms = term_external;
        job.provider = [](int step, const Canvas& img) {
            ProviderResult r;
            r.grad = Canvas(img.width, img.height, img.channels, 0.01);
            r.loss = step < 5 ? 1.0 : std::nan("");
            return r;
        };
        const RunResult r = run(job);
        CHECK(r.aborted);
        CHECK(r.trace.size() == 5);
        CHECK(r.message.find("external") != std::string::npos);
        CHECK(r.scene.paths[0].path.keypoints.allFinite());
    }
}

TEST_CASE("zero width removes a span from the render") {
    Scene s = wave_scene(32, 8);
    s.paths[0].path.keypoints.col(2).setZero();
    const Canvas img = render_scene(s, default_samples_per_span);
    for (double v : img.pixels)
        CHECK(v == 1.0);
}

TEST_CASE("metrics") {
    Canvas a(4, 4, 1, 0.0), b(4, 4, 1, 0.5);
    CHECK(mse_level0(a, b) == 0.25);
    Scene s = wave_scene(32, 8);
    CHECK(scene_jerk(s, 8) > 0.0);
}
