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

#include <bsvg/app.hpp>
#include <bsvg/image_io.hpp>
#include <bsvg/io.hpp>
#include <bsvg/palette.hpp>
#include <bsvg/seeding.hpp>

#include <algorithm>

namespace bsvg {

namespace {

constexpr int default_palette_size = 4;
constexpr double logit_sharpness = 10.0;

Eigen::VectorXd color_for(const std::string& hex_text, int channels) {
    const Eigen::VectorXd rgb = parse_palette(hex_text).row(0).transpose();
    if (channels == 3)
        return rgb;
    return Eigen::VectorXd::Constant(1, 0.299 * rgb[0] + 0.587 * rgb[1] + 0.114 * rgb[2]);
}

bool inside(const Points2& poly, double x, double y) {
    bool in = false;
    for (Eigen::Index i = 0, j = poly.rows() - 1; i < poly.rows(); j = i++) {
        const double xi = poly(i, 0), yi = poly(i, 1), xj = poly(j, 0), yj = poly(j, 1);
        if ((yi > y) != (yj > y) && x < (xj - xi) * (y - yi) / (yj - yi) + xi)
            in = !in;
    }
    return in;
}

Eigen::VectorXd mean_color(const Canvas& image, const Points2& poly) {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(image.channels);
    int count = 0;
    const int x0 = std::max(0, static_cast<int>(poly.col(0).minCoeff()));
    const int x1 = std::min(image.width - 1, static_cast<int>(poly.col(0).maxCoeff()));
    const int y0 = std::max(0, static_cast<int>(poly.col(1).minCoeff()));
    const int y1 = std::min(image.height - 1, static_cast<int>(poly.col(1).maxCoeff()));
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x)
            if (inside(poly, x + 0.5, y + 0.5)) {
                for (int c = 0; c < image.channels; ++c)
                    acc[c] += image.at(x, y, c);
                ++count;
            }
    if (count == 0) {
        const Eigen::RowVector2d m = poly.colwise().mean();
        const int x = std::clamp(static_cast<int>(m.x()), 0, image.width - 1);
        const int y = std::clamp(static_cast<int>(m.y()), 0, image.height - 1);
        for (int c = 0; c < image.channels; ++c)
            acc[c] = image.at(x, y, c);
        return acc;
    }
    return acc / count;
}

} // namespace

Command parse_command(const std::string& name) {
    if (name == "fill")
        return Command::fill;
    if (name == "abstract")
        return Command::abstract;
    if (name == "areas")
        return Command::areas;
    throw Error(Errc::invalid_argument, "unknown command '" + name + "'");
}

Scene seed_scene(const Config& cfg, Command command, const Canvas& target, const Eigen::VectorXd& background,
                 const Canvas* saliency) {
    Scene scene;
    scene.width = target.width;
    scene.height = target.height;
    scene.background = background;
    Rng rng = Rng::split(cfg.seed, 0x5eed);

    if (command == Command::areas) {
        if (!cfg.colors.empty())
            scene.palette = parse_palette(cfg.colors);
        else
            scene.palette = kmeans_palette(target, cfg.k > 0 ? cfg.k : default_palette_size, rng);
        Canvas sal = saliency ? to_gray(*saliency) : Canvas(target.width, target.height, 1, 1.0);
        if (sal.width != target.width || sal.height != target.height)
            throw Error(Errc::invalid_argument, "saliency map size differs from the target");
        const AreaSeedResult seeds = area_seeds(sal, cfg.areas, rng, cfg.degree, cfg.subdivide, cfg.iterations);
        for (const AreaSeed& a : seeds.areas) {
            ScenePath p;
            p.kind = DrawKind::fill;
            p.path = expand_multiplicity(a.path, cfg.multiplicity);
            p.path.keypoints.col(2).setZero();
            const Eigen::VectorXd c = mean_color(target, a.polygon);
            p.logits.resize(scene.palette.rows());
            for (Eigen::Index k = 0; k < scene.palette.rows(); ++k)
                p.logits[k] = -logit_sharpness * (scene.palette.row(k).transpose() - c).squaredNorm();
            p.color = hard_assign(p.logits, scene.palette);
            scene.paths.push_back(std::move(p));
        }
        return scene;
    }

    // Ink density relative to the background drives the stippling.
    Canvas density(target.width, target.height, 1);
    for (int y = 0; y < target.height; ++y)
        for (int x = 0; x < target.width; ++x) {
            double d = 0.0;
            for (int c = 0; c < target.channels; ++c)
                d += std::abs(target.at(x, y, c) - background[c]);
            density.at(x, y) = d / target.channels;
        }
    const int paths = command == Command::abstract ? 1 : cfg.paths;
    const int per = cfg.keypoints;
    const Points2 sites = voronoi_stipple(density, paths * per, rng, cfg.iterations);
    const std::vector<int> tour = tsp_path(sites, !cfg.closed || paths > 1);
    const Eigen::VectorXd ink = color_for(cfg.stroke_color, target.channels);
    for (int s = 0; s < paths; ++s) {
        ScenePath p;
        p.path.degree = cfg.degree;
        p.path.closed = cfg.closed;
        p.path.keypoints.resize(per, 3);
        for (int i = 0; i < per; ++i) {
            const int idx = tour[static_cast<size_t>(s * per + i)];
            p.path.keypoints.row(i) << sites(idx, 0), sites(idx, 1), cfg.width;
        }
        if (cfg.multiplicity > 1)
            p.path = expand_multiplicity(p.path, cfg.multiplicity);
        p.color = ink;
        scene.paths.push_back(std::move(p));
    }
    return scene;
}

OptimJob prepare_job(const Config& cfg, Command command) {
    cfg.validate();
    if (cfg.target.empty())
        throw Error(Errc::invalid_argument, "input.target: a target image is required");
    const int channels = (command == Command::areas || cfg.color) ? 3 : 1;
    const Canvas raw = read_png(cfg.target);
    const Canvas target = channels == 1 ? to_gray(raw) : to_channels(raw, 3);
    const Eigen::VectorXd bg = color_for(cfg.background, channels);

    OptimJob job;
    if (!cfg.init.empty()) {
        job.scene = load_scene(cfg.init);
        if (job.scene.width != target.width || job.scene.height != target.height ||
            job.scene.channels() != channels)
            throw Error(Errc::invalid_argument, "input.init: scene shape differs from the target");
    } else {
        std::optional<Canvas> sal;
        if (!cfg.saliency.empty())
            sal = read_png(cfg.saliency);
        job.scene = seed_scene(cfg, command, target, bg, sal ? &*sal : nullptr);
    }
    job.target = apply_target_opacity(target, job.scene.background, cfg.opacity);
    job.terms = term_mse | term_smooth | term_box | term_repulsion | term_overlap | term_align;
    if (command == Command::areas)
        job.terms |= term_balance;
    if (!cfg.command.empty()) {
        job.terms |= term_external;
        job.provider = make_subprocess_provider(cfg.command);
    }
    job.weights = cfg.weights;
    job.steps = cfg.steps;
    job.lr = {cfg.lr_positions, cfg.lr_widths, cfg.lr_colors, cfg.lr_logits, cfg.lr_min_ratio};
    job.adam = {cfg.beta1, cfg.beta2, cfg.eps};
    job.w_min = cfg.w_min;
    job.w_max = cfg.w_max;
    job.samples_per_span = cfg.samples_per_span;
    job.smooth_order = cfg.order;
    job.smooth_mode = cfg.mode;
    job.mse_levels = cfg.mse_levels;
    job.box_penalty = cfg.box_penalty;
    job.tau_start = cfg.tau_start;
    job.tau_end = cfg.tau_end;
    job.gumbel_scale = cfg.gumbel_scale;
    job.optimize_widths = command != Command::areas && cfg.optimize_widths;
    job.optimize_colors = cfg.optimize_colors;
    job.seed = cfg.seed;
    validate_job(job);
    return job;
}

double total_ink(const Canvas& render, const Eigen::VectorXd& background) {
    if (background.size() != render.channels)
        throw Error(Errc::dimension_mismatch, "total_ink: background channel count differs");
    double s = 0.0;
    for (int y = 0; y < render.height; ++y)
        for (int x = 0; x < render.width; ++x)
            for (int c = 0; c < render.channels; ++c)
                s += std::abs(background[c] - render.at(x, y, c));
    return s;
}

} // namespace bsvg
