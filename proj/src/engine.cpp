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
#include <bsvg/palette.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace bsvg {

void adam_step(Eigen::Ref<Eigen::VectorXd> params, const Eigen::Ref<const Eigen::VectorXd>& grads,
               AdamState& state, double lr, const AdamConfig& config) {
    if (params.size() != grads.size())
        throw Error(Errc::dimension_mismatch, "adam_step: parameter and gradient sizes differ");
    if (!grads.allFinite())
        throw Error(Errc::numeric, "adam_step: non-finite gradient at update " + std::to_string(state.t + 1));
    if (state.m.size() != params.size()) {
        state.m = Eigen::VectorXd::Zero(params.size());
        state.v = Eigen::VectorXd::Zero(params.size());
        state.t = 0;
    }
    ++state.t;
    const double b1 = config.beta1, b2 = config.beta2;
    state.m = b1 * state.m + (1.0 - b1) * grads;
    state.v = b2 * state.v + (1.0 - b2) * grads.cwiseAbs2();
    const double c1 = 1.0 - std::pow(b1, state.t);
    const double c2 = 1.0 - std::pow(b2, state.t);
    for (Eigen::Index i = 0; i < params.size(); ++i)
        params[i] -= lr * (state.m[i] / c1) / (std::sqrt(state.v[i] / c2) + config.eps);
}

double cosine_lr(int step, int total, double lr_base, double lr_min) {
    if (total < 1 || step < 0 || step > total)
        throw Error(Errc::invalid_argument, "cosine_lr: need 0 <= step <= total and total >= 1");
    if (!(lr_base > 0.0) || !(lr_min >= 0.0) || lr_min > lr_base)
        throw Error(Errc::invalid_argument, "cosine_lr: need 0 <= lr_min <= lr_base and lr_base > 0");
    if (step == 0)
        return lr_base;
    if (step == total)
        return lr_min;
    return lr_min + 0.5 * (lr_base - lr_min) * (1.0 + std::cos(std::numbers::pi * step / total));
}

void validate_job(const OptimJob& job) {
    auto fail = [](const std::string& m) { throw Error(Errc::invalid_argument, "job: " + m); };
    validate_scene(job.scene);
    if (job.steps < 1)
        fail("steps must be >= 1");
    if (!(job.w_min >= 0.0) || !(job.w_max >= job.w_min))
        fail("width bounds must satisfy 0 <= w_min <= w_max");
    const LearningRates& r = job.lr;
    if (!(r.positions > 0) || !(r.widths > 0) || !(r.colors > 0) || !(r.logits > 0))
        fail("learning rates must be positive");
    if (!(r.min_ratio >= 0.0 && r.min_ratio <= 1.0))
        fail("lr min ratio must lie in [0, 1]");
    const LossWeights& w = job.weights;
    for (double v : {w.smooth, w.box, w.repulsion, w.coverage, w.overlap, w.align, w.balance, w.external})
        if (!(v >= 0.0) || !std::isfinite(v))
            fail("loss weights must be finite and non-negative");
    if (job.samples_per_span < 1)
        fail("samples per span must be >= 1");
    if (job.terms & term_smooth)
        for (const ScenePath& p : job.scene.paths)
            if (job.smooth_order < 1 || job.smooth_order > p.path.degree - 1)
                fail("smoothing order must satisfy 1 <= d <= degree - 1");
    if ((job.terms & term_mse) && job.weights.coverage > 0.0) {
        if (!job.target)
            fail("the coverage term needs a target image");
        if (job.target->width != job.scene.width || job.target->height != job.scene.height ||
            job.target->channels != job.scene.channels())
            fail("target image shape differs from the scene");
    }
    if ((job.terms & term_external) && job.weights.external > 0.0 && !job.provider)
        fail("the external term needs a gradient provider");
    if (!(job.tau_start > 0.0) || !(job.tau_end > 0.0))
        fail("temperatures must be positive");
    if (!(job.gumbel_scale >= 0.0))
        fail("gumbel scale must be non-negative");
}

namespace {

struct PathMaps {
    SparseMap render;  // S x M, key-points to render samples
    SparseMap expand;  // n x M, key-points to smoothing controls
    GramOperator gram;
    bool has_gram = false;
    SparseMap rep_pos; // key-points to repulsion samples
    SparseMap rep_tan; // key-points to first-derivative samples
};

bool enabled(const OptimJob& job, Term t, double w) { return (job.terms & t) && w > 0.0; }

} // namespace

struct Evaluator::Impl {
    OptimJob job;
    std::vector<PathMaps> maps;
    std::vector<std::string> columns;
    std::optional<Canvas> target;
    double scale = 1.0;
};

Evaluator::Evaluator(const OptimJob& job) : impl_(std::make_unique<Impl>()) {
    validate_job(job);
    Impl& s = *impl_;
    s.job = job;
    s.scale = 1.0 / std::max(job.scene.width, job.scene.height);
    if (job.target)
        s.target = *job.target;

    const bool smooth = enabled(job, term_smooth, job.weights.smooth);
    const bool repel = enabled(job, term_repulsion, job.weights.repulsion);
    for (const ScenePath& p : job.scene.paths) {
        PathMaps m;
        m.render = render_map(p.path, job.samples_per_span);
        const SparseMap E = keypoint_map(p.path);
        const int n = static_cast<int>(E.rows());
        const int deg = p.path.degree;
        if (smooth) {
            // Closed curves are smoothed on their periodic controls, i.e.
            // without the appended wrap copies.
            const int n_per = p.path.closed ? n - deg : n;
            m.expand = E.topRows(n_per);
            m.gram = job.smooth_mode == GramMode::exact
                         ? gram_exact(deg + 1, job.smooth_order, n_per, p.path.closed)
                         : gram_pspline(job.smooth_order, n_per, p.path.closed, static_cast<double>(n - deg));
            m.has_gram = true;
        }
        if (repel) {
            const int spans = n - deg;
            const int samples = p.path.closed ? spans * job.samples_per_span : spans * job.samples_per_span + 1;
            const bool end = !p.path.closed;
            m.rep_pos = sampling_map(deg, n, samples, end).matrix * E;
            m.rep_tan = derivative_sampling_map(deg, n, 1, samples, end).matrix * E;
        }
        s.maps.push_back(std::move(m));
    }
    if (s.target && enabled(job, term_mse, job.weights.coverage))
        s.columns.emplace_back("coverage");
    if (smooth)
        s.columns.emplace_back("smooth");
    if (enabled(job, term_box, job.weights.box))
        s.columns.emplace_back("box");
    if (repel)
        s.columns.emplace_back("repulsion");
    if (enabled(job, term_overlap, job.weights.overlap))
        s.columns.emplace_back("overlap");
    if (enabled(job, term_align, job.weights.align))
        s.columns.emplace_back("align");
    if (enabled(job, term_balance, job.weights.balance) && job.scene.palette.rows() > 0)
        s.columns.emplace_back("balance");
    if (enabled(job, term_external, job.weights.external))
        s.columns.emplace_back("external");
}

Evaluator::~Evaluator() = default;
Evaluator::Evaluator(Evaluator&&) noexcept = default;

const std::vector<std::string>& Evaluator::columns() const { return impl_->columns; }

Evaluator::Result Evaluator::evaluate(const Scene& scene, int step) const {
    const Impl& s = *impl_;
    const OptimJob& job = s.job;
    const size_t P = scene.paths.size();
    if (P != s.maps.size())
        throw Error(Errc::dimension_mismatch, "evaluate: scene layout differs from the job");
    const int W = scene.width, H = scene.height, C = scene.channels();
    const LossWeights& lw = job.weights;

    // Forward: samples and colors.
    std::vector<Points> samples(P);
    std::vector<SoftAssignment> soft(P);
    std::vector<Drawable> drawables(P);
    const double tau = anneal_temperature(std::min(step, job.steps), job.steps, job.tau_start, job.tau_end);
    Rng noise = Rng::split(job.seed, static_cast<std::uint64_t>(step));
    for (size_t i = 0; i < P; ++i) {
        const ScenePath& p = scene.paths[i];
        if (p.path.keypoints.rows() != s.maps[i].render.cols())
            throw Error(Errc::dimension_mismatch, "evaluate: key-point count differs from the job");
        samples[i] = s.maps[i].render * p.path.keypoints;
        Drawable& d = drawables[i];
        d.polyline = samples[i].leftCols<2>();
        d.widths = samples[i].col(2);
        d.kind = p.kind;
        d.opacity = p.opacity;
        if (p.logits.size() > 0) {
            soft[i] = soft_assign(p.logits, scene.palette, tau, job.gumbel_scale, noise);
            d.color = soft[i].color;
        } else {
            d.color = p.color;
        }
    }
    Rasterizer raster(job.raster);
    Result out;
    out.render = raster.render(drawables, W, H, scene.background);

    // Gradient buffers.
    Canvas image_grad(W, H, C, 0.0);
    bool image_used = false;
    std::vector<Points> sample_grad(P), key_grad(P);
    for (size_t i = 0; i < P; ++i) {
        sample_grad[i] = Points::Zero(samples[i].rows(), 3);
        key_grad[i] = Points::Zero(scene.paths[i].path.keypoints.rows(), 3);
    }
    Eigen::MatrixXd balance_grad;
    std::vector<size_t> quantized;
    for (size_t i = 0; i < P; ++i)
        if (scene.paths[i].logits.size() > 0)
            quantized.push_back(i);

    LossCombiner comb;
    for (const std::string& name : s.columns) {
        if (name == "coverage") {
            auto r = std::make_shared<ImageLoss>(multiscale_mse(out.render, *s.target, job.mse_levels));
            comb.add(name, lw.coverage, r->value, [&, r](double w) {
                for (size_t k = 0; k < image_grad.size(); ++k)
                    image_grad.pixels[k] += w * r->grad.pixels[k];
                image_used = true;
            });
        } else if (name == "smooth") {
            double total = 0.0;
            auto grads = std::make_shared<std::vector<Points>>(P);
            for (size_t i = 0; i < P; ++i) {
                const PathMaps& m = s.maps[i];
                const Points c = (m.expand * scene.paths[i].path.keypoints) * s.scale;
                const CostGrad cg = smooth_cost(std::span<const double>(c.data(), static_cast<size_t>(c.size())),
                                                m.gram, 3);
                total += cg.value;
                Points gc = Eigen::Map<const Points>(cg.grad.data(), c.rows(), 3);
                (*grads)[i] = m.expand.transpose() * (gc * s.scale);
            }
            comb.add(name, lw.smooth, total, [&, grads](double w) {
                for (size_t i = 0; i < P; ++i)
                    key_grad[i] += w * (*grads)[i];
            });
        } else if (name == "box") {
            double total = 0.0;
            auto grads = std::make_shared<std::vector<Points2>>(P);
            for (size_t i = 0; i < P; ++i) {
                const GeomLoss g = bbox_loss(samples[i].leftCols<2>(), Eigen::Vector2d(0, 0),
                                             Eigen::Vector2d(W, H), job.box_penalty);
                total += g.value;
                (*grads)[i] = g.grad;
            }
            comb.add(name, lw.box, total, [&, grads](double w) {
                for (size_t i = 0; i < P; ++i)
                    sample_grad[i].leftCols<2>() += w * (*grads)[i];
            });
        } else if (name == "repulsion") {
            double total = 0.0;
            auto grads = std::make_shared<std::vector<Points>>(P);
            for (size_t i = 0; i < P; ++i) {
                const PathMaps& m = s.maps[i];
                const Points& Q = scene.paths[i].path.keypoints;
                const Points x = m.rep_pos * Q;
                const Points t = m.rep_tan * Q;
                const RepulsionLoss r = repulsion_loss(x.leftCols<2>(), t.leftCols<2>(), scene.paths[i].path.closed,
                                                       job.repulsion);
                total += r.value;
                Points gx = Points::Zero(x.rows(), 3), gt = Points::Zero(t.rows(), 3);
                gx.leftCols<2>() = r.grad_points;
                gt.leftCols<2>() = r.grad_tangents;
                (*grads)[i] = m.rep_pos.transpose() * gx + m.rep_tan.transpose() * gt;
            }
            comb.add(name, lw.repulsion, total, [&, grads](double w) {
                for (size_t i = 0; i < P; ++i)
                    key_grad[i] += w * (*grads)[i];
            });
        } else if (name == "overlap") {
            std::vector<Drawable> ink = drawables;
            for (Drawable& d : ink) {
                d.color = Eigen::VectorXd::Ones(1);
                d.opacity = 0.5;
            }
            auto over = std::make_shared<Rasterizer>(job.raster);
            const Canvas img = over->render(ink, W, H, Eigen::VectorXd::Zero(1));
            auto r = std::make_shared<ImageLoss>(overlap_cost(img));
            comb.add(name, lw.overlap, r->value, [&, r, over](double w) {
                Canvas g = r->grad;
                for (double& v : g.pixels)
                    v *= w;
                const std::vector<DrawableGrad> dg = over->backward(g);
                for (size_t i = 0; i < P; ++i) {
                    sample_grad[i].leftCols<2>() += dg[i].polyline;
                    if (dg[i].widths.size() > 0)
                        sample_grad[i].col(2) += dg[i].widths;
                }
            });
        } else if (name == "align") {
            Points2 centers(static_cast<Eigen::Index>(P), 2);
            for (size_t i = 0; i < P; ++i)
                centers.row(static_cast<Eigen::Index>(i)) =
                    scene.paths[i].path.keypoints.leftCols<2>().colwise().mean();
            auto g = std::make_shared<GeomLoss>(alignment_cost(centers));
            comb.add(name, lw.align, g->value, [&, g](double w) {
                for (size_t i = 0; i < P; ++i) {
                    const double m = static_cast<double>(key_grad[i].rows());
                    key_grad[i].leftCols<2>().rowwise() += (w / m) * g->grad.row(static_cast<Eigen::Index>(i));
                }
            });
        } else if (name == "balance") {
            if (quantized.empty()) {
                comb.add(name, lw.balance, 0.0);
                continue;
            }
            Eigen::MatrixXd A(static_cast<Eigen::Index>(quantized.size()), scene.palette.rows());
            for (size_t q = 0; q < quantized.size(); ++q)
                A.row(static_cast<Eigen::Index>(q)) = soft[quantized[q]].weights.transpose();
            auto b = std::make_shared<BalanceLoss>(balance_reg(A, 1.0));
            comb.add(name, lw.balance, b->value, [&, b](double w) { balance_grad = w * b->grad; });
        } else if (name == "external") {
            ProviderResult pr = job.provider(step, out.render);
            if (!pr.grad.same_shape(out.render))
                throw Error(Errc::dimension_mismatch, "external: gradient shape differs from the render");
            auto g = std::make_shared<Canvas>(std::move(pr.grad));
            comb.add(name, lw.external, pr.loss.value_or(0.0), [&, g](double w) {
                for (size_t k = 0; k < image_grad.size(); ++k)
                    image_grad.pixels[k] += w * g->pixels[k];
                image_used = true;
            });
        }
    }
    out.total = comb.total();
    for (const auto& t : comb.terms())
        out.values.push_back(t.second);
    comb.route();

    // Backward.
    out.grad = scene;
    std::vector<Eigen::VectorXd> color_grad(P);
    for (size_t i = 0; i < P; ++i)
        color_grad[i] = Eigen::VectorXd::Zero(C);
    if (image_used) {
        const std::vector<DrawableGrad> dg = raster.backward(image_grad);
        for (size_t i = 0; i < P; ++i) {
            sample_grad[i].leftCols<2>() += dg[i].polyline;
            if (dg[i].widths.size() > 0)
                sample_grad[i].col(2) += dg[i].widths;
            color_grad[i] = dg[i].color;
        }
    }
    for (size_t i = 0; i < P; ++i) {
        ScenePath& g = out.grad.paths[i];
        g.path.keypoints = key_grad[i] + s.maps[i].render.transpose() * sample_grad[i];
        g.opacity = 0.0;
        if (scene.paths[i].logits.size() > 0) {
            g.color = Eigen::VectorXd::Zero(C);
            Eigen::VectorXd ga = scene.palette * color_grad[i];
            const auto it = std::find(quantized.begin(), quantized.end(), i);
            if (balance_grad.size() > 0)
                ga += balance_grad.row(it - quantized.begin()).transpose();
            g.logits = soft_assign_backward(soft[i], tau, ga);
        } else {
            g.color = color_grad[i];
        }
    }
    out.grad.palette.setZero();
    out.grad.background.setZero();
    return out;
}

namespace {

// Parameter groups flattened in path order.
Eigen::VectorXd gather(const Scene& s, int group) {
    std::vector<double> v;
    for (const ScenePath& p : s.paths) {
        const Points& k = p.path.keypoints;
        if (group == 0)
            for (Eigen::Index r = 0; r < k.rows(); ++r) {
                v.push_back(k(r, 0));
                v.push_back(k(r, 1));
            }
        else if (group == 1)
            for (Eigen::Index r = 0; r < k.rows(); ++r)
                v.push_back(k(r, 2));
        else if (group == 2 && p.logits.size() == 0)
            v.insert(v.end(), p.color.data(), p.color.data() + p.color.size());
        else if (group == 3)
            v.insert(v.end(), p.logits.data(), p.logits.data() + p.logits.size());
    }
    return Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

void scatter(Scene& s, int group, const Eigen::VectorXd& v) {
    Eigen::Index at = 0;
    for (ScenePath& p : s.paths) {
        Points& k = p.path.keypoints;
        if (group == 0)
            for (Eigen::Index r = 0; r < k.rows(); ++r) {
                k(r, 0) = v[at++];
                k(r, 1) = v[at++];
            }
        else if (group == 1)
            for (Eigen::Index r = 0; r < k.rows(); ++r)
                k(r, 2) = v[at++];
        else if (group == 2 && p.logits.size() == 0)
            for (Eigen::Index c = 0; c < p.color.size(); ++c)
                p.color[c] = v[at++];
        else if (group == 3)
            for (Eigen::Index c = 0; c < p.logits.size(); ++c)
                p.logits[c] = v[at++];
    }
}

bool grad_finite(const Scene& g) {
    for (const ScenePath& p : g.paths)
        if (!p.path.keypoints.allFinite() || !p.color.allFinite() || !p.logits.allFinite())
            return false;
    return true;
}

} // namespace

RunResult run(const OptimJob& job, const RunCallbacks& callbacks) {
    Evaluator ev(job);
    RunResult res;
    res.columns = ev.columns();
    Scene cur = job.scene;
    const double base[4] = {job.lr.positions, job.lr.widths, job.lr.colors, job.lr.logits};
    const bool active[4] = {job.optimize_positions, job.optimize_widths, job.optimize_colors, true};
    AdamState states[4];

    for (int step = 0; step <= job.steps; ++step) {
        Evaluator::Result r;
        try {
            r = ev.evaluate(cur, step);
        } catch (const Error& e) {
            if (e.code() != Errc::numeric)
                throw;
            res.aborted = true;
            res.message = "step " + std::to_string(step) + ": " + e.what();
            break;
        }
        if (!std::isfinite(r.total) || !grad_finite(r.grad)) {
            res.aborted = true;
            res.message = "step " + std::to_string(step) + ": non-finite loss or gradient";
            break;
        }
        res.trace.push_back({step, r.values, r.total});
        if (step == job.steps)
            break;
        for (int g = 0; g < 4; ++g) {
            if (!active[g])
                continue;
            Eigen::VectorXd params = gather(cur, g);
            if (params.size() == 0)
                continue;
            const Eigen::VectorXd grads = gather(r.grad, g);
            adam_step(params, grads, states[g], cosine_lr(step, job.steps, base[g], base[g] * job.lr.min_ratio),
                      job.adam);
            if (g == 1)
                params = params.cwiseMax(job.w_min).cwiseMin(job.w_max);
            else if (g == 2)
                params = params.cwiseMax(0.0).cwiseMin(1.0);
            scatter(cur, g, params);
        }
        Eigen::VectorXd w = gather(cur, 1).cwiseMax(job.w_min).cwiseMin(job.w_max);
        scatter(cur, 1, w);
        if (callbacks.on_step)
            callbacks.on_step(step + 1, cur);
    }
    // On abort the current scene is the last one whose evaluation was finite.
    res.scene = std::move(cur);
    return res;
}

std::string trace_csv(const RunResult& result) {
    std::string out = "step";
    for (const std::string& c : result.columns)
        out += "," + c;
    out += ",total\n";
    char buf[64];
    for (const TraceRow& row : result.trace) {
        out += std::to_string(row.step);
        for (double v : row.values) {
            std::snprintf(buf, sizeof buf, ",%.17g", v);
            out += buf;
        }
        std::snprintf(buf, sizeof buf, ",%.17g\n", row.total);
        out += buf;
    }
    return out;
}

double mse_level0(const Canvas& a, const Canvas& b) {
    if (!a.same_shape(b) || a.size() == 0)
        throw Error(Errc::dimension_mismatch, "mse_level0: image shapes differ");
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i)
        s += (a.pixels[i] - b.pixels[i]) * (a.pixels[i] - b.pixels[i]);
    return s / static_cast<double>(a.size());
}

double scene_jerk(const Scene& scene, int samples_per_span) {
    double sum = 0.0;
    int count = 0;
    for (const ScenePath& p : scene.paths) {
        if (p.kind != DrawKind::stroke)
            continue;
        const Points s = path_samples(p.path, samples_per_span);
        if (s.rows() < 4)
            continue;
        sum += dimensionless_jerk(Eigen::MatrixXd(s.leftCols<2>()));
        ++count;
    }
    if (count == 0)
        throw Error(Errc::invalid_argument, "scene_jerk: no stroke with enough samples");
    return sum / count;
}

} // namespace bsvg
