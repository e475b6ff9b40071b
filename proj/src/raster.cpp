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

#include <algorithm>
#include <cmath>
#include <limits>

namespace bsvg {

Canvas::Canvas(int w, int h, int c, double fill)
    : width(w), height(h), channels(c),
      pixels(static_cast<size_t>(w) * static_cast<size_t>(h) * static_cast<size_t>(c), fill) {}

namespace {

using Vec2 = Eigen::Vector2d;

constexpr double kInf = std::numeric_limits<double>::infinity();
// Segments farther than this many softmin temperatures beyond the AA band
// are dropped from a pixel's smooth minimum; their weight is below e^-20.
constexpr double kSoftminCutoff = 20.0;

struct Segment {
    Vec2 a, b;
    double ra = 0.0, rb = 0.0;
    int ia = 0, ib = 0;
    bool ra_active = true, rb_active = true; // radius not clamped at zero
};

struct SegEval {
    double sd = 0.0;
    double rho = 0.0;
    double r = 0.0;
    double t = 0.0;
    bool interior = false;
    Vec2 n = Vec2::Zero();
};

SegEval eval_segment(const Segment& s, const Vec2& p) {
    SegEval out;
    const Vec2 e = s.b - s.a;
    const double len2 = e.squaredNorm();
    double t = 0.0;
    if (len2 > 1e-24) {
        const double raw = (p - s.a).dot(e) / len2;
        t = std::clamp(raw, 0.0, 1.0);
        out.interior = raw > 0.0 && raw < 1.0;
    }
    const Vec2 d = p - (s.a + t * e);
    out.rho = d.norm();
    out.n = out.rho > 0.0 ? Vec2(d / out.rho) : Vec2::Zero();
    out.t = t;
    out.r = s.ra + t * (s.rb - s.ra);
    out.sd = out.rho - out.r;
    return out;
}

// Smoothstep ramp from 0 at -h to 1 at +h, and its derivative.
double ramp(double x, double h) {
    if (x <= -h)
        return 0.0;
    if (x >= h)
        return 1.0;
    const double s = (x + h) / (2.0 * h);
    return s * s * (3.0 - 2.0 * s);
}

double ramp_deriv(double x, double h) {
    if (x <= -h || x >= h)
        return 0.0;
    const double s = (x + h) / (2.0 * h);
    return 6.0 * s * (1.0 - s) / (2.0 * h);
}

} // namespace

struct Rasterizer::Layer {
    int x0 = 0, y0 = 0, x1 = 0, y1 = 0;
    std::vector<double> alpha;
    std::vector<signed char> inside; // fills only
    std::vector<Segment> segments;
    int tile = 16;
    int tiles_x = 0, tiles_y = 0;
    std::vector<std::vector<int>> tile_segments;

    int w() const { return x1 - x0; }
    int h() const { return y1 - y0; }
    bool contains(int x, int y) const { return x >= x0 && x < x1 && y >= y0 && y < y1; }
    size_t index(int x, int y) const {
        return static_cast<size_t>(y - y0) * static_cast<size_t>(w()) + static_cast<size_t>(x - x0);
    }
    const std::vector<int>& candidates(int x, int y) const {
        return tile_segments[static_cast<size_t>((y - y0) / tile) * static_cast<size_t>(tiles_x) +
                             static_cast<size_t>((x - x0) / tile)];
    }
};

Rasterizer::Rasterizer(RasterSettings settings) : settings_(settings) {
    if (!(settings_.aa_band > 0.0) || !(settings_.softmin > 0.0) || settings_.tile < 1)
        throw Error(Errc::invalid_argument, "Rasterizer: invalid settings");
}

Rasterizer::~Rasterizer() = default;
Rasterizer::Rasterizer(Rasterizer&&) noexcept = default;
Rasterizer& Rasterizer::operator=(Rasterizer&&) noexcept = default;

namespace {

std::vector<Segment> build_segments(const Drawable& d) {
    std::vector<Segment> segs;
    const Eigen::Index n = d.polyline.rows();
    if (n == 0)
        return segs;
    auto radius = [&](Eigen::Index i, bool& active) {
        if (d.kind == DrawKind::fill) {
            active = false;
            return 0.0;
        }
        const double w = d.widths(i);
        active = w > 0.0;
        return active ? w : 0.0;
    };
    auto push = [&](Eigen::Index i, Eigen::Index j) {
        Segment s;
        s.a = d.polyline.row(i).transpose();
        s.b = d.polyline.row(j).transpose();
        s.ia = static_cast<int>(i);
        s.ib = static_cast<int>(j);
        s.ra = radius(i, s.ra_active);
        s.rb = radius(j, s.rb_active);
        segs.push_back(s);
    };
    if (n == 1) {
        push(0, 0);
        return segs;
    }
    for (Eigen::Index i = 0; i + 1 < n; ++i)
        push(i, i + 1);
    if (d.kind == DrawKind::fill && (d.polyline.row(n - 1) - d.polyline.row(0)).squaredNorm() > 0.0)
        push(n - 1, 0);
    return segs;
}

} // namespace

double stroke_distance(const Drawable& stroke, const Eigen::Vector2d& p, double softmin) {
    if (stroke.kind != DrawKind::stroke || stroke.widths.size() != stroke.polyline.rows() || !(softmin > 0.0))
        throw Error(Errc::invalid_argument, "stroke_distance: a stroke with one radius per sample is required");
    const std::vector<Segment> segs = build_segments(stroke);
    if (segs.empty())
        return kInf;
    std::vector<double> sd(segs.size());
    double m = kInf;
    for (size_t i = 0; i < segs.size(); ++i) {
        sd[i] = eval_segment(segs[i], p).sd;
        m = std::min(m, sd[i]);
    }
    double z = 0.0;
    for (double v : sd)
        if (v - m < kSoftminCutoff * softmin)
            z += std::exp(-(v - m) / softmin);
    return m - softmin * std::log(z);
}

Canvas Rasterizer::render(std::span<const Drawable> scene, int width, int height,
                          const Eigen::VectorXd& background) {
    if (width < 1 || height < 1)
        throw Error(Errc::invalid_argument, "render: zero-dimension canvas");
    const int channels = static_cast<int>(background.size());
    if (channels < 1)
        throw Error(Errc::invalid_argument, "render: background must have at least one channel");
    for (const Drawable& d : scene) {
        if (d.color.size() != channels)
            throw Error(Errc::dimension_mismatch, "render: drawable color does not match canvas channels");
        if (d.kind == DrawKind::stroke && d.widths.size() != d.polyline.rows())
            throw Error(Errc::dimension_mismatch, "render: stroke widths do not match samples");
        if (!d.polyline.allFinite() || (d.kind == DrawKind::stroke && !d.widths.allFinite()))
            throw Error(Errc::numeric, "render: non-finite geometry");
    }

    width_ = width;
    height_ = height;
    channels_ = channels;
    background_ = background;
    scene_.assign(scene.begin(), scene.end());
    layers_.clear();
    layers_.resize(scene_.size());

    const double h = 0.5 * settings_.aa_band;
    const double kappa = settings_.softmin;
    Canvas canvas(width, height, channels);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            for (int c = 0; c < channels; ++c)
                canvas.at(x, y, c) = background(c);

    std::vector<SegEval> evals;
    for (size_t li = 0; li < scene_.size(); ++li) {
        const Drawable& d = scene_[li];
        Layer& L = layers_[li];
        L.tile = settings_.tile;
        L.segments = build_segments(d);
        if (L.segments.empty())
            continue;
        const bool fill = d.kind == DrawKind::fill;

        // Expanded per-segment bounds.
        std::vector<Eigen::Vector4d> bounds; // minx, miny, maxx, maxy
        bounds.reserve(L.segments.size());
        double bx0 = kInf, by0 = kInf, bx1 = -kInf, by1 = -kInf;
        for (const Segment& s : L.segments) {
            const double margin = fill ? h : std::max(s.ra, s.rb) + h + kSoftminCutoff * kappa;
            Eigen::Vector4d b(std::min(s.a.x(), s.b.x()) - margin, std::min(s.a.y(), s.b.y()) - margin,
                              std::max(s.a.x(), s.b.x()) + margin, std::max(s.a.y(), s.b.y()) + margin);
            bounds.push_back(b);
            bx0 = std::min(bx0, b(0));
            by0 = std::min(by0, b(1));
            bx1 = std::max(bx1, b(2));
            by1 = std::max(by1, b(3));
        }
        // Pixel centres x + 0.5 inside [lo, hi].
        auto first_px = [](double lo) { return static_cast<int>(std::ceil(lo - 0.5)); };
        auto last_px = [](double hi) { return static_cast<int>(std::floor(hi - 0.5)); };
        L.x0 = std::clamp(first_px(bx0), 0, width);
        L.y0 = std::clamp(first_px(by0), 0, height);
        L.x1 = std::clamp(last_px(bx1) + 1, 0, width);
        L.y1 = std::clamp(last_px(by1) + 1, 0, height);
        if (L.x1 <= L.x0 || L.y1 <= L.y0) {
            L.x1 = L.x0;
            L.y1 = L.y0;
            continue;
        }
        L.tiles_x = (L.w() + L.tile - 1) / L.tile;
        L.tiles_y = (L.h() + L.tile - 1) / L.tile;
        L.tile_segments.assign(static_cast<size_t>(L.tiles_x) * static_cast<size_t>(L.tiles_y), {});
        for (size_t si = 0; si < L.segments.size(); ++si) {
            const Eigen::Vector4d& b = bounds[si];
            const int px0 = std::max(first_px(b(0)), L.x0);
            const int py0 = std::max(first_px(b(1)), L.y0);
            const int px1 = std::min(last_px(b(2)), L.x1 - 1);
            const int py1 = std::min(last_px(b(3)), L.y1 - 1);
            if (px1 < px0 || py1 < py0)
                continue;
            for (int ty = (py0 - L.y0) / L.tile; ty <= (py1 - L.y0) / L.tile; ++ty)
                for (int tx = (px0 - L.x0) / L.tile; tx <= (px1 - L.x0) / L.tile; ++tx)
                    L.tile_segments[static_cast<size_t>(ty) * static_cast<size_t>(L.tiles_x) +
                                    static_cast<size_t>(tx)]
                        .push_back(static_cast<int>(si));
        }

        L.alpha.assign(static_cast<size_t>(L.w()) * static_cast<size_t>(L.h()), 0.0);
        if (fill)
            L.inside.assign(L.alpha.size(), 0);

        std::vector<std::pair<double, int>> crossings;
        for (int y = L.y0; y < L.y1; ++y) {
            const double py = y + 0.5;
            int winding = 0;
            size_t next_crossing = 0;
            if (fill) {
                crossings.clear();
                for (const Segment& s : L.segments) {
                    if ((s.a.y() <= py) != (s.b.y() <= py)) {
                        const double xc = s.a.x() + (py - s.a.y()) * (s.b.x() - s.a.x()) / (s.b.y() - s.a.y());
                        crossings.emplace_back(xc, s.b.y() > s.a.y() ? 1 : -1);
                    }
                }
                std::sort(crossings.begin(), crossings.end());
                for (const auto& c : crossings)
                    winding += c.second;
            }
            for (int x = L.x0; x < L.x1; ++x) {
                const Vec2 p(x + 0.5, py);
                const auto& cand = L.candidates(x, y);
                double a = 0.0;
                if (fill) {
                    while (next_crossing < crossings.size() && crossings[next_crossing].first <= p.x())
                        winding -= crossings[next_crossing++].second;
                    const bool in = winding != 0;
                    L.inside[L.index(x, y)] = in ? 1 : 0;
                    double rho = kInf;
                    for (int si : cand)
                        rho = std::min(rho, eval_segment(L.segments[static_cast<size_t>(si)], p).rho);
                    a = in ? (rho >= h ? 1.0 : ramp(rho, h)) : (rho >= h ? 0.0 : ramp(-rho, h));
                } else if (!cand.empty()) {
                    evals.clear();
                    double m = kInf;
                    for (int si : cand) {
                        evals.push_back(eval_segment(L.segments[static_cast<size_t>(si)], p));
                        m = std::min(m, evals.back().sd);
                    }
                    double z = 0.0, zr = 0.0;
                    for (const SegEval& e : evals) {
                        const double wgt = std::exp(-(e.sd - m) / kappa);
                        z += wgt;
                        zr += wgt * e.r;
                    }
                    const double smin = m - kappa * std::log(z);
                    const double reff = zr / z;
                    a = ramp(-smin, h) - ramp(-smin - 2.0 * reff, h);
                }
                L.alpha[L.index(x, y)] = a;
                if (a > 0.0) {
                    const double op = d.opacity * a;
                    for (int c = 0; c < channels; ++c) {
                        double& v = canvas.at(x, y, c);
                        v = op * d.color(c) + (1.0 - op) * v;
                    }
                }
            }
        }
    }
    rendered_ = true;
    return canvas;
}

double Rasterizer::coverage(size_t index, int x, int y) const {
    if (!rendered_ || index >= layers_.size())
        throw Error(Errc::state, "coverage: no such rendered drawable");
    const Layer& L = layers_[index];
    return L.contains(x, y) ? L.alpha[L.index(x, y)] : 0.0;
}

std::vector<DrawableGrad> Rasterizer::backward(const Canvas& grad) const {
    if (!rendered_)
        throw Error(Errc::state, "backward: render must be called first");
    if (grad.width != width_ || grad.height != height_ || grad.channels != channels_)
        throw Error(Errc::dimension_mismatch, "backward: gradient shape does not match the render");

    const size_t count = scene_.size();
    std::vector<DrawableGrad> out(count);
    std::vector<std::vector<double>> dalpha(count);
    for (size_t i = 0; i < count; ++i) {
        const Drawable& d = scene_[i];
        out[i].polyline = Points2::Zero(d.polyline.rows(), 2);
        out[i].widths = Eigen::VectorXd::Zero(d.polyline.rows());
        out[i].color = Eigen::VectorXd::Zero(channels_);
        out[i].opacity = 0.0;
        dalpha[i].assign(layers_[i].alpha.size(), 0.0);
    }

    // Compositing chain, per pixel.
    const int C = channels_;
    std::vector<size_t> active;
    std::vector<double> prefix;
    std::vector<double> g(static_cast<size_t>(C));
    for (int y = 0; y < height_; ++y) {
        for (int x = 0; x < width_; ++x) {
            active.clear();
            for (size_t i = 0; i < count; ++i) {
                const Layer& L = layers_[i];
                if (L.contains(x, y) && L.alpha[L.index(x, y)] > 0.0)
                    active.push_back(i);
            }
            if (active.empty())
                continue;
            prefix.assign((active.size() + 1) * static_cast<size_t>(C), 0.0);
            for (int c = 0; c < C; ++c)
                prefix[static_cast<size_t>(c)] = background_(c);
            for (size_t k = 0; k < active.size(); ++k) {
                const Drawable& d = scene_[active[k]];
                const Layer& L = layers_[active[k]];
                const double op = d.opacity * L.alpha[L.index(x, y)];
                for (int c = 0; c < C; ++c)
                    prefix[(k + 1) * static_cast<size_t>(C) + static_cast<size_t>(c)] =
                        op * d.color(c) + (1.0 - op) * prefix[k * static_cast<size_t>(C) + static_cast<size_t>(c)];
            }
            for (int c = 0; c < C; ++c)
                g[static_cast<size_t>(c)] = grad.at(x, y, c);
            for (size_t k = active.size(); k-- > 0;) {
                const size_t i = active[k];
                const Drawable& d = scene_[i];
                const Layer& L = layers_[i];
                const double alpha = L.alpha[L.index(x, y)];
                const double op = d.opacity * alpha;
                double dop = 0.0;
                for (int c = 0; c < C; ++c) {
                    const double gc = g[static_cast<size_t>(c)];
                    dop += gc * (d.color(c) - prefix[k * static_cast<size_t>(C) + static_cast<size_t>(c)]);
                    out[i].color(c) += op * gc;
                    g[static_cast<size_t>(c)] = (1.0 - op) * gc;
                }
                out[i].opacity += alpha * dop;
                dalpha[i][L.index(x, y)] = d.opacity * dop;
            }
        }
    }

    // Coverage to geometry.
    const double h = 0.5 * settings_.aa_band;
    const double kappa = settings_.softmin;
    std::vector<SegEval> evals;
    std::vector<double> pis;
    for (size_t i = 0; i < count; ++i) {
        const Drawable& d = scene_[i];
        const Layer& L = layers_[i];
        DrawableGrad& G = out[i];
        const bool fill = d.kind == DrawKind::fill;
        auto add_point = [&](int idx, const Vec2& v) { G.polyline.row(idx) += v.transpose(); };
        for (int y = L.y0; y < L.y1; ++y)
            for (int x = L.x0; x < L.x1; ++x) {
                const double da = dalpha[i][L.index(x, y)];
                if (da == 0.0)
                    continue;
                const Vec2 p(x + 0.5, y + 0.5);
                const auto& cand = L.candidates(x, y);
                if (cand.empty())
                    continue;
                if (fill) {
                    double rho = kInf;
                    int best = -1;
                    SegEval be;
                    for (int si : cand) {
                        const SegEval e = eval_segment(L.segments[static_cast<size_t>(si)], p);
                        if (e.rho < rho) {
                            rho = e.rho;
                            best = si;
                            be = e;
                        }
                    }
                    if (best < 0 || rho >= h)
                        continue;
                    const bool in = L.inside[L.index(x, y)] != 0;
                    const double sd = in ? -rho : rho;
                    const double dsd = -ramp_deriv(-sd, h) * da;
                    const double sign = in ? -1.0 : 1.0; // d sd / d rho
                    const Segment& s = L.segments[static_cast<size_t>(best)];
                    add_point(s.ia, dsd * sign * (-(1.0 - be.t)) * be.n);
                    add_point(s.ib, dsd * sign * (-be.t) * be.n);
                    continue;
                }
                evals.clear();
                double m = kInf;
                for (int si : cand) {
                    evals.push_back(eval_segment(L.segments[static_cast<size_t>(si)], p));
                    m = std::min(m, evals.back().sd);
                }
                double z = 0.0, zr = 0.0;
                pis.resize(evals.size());
                for (size_t k = 0; k < evals.size(); ++k) {
                    pis[k] = std::exp(-(evals[k].sd - m) / kappa);
                    z += pis[k];
                    zr += pis[k] * evals[k].r;
                }
                for (double& v : pis)
                    v /= z;
                const double smin = m - kappa * std::log(z);
                const double reff = zr / z;
                const double dA = ramp_deriv(-smin, h);
                const double dB = ramp_deriv(-smin - 2.0 * reff, h);
                const double d_smin = (-dA + dB) * da;
                const double d_reff = 2.0 * dB * da;
                if (d_smin == 0.0 && d_reff == 0.0)
                    continue;
                for (size_t k = 0; k < evals.size(); ++k) {
                    const SegEval& e = evals[k];
                    const Segment& s = L.segments[static_cast<size_t>(cand[k])];
                    const double g_sd = d_smin * pis[k] + d_reff * (-(1.0 / kappa) * pis[k] * (e.r - reff));
                    const double g_r = d_reff * pis[k] - g_sd; // total wrt the interpolated radius
                    const double g_rho = g_sd;
                    Vec2 ga = g_rho * (-(1.0 - e.t)) * e.n;
                    Vec2 gb = g_rho * (-e.t) * e.n;
                    if (e.interior) {
                        const Vec2 ev = s.b - s.a;
                        const double len2 = ev.squaredNorm();
                        const Vec2 pa = p - s.a;
                        const Vec2 dt_da = (-(ev + pa) + 2.0 * e.t * ev) / len2;
                        const Vec2 dt_db = (pa - 2.0 * e.t * ev) / len2;
                        const double dr_dt = s.rb - s.ra;
                        ga += g_r * dr_dt * dt_da;
                        gb += g_r * dr_dt * dt_db;
                    }
                    add_point(s.ia, ga);
                    add_point(s.ib, gb);
                    if (s.ra_active)
                        G.widths(s.ia) += g_r * (1.0 - e.t);
                    if (s.rb_active)
                        G.widths(s.ib) += g_r * e.t;
                }
            }
    }
    return out;
}

namespace {

constexpr int kBlurRadius = 3;

std::vector<double> gaussian_kernel() {
    std::vector<double> k(2 * kBlurRadius + 1);
    double sum = 0.0;
    for (int i = -kBlurRadius; i <= kBlurRadius; ++i) {
        k[static_cast<size_t>(i + kBlurRadius)] = std::exp(-0.5 * i * i);
        sum += k[static_cast<size_t>(i + kBlurRadius)];
    }
    for (double& v : k)
        v /= sum;
    return k;
}

// Separable blur with edge replication; `adjoint` applies the transpose.
Canvas blur(const Canvas& in, bool adjoint) {
    static const std::vector<double> k = gaussian_kernel();
    const int W = in.width, H = in.height, C = in.channels;
    Canvas tmp(W, H, C), out(W, H, C);
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x)
            for (int o = -kBlurRadius; o <= kBlurRadius; ++o) {
                const int sx = std::clamp(x + o, 0, W - 1);
                const double w = k[static_cast<size_t>(o + kBlurRadius)];
                for (int c = 0; c < C; ++c) {
                    if (adjoint)
                        tmp.at(sx, y, c) += w * in.at(x, y, c);
                    else
                        tmp.at(x, y, c) += w * in.at(sx, y, c);
                }
            }
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x)
            for (int o = -kBlurRadius; o <= kBlurRadius; ++o) {
                const int sy = std::clamp(y + o, 0, H - 1);
                const double w = k[static_cast<size_t>(o + kBlurRadius)];
                for (int c = 0; c < C; ++c) {
                    if (adjoint)
                        out.at(x, sy, c) += w * tmp.at(x, y, c);
                    else
                        out.at(x, y, c) += w * tmp.at(x, sy, c);
                }
            }
    return out;
}

} // namespace

std::vector<Canvas> downsample_blur(const Canvas& image, int levels) {
    if (levels < 1)
        throw Error(Errc::invalid_argument, "downsample_blur: levels must be >= 1");
    std::vector<Canvas> out;
    out.reserve(static_cast<size_t>(levels));
    out.push_back(image);
    for (int l = 1; l < levels; ++l) {
        const Canvas& prev = out.back();
        const int W = prev.width / 2, H = prev.height / 2;
        if (W < 1 || H < 1)
            throw Error(Errc::invalid_argument, "downsample_blur: level would fall below 1x1");
        const Canvas b = blur(prev, false);
        Canvas next(W, H, prev.channels);
        for (int y = 0; y < H; ++y)
            for (int x = 0; x < W; ++x)
                for (int c = 0; c < prev.channels; ++c)
                    next.at(x, y, c) = 0.25 * (b.at(2 * x, 2 * y, c) + b.at(2 * x + 1, 2 * y, c) +
                                               b.at(2 * x, 2 * y + 1, c) + b.at(2 * x + 1, 2 * y + 1, c));
        out.push_back(std::move(next));
    }
    return out;
}

Canvas downsample_blur_adjoint(const std::vector<Canvas>& grads) {
    if (grads.empty())
        throw Error(Errc::invalid_argument, "downsample_blur_adjoint: no levels");
    Canvas g = grads.back();
    for (size_t l = grads.size() - 1; l > 0; --l) {
        const Canvas& below = grads[l - 1];
        Canvas up(below.width, below.height, below.channels);
        for (int y = 0; y < g.height; ++y)
            for (int x = 0; x < g.width; ++x)
                for (int c = 0; c < g.channels; ++c) {
                    const double v = 0.25 * g.at(x, y, c);
                    up.at(2 * x, 2 * y, c) += v;
                    up.at(2 * x + 1, 2 * y, c) += v;
                    up.at(2 * x, 2 * y + 1, c) += v;
                    up.at(2 * x + 1, 2 * y + 1, c) += v;
                }
        g = blur(up, true);
        for (size_t i = 0; i < g.pixels.size(); ++i)
            g.pixels[i] += below.pixels[i];
    }
    return g;
}

} // namespace bsvg
