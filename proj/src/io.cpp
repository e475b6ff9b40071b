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

#include <bsvg/io.hpp>
#include <bsvg/bezier.hpp>
#include <bsvg/image_io.hpp>
#include <bsvg/palette.hpp>

#include <algorithm>
#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

namespace bsvg {

using nlohmann::json;

// ---------------------------------------------------------------- JSON

namespace {

json vec_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd json_vec(const json& j) {
    const std::vector<double> v = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

} // namespace

std::string scene_to_json(const Scene& scene) {
    json j;
    j["format"] = "bsvg-scene";
    j["version"] = 1;
    j["width"] = scene.width;
    j["height"] = scene.height;
    j["background"] = vec_json(scene.background);
    json pal = json::array();
    for (Eigen::Index k = 0; k < scene.palette.rows(); ++k)
        pal.push_back(vec_json(scene.palette.row(k).transpose()));
    j["palette"] = pal;
    json paths = json::array();
    for (const ScenePath& p : scene.paths) {
        json jp;
        jp["kind"] = p.kind == DrawKind::fill ? "fill" : "stroke";
        jp["degree"] = p.path.degree;
        jp["closed"] = p.path.closed;
        json keys = json::array();
        for (Eigen::Index r = 0; r < p.path.keypoints.rows(); ++r)
            keys.push_back({p.path.keypoints(r, 0), p.path.keypoints(r, 1), p.path.keypoints(r, 2)});
        jp["keypoints"] = keys;
        if (!p.path.multiplicity.empty())
            jp["multiplicity"] = p.path.multiplicity;
        jp["color"] = vec_json(p.color);
        jp["opacity"] = p.opacity;
        if (p.logits.size() > 0)
            jp["logits"] = vec_json(p.logits);
        paths.push_back(jp);
    }
    j["paths"] = paths;
    return j.dump(1);
}

Scene scene_from_json(const std::string& text) {
    Scene s;
    try {
        const json j = json::parse(text);
        if (j.value("format", std::string()) != "bsvg-scene")
            throw Error(Errc::parse, "scene: not a bsvg scene file");
        s.width = j.at("width").get<int>();
        s.height = j.at("height").get<int>();
        s.background = json_vec(j.at("background"));
        const json& pal = j.at("palette");
        if (!pal.empty()) {
            s.palette.resize(static_cast<Eigen::Index>(pal.size()), static_cast<Eigen::Index>(pal[0].size()));
            for (size_t k = 0; k < pal.size(); ++k) {
                const Eigen::VectorXd row = json_vec(pal[k]);
                if (row.size() != s.palette.cols())
                    throw Error(Errc::parse, "scene: ragged palette");
                s.palette.row(static_cast<Eigen::Index>(k)) = row.transpose();
            }
        }
        for (const json& jp : j.at("paths")) {
            ScenePath p;
            const std::string kind = jp.at("kind").get<std::string>();
            if (kind != "fill" && kind != "stroke")
                throw Error(Errc::parse, "scene: unknown path kind '" + kind + "'");
            p.kind = kind == "fill" ? DrawKind::fill : DrawKind::stroke;
            p.path.degree = jp.at("degree").get<int>();
            p.path.closed = jp.at("closed").get<bool>();
            const json& keys = jp.at("keypoints");
            p.path.keypoints.resize(static_cast<Eigen::Index>(keys.size()), 3);
            for (size_t r = 0; r < keys.size(); ++r) {
                const std::vector<double> k = keys[r].get<std::vector<double>>();
                if (k.size() != 3)
                    throw Error(Errc::parse, "scene: key-points need 3 values");
                p.path.keypoints.row(static_cast<Eigen::Index>(r)) << k[0], k[1], k[2];
            }
            if (jp.contains("multiplicity"))
                p.path.multiplicity = jp.at("multiplicity").get<std::vector<int>>();
            p.color = json_vec(jp.at("color"));
            p.opacity = jp.value("opacity", 1.0);
            if (jp.contains("logits"))
                p.logits = json_vec(jp.at("logits"));
            s.paths.push_back(std::move(p));
        }
    } catch (const json::exception& e) {
        throw Error(Errc::parse, std::string("scene: ") + e.what());
    }
    validate_scene(s);
    for (const ScenePath& p : s.paths)
        build_spline(p.path);
    return s;
}

void save_scene(const std::string& path, const Scene& scene) { write_text(path, scene_to_json(scene) + "\n"); }

Scene load_scene(const std::string& path) {
    const std::vector<std::uint8_t> bytes = read_file(path);
    const std::string text(bytes.begin(), bytes.end());
    const size_t first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '<')
        return import_svg(text);
    return scene_from_json(text);
}

// ---------------------------------------------------------------- outlines

namespace {

void add_cap(std::vector<Eigen::RowVector2d>& out, const Eigen::RowVector2d& c, const Eigen::RowVector2d& n,
             const Eigen::RowVector2d& t, double r) {
    // Half circle from c + r n through c + r t to c - r n, end points excluded.
    const int segs = std::max(8, static_cast<int>(std::ceil(std::numbers::pi * r)));
    for (int i = 1; i < segs; ++i) {
        const double phi = std::numbers::pi * i / segs;
        out.push_back(c + r * (std::cos(phi) * n + std::sin(phi) * t));
    }
}

Points2 to_points(const std::vector<Eigen::RowVector2d>& v) {
    Points2 p(static_cast<Eigen::Index>(v.size()), 2);
    for (size_t i = 0; i < v.size(); ++i)
        p.row(static_cast<Eigen::Index>(i)) = v[i];
    return p;
}

} // namespace

std::vector<Points2> stroke_outline(const Points2& centre, const Eigen::VectorXd& radii, bool closed) {
    if (centre.rows() != radii.size())
        throw Error(Errc::dimension_mismatch, "stroke_outline: one radius per sample required");
    // Drop repeated samples so every tangent is defined.
    std::vector<Eigen::RowVector2d> x;
    std::vector<double> r;
    for (Eigen::Index i = 0; i < centre.rows(); ++i) {
        if (!x.empty() && (centre.row(i) - x.back()).norm() < 1e-9) {
            r.back() = std::max(r.back(), radii[i]);
            continue;
        }
        x.push_back(centre.row(i));
        r.push_back(std::max(0.0, radii[i]));
    }
    if (closed && x.size() > 1 && (x.front() - x.back()).norm() < 1e-9) {
        x.pop_back();
        r.pop_back();
    }
    const size_t S = x.size();
    if (S == 0)
        return {};
    if (S == 1) {
        std::vector<Eigen::RowVector2d> ring;
        const Eigen::RowVector2d n(0, 1), t(1, 0);
        ring.push_back(x[0] + r[0] * n);
        add_cap(ring, x[0], n, t, r[0]);
        ring.push_back(x[0] - r[0] * n);
        add_cap(ring, x[0], -n, -t, r[0]);
        return {to_points(ring)};
    }
    // Tangents over a small spatial window so sub-pixel backtracking at the
    // ends of the sampled curve does not flip the offset side.
    constexpr double window = 0.25;
    const auto count = static_cast<std::ptrdiff_t>(S);
    auto at = [&](std::ptrdiff_t k) -> Eigen::RowVector2d {
        return closed ? x[static_cast<size_t>((k % count + count) % count)]
                      : x[static_cast<size_t>(std::clamp<std::ptrdiff_t>(k, 0, count - 1))];
    };
    auto reach = [&](size_t i, int dir) -> Eigen::RowVector2d {
        const auto c = static_cast<std::ptrdiff_t>(i);
        for (std::ptrdiff_t k = 1; k < count; ++k) {
            const std::ptrdiff_t j = c + dir * k;
            if ((!closed && (j < 0 || j >= count)) || (at(j) - x[i]).norm() >= window)
                return at(j);
        }
        return at(c + dir);
    };
    std::vector<Eigen::RowVector2d> n(S), t(S);
    for (size_t i = 0; i < S; ++i) {
        Eigen::RowVector2d d = reach(i, 1) - reach(i, -1);
        if (d.norm() < 1e-12)
            d = at(static_cast<std::ptrdiff_t>(i) + 1) - at(static_cast<std::ptrdiff_t>(i) - 1);
        t[i] = d.normalized();
        n[i] = Eigen::RowVector2d(-t[i].y(), t[i].x());
    }
    if (closed) {
        std::vector<Eigen::RowVector2d> outer, inner;
        for (size_t i = 0; i < S; ++i)
            outer.push_back(x[i] + r[i] * n[i]);
        for (size_t i = S; i-- > 0;)
            inner.push_back(x[i] - r[i] * n[i]);
        return {to_points(outer), to_points(inner)};
    }
    std::vector<Eigen::RowVector2d> ring;
    for (size_t i = 0; i < S; ++i)
        ring.push_back(x[i] + r[i] * n[i]);
    add_cap(ring, x[S - 1], n[S - 1], t[S - 1], r[S - 1]);
    for (size_t i = S; i-- > 0;)
        ring.push_back(x[i] - r[i] * n[i]);
    add_cap(ring, x[0], -n[0], -t[0], r[0]);
    return {to_points(ring)};
}

void snap_outline(std::vector<Points2>& rings, const Drawable& stroke, double softmin) {
    constexpr double step = 1e-4;
    constexpr double max_move = 0.5;
    for (Points2& ring : rings)
        for (Eigen::Index i = 0; i < ring.rows(); ++i) {
            Eigen::Vector2d q = ring.row(i).transpose();
            const Eigen::Vector2d q0 = q;
            for (int it = 0; it < 3; ++it) {
                const double f = stroke_distance(stroke, q, softmin);
                const Eigen::Vector2d g(
                    (stroke_distance(stroke, q + Eigen::Vector2d(step, 0), softmin) -
                     stroke_distance(stroke, q - Eigen::Vector2d(step, 0), softmin)) / (2 * step),
                    (stroke_distance(stroke, q + Eigen::Vector2d(0, step), softmin) -
                     stroke_distance(stroke, q - Eigen::Vector2d(0, step), softmin)) / (2 * step));
                if (!std::isfinite(f) || g.squaredNorm() < 0.25)
                    break;
                q -= f * g / g.squaredNorm();
            }
            if ((q - q0).norm() <= max_move)
                ring.row(i) = q.transpose();
        }
}

// ---------------------------------------------------------------- export

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    std::string s = buf;
    s.erase(s.find_last_not_of('0') + 1);
    if (s.back() == '.')
        s.pop_back();
    if (s == "-0")
        s = "0";
    return s;
}

std::string hex(const Eigen::VectorXd& c) {
    Eigen::VectorXd rgb = c.size() == 1 ? Eigen::VectorXd::Constant(3, c[0]) : c;
    return to_hex(rgb.cwiseMax(0.0).cwiseMin(1.0));
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char ch : s) {
        if (ch == '&')
            out += "&amp;";
        else if (ch == '<')
            out += "&lt;";
        else if (ch == '>')
            out += "&gt;";
        else
            out += ch;
    }
    return out;
}

std::string polygon_data(const std::vector<Points2>& rings) {
    std::string d;
    for (const Points2& ring : rings) {
        for (Eigen::Index i = 0; i < ring.rows(); ++i)
            d += (i == 0 ? "M" : " L") + num(ring(i, 0)) + "," + num(ring(i, 1));
        d += " Z ";
    }
    if (!d.empty())
        d.pop_back();
    return d;
}

std::string cubic_data(const BezierChain& chain, bool close) {
    const Points& b = chain.points;
    std::string d = "M" + num(b(0, 0)) + "," + num(b(0, 1));
    for (int s = 0; s < chain.segments(); ++s) {
        d += " C";
        for (int k = 1; k <= 3; ++k)
            d += (k > 1 ? " " : "") + num(b(3 * s + k, 0)) + "," + num(b(3 * s + k, 1));
    }
    if (close)
        d += " Z";
    return d;
}

} // namespace

std::string export_svg(const Scene& scene, const SvgOptions& options) {
    validate_scene(scene);
    const std::string W = std::to_string(scene.width), H = std::to_string(scene.height);
    std::ostringstream o;
    o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << W << "\" height=\"" << H
      << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    if (options.metadata)
        o << "<metadata id=\"bsvg-scene\">" << xml_escape(scene_to_json(scene)) << "</metadata>\n";
    o << "<rect id=\"background\" x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\""
      << hex(scene.background) << "\"/>\n";

    const std::vector<Drawable> drawables = scene_drawables(scene, options.samples_per_span, true);
    std::ostringstream centre;
    o << "<g id=\"shapes\">\n";
    for (size_t i = 0; i < scene.paths.size(); ++i) {
        const ScenePath& p = scene.paths[i];
        const Drawable& d = drawables[i];
        const std::string style = "fill=\"" + hex(d.color) + "\" fill-opacity=\"" + num(p.opacity) + "\"";
        const SparseMap E = keypoint_map(p.path);
        const ConversionPipeline pipe(p.path.degree, static_cast<int>(E.rows()), p.path.closed);
        const BezierChain chain = pipe.to_cubic(E * p.path.keypoints);
        if (p.kind == DrawKind::fill) {
            o << "<path d=\"" << cubic_data(chain, true) << "\" " << style << " fill-rule=\"nonzero\"/>\n";
            continue;
        }
        std::vector<Points2> rings = stroke_outline(d.polyline, d.widths, p.path.closed);
        if (options.softmin > 0.0)
            snap_outline(rings, d, options.softmin);
        if (!rings.empty())
            o << "<path d=\"" << polygon_data(rings) << "\" " << style << " fill-rule=\"nonzero\"/>\n";
        centre << "<path d=\"" << cubic_data(chain, p.path.closed) << "\" fill=\"none\" stroke=\"" << hex(d.color)
               << "\" stroke-width=\"" << num(2.0 * d.widths.mean()) << "\"/>\n";
    }
    o << "</g>\n";
    o << "<g id=\"centerlines\" display=\"none\">\n" << centre.str() << "</g>\n";
    o << "</svg>\n";
    return o.str();
}

// ---------------------------------------------------------------- path data

namespace {

class PathLexer {
public:
    explicit PathLexer(const std::string& s) : s_(s) {}

    void skip_wsp() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_])))
            ++i_;
    }
    void skip_comma_wsp() {
        skip_wsp();
        if (i_ < s_.size() && s_[i_] == ',') {
            ++i_;
            skip_wsp();
        }
    }
    bool done() {
        skip_wsp();
        return i_ >= s_.size();
    }
    bool at_command() {
        skip_wsp();
        return i_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[i_])) && s_[i_] != 'e' &&
               s_[i_] != 'E';
    }
    bool at_number() {
        skip_wsp();
        if (i_ >= s_.size())
            return false;
        const char c = s_[i_];
        return std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.';
    }
    char command() { return s_[i_++]; }

    double number() {
        skip_wsp();
        const size_t start = i_;
        if (i_ < s_.size() && (s_[i_] == '+' || s_[i_] == '-'))
            ++i_;
        size_t digits = 0;
        while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_])))
            ++i_, ++digits;
        if (i_ < s_.size() && s_[i_] == '.') {
            ++i_;
            while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_])))
                ++i_, ++digits;
        }
        if (digits == 0)
            fail("expected a number");
        if (i_ < s_.size() && (s_[i_] == 'e' || s_[i_] == 'E')) {
            size_t j = i_ + 1;
            if (j < s_.size() && (s_[j] == '+' || s_[j] == '-'))
                ++j;
            if (j < s_.size() && std::isdigit(static_cast<unsigned char>(s_[j]))) {
                while (j < s_.size() && std::isdigit(static_cast<unsigned char>(s_[j])))
                    ++j;
                i_ = j;
            }
        }
        double v = 0.0;
        const char* b = s_.data() + start;
        const char* e = s_.data() + i_;
        if (*b == '+')
            ++b;
        const auto r = std::from_chars(b, e, v);
        if (r.ec != std::errc() || r.ptr != e)
            fail("malformed number");
        skip_comma_wsp();
        return v;
    }

    bool flag() {
        skip_wsp();
        if (i_ >= s_.size() || (s_[i_] != '0' && s_[i_] != '1'))
            fail("expected an arc flag");
        const bool f = s_[i_++] == '1';
        skip_comma_wsp();
        return f;
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw Error(Errc::parse, "path data: " + msg + " at offset " + std::to_string(i_));
    }

private:
    const std::string& s_;
    size_t i_ = 0;
};

using V2 = Eigen::RowVector2d;

void flatten_cubic(std::vector<V2>& out, const V2& p0, const V2& p1, const V2& p2, const V2& p3, int n) {
    for (int i = 1; i <= n; ++i) {
        const double t = static_cast<double>(i) / n, u = 1.0 - t;
        out.push_back(u * u * u * p0 + 3 * u * u * t * p1 + 3 * u * t * t * p2 + t * t * t * p3);
    }
}

void flatten_arc(std::vector<V2>& out, const V2& p0, double rx, double ry, double phi_deg, bool large, bool sweep,
                 const V2& p1, int n) {
    if ((p0 - p1).norm() == 0.0)
        return;
    rx = std::abs(rx);
    ry = std::abs(ry);
    if (rx == 0.0 || ry == 0.0) {
        out.push_back(p1);
        return;
    }
    const double phi = phi_deg * std::numbers::pi / 180.0, c = std::cos(phi), s = std::sin(phi);
    const V2 h = (p0 - p1) / 2.0;
    const double x1 = c * h.x() + s * h.y(), y1 = -s * h.x() + c * h.y();
    const double lambda = x1 * x1 / (rx * rx) + y1 * y1 / (ry * ry);
    if (lambda > 1.0) {
        rx *= std::sqrt(lambda);
        ry *= std::sqrt(lambda);
    }
    const double num_ = rx * rx * ry * ry - rx * rx * y1 * y1 - ry * ry * x1 * x1;
    const double den = rx * rx * y1 * y1 + ry * ry * x1 * x1;
    double k = std::sqrt(std::max(0.0, num_ / den));
    if (large == sweep)
        k = -k;
    const double cx1 = k * rx * y1 / ry, cy1 = -k * ry * x1 / rx;
    const V2 mid = (p0 + p1) / 2.0;
    const V2 centre(c * cx1 - s * cy1 + mid.x(), s * cx1 + c * cy1 + mid.y());
    auto angle = [](double ux, double uy, double vx, double vy) {
        return std::atan2(ux * vy - uy * vx, ux * vx + uy * vy);
    };
    const double t1 = angle(1, 0, (x1 - cx1) / rx, (y1 - cy1) / ry);
    double dt = angle((x1 - cx1) / rx, (y1 - cy1) / ry, (-x1 - cx1) / rx, (-y1 - cy1) / ry);
    if (!sweep && dt > 0)
        dt -= 2 * std::numbers::pi;
    else if (sweep && dt < 0)
        dt += 2 * std::numbers::pi;
    for (int i = 1; i <= n; ++i) {
        const double t = t1 + dt * i / n;
        const double ex = rx * std::cos(t), ey = ry * std::sin(t);
        out.push_back(i == n ? p1 : V2(c * ex - s * ey + centre.x(), s * ex + c * ey + centre.y()));
    }
}

} // namespace

PathData parse_path_data(const std::string& d, int curve_samples) {
    if (curve_samples < 1)
        throw Error(Errc::invalid_argument, "path data: curve samples must be >= 1");
    PathLexer lx(d);
    PathData out;
    std::vector<V2> cur;
    V2 pen(0, 0), start(0, 0), last_ctrl(0, 0);
    char prev = 0;
    auto flush = [&](bool closed) {
        if (!cur.empty()) {
            out.subpaths.push_back(to_points(cur));
            out.closed.push_back(closed);
        }
        cur.clear();
    };
    if (lx.done())
        return out;
    if (!lx.at_command())
        lx.fail("path data must start with a command");
    char cmd = 0;
    while (!lx.done()) {
        if (lx.at_command()) {
            cmd = lx.command();
            if (std::string("MmLlHhVvCcSsQqTtAaZz").find(cmd) == std::string::npos)
                lx.fail(std::string("unknown command '") + cmd + "'");
            if (prev == 0 && cmd != 'M' && cmd != 'm')
                lx.fail("path data must start with a moveto");
        } else if (cmd == 0 || cmd == 'Z' || cmd == 'z') {
            lx.fail("numbers without a command");
        }
        const bool rel = std::islower(static_cast<unsigned char>(cmd));
        const V2 base = rel ? pen : V2(0, 0);
        auto point = [&]() -> V2 {
            const double x = lx.number();
            const double y = lx.number();
            return V2(x, y) + base;
        };
        switch (std::toupper(static_cast<unsigned char>(cmd))) {
        case 'M': {
            flush(false);
            pen = point();
            start = pen;
            cur.push_back(pen);
            cmd = rel ? 'l' : 'L'; // further pairs are implicit linetos
            break;
        }
        case 'L':
            pen = point();
            cur.push_back(pen);
            break;
        case 'H':
            pen.x() = lx.number() + (rel ? pen.x() : 0.0);
            cur.push_back(pen);
            break;
        case 'V':
            pen.y() = lx.number() + (rel ? pen.y() : 0.0);
            cur.push_back(pen);
            break;
        case 'C': {
            const V2 c1 = point(), c2 = point(), p = point();
            flatten_cubic(cur, pen, c1, c2, p, curve_samples);
            last_ctrl = c2;
            pen = p;
            break;
        }
        case 'S': {
            const char pu = static_cast<char>(std::toupper(static_cast<unsigned char>(prev)));
            const V2 c1 = (pu == 'C' || pu == 'S') ? V2(2 * pen - last_ctrl) : pen;
            const V2 c2 = point(), p = point();
            flatten_cubic(cur, pen, c1, c2, p, curve_samples);
            last_ctrl = c2;
            pen = p;
            break;
        }
        case 'Q': {
            const V2 q = point(), p = point();
            flatten_cubic(cur, pen, pen + 2.0 / 3.0 * (q - pen), p + 2.0 / 3.0 * (q - p), p, curve_samples);
            last_ctrl = q;
            pen = p;
            break;
        }
        case 'T': {
            const char pu = static_cast<char>(std::toupper(static_cast<unsigned char>(prev)));
            const V2 q = (pu == 'Q' || pu == 'T') ? V2(2 * pen - last_ctrl) : pen;
            const V2 p = point();
            flatten_cubic(cur, pen, pen + 2.0 / 3.0 * (q - pen), p + 2.0 / 3.0 * (q - p), p, curve_samples);
            last_ctrl = q;
            pen = p;
            break;
        }
        case 'A': {
            const double rx = lx.number(), ry = lx.number(), rot = lx.number();
            const bool large = lx.flag(), sweep = lx.flag();
            const V2 p = point();
            flatten_arc(cur, pen, rx, ry, rot, large, sweep, p, curve_samples);
            pen = p;
            break;
        }
        case 'Z':
            flush(true);
            pen = start;
            lx.skip_comma_wsp();
            break;
        }
        prev = cmd;
    }
    flush(false);
    return out;
}

// ---------------------------------------------------------------- import

namespace {

using boost::property_tree::ptree;

Eigen::VectorXd parse_color(const std::string& v) {
    std::string s = v;
    if (s.size() == 4 && s[0] == '#')
        s = std::string("#") + s[1] + s[1] + s[2] + s[2] + s[3] + s[3];
    if (s == "black")
        s = "#000000";
    else if (s == "white")
        s = "#ffffff";
    const Eigen::MatrixXd m = parse_palette(s);
    return m.row(0).transpose();
}

double attr_double(const ptree& attrs, const std::string& key, double fallback) {
    const auto v = attrs.get_optional<std::string>(key);
    if (!v)
        return fallback;
    double out = 0.0;
    const auto r = std::from_chars(v->data(), v->data() + v->size(), out);
    if (r.ec != std::errc())
        throw Error(Errc::parse, "svg: attribute " + key + " is not a number");
    return out;
}

void walk(const ptree& node, bool hidden, SvgDocument& doc, int samples) {
    for (const auto& [tag, child] : node) {
        if (tag == "<xmlattr>" || tag == "<xmlcomment>")
            continue;
        const ptree empty;
        const ptree& attrs = child.get_child("<xmlattr>", empty);
        const bool h = hidden || attrs.get<std::string>("display", "") == "none";
        if (tag == "g") {
            walk(child, h, doc, samples);
        } else if (tag == "metadata") {
            doc.metadata = child.get_value<std::string>();
        } else if (tag == "rect" && attrs.get<std::string>("id", "") == "background") {
            doc.background = parse_color(attrs.get<std::string>("fill", "#ffffff"));
        } else if (tag == "path") {
            SvgShape shape;
            shape.geometry = parse_path_data(attrs.get<std::string>("d", ""), samples);
            const std::string fill = attrs.get<std::string>("fill", "#000000");
            shape.filled = fill != "none";
            const std::string paint = shape.filled ? fill : attrs.get<std::string>("stroke", "#000000");
            shape.color = paint == "none" ? Eigen::VectorXd::Zero(3) : parse_color(paint);
            shape.opacity = attr_double(attrs, shape.filled ? "fill-opacity" : "stroke-opacity", 1.0);
            shape.hidden = h;
            doc.shapes.push_back(std::move(shape));
        }
    }
}

} // namespace

SvgDocument parse_svg(const std::string& text, int curve_samples) {
    ptree tree;
    try {
        std::istringstream in(text);
        boost::property_tree::read_xml(in, tree);
    } catch (const boost::property_tree::xml_parser_error& e) {
        throw Error(Errc::parse, std::string("svg: ") + e.what());
    }
    const auto svg = tree.get_child_optional("svg");
    if (!svg)
        throw Error(Errc::parse, "svg: missing <svg> root element");
    SvgDocument doc;
    const ptree empty;
    const ptree& attrs = svg->get_child("<xmlattr>", empty);
    doc.width = static_cast<int>(attr_double(attrs, "width", 0));
    doc.height = static_cast<int>(attr_double(attrs, "height", 0));
    doc.background = Eigen::VectorXd::Ones(3);
    walk(*svg, false, doc, curve_samples);
    return doc;
}

std::vector<Drawable> svg_drawables(const SvgDocument& doc, int channels) {
    if (channels != 1 && channels != 3)
        throw Error(Errc::invalid_argument, "svg_drawables: channels must be 1 or 3");
    std::vector<Drawable> out;
    for (const SvgShape& s : doc.shapes) {
        if (s.hidden || !s.filled || s.geometry.subpaths.empty())
            continue;
        // Rings are joined through their first points; the bridges cancel
        // in the winding number.
        std::vector<V2> ring;
        for (const Points2& sp : s.geometry.subpaths) {
            for (Eigen::Index i = 0; i < sp.rows(); ++i)
                ring.push_back(sp.row(i));
            ring.push_back(sp.row(0));
        }
        if (s.geometry.subpaths.size() > 1)
            ring.push_back(ring.front());
        Drawable d;
        d.kind = DrawKind::fill;
        d.polyline = to_points(ring);
        d.color = channels == 3 ? s.color : Eigen::VectorXd::Constant(1, s.color.mean());
        d.opacity = s.opacity;
        out.push_back(std::move(d));
    }
    return out;
}

Scene import_svg(const std::string& text) {
    const SvgDocument doc = parse_svg(text);
    if (!doc.metadata)
        throw Error(Errc::unsupported, "svg: no embedded scene metadata");
    return scene_from_json(*doc.metadata);
}

} // namespace bsvg
