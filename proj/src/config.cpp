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

#include <bsvg/config.hpp>
#include <bsvg/image_io.hpp>
#include <bsvg/palette.hpp>

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <cmath>
#include <functional>

namespace bsvg {

namespace {

using Setter = std::function<void(Config&, const std::string&)>;
using Getter = std::function<std::string(const Config&)>;

struct Field {
    Setter set;
    Getter get;
};

// Shortest text that parses back to the same double.
std::string show(double v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

double to_double(const std::string& v) {
    double out = 0.0;
    const char* end = v.data() + v.size();
    const auto r = std::from_chars(v.data(), end, out);
    if (r.ec != std::errc() || r.ptr != end || !std::isfinite(out))
        throw Error(Errc::parse, "expected a number, got '" + v + "'");
    return out;
}

long long to_int(const std::string& v) {
    long long out = 0;
    const char* end = v.data() + v.size();
    const auto r = std::from_chars(v.data(), end, out);
    if (r.ec != std::errc() || r.ptr != end)
        throw Error(Errc::parse, "expected an integer, got '" + v + "'");
    return out;
}

bool to_bool(const std::string& v) {
    if (v == "true" || v == "yes" || v == "on" || v == "1")
        return true;
    if (v == "false" || v == "no" || v == "off" || v == "0")
        return false;
    throw Error(Errc::parse, "expected true or false, got '" + v + "'");
}

template <class T> Field num(T Config::*m) {
    return {[m](Config& c, const std::string& v) {
                if constexpr (std::is_same_v<T, double>)
                    c.*m = to_double(v);
                else
                    c.*m = static_cast<T>(to_int(v));
            },
            [m](const Config& c) {
                if constexpr (std::is_same_v<T, double>)
                    return show(c.*m);
                else
                    return std::to_string(c.*m);
            }};
}

Field weight(double LossWeights::*m) {
    return {[m](Config& c, const std::string& v) { c.weights.*m = to_double(v); },
            [m](const Config& c) { return show(c.weights.*m); }};
}

Field text(std::string Config::*m) {
    return {[m](Config& c, const std::string& v) { c.*m = v; }, [m](const Config& c) { return c.*m; }};
}

Field flag(bool Config::*m) {
    return {[m](Config& c, const std::string& v) { c.*m = to_bool(v); },
            [m](const Config& c) { return std::string(c.*m ? "true" : "false"); }};
}

const std::vector<std::pair<std::string, Field>>& table() {
    static const std::vector<std::pair<std::string, Field>> t = {
        {"input.target", text(&Config::target)},
        {"input.saliency", text(&Config::saliency)},
        {"input.init", text(&Config::init)},
        {"input.opacity", num(&Config::opacity)},
        {"input.color", flag(&Config::color)},
        {"scene.background", text(&Config::background)},
        {"scene.stroke_color", text(&Config::stroke_color)},
        {"spline.degree", num(&Config::degree)},
        {"spline.multiplicity", num(&Config::multiplicity)},
        {"spline.closed", flag(&Config::closed)},
        {"spline.samples_per_span", num(&Config::samples_per_span)},
        {"smoothing.order", num(&Config::order)},
        {"smoothing.mode",
         {[](Config& c, const std::string& v) {
              if (v == "exact")
                  c.mode = GramMode::exact;
              else if (v == "pspline")
                  c.mode = GramMode::pspline;
              else
                  throw Error(Errc::parse, "expected exact or pspline, got '" + v + "'");
          },
          [](const Config& c) { return std::string(c.mode == GramMode::exact ? "exact" : "pspline"); }}},
        {"weights.smooth", weight(&LossWeights::smooth)},
        {"weights.box", weight(&LossWeights::box)},
        {"weights.repulsion", weight(&LossWeights::repulsion)},
        {"weights.coverage", weight(&LossWeights::coverage)},
        {"weights.overlap", weight(&LossWeights::overlap)},
        {"weights.align", weight(&LossWeights::align)},
        {"weights.balance", weight(&LossWeights::balance)},
        {"weights.external", weight(&LossWeights::external)},
        {"optim.steps", num(&Config::steps)},
        {"optim.seed",
         {[](Config& c, const std::string& v) {
              const long long s = to_int(v);
              if (s < 0)
                  throw Error(Errc::parse, "seed must be non-negative");
              c.seed = static_cast<std::uint64_t>(s);
          },
          [](const Config& c) { return std::to_string(c.seed); }}},
        {"optim.lr_positions", num(&Config::lr_positions)},
        {"optim.lr_widths", num(&Config::lr_widths)},
        {"optim.lr_colors", num(&Config::lr_colors)},
        {"optim.lr_logits", num(&Config::lr_logits)},
        {"optim.lr_min_ratio", num(&Config::lr_min_ratio)},
        {"optim.w_min", num(&Config::w_min)},
        {"optim.w_max", num(&Config::w_max)},
        {"optim.beta1", num(&Config::beta1)},
        {"optim.beta2", num(&Config::beta2)},
        {"optim.eps", num(&Config::eps)},
        {"optim.optimize_widths", flag(&Config::optimize_widths)},
        {"optim.optimize_colors", flag(&Config::optimize_colors)},
        {"optim.box_penalty",
         {[](Config& c, const std::string& v) {
              if (v == "relu")
                  c.box_penalty = BoxPenalty::relu;
              else if (v == "softplus")
                  c.box_penalty = BoxPenalty::softplus;
              else
                  throw Error(Errc::parse, "expected relu or softplus, got '" + v + "'");
          },
          [](const Config& c) { return std::string(c.box_penalty == BoxPenalty::relu ? "relu" : "softplus"); }}},
        {"optim.mse_levels", num(&Config::mse_levels)},
        {"seeding.paths", num(&Config::paths)},
        {"seeding.keypoints", num(&Config::keypoints)},
        {"seeding.width", num(&Config::width)},
        {"seeding.areas", num(&Config::areas)},
        {"seeding.subdivide", num(&Config::subdivide)},
        {"seeding.iterations", num(&Config::iterations)},
        {"palette.colors", text(&Config::colors)},
        {"palette.k", num(&Config::k)},
        {"palette.tau_start", num(&Config::tau_start)},
        {"palette.tau_end", num(&Config::tau_end)},
        {"palette.gumbel_scale", num(&Config::gumbel_scale)},
        {"provider.command", text(&Config::command)},
        {"output.checkpoint_every", num(&Config::checkpoint_every)},
    };
    return t;
}

} // namespace

const std::vector<std::string>& Config::keys() {
    static const std::vector<std::string> k = [] {
        std::vector<std::string> out;
        for (const auto& e : table())
            out.push_back(e.first);
        return out;
    }();
    return k;
}

void Config::set(const std::string& key, const std::string& value) {
    for (const auto& [name, field] : table())
        if (name == key) {
            try {
                field.set(*this, value);
            } catch (const Error& e) {
                throw Error(Errc::parse, key + ": " + e.what());
            }
            return;
        }
    throw Error(Errc::parse, "unknown configuration key '" + key + "'");
}

std::string Config::get(const std::string& key) const {
    for (const auto& [name, field] : table())
        if (name == key)
            return field.get(*this);
    throw Error(Errc::invalid_argument, "unknown configuration key '" + key + "'");
}

void Config::validate() const {
    auto fail = [this](const std::string& key, const std::string& msg) {
        const auto it = lines.find(key);
        const std::string where =
            it != lines.end() ? source + ":" + std::to_string(it->second) + ": " : std::string();
        throw Error(Errc::invalid_argument, where + key + ": " + msg);
    };
    if (order < 1 || order > degree - 1)
        fail(lines.count("smoothing.order") ? "smoothing.order" : "spline.degree",
             "smoothing order " + std::to_string(order) + " needs 1 <= d <= degree - 1 = " +
                 std::to_string(degree - 1));
    if (degree != 3 && degree != 5)
        fail("spline.degree", "must be 3 or 5");
    if (multiplicity < 1)
        fail("spline.multiplicity", "must be >= 1");
    if (samples_per_span < 1)
        fail("spline.samples_per_span", "must be >= 1");
    if (!(opacity > 0.0 && opacity <= 1.0))
        fail("input.opacity", "must lie in (0, 1]");
    const std::pair<const char*, double> ws[] = {
        {"weights.smooth", weights.smooth},       {"weights.box", weights.box},
        {"weights.repulsion", weights.repulsion}, {"weights.coverage", weights.coverage},
        {"weights.overlap", weights.overlap},     {"weights.align", weights.align},
        {"weights.balance", weights.balance},     {"weights.external", weights.external}};
    for (const auto& [k, v] : ws)
        if (v < 0.0)
            fail(k, "must be non-negative");
    if (steps < 1)
        fail("optim.steps", "must be >= 1");
    const std::pair<const char*, double> lrs[] = {{"optim.lr_positions", lr_positions},
                                                  {"optim.lr_widths", lr_widths},
                                                  {"optim.lr_colors", lr_colors},
                                                  {"optim.lr_logits", lr_logits}};
    for (const auto& [k, v] : lrs)
        if (!(v > 0.0))
            fail(k, "must be positive");
    if (!(lr_min_ratio >= 0.0 && lr_min_ratio <= 1.0))
        fail("optim.lr_min_ratio", "must lie in [0, 1]");
    if (w_min < 0.0)
        fail("optim.w_min", "must be >= 0");
    if (w_max < w_min)
        fail("optim.w_max", "must be >= w_min");
    if (!(beta1 >= 0.0 && beta1 < 1.0))
        fail("optim.beta1", "must lie in [0, 1)");
    if (!(beta2 >= 0.0 && beta2 < 1.0))
        fail("optim.beta2", "must lie in [0, 1)");
    if (!(eps > 0.0))
        fail("optim.eps", "must be positive");
    if (mse_levels < 1)
        fail("optim.mse_levels", "must be >= 1");
    if (paths < 1)
        fail("seeding.paths", "must be >= 1");
    if (keypoints < (closed ? 3 : 2))
        fail("seeding.keypoints", "too few key-points");
    if (width < 0.0)
        fail("seeding.width", "must be >= 0");
    if (areas < 1)
        fail("seeding.areas", "must be >= 1");
    if (subdivide < 1)
        fail("seeding.subdivide", "must be >= 1");
    if (iterations < 0)
        fail("seeding.iterations", "must be >= 0");
    if (k < 0 || k == 1)
        fail("palette.k", "must be 0 (use the given colors) or >= 2");
    if (!(tau_start > 0.0) || !(tau_end > 0.0))
        fail("palette.tau_start", "temperatures must be positive");
    if (gumbel_scale < 0.0)
        fail("palette.gumbel_scale", "must be >= 0");
    if (checkpoint_every < 0)
        fail("output.checkpoint_every", "must be >= 0");
    for (const char* key : {"scene.background", "scene.stroke_color"}) {
        try {
            parse_palette(key[6] == 'b' ? background : stroke_color);
        } catch (const Error&) {
            fail(key, "expected a color such as #rrggbb");
        }
    }
    if (!colors.empty()) {
        try {
            const Eigen::Index n = parse_palette(colors).rows();
            if (n < 2)
                fail("palette.colors", "needs at least two colors");
            if (k > 0 && k != n)
                fail("palette.k", "differs from the number of palette colors");
        } catch (const Error& e) {
            if (e.code() == Errc::invalid_argument)
                throw;
            fail("palette.colors", e.what());
        }
    }
}

Config parse_config(const std::string& text, const std::string& source) {
    Config cfg;
    cfg.source = source;
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw Error(Errc::parse, source + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
    }
    auto at = [&](const YAML::Node& n) { return source + ":" + std::to_string(n.Mark().line + 1) + ": "; };
    if (root.IsNull())
        return cfg;
    if (!root.IsMap())
        throw Error(Errc::parse, at(root) + "expected a mapping of sections");
    for (const auto& section : root) {
        const std::string sname = section.first.Scalar();
        if (!section.second.IsMap())
            throw Error(Errc::parse, at(section.first) + "section '" + sname + "' must be a mapping");
        for (const auto& kv : section.second) {
            const std::string key = sname + "." + kv.first.Scalar();
            if (!kv.second.IsScalar())
                throw Error(Errc::parse, at(kv.first) + key + ": expected a scalar value");
            try {
                cfg.set(key, kv.second.Scalar());
            } catch (const Error& e) {
                throw Error(Errc::parse, at(kv.first) + e.what());
            }
            cfg.lines[key] = kv.first.Mark().line + 1;
        }
    }
    return cfg;
}

Config load_config(const std::string& path) {
    const std::vector<unsigned char> bytes = read_file(path);
    return parse_config(std::string(bytes.begin(), bytes.end()), path);
}

} // namespace bsvg
