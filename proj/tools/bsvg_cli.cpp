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


// Command-line front end. Uses only the C interface of libbsvg.

#include <bsvg/bsvg.h>

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <memory>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

namespace {

constexpr int exit_error = 1;
constexpr int exit_aborted = 3;

// Flags that map one to one onto configuration keys.
struct KeyFlag {
    const char* flag;
    const char* key;
    const char* help;
};

const KeyFlag key_flags[] = {
    {"--target", "input.target", "Target PNG image"},
    {"--saliency", "input.saliency", "Saliency PNG for area seeding"},
    {"--init", "input.init", "Initial scene (JSON or SVG) instead of seeding"},
    {"--opacity", "input.opacity", "Target opacity in (0, 1]"},
    {"--background", "scene.background", "Background color #rrggbb"},
    {"--stroke-color", "scene.stroke_color", "Stroke color #rrggbb"},
    {"--palette", "palette.colors", "Comma-separated palette, e.g. \"#112233,#aabbcc\""},
    {"--k", "palette.k", "Palette size (k-means when no palette is given)"},
    {"--steps", "optim.steps", "Optimisation steps"},
    {"--seed", "optim.seed", "Random seed"},
    {"--lambda-smooth", "weights.smooth", "Smoothness weight"},
    {"--lambda-box", "weights.box", "Canvas bounds weight"},
    {"--lambda-repulsion", "weights.repulsion", "Self-repulsion weight"},
    {"--lambda-coverage", "weights.coverage", "Image coverage (MSE) weight"},
    {"--lambda-overlap", "weights.overlap", "Overlap weight"},
    {"--lambda-align", "weights.align", "Alignment weight"},
    {"--lambda-balance", "weights.balance", "Palette balance weight"},
    {"--lambda-external", "weights.external", "External provider weight"},
    {"--paths", "seeding.paths", "Number of stroke paths"},
    {"--keypoints", "seeding.keypoints", "Key-points per path"},
    {"--areas", "seeding.areas", "Number of closed areas"},
    {"--width", "seeding.width", "Initial stroke radius"},
    {"--degree", "spline.degree", "Spline degree (3 or 5)"},
    {"--closed", "spline.closed", "Closed paths (true/false)"},
    {"--samples", "spline.samples_per_span", "Samples per spline span"},
    {"--order", "smoothing.order", "Smoothing derivative order"},
    {"--mode", "smoothing.mode", "Smoothing mode: exact or pspline"},
    {"--w-min", "optim.w_min", "Minimum stroke radius"},
    {"--w-max", "optim.w_max", "Maximum stroke radius"},
    {"--provider", "provider.command", "External gradient provider command"},
    {"--checkpoint-every", "output.checkpoint_every", "Write SVG and PNG checkpoints every N steps"},
};

int report(bsvg_status status, const std::string& what) {
    std::cerr << "bsvg: " << what << ": " << bsvg_last_error() << " (" << bsvg_status_name(status) << ")\n";
    return exit_error;
}

std::string with_extension(const std::string& path, const std::string& ext) {
    return std::filesystem::path(path).replace_extension(ext).string();
}

struct CheckpointSink {
    std::string stem;
    int every = 0;
    int failures = 0;
};

void checkpoint(int step, const bsvg_scene* scene, void* user) {
    auto* sink = static_cast<CheckpointSink*>(user);
    if (sink->every <= 0 || step % sink->every != 0)
        return;
    char suffix[32];
    std::snprintf(suffix, sizeof suffix, "_step%05d", step);
    const std::string base = sink->stem + suffix;
    if (bsvg_scene_save_svg(scene, (base + ".svg").c_str(), 8) != BSVG_OK ||
        bsvg_scene_render_png(scene, (base + ".png").c_str(), 8) != BSVG_OK) {
        std::cerr << "bsvg: checkpoint " << step << ": " << bsvg_last_error() << "\n";
        ++sink->failures;
    }
}

int run_job(const std::string& command, const std::string& config_path, const std::map<std::string, std::string>& sets,
            const std::string& out, std::string trace) {
    bsvg_config* cfg = nullptr;
    bsvg_status st = config_path.empty() ? bsvg_config_new(&cfg) : bsvg_config_load(config_path.c_str(), &cfg);
    if (st != BSVG_OK)
        return report(st, "config");
    std::unique_ptr<bsvg_config, void (*)(bsvg_config*)> cfg_guard(cfg, bsvg_config_free);
    for (const auto& [key, value] : sets)
        if ((st = bsvg_config_set(cfg, key.c_str(), value.c_str())) != BSVG_OK)
            return report(st, "option");
    if ((st = bsvg_config_validate(cfg)) != BSVG_OK)
        return report(st, "config");

    CheckpointSink sink;
    sink.stem = with_extension(out, "");
    char every[32] = {0};
    if ((st = bsvg_config_get(cfg, "output.checkpoint_every", every, sizeof every, nullptr)) != BSVG_OK)
        return report(st, "config");
    sink.every = std::atoi(every);

    bsvg_result* res = nullptr;
    if ((st = bsvg_run(cfg, command.c_str(), checkpoint, &sink, &res)) != BSVG_OK)
        return report(st, command);
    std::unique_ptr<bsvg_result, void (*)(bsvg_result*)> res_guard(res, bsvg_result_free);

    const bsvg_scene* scene = bsvg_result_scene(res);
    if (trace.empty())
        trace = with_extension(out, ".csv");
    {
        std::ofstream f(trace, std::ios::binary);
        f << bsvg_result_trace_csv(res);
        if (!f) {
            std::cerr << "bsvg: cannot write " << trace << "\n";
            return exit_error;
        }
    }
    if ((st = bsvg_scene_save_svg(scene, out.c_str(), 8)) != BSVG_OK)
        return report(st, "svg");
    if ((st = bsvg_scene_save_json(scene, with_extension(out, ".json").c_str())) != BSVG_OK)
        return report(st, "scene");
    if ((st = bsvg_scene_render_png(scene, with_extension(out, ".png").c_str(), 8)) != BSVG_OK)
        return report(st, "preview");
    if (bsvg_result_aborted(res)) {
        std::cerr << "bsvg: run aborted: " << bsvg_result_message(res) << "\n";
        return exit_aborted;
    }
    return sink.failures ? exit_error : 0;
}

int convert(const std::string& input, const std::string& out, int samples, bool to_png) {
    bsvg_scene* scene = nullptr;
    bsvg_status st = bsvg_scene_load(input.c_str(), &scene);
    if (st != BSVG_OK)
        return report(st, input);
    std::unique_ptr<bsvg_scene, void (*)(bsvg_scene*)> guard(scene, bsvg_scene_free);
    st = to_png ? bsvg_scene_render_png(scene, out.c_str(), samples)
                : bsvg_scene_save_svg(scene, out.c_str(), samples);
    return st == BSVG_OK ? 0 : report(st, out);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Smooth B-spline vector graphics from raster targets"};
    app.set_version_flag("--version", std::string(bsvg_version()));
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);

    std::string config_path, out, trace;
    std::map<std::string, std::string> values;
    std::vector<std::pair<CLI::Option*, const KeyFlag*>> bound;

    for (const char* name : {"fill", "abstract", "areas"}) {
        static const std::map<std::string, std::string> help = {
            {"fill", "Cover a target image with smooth variable-width strokes"},
            {"abstract", "Fit one stroke to a target (coverage and/or provider gradients)"},
            {"areas", "Vectorize a target into closed areas with quantized colors"}};
        CLI::App* sub = app.add_subcommand(name, help.at(name));
        sub->add_option("--config", config_path, "YAML job configuration")->check(CLI::ExistingFile);
        sub->add_option("--out", out, "Output SVG; .json, .png and .csv siblings are written too")
            ->default_val(std::string(name) + ".svg");
        sub->add_option("--trace", trace, "Trace CSV path (default: next to --out)");
        for (const KeyFlag& kf : key_flags) {
            CLI::Option* opt = sub->add_option(kf.flag, values[kf.key], kf.help);
            bound.emplace_back(opt, &kf);
        }
    }

    std::string input;
    int samples = 8;
    CLI::App* render = app.add_subcommand("render", "Rasterize a saved scene to PNG");
    render->add_option("scene", input, "Scene JSON or SVG")->required()->check(CLI::ExistingFile);
    render->add_option("--out", out, "Output PNG")->required();
    render->add_option("--samples", samples, "Samples per spline span")->check(CLI::PositiveNumber);
    CLI::App* exporter = app.add_subcommand("export", "Write a saved scene as SVG");
    exporter->add_option("scene", input, "Scene JSON or SVG")->required()->check(CLI::ExistingFile);
    exporter->add_option("--out", out, "Output SVG")->required();
    exporter->add_option("--samples", samples, "Samples per spline span")->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    if (render->parsed())
        return convert(input, out, samples, true);
    if (exporter->parsed())
        return convert(input, out, samples, false);

    std::map<std::string, std::string> sets;
    for (const auto& [opt, kf] : bound)
        if (opt->count() > 0)
            sets[kf->key] = values[kf->key];
    for (CLI::App* sub : app.get_subcommands())
        return run_job(sub->get_name(), config_path, sets, out, trace);
    return exit_error;
}
