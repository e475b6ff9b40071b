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

#pragma once

// Job configuration. Files are YAML mappings of sections to flat key/value
// pairs, for example
//
//   input:
//     target: letter.png
//   weights:
//     smooth: 10
//
// Every key can also be set as "section.key" from the command line.

#include <bsvg/objectives.hpp>
#include <bsvg/smoothing.hpp>

#include <map>
#include <string>
#include <vector>

namespace bsvg {

struct Config {
    // input
    std::string target;
    std::string saliency;
    std::string init;       ///< optional scene to start from
    double opacity = 1.0;   ///< target opacity
    bool color = false;     ///< keep RGB for fill and abstract
    // scene
    std::string background = "#ffffff";
    std::string stroke_color = "#000000";
    // spline
    int degree = 5;
    int multiplicity = 1;
    bool closed = false;
    int samples_per_span = 8;
    // smoothing
    int order = 3;
    GramMode mode = GramMode::exact;
    // weights
    LossWeights weights{1.0, 1.0, 0.0, 1.0, 0.0, 0.0, 1.0, 1.0};
    // optim
    int steps = 300;
    std::uint64_t seed = 0;
    double lr_positions = 1.0;
    double lr_widths = 0.1;
    double lr_colors = 0.02;
    double lr_logits = 0.02;
    double lr_min_ratio = 0.01;
    double w_min = 0.0;
    double w_max = 8.0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    bool optimize_widths = true;
    bool optimize_colors = false;
    BoxPenalty box_penalty = BoxPenalty::relu;
    int mse_levels = 4;
    // seeding
    int paths = 1;
    int keypoints = 48;
    double width = 1.5;
    int areas = 12;
    int subdivide = 1;
    int iterations = 50;
    // palette
    std::string colors;
    int k = 0;
    double tau_start = 1.0;
    double tau_end = 0.05;
    double gumbel_scale = 0.15;
    // provider
    std::string command;
    // output
    int checkpoint_every = 0;

    /// Sets "section.key" from text. Errc::parse for an unknown key or a
    /// malformed value.
    void set(const std::string& key, const std::string& value);
    /// Current value of "section.key" as text that `set` accepts back.
    /// Errc::invalid_argument for an unknown key.
    std::string get(const std::string& key) const;

    /// Errc::invalid_argument naming the offending key, with its line when
    /// the value came from a file.
    void validate() const;

    /// All documented keys, in file order.
    static const std::vector<std::string>& keys();

    /// Line of each key read from a file (for diagnostics).
    std::map<std::string, int> lines;
    std::string source;
};

/// Parses YAML text. Errors carry "<source>:<line>:" prefixes.
Config parse_config(const std::string& text, const std::string& source = "config");
Config load_config(const std::string& path);

} // namespace bsvg
