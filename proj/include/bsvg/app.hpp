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

// Job preparation for the three applications:
//   fill      strokes covering a target image, seeded by stippling and a
//             TSP tour over the target's ink
//   abstract  a single stroke driven by the coverage term and/or an
//             external gradient provider
//   areas     closed filled areas seeded from a saliency map, colored from
//             a small palette through relaxed categorical assignment

#include <bsvg/config.hpp>
#include <bsvg/engine.hpp>

#include <string>

namespace bsvg {

enum class Command { fill, abstract, areas };

/// Errc::invalid_argument for an unknown name.
Command parse_command(const std::string& name);

/// Loads the inputs named by `config`, seeds the initial scene and fills in
/// every optimisation setting. The config is validated first.
OptimJob prepare_job(const Config& config, Command command);

/// Seeding only: the initial scene for a target (already converted to the
/// job's channel count) and background.
Scene seed_scene(const Config& config, Command command, const Canvas& target, const Eigen::VectorXd& background,
                 const Canvas* saliency = nullptr);

/// sum over pixels and channels of |background - render|.
double total_ink(const Canvas& render, const Eigen::VectorXd& background);

} // namespace bsvg
