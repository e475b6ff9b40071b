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

// The optimization loop.
//
// Every step maps key-points to render samples through fixed sparse
// matrices (padding or wrap, B-spline to cubic conversion, chain sampling),
// renders, evaluates the enabled loss terms and pulls their gradients back
// through the transposed matrices. Parameters are updated with Adam under a
// cosine learning-rate schedule, one schedule per parameter group, and stroke
// radii are clipped to [w_min, w_max] after every update.

#include <bsvg/objectives.hpp>
#include <bsvg/scene.hpp>
#include <bsvg/smoothing.hpp>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace bsvg {

struct AdamConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct AdamState {
    Eigen::VectorXd m;
    Eigen::VectorXd v;
    int t = 0;
};

/// One Adam update in place. Errc::dimension_mismatch on size mismatch,
/// Errc::numeric for a non-finite gradient.
void adam_step(Eigen::Ref<Eigen::VectorXd> params, const Eigen::Ref<const Eigen::VectorXd>& grads,
               AdamState& state, double lr, const AdamConfig& config = {});

/// lr_min + (lr_base - lr_min)(1 + cos(pi step / total)) / 2.
double cosine_lr(int step, int total, double lr_base, double lr_min);

/// Loss terms that can take part in a job.
enum Term : unsigned {
    term_mse = 1u << 0,
    term_smooth = 1u << 1,
    term_box = 1u << 2,
    term_repulsion = 1u << 3,
    term_overlap = 1u << 4,
    term_align = 1u << 5,
    term_balance = 1u << 6,
    term_external = 1u << 7,
};

struct LearningRates {
    double positions = 1.0;
    double widths = 0.1;
    double colors = 0.02;
    double logits = 0.02;
    double min_ratio = 0.01; ///< final lr as a fraction of the base lr
};

struct OptimJob {
    Scene scene;
    std::optional<Canvas> target;
    unsigned terms = term_mse | term_smooth | term_box;
    LossWeights weights;
    int steps = 300;
    LearningRates lr;
    AdamConfig adam;
    double w_min = 0.0;
    double w_max = 8.0;
    int samples_per_span = default_samples_per_span;
    int smooth_order = 3;
    GramMode smooth_mode = GramMode::exact;
    int mse_levels = 4;
    BoxPenalty box_penalty = BoxPenalty::relu;
    RepulsionOptions repulsion;
    double tau_start = 1.0;
    double tau_end = 0.05;
    double gumbel_scale = 0.15;
    bool optimize_positions = true;
    bool optimize_widths = true;
    bool optimize_colors = false;
    RasterSettings raster;
    std::uint64_t seed = 0;
    GradientProvider provider;
};

/// Errc::invalid_argument naming the first invalid setting.
void validate_job(const OptimJob& job);

struct TraceRow {
    int step = 0;
    std::vector<double> values; ///< raw term values, in `RunResult::columns` order
    double total = 0.0;
};

struct RunResult {
    Scene scene;              ///< final (or last finite) scene
    std::vector<std::string> columns;
    std::vector<TraceRow> trace;
    bool aborted = false;
    std::string message;
};

/// Flat view of all optimizable parameters of a scene.
struct ParamVector {
    Eigen::VectorXd values;
    std::vector<Eigen::Index> path_offsets; ///< start of each path's key-points
    Eigen::Index colors_offset = 0;
    Eigen::Index logits_offset = 0;
};

/// Loss evaluation for a fixed job. Precomputes every linear map once.
class Evaluator {
public:
    explicit Evaluator(const OptimJob& job);
    ~Evaluator();
    Evaluator(Evaluator&&) noexcept;

    /// Names of the enabled terms with non-zero weight, in trace order.
    const std::vector<std::string>& columns() const;

    struct Result {
        double total = 0.0;
        std::vector<double> values;
        Scene grad;  ///< d total / d parameter, same layout as the scene
        Canvas render;
    };

    /// Loss and gradient at `scene` for optimisation step `step` (sets the
    /// temperature and noise stream). Errc::numeric when a term is not finite.
    Result evaluate(const Scene& scene, int step) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

struct RunCallbacks {
    /// Called after each update with the new step index and scene.
    std::function<void(int, const Scene&)> on_step;
};

/// Runs the job. The trace holds steps + 1 rows: the loss before every
/// update and after the last one. A non-finite loss or gradient stops the
/// run with `aborted` set and the last finite scene returned.
RunResult run(const OptimJob& job, const RunCallbacks& callbacks = {});

/// "step,<columns...>,total" with %.17g values.
std::string trace_csv(const RunResult& result);

/// Level-0 mean squared error between a render and a target.
double mse_level0(const Canvas& a, const Canvas& b);

/// Dimensionless jerk of every stroke's sampled centreline, averaged.
double scene_jerk(const Scene& scene, int samples_per_span);

} // namespace bsvg
