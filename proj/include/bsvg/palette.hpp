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

// Quantized coloring: each area holds logits over a fixed palette and is
// colored by a Gumbel-softmax relaxation during optimization, then by the
// argmax color on export.

#include <bsvg/raster.hpp>

#include <string>
#include <vector>

namespace bsvg {

inline constexpr double default_gumbel_scale = 0.15;

struct SoftAssignment {
    Eigen::VectorXd weights; ///< a, on the simplex
    Eigen::VectorXd color;   ///< a^T V
    Eigen::VectorXd noise;   ///< the Gumbel sample g
};

/// a = softmax((logits + g) / tau), g_k = -beta log(-log U_k).
/// Errc::invalid_argument for tau <= 0, beta < 0 or fewer than 2 colors.
SoftAssignment soft_assign(const Eigen::VectorXd& logits, const Eigen::MatrixXd& palette, double tau,
                           double beta, Rng& rng);

/// Gradient with respect to the logits given dL/da.
Eigen::VectorXd soft_assign_backward(const SoftAssignment& s, double tau, const Eigen::VectorXd& grad_weights);

struct BalanceLoss {
    double value = 0.0;
    Eigen::MatrixXd grad; ///< one row per area, dL/da_i
};

/// lambda * || mean_i a_i - 1/K ||^2. Rows of `assignments` are the a_i.
BalanceLoss balance_reg(const Eigen::MatrixXd& assignments, double lambda);

/// tau_start (tau_end / tau_start)^(step / total).
double anneal_temperature(int step, int total, double tau_start = 1.0, double tau_end = 0.05);

/// argmax with ties resolved to the lowest index.
int hard_index(const Eigen::VectorXd& logits);
Eigen::VectorXd hard_assign(const Eigen::VectorXd& logits, const Eigen::MatrixXd& palette);

/// "#rrggbb,#rrggbb,..." into a K x 3 matrix in [0, 1]. Errc::parse on bad input.
Eigen::MatrixXd parse_palette(const std::string& text);
std::string to_hex(const Eigen::VectorXd& rgb);

/// K representative colors of an image by seeded k-means++ and Lloyd
/// iterations. Output rows are sorted by luma.
Eigen::MatrixXd kmeans_palette(const Canvas& image, int k, Rng& rng, int iterations = 20);

} // namespace bsvg
