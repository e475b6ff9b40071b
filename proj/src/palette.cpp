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

#include <bsvg/palette.hpp>
#include <bsvg/image_io.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

namespace bsvg {

SoftAssignment soft_assign(const Eigen::VectorXd& logits, const Eigen::MatrixXd& palette, double tau,
                           double beta, Rng& rng) {
    if (!(tau > 0.0))
        throw Error(Errc::invalid_argument, "soft_assign: temperature must be positive");
    if (!(beta >= 0.0))
        throw Error(Errc::invalid_argument, "soft_assign: Gumbel scale must be non-negative");
    const Eigen::Index K = logits.size();
    if (K < 2 || palette.rows() != K)
        throw Error(Errc::dimension_mismatch, "soft_assign: logits and palette disagree (K >= 2)");
    SoftAssignment s;
    s.noise = Eigen::VectorXd::Zero(K);
    if (beta > 0.0)
        for (Eigen::Index k = 0; k < K; ++k)
            s.noise(k) = -beta * std::log(-std::log(rng.uniform_open()));
    const Eigen::VectorXd z = (logits + s.noise) / tau;
    const Eigen::VectorXd e = (z.array() - z.maxCoeff()).exp();
    s.weights = e / e.sum();
    s.color = palette.transpose() * s.weights;
    return s;
}

Eigen::VectorXd soft_assign_backward(const SoftAssignment& s, double tau, const Eigen::VectorXd& g) {
    const Eigen::VectorXd& a = s.weights;
    return (a.array() * (g.array() - a.dot(g))).matrix() / tau;
}

BalanceLoss balance_reg(const Eigen::MatrixXd& A, double lambda) {
    if (A.rows() < 1)
        throw Error(Errc::invalid_argument, "balance_reg: need at least one area");
    const double K = static_cast<double>(A.cols());
    const Eigen::RowVectorXd dev = A.colwise().mean().array() - 1.0 / K;
    BalanceLoss out;
    out.value = lambda * dev.squaredNorm();
    out.grad = (2.0 * lambda / static_cast<double>(A.rows()) * dev).replicate(A.rows(), 1);
    return out;
}

double anneal_temperature(int step, int total, double tau_start, double tau_end) {
    if (total < 1 || step < 0 || step > total)
        throw Error(Errc::invalid_argument, "anneal_temperature: need 0 <= step <= total, total >= 1");
    if (!(tau_end > 0.0) || !(tau_start >= tau_end))
        throw Error(Errc::invalid_argument, "anneal_temperature: need tau_start >= tau_end > 0");
    if (step == 0)
        return tau_start;
    if (step == total)
        return tau_end;
    return tau_start * std::pow(tau_end / tau_start, static_cast<double>(step) / total);
}

int hard_index(const Eigen::VectorXd& logits) {
    if (logits.size() < 1)
        throw Error(Errc::invalid_argument, "hard_index: empty logits");
    int best = 0;
    for (Eigen::Index k = 1; k < logits.size(); ++k)
        if (logits(k) > logits(best))
            best = static_cast<int>(k);
    return best;
}

Eigen::VectorXd hard_assign(const Eigen::VectorXd& logits, const Eigen::MatrixXd& palette) {
    if (palette.rows() != logits.size())
        throw Error(Errc::dimension_mismatch, "hard_assign: logits and palette disagree");
    return palette.row(hard_index(logits)).transpose();
}

Eigen::MatrixXd parse_palette(const std::string& text) {
    std::vector<Eigen::Vector3d> colors;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b == std::string::npos)
            throw Error(Errc::parse, "palette: empty entry");
        item = item.substr(b, e - b + 1);
        if (item.size() != 7 || item[0] != '#' ||
            !std::all_of(item.begin() + 1, item.end(), [](char c) { return std::isxdigit(static_cast<unsigned char>(c)); }))
            throw Error(Errc::parse, "palette: expected #rrggbb, got '" + item + "'");
        Eigen::Vector3d c;
        for (int i = 0; i < 3; ++i)
            c(i) = std::stoi(item.substr(1 + 2 * static_cast<size_t>(i), 2), nullptr, 16) / 255.0;
        colors.push_back(c);
    }
    if (colors.empty())
        throw Error(Errc::parse, "palette: no colors");
    Eigen::MatrixXd V(static_cast<Eigen::Index>(colors.size()), 3);
    for (size_t i = 0; i < colors.size(); ++i)
        V.row(static_cast<Eigen::Index>(i)) = colors[i].transpose();
    return V;
}

std::string to_hex(const Eigen::VectorXd& rgb) {
    auto q = [](double v) { return static_cast<int>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)); };
    char buf[8];
    if (rgb.size() == 1)
        std::snprintf(buf, sizeof buf, "#%02x%02x%02x", q(rgb(0)), q(rgb(0)), q(rgb(0)));
    else
        std::snprintf(buf, sizeof buf, "#%02x%02x%02x", q(rgb(0)), q(rgb(1)), q(rgb(2)));
    return buf;
}

Eigen::MatrixXd kmeans_palette(const Canvas& image, int k, Rng& rng, int iterations) {
    if (k < 1)
        throw Error(Errc::invalid_argument, "kmeans_palette: k must be >= 1");
    const Canvas rgb = to_channels(image, 3);
    const Eigen::Index n = static_cast<Eigen::Index>(rgb.width) * rgb.height;
    if (n < k)
        throw Error(Errc::invalid_argument, "kmeans_palette: fewer pixels than colors");
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>> X(rgb.pixels.data(), n, 3);

    // k-means++ seeding.
    Eigen::MatrixXd C(k, 3);
    C.row(0) = X.row(static_cast<Eigen::Index>(rng.uniform() * static_cast<double>(n)) % n);
    Eigen::VectorXd d2 = (X.rowwise() - C.row(0)).rowwise().squaredNorm();
    for (int c = 1; c < k; ++c) {
        const double total = d2.sum();
        Eigen::Index pick = 0;
        if (total > 0.0) {
            double r = rng.uniform() * total;
            for (pick = 0; pick < n - 1; ++pick) {
                r -= d2(pick);
                if (r <= 0.0)
                    break;
            }
        } else {
            pick = static_cast<Eigen::Index>(rng.uniform() * static_cast<double>(n)) % n;
        }
        C.row(c) = X.row(pick);
        d2 = d2.cwiseMin((X.rowwise() - C.row(c)).rowwise().squaredNorm());
    }

    std::vector<int> label(static_cast<size_t>(n), 0);
    for (int it = 0; it < iterations; ++it) {
        for (Eigen::Index i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (int c = 0; c < k; ++c) {
                const double d = (X.row(i) - C.row(c)).squaredNorm();
                if (d < best) {
                    best = d;
                    label[static_cast<size_t>(i)] = c;
                }
            }
        }
        Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(k, 3);
        Eigen::VectorXd cnt = Eigen::VectorXd::Zero(k);
        for (Eigen::Index i = 0; i < n; ++i) {
            sum.row(label[static_cast<size_t>(i)]) += X.row(i);
            cnt(label[static_cast<size_t>(i)]) += 1.0;
        }
        for (int c = 0; c < k; ++c)
            if (cnt(c) > 0.0)
                C.row(c) = sum.row(c) / cnt(c);
    }

    std::vector<int> order(static_cast<size_t>(k));
    std::iota(order.begin(), order.end(), 0);
    auto luma = [&](int c) { return 0.299 * C(c, 0) + 0.587 * C(c, 1) + 0.114 * C(c, 2); };
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return luma(a) < luma(b); });
    Eigen::MatrixXd out(k, 3);
    for (int i = 0; i < k; ++i)
        out.row(i) = C.row(order[static_cast<size_t>(i)]);
    return out;
}

} // namespace bsvg
