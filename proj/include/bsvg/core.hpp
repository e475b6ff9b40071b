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

// Shared vocabulary types and the error type used across the library.

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace bsvg {

/// Point sets stored one point per row. Row-major so that `data()` is the
/// flattened (x0, y0, w0, x1, ...) vector used by the quadratic forms.
using Points = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;
using Points2 = Eigen::Matrix<double, Eigen::Dynamic, 2, Eigen::RowMajor>;

/// Point-level linear maps. A map `A` acts on every coordinate identically,
/// i.e. it represents `A (x) I_D` on flattened vectors.
using SparseMap = Eigen::SparseMatrix<double, Eigen::RowMajor>;

enum class Errc {
    invalid_argument,
    domain,
    dimension_mismatch,
    unsupported,
    state,
    io,
    parse,
    numeric,
};

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

/// Flattened view helpers.
inline Eigen::Map<Eigen::VectorXd> flat(Points& p) { return {p.data(), p.size()}; }
inline Eigen::Map<const Eigen::VectorXd> flat(const Points& p) { return {p.data(), p.size()}; }

/// Deterministic 64-bit generator (splitmix64). Used everywhere randomness is
/// needed so that results do not depend on the standard library's
/// distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : state_(seed) {}

    std::uint64_t next() noexcept {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform in the open interval (0, 1).
    double uniform_open() noexcept {
        return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller.
    double normal() noexcept;

    /// Independent stream derived from this generator's seed and a key.
    static Rng split(std::uint64_t seed, std::uint64_t key) noexcept {
        Rng r(seed ^ (key * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL));
        r.next();
        return r;
    }

private:
    std::uint64_t state_;
};

} // namespace bsvg
