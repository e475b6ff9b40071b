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

// PNG input/output for Canvas values in [0, 1].

#include <bsvg/raster.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace bsvg {

/// Decodes 8- or 16-bit gray, gray+alpha, RGB, RGBA or palette PNGs.
/// Gray+alpha is widened to RGBA. Errc::io on malformed data.
Canvas decode_png(const std::vector<std::uint8_t>& bytes);
Canvas read_png(const std::string& path);

/// Encodes a 1, 3 or 4 channel canvas; values are clamped to [0, 1].
/// `bit_depth` is 8 or 16.
std::vector<std::uint8_t> encode_png(const Canvas& image, int bit_depth = 8);
void write_png(const std::string& path, const Canvas& image, int bit_depth = 8);

/// Rec. 601 luma of an RGB(A) canvas; single-channel input is copied.
/// Alpha is composited over white.
Canvas to_gray(const Canvas& image);

/// Drops or composites channels so the result has `channels` channels
/// (1 or 3), alpha composited over white.
Canvas to_channels(const Canvas& image, int channels);

std::vector<std::uint8_t> read_file(const std::string& path);
void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes);
void write_text(const std::string& path, const std::string& text);

} // namespace bsvg
