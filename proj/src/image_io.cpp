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

#include <bsvg/image_io.hpp>

#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstring>
#include <fstream>
#include <iterator>

namespace bsvg {

namespace {

struct ReadCursor {
    const std::vector<std::uint8_t>* data;
    size_t pos;
};

void read_fn(png_structp png, png_bytep out, png_size_t n) {
    auto* cur = static_cast<ReadCursor*>(png_get_io_ptr(png));
    if (cur->pos + n > cur->data->size())
        png_error(png, "truncated PNG data");
    std::memcpy(out, cur->data->data() + cur->pos, n);
    cur->pos += n;
}

void write_fn(png_structp png, png_bytep in, png_size_t n) {
    auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
    out->insert(out->end(), in, in + n);
}

void flush_fn(png_structp) {}

void silent_warning(png_structp, png_const_charp) {}

[[noreturn]] void jump_error(png_structp png, png_const_charp) { png_longjmp(png, 1); }

// Decodes into `raw` (big-endian samples). Returns false on libpng error.
// Kept free of non-trivial locals so longjmp is safe.
bool decode_raw(ReadCursor* cur, std::vector<std::uint8_t>* raw, png_uint_32* w, png_uint_32* h,
                int* channels, int* depth) {
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, jump_error, silent_warning);
    if (!png)
        return false;
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        return false;
    }
    png_bytep* rows = nullptr;
    if (setjmp(png_jmpbuf(png))) {
        std::free(rows);
        png_destroy_read_struct(&png, &info, nullptr);
        return false;
    }
    png_set_read_fn(png, cur, read_fn);
    png_read_info(png, info);
    const int color = png_get_color_type(png, info);
    const int bits = png_get_bit_depth(png, info);
    if (color == PNG_COLOR_TYPE_PALETTE)
        png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && bits < 8)
        png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS))
        png_set_tRNS_to_alpha(png);
    png_read_update_info(png, info);
    *w = png_get_image_width(png, info);
    *h = png_get_image_height(png, info);
    *channels = png_get_channels(png, info);
    *depth = png_get_bit_depth(png, info);
    const size_t stride = png_get_rowbytes(png, info);
    raw->resize(stride * *h);
    rows = static_cast<png_bytep*>(std::malloc(sizeof(png_bytep) * *h));
    if (!rows)
        png_error(png, "out of memory");
    for (png_uint_32 y = 0; y < *h; ++y)
        rows[y] = raw->data() + y * stride;
    png_read_image(png, rows);
    png_read_end(png, nullptr);
    std::free(rows);
    png_destroy_read_struct(&png, &info, nullptr);
    return true;
}

bool encode_raw(std::vector<std::uint8_t>* out, const std::vector<std::uint8_t>* raw, int w, int h,
                int color, int depth, size_t stride) {
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, jump_error, silent_warning);
    if (!png)
        return false;
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        return false;
    }
    png_bytep* rows = nullptr;
    if (setjmp(png_jmpbuf(png))) {
        std::free(rows);
        png_destroy_write_struct(&png, &info);
        return false;
    }
    png_set_write_fn(png, out, write_fn, flush_fn);
    png_set_IHDR(png, info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), depth, color,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    rows = static_cast<png_bytep*>(std::malloc(sizeof(png_bytep) * static_cast<size_t>(h)));
    if (!rows)
        png_error(png, "out of memory");
    for (int y = 0; y < h; ++y)
        rows[y] = const_cast<png_bytep>(raw->data() + static_cast<size_t>(y) * stride);
    png_write_image(png, rows);
    png_write_end(png, nullptr);
    std::free(rows);
    png_destroy_write_struct(&png, &info);
    return true;
}

} // namespace

Canvas decode_png(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0)
        throw Error(Errc::io, "decode_png: not a PNG stream");
    ReadCursor cur{&bytes, 0};
    std::vector<std::uint8_t> raw;
    png_uint_32 w = 0, h = 0;
    int channels = 0, depth = 0;
    if (!decode_raw(&cur, &raw, &w, &h, &channels, &depth))
        throw Error(Errc::io, "decode_png: malformed PNG data");
    const int out_channels = channels == 2 ? 4 : channels;
    Canvas img(static_cast<int>(w), static_cast<int>(h), out_channels);
    const double scale = depth == 16 ? 1.0 / 65535.0 : 1.0 / 255.0;
    const size_t count = static_cast<size_t>(w) * h * static_cast<size_t>(channels);
    std::vector<double> samples(count);
    for (size_t i = 0; i < count; ++i)
        samples[i] = depth == 16 ? ((raw[2 * i] << 8) | raw[2 * i + 1]) * scale : raw[i] * scale;
    if (channels == 2) {
        for (size_t p = 0; p < static_cast<size_t>(w) * h; ++p) {
            for (int c = 0; c < 3; ++c)
                img.pixels[4 * p + static_cast<size_t>(c)] = samples[2 * p];
            img.pixels[4 * p + 3] = samples[2 * p + 1];
        }
    } else {
        img.pixels = std::move(samples);
    }
    return img;
}

std::vector<std::uint8_t> encode_png(const Canvas& image, int bit_depth) {
    if (bit_depth != 8 && bit_depth != 16)
        throw Error(Errc::invalid_argument, "encode_png: bit depth must be 8 or 16");
    int color = 0;
    switch (image.channels) {
    case 1: color = PNG_COLOR_TYPE_GRAY; break;
    case 3: color = PNG_COLOR_TYPE_RGB; break;
    case 4: color = PNG_COLOR_TYPE_RGB_ALPHA; break;
    default: throw Error(Errc::invalid_argument, "encode_png: canvas must have 1, 3 or 4 channels");
    }
    if (image.width < 1 || image.height < 1)
        throw Error(Errc::invalid_argument, "encode_png: empty canvas");
    const int bytes = bit_depth / 8;
    const size_t stride = static_cast<size_t>(image.width) * image.channels * bytes;
    std::vector<std::uint8_t> raw(stride * image.height);
    const double maxv = bit_depth == 16 ? 65535.0 : 255.0;
    for (size_t i = 0; i < image.pixels.size(); ++i) {
        const double v = std::isfinite(image.pixels[i]) ? std::clamp(image.pixels[i], 0.0, 1.0) : 0.0;
        const auto q = static_cast<unsigned>(std::lround(v * maxv));
        if (bytes == 2) {
            raw[2 * i] = static_cast<std::uint8_t>(q >> 8);
            raw[2 * i + 1] = static_cast<std::uint8_t>(q & 0xff);
        } else {
            raw[i] = static_cast<std::uint8_t>(q);
        }
    }
    std::vector<std::uint8_t> out;
    if (!encode_raw(&out, &raw, image.width, image.height, color, bit_depth, stride))
        throw Error(Errc::io, "encode_png: libpng failure");
    return out;
}

std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(Errc::io, "cannot open '" + path + "'");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(Errc::io, "cannot write '" + path + "'");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw Error(Errc::io, "write failed for '" + path + "'");
}

void write_text(const std::string& path, const std::string& text) {
    write_file(path, std::vector<std::uint8_t>(text.begin(), text.end()));
}

Canvas read_png(const std::string& path) { return decode_png(read_file(path)); }

void write_png(const std::string& path, const Canvas& image, int bit_depth) {
    write_file(path, encode_png(image, bit_depth));
}

Canvas to_gray(const Canvas& image) {
    if (image.channels == 1)
        return image;
    Canvas out(image.width, image.height, 1);
    const size_t n = static_cast<size_t>(image.width) * image.height;
    const size_t C = static_cast<size_t>(image.channels);
    for (size_t p = 0; p < n; ++p) {
        const double* px = &image.pixels[p * C];
        double g = C >= 3 ? 0.299 * px[0] + 0.587 * px[1] + 0.114 * px[2] : px[0];
        if (C == 4 || C == 2) {
            const double a = px[C - 1];
            g = a * g + (1.0 - a);
        }
        out.pixels[p] = g;
    }
    return out;
}

Canvas to_channels(const Canvas& image, int channels) {
    if (channels == 1)
        return to_gray(image);
    if (channels != 3)
        throw Error(Errc::invalid_argument, "to_channels: target must have 1 or 3 channels");
    Canvas out(image.width, image.height, 3);
    const size_t n = static_cast<size_t>(image.width) * image.height;
    const size_t C = static_cast<size_t>(image.channels);
    for (size_t p = 0; p < n; ++p) {
        const double* px = &image.pixels[p * C];
        const double a = (C == 4) ? px[3] : 1.0;
        for (size_t c = 0; c < 3; ++c) {
            const double v = C >= 3 ? px[c] : px[0];
            out.pixels[p * 3 + c] = a * v + (1.0 - a);
        }
    }
    return out;
}

} // namespace bsvg
