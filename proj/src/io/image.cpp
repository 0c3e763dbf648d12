// Copyright 2026 The QSP Authors. All Rights Reserved.
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

#include "qsp/io/image.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <memory>
#include <string>

namespace qsp::io {
namespace {

[[noreturn]] void io_error(const std::filesystem::path& path, const std::string& what) {
  fail(ErrorKind::kIoError, path.string() + ": " + what);
}

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using File = std::unique_ptr<std::FILE, FileCloser>;

void png_error_handler(png_structp png, png_const_charp message) {
  auto* text = static_cast<std::string*>(png_get_error_ptr(png));
  if (text) *text = message;
  png_longjmp(png, 1);
}

void png_warning_handler(png_structp, png_const_charp) {}

RawImage read_png(const std::filesystem::path& path) {
  File file(std::fopen(path.c_str(), "rb"));
  if (!file) io_error(path, "cannot open");
  std::string error;
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, &error, png_error_handler, png_warning_handler);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    io_error(path, "libpng initialisation failed");
  }
  RawImage image;
  std::vector<png_byte> buffer;
  std::vector<png_bytep> rows;
  // No C++ objects with non-trivial destructors may be created between
  // setjmp and the last libpng call.
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    io_error(path, "invalid PNG: " + error);
  }
  png_init_io(png, file.get());
  png_read_info(png, info);
  const png_uint_32 width = png_get_image_width(png, info);
  const png_uint_32 height = png_get_image_height(png, info);
  const int color = png_get_color_type(png, info);
  int depth = png_get_bit_depth(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  png_set_strip_alpha(png);
  png_read_update_info(png, info);
  depth = png_get_bit_depth(png, info);
  const int channels = png_get_channels(png, info);
  const std::size_t rowbytes = png_get_rowbytes(png, info);
  if (!((channels == 1 && (depth == 8 || depth == 16)) || (channels == 3 && depth == 8))) {
    png_destroy_read_struct(&png, &info, nullptr);
    file.reset();
    io_error(path, "unsupported PNG layout (" + std::to_string(channels) + " channels, " +
                       std::to_string(depth) + "-bit)");
  }
  buffer.resize(rowbytes * height);
  rows.resize(height);
  for (png_uint_32 y = 0; y < height; ++y) rows[y] = buffer.data() + y * rowbytes;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  image.width = width;
  image.height = height;
  image.format = channels == 3 ? PixelFormat::kRgb8
                               : (depth == 16 ? PixelFormat::kGray16 : PixelFormat::kGray8);
  const std::size_t count = static_cast<std::size_t>(width) * height * channels;
  image.samples.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    image.samples[i] = depth == 16 ? static_cast<std::uint16_t>((buffer[2 * i] << 8) | buffer[2 * i + 1])
                                   : buffer[i];
  }
  return image;
}

void write_png(const std::filesystem::path& path, const RawImage& image) {
  File file(std::fopen(path.c_str(), "wb"));
  if (!file) io_error(path, "cannot open for writing");
  const bool wide = image.format == PixelFormat::kGray16;
  const std::size_t channels = image.channels();
  const std::size_t rowbytes = image.width * channels * (wide ? 2 : 1);
  std::vector<png_byte> buffer(rowbytes * image.height);
  for (std::size_t i = 0; i < image.samples.size(); ++i) {
    if (wide) {
      buffer[2 * i] = static_cast<png_byte>(image.samples[i] >> 8);
      buffer[2 * i + 1] = static_cast<png_byte>(image.samples[i] & 0xff);
    } else {
      buffer[i] = static_cast<png_byte>(image.samples[i]);
    }
  }
  std::vector<png_bytep> rows(image.height);
  for (std::size_t y = 0; y < image.height; ++y) rows[y] = buffer.data() + y * rowbytes;

  std::string error;
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, &error, png_error_handler, png_warning_handler);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    io_error(path, "libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    io_error(path, "PNG encoding failed: " + error);
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.width),
               static_cast<png_uint_32>(image.height), wide ? 16 : 8,
               channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

// Binary PNM header: magic, width, height, maxval, separated by whitespace
// and '#' comments, then a single whitespace byte.
RawImage read_pnm(const std::filesystem::path& path, const std::string& bytes) {
  std::size_t pos = 2;
  auto next_number = [&]() -> std::size_t {
    for (;;) {
      while (pos < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
      if (pos < bytes.size() && bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
        continue;
      }
      break;
    }
    std::size_t value = 0;
    const std::size_t start = pos;
    while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(bytes[pos]))) {
      value = value * 10 + static_cast<std::size_t>(bytes[pos] - '0');
      if (value > (1u << 30)) io_error(path, "PNM header value out of range");
      ++pos;
    }
    if (pos == start) io_error(path, "malformed PNM header");
    return value;
  };
  const bool rgb = bytes[1] == '6';
  RawImage image;
  image.width = next_number();
  image.height = next_number();
  const std::size_t maxval = next_number();
  if (maxval == 0 || maxval > 65535) io_error(path, "PNM maxval must be in [1, 65535]");
  if (pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[pos]))) {
    io_error(path, "malformed PNM header");
  }
  ++pos;
  const bool wide = maxval > 255;
  if (rgb && wide) io_error(path, "16-bit PPM is not supported");
  image.format = rgb ? PixelFormat::kRgb8 : (wide ? PixelFormat::kGray16 : PixelFormat::kGray8);
  const std::size_t count = image.width * image.height * image.channels();
  const std::size_t need = count * (wide ? 2 : 1);
  if (bytes.size() - pos < need) io_error(path, "truncated PNM data");
  image.samples.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (wide) {
      image.samples[i] = static_cast<std::uint16_t>(
          (static_cast<unsigned char>(bytes[pos + 2 * i]) << 8) |
          static_cast<unsigned char>(bytes[pos + 2 * i + 1]));
    } else {
      const auto v = static_cast<unsigned char>(bytes[pos + i]);
      // Rescale to the full 8-bit range when maxval < 255.
      image.samples[i] = maxval == 255 ? v
                                       : static_cast<std::uint16_t>(std::lround(v * 255.0 / maxval));
    }
  }
  return image;
}

void write_pnm(const std::filesystem::path& path, const RawImage& image, bool want_rgb) {
  if (want_rgb != (image.format == PixelFormat::kRgb8)) {
    io_error(path, want_rgb ? "PPM needs RGB samples" : "PGM needs grayscale samples");
  }
  const bool wide = image.format == PixelFormat::kGray16;
  std::string out = std::string(want_rgb ? "P6" : "P5") + "\n" + std::to_string(image.width) +
                    " " + std::to_string(image.height) + "\n" + (wide ? "65535" : "255") + "\n";
  for (std::uint16_t s : image.samples) {
    if (wide) out.push_back(static_cast<char>(s >> 8));
    out.push_back(static_cast<char>(s & 0xff));
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) io_error(path, "cannot open for writing");
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
}

std::string lower_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

}  // namespace

RawImage read_raw_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) io_error(path, "cannot open");
  char magic[8] = {};
  in.read(magic, sizeof(magic));
  const auto got = static_cast<std::size_t>(in.gcount());
  if (got == 8 && png_sig_cmp(reinterpret_cast<png_const_bytep>(magic), 0, 8) == 0) {
    in.close();
    return read_png(path);
  }
  if (got >= 2 && magic[0] == 'P' && (magic[1] == '5' || magic[1] == '6')) {
    in.seekg(0);
    const std::string bytes(std::istreambuf_iterator<char>(in), {});
    return read_pnm(path, bytes);
  }
  io_error(path, "unsupported image format (expected PNG, binary PGM or binary PPM)");
}

void write_raw_image(const std::filesystem::path& path, const RawImage& image) {
  require(image.samples.size() == image.width * image.height * image.channels(),
          ErrorKind::kInvalidArgument, "image sample count does not match its size");
  const std::string ext = lower_extension(path);
  if (ext == ".png") return write_png(path, image);
  if (ext == ".pgm") return write_pnm(path, image, false);
  if (ext == ".ppm") return write_pnm(path, image, true);
  io_error(path, "unsupported output extension '" + ext + "'");
}

nn::Tensor to_tensor(const RawImage& image) {
  nn::Tensor out(nn::Shape{1, image.height, image.width});
  auto dst = out.values();
  const std::size_t n = image.width * image.height;
  for (std::size_t i = 0; i < n; ++i) {
    switch (image.format) {
      case PixelFormat::kGray8:
        dst[i] = image.samples[i] / 255.0;
        break;
      case PixelFormat::kGray16:
        dst[i] = image.samples[i];
        break;
      case PixelFormat::kRgb8:
        dst[i] = (0.299 * image.samples[3 * i] + 0.587 * image.samples[3 * i + 1] +
                  0.114 * image.samples[3 * i + 2]) /
                 255.0;
        break;
    }
  }
  return out;
}

nn::Tensor decode_image(const std::filesystem::path& path) { return to_tensor(read_raw_image(path)); }

RawImage gray8_from_tensor(const nn::Tensor& gray) {
  require(gray.channels() == 1, ErrorKind::kInvalidArgument, "grayscale tensor needs 1 channel");
  RawImage image{gray.width(), gray.height(), PixelFormat::kGray8, {}};
  image.samples.reserve(gray.size());
  for (double v : gray.values()) {
    image.samples.push_back(static_cast<std::uint16_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)));
  }
  return image;
}

RawImage gray16_from_tensor(const nn::Tensor& raw) {
  require(raw.channels() == 1, ErrorKind::kInvalidArgument, "depth tensor needs 1 channel");
  RawImage image{raw.width(), raw.height(), PixelFormat::kGray16, {}};
  image.samples.reserve(raw.size());
  for (double v : raw.values()) {
    image.samples.push_back(static_cast<std::uint16_t>(std::lround(std::clamp(v, 0.0, 65535.0))));
  }
  return image;
}

}  // namespace qsp::io
