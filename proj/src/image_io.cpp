// Copyright 2026 The Fovea Authors. All Rights Reserved.
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

#include "fovea/image_io.hpp"

#include <png.h>
// jpeglib.h needs FILE and size_t declared first.
#include <cstdio>
#include <jpeglib.h>

#include <array>
#include <cmath>
#include <csetjmp>
#include <fstream>
#include <memory>

#include "fovea/atomic_file.hpp"

namespace fovea {
namespace {

namespace fs = std::filesystem;

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const fs::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw DecodeError("cannot open " + path.string());
  return f;
}

enum class Format { kPng, kJpeg };

Format sniff(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DecodeError("cannot open " + path.string());
  std::array<unsigned char, 8> sig{};
  in.read(reinterpret_cast<char*>(sig.data()), sig.size());
  if (in.gcount() >= 8 && png_sig_cmp(sig.data(), 0, 8) == 0) return Format::kPng;
  if (in.gcount() >= 3 && sig[0] == 0xFF && sig[1] == 0xD8 && sig[2] == 0xFF) return Format::kJpeg;
  throw DecodeError("unrecognized image format: " + path.string());
}

// libpng reports errors through longjmp; keep the message for the exception.
struct PngErrorState {
  std::string message;
};

void png_error_fn(png_structp png, png_const_charp msg) {
  auto* state = static_cast<PngErrorState*>(png_get_error_ptr(png));
  if (state) state->message = msg;
  png_longjmp(png, 1);
}

void png_warning_fn(png_structp, png_const_charp) {}

Raster read_png(const fs::path& path, bool header_only) {
  FilePtr f = open_file(path, "rb");
  PngErrorState err;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err, png_error_fn, png_warning_fn);
  if (!png) throw DecodeError("png init failed");
  png_infop info = png_create_info_struct(png);
  Raster r;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw DecodeError("corrupt PNG " + path.string() + ": " + err.message);
  }
  png_init_io(png, f.get());
  png_read_info(png, info);
  r.width = static_cast<int>(png_get_image_width(png, info));
  r.height = static_cast<int>(png_get_image_height(png, info));
  if (header_only) {
    png_destroy_read_struct(&png, &info, nullptr);
    return r;
  }
  const int color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (depth == 16) png_set_strip_16(png);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  png_set_strip_alpha(png);
  png_read_update_info(png, info);
  r.channels = static_cast<int>(png_get_channels(png, info));
  if (r.channels != 1 && r.channels != 3) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw DecodeError("unsupported PNG channel layout: " + path.string());
  }
  r.pixels.resize(static_cast<size_t>(r.width) * r.height * r.channels);
  rows.resize(static_cast<size_t>(r.height));
  for (int y = 0; y < r.height; ++y)
    rows[y] = r.pixels.data() + static_cast<size_t>(y) * r.width * r.channels;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return r;
}

struct JpegError {
  jpeg_error_mgr mgr;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegError*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

Raster read_jpeg(const fs::path& path, bool header_only) {
  FilePtr f = open_file(path, "rb");
  jpeg_decompress_struct cinfo;
  JpegError err;
  cinfo.err = jpeg_std_error(&err.mgr);
  err.mgr.error_exit = jpeg_error_exit;
  Raster r;
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    throw DecodeError("corrupt JPEG " + path.string() + ": " + err.message);
  }
  jpeg_create_decompress(&cinfo);
  jpeg_stdio_src(&cinfo, f.get());
  jpeg_read_header(&cinfo, TRUE);
  r.width = static_cast<int>(cinfo.image_width);
  r.height = static_cast<int>(cinfo.image_height);
  if (header_only) {
    jpeg_destroy_decompress(&cinfo);
    return r;
  }
  cinfo.out_color_space = cinfo.num_components == 1 ? JCS_GRAYSCALE : JCS_RGB;
  jpeg_start_decompress(&cinfo);
  r.channels = static_cast<int>(cinfo.output_components);
  r.pixels.resize(static_cast<size_t>(r.width) * r.height * r.channels);
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = r.pixels.data() + static_cast<size_t>(cinfo.output_scanline) * r.width * r.channels;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return r;
}

}  // namespace

Raster read_image(const fs::path& path) {
  Raster r = sniff(path) == Format::kPng ? read_png(path, false) : read_jpeg(path, false);
  if (r.width <= 0 || r.height <= 0) throw InvalidArgument("zero-dimension image: " + path.string());
  return r;
}

Resolution read_image_size(const fs::path& path) {
  Raster r = sniff(path) == Format::kPng ? read_png(path, true) : read_jpeg(path, true);
  return {r.height, r.width};
}

void write_png(const fs::path& path, const Raster& raster) {
  if (raster.channels != 1 && raster.channels != 3) throw InvalidArgument("write_png: 1 or 3 channels");
  if (raster.width <= 0 || raster.height <= 0) throw InvalidArgument("write_png: empty raster");
  write_file_atomically(path, [&](const fs::path& tmp) {
    FilePtr f(std::fopen(tmp.c_str(), "wb"));
    if (!f) throw DecodeError("cannot write " + tmp.string());
    PngErrorState err;
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err, png_error_fn, png_warning_fn);
    png_infop info = png_create_info_struct(png);
    if (setjmp(png_jmpbuf(png))) {
      png_destroy_write_struct(&png, &info);
      throw DecodeError("PNG encode failed: " + err.message);
    }
    png_init_io(png, f.get());
    png_set_IHDR(png, info, raster.width, raster.height, 8,
                 raster.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < raster.height; ++y) {
      png_write_row(png, const_cast<png_bytep>(raster.pixels.data() +
                                               static_cast<size_t>(y) * raster.width * raster.channels));
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
  });
}

Tensor raster_to_yuv(const Raster& raster) {
  if (raster.width <= 0 || raster.height <= 0) throw InvalidArgument("zero-dimension image");
  if (raster.channels != 1 && raster.channels != 3) throw InvalidArgument("raster must have 1 or 3 channels");
  const Index n = Index(raster.width) * raster.height;
  if (static_cast<Index>(raster.pixels.size()) != n * raster.channels)
    throw InvalidArgument("raster pixel buffer has the wrong size");
  Tensor out(raster.height, raster.width, 3);
  auto& m = out.matrix();
  for (Index i = 0; i < n; ++i) {
    if (raster.channels == 1) {
      m(i, 0) = raster.pixels[i] / 255.0;
      m(i, 1) = 0.5;
      m(i, 2) = 0.5;
      continue;
    }
    const double r = raster.pixels[3 * i] / 255.0;
    const double g = raster.pixels[3 * i + 1] / 255.0;
    const double b = raster.pixels[3 * i + 2] / 255.0;
    m(i, 0) = 0.299 * r + 0.587 * g + 0.114 * b;
    m(i, 1) = -0.168736 * r - 0.331264 * g + 0.5 * b + 0.5;
    m(i, 2) = 0.5 * r - 0.418688 * g - 0.081312 * b + 0.5;
  }
  return out;
}

Tensor load_and_normalize(const fs::path& path) {
  return resize(raster_to_yuv(read_image(path)), {kInputHeight, kInputWidth});
}

Tensor load_saliency_map(const fs::path& path) {
  Tensor yuv = raster_to_yuv(read_image(path));
  Tensor luma(yuv.height(), yuv.width(), RowMatrix<double>(yuv.matrix().col(0)));
  return resize(luma, {kInputHeight, kInputWidth});
}

Raster map_to_raster(const Tensor& map) {
  if (map.channels() != 1) throw InvalidArgument("map_to_raster: single-channel map required");
  Raster r;
  r.height = static_cast<int>(map.height());
  r.width = static_cast<int>(map.width());
  r.channels = 1;
  r.pixels.resize(static_cast<size_t>(map.pixels()));
  for (Index i = 0; i < map.pixels(); ++i) {
    const double v = std::clamp(map.matrix()(i, 0), 0.0, 1.0);
    r.pixels[i] = static_cast<std::uint8_t>(std::lround(v * 255.0));
  }
  return r;
}

void write_map_png(const fs::path& path, const Tensor& map) { write_png(path, map_to_raster(map)); }

}  // namespace fovea
