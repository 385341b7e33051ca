// Copyright 2026 The Dynasplat Authors
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

#include "dsplat/io/image_io.hpp"

#include <png.h>

#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>

#include "dsplat/core/check.hpp"

namespace dsplat {

namespace {

struct PngWriteState {
  std::vector<std::uint8_t>* out;
};

void png_mem_write(png_structp png, png_bytep data, png_size_t len) {
  auto* state = static_cast<PngWriteState*>(png_get_io_ptr(png));
  state->out->insert(state->out->end(), data, data + len);
}

void png_mem_flush(png_structp) {}

struct PngReadState {
  const std::uint8_t* data;
  std::size_t size;
  std::size_t pos;
};

void png_mem_read(png_structp png, png_bytep out, png_size_t len) {
  auto* state = static_cast<PngReadState*>(png_get_io_ptr(png));
  if (state->pos + len > state->size)
    png_error(png, "unexpected end of PNG stream");
  std::memcpy(out, state->data + state->pos, len);
  state->pos += len;
}

// Encodes 8-bit rows (RGB when channels == 3, gray when 1).
std::vector<std::uint8_t> encode_png_bytes(const std::uint8_t* pixels,
                                           int width, int height,
                                           int channels) {
  std::vector<std::uint8_t> out;
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  DS_CHECK(png != nullptr, Io, "png writer allocation failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    DS_CHECK(false, Io, "png info allocation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorKind::Io, "png encode failed");
  }
  PngWriteState state{&out};
  png_set_write_fn(png, &state, png_mem_write, png_mem_flush);
  png_set_IHDR(png, info, width, height, 8,
               channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  std::vector<png_bytep> rows(height);
  for (int y = 0; y < height; ++y)
    rows[y] = const_cast<png_bytep>(pixels +
                                    static_cast<std::size_t>(y) * width * channels);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

// Decodes to 8-bit with the requested channel count (3 = RGB, 1 = gray).
std::vector<std::uint8_t> decode_png_bytes(const std::uint8_t* data,
                                           std::size_t size, int channels,
                                           int* width, int* height) {
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  DS_CHECK(png != nullptr, Io, "png reader allocation failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    DS_CHECK(false, Io, "png info allocation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorKind::Io, "png decode failed");
  }
  PngReadState state{data, size, 0};
  png_set_read_fn(png, &state, png_mem_read);
  png_read_info(png, info);

  png_set_strip_16(png);
  png_set_packing(png);
  png_set_strip_alpha(png);
  const int color_type = png_get_color_type(png, info);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (channels == 3) {
    if (color_type == PNG_COLOR_TYPE_GRAY ||
        color_type == PNG_COLOR_TYPE_GRAY_ALPHA)
      png_set_gray_to_rgb(png);
  } else {
    if (color_type != PNG_COLOR_TYPE_GRAY &&
        color_type != PNG_COLOR_TYPE_GRAY_ALPHA)
      png_set_rgb_to_gray_fixed(png, 1, -1, -1);
  }
  png_read_update_info(png, info);

  *width = static_cast<int>(png_get_image_width(png, info));
  *height = static_cast<int>(png_get_image_height(png, info));
  std::vector<std::uint8_t> pixels(static_cast<std::size_t>(*width) * *height *
                                   channels);
  std::vector<png_bytep> rows(*height);
  for (int y = 0; y < *height; ++y)
    rows[y] = pixels.data() + static_cast<std::size_t>(y) * *width * channels;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return pixels;
}

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  DS_CHECK(in.good(), Io, "cannot open file: " + path);
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                   std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, const std::uint8_t* data,
                std::size_t size) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  DS_CHECK(out.good(), Io, "cannot open file for writing: " + path);
  out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(size));
  DS_CHECK(out.good(), Io, "short write: " + path);
}

std::vector<std::uint8_t> image_to_bytes(const Image3& img) {
  std::vector<std::uint8_t> bytes(img.data.size());
  for (std::size_t i = 0; i < img.data.size(); ++i)
    bytes[i] = quantize8(img.data[i]);
  return bytes;
}

}  // namespace

std::vector<std::uint8_t> encode_png(const Image3& img) {
  const std::vector<std::uint8_t> bytes = image_to_bytes(img);
  return encode_png_bytes(bytes.data(), img.width, img.height, 3);
}

Image3 decode_png(const std::vector<std::uint8_t>& bytes) {
  int w = 0, h = 0;
  const std::vector<std::uint8_t> px = decode_png_bytes(bytes.data(), bytes.size(), 3, &w, &h);
  Image3 img(w, h);
  for (std::size_t i = 0; i < px.size(); ++i) img.data[i] = px[i] / 255.0;
  return img;
}

std::vector<std::uint8_t> encode_mask_png(const Mask& mask) {
  std::vector<std::uint8_t> bytes(mask.data.size());
  for (std::size_t i = 0; i < bytes.size(); ++i)
    bytes[i] = mask.data[i] ? 255 : 0;
  return encode_png_bytes(bytes.data(), mask.width, mask.height, 1);
}

Mask decode_mask_png(const std::vector<std::uint8_t>& bytes) {
  int w = 0, h = 0;
  const std::vector<std::uint8_t> px = decode_png_bytes(bytes.data(), bytes.size(), 1, &w, &h);
  Mask mask(w, h);
  for (std::size_t i = 0; i < px.size(); ++i) mask.data[i] = px[i] >= 128 ? 1 : 0;
  return mask;
}

void write_png(const std::string& path, const Image3& img) {
  const std::vector<std::uint8_t> encoded = encode_png(img);
  write_file(path, encoded.data(), encoded.size());
}

Image3 read_png(const std::string& path) { return decode_png(read_file(path)); }

void write_mask_png(const std::string& path, const Mask& mask) {
  const std::vector<std::uint8_t> encoded = encode_mask_png(mask);
  write_file(path, encoded.data(), encoded.size());
}

Mask read_mask_png(const std::string& path) {
  return decode_mask_png(read_file(path));
}

void write_label_png(const std::string& path, const LabelMap& labels) {
  std::vector<std::uint8_t> bytes(labels.data.size());
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    DS_CHECK(labels.data[i] >= 0 && labels.data[i] <= 255, InvalidParameter,
             "label id does not fit an 8-bit PNG");
    bytes[i] = static_cast<std::uint8_t>(labels.data[i]);
  }
  const std::vector<std::uint8_t> encoded =
      encode_png_bytes(bytes.data(), labels.width, labels.height, 1);
  write_file(path, encoded.data(), encoded.size());
}

LabelMap read_label_png(const std::string& path) {
  const std::vector<std::uint8_t> file = read_file(path);
  int w = 0, h = 0;
  const std::vector<std::uint8_t> px = decode_png_bytes(file.data(), file.size(), 1, &w, &h);
  LabelMap labels(w, h);
  for (std::size_t i = 0; i < px.size(); ++i) labels.data[i] = px[i];
  return labels;
}

void write_ppm(const std::string& path, const Image3& img) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  DS_CHECK(out.good(), Io, "cannot open file for writing: " + path);
  out << "P6\n" << img.width << " " << img.height << "\n255\n";
  const std::vector<std::uint8_t> bytes = image_to_bytes(img);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  DS_CHECK(out.good(), Io, "short write: " + path);
}

Image3 read_ppm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  DS_CHECK(in.good(), Io, "cannot open file: " + path);
  std::string magic;
  int w = 0, h = 0, maxval = 0;
  in >> magic >> w >> h >> maxval;
  DS_CHECK(magic == "P6" && maxval == 255 && w > 0 && h > 0, Io,
           "unsupported PPM: " + path);
  in.ignore(1);  // single whitespace after header
  std::vector<std::uint8_t> bytes(static_cast<std::size_t>(w) * h * 3);
  in.read(reinterpret_cast<char*>(bytes.data()),
          static_cast<std::streamsize>(bytes.size()));
  DS_CHECK(in.gcount() == static_cast<std::streamsize>(bytes.size()), Io,
           "truncated PPM: " + path);
  Image3 img(w, h);
  for (std::size_t i = 0; i < bytes.size(); ++i) img.data[i] = bytes[i] / 255.0;
  return img;
}

}  // namespace dsplat
