#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <string>

#include "pvrc/data.hpp"

namespace pvrc::data {

namespace {

[[noreturn]] void fail(const std::filesystem::path& path, const std::string& msg,
                       long offset = -1) {
  std::string full = path.string() + ": " + msg;
  if (offset >= 0) full += " (byte " + std::to_string(offset) + ")";
  throw std::runtime_error(full);
}

// Skips Netpbm whitespace and '#' comments, then reads one unsigned int.
int read_pnm_int(std::istream& in, const std::filesystem::path& path) {
  for (;;) {
    const int c = in.peek();
    if (c == EOF) fail(path, "unexpected end of file in header", in.tellg());
    if (c == '#') {
      std::string line;
      std::getline(in, line);
      continue;
    }
    if (std::isspace(c)) {
      in.get();
      continue;
    }
    break;
  }
  int value = 0;
  if (!(in >> value) || value < 0)
    fail(path, "malformed integer in header", in.tellg());
  return value;
}

}  // namespace

Image load_pnm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open file");
  char magic[2];
  in.read(magic, 2);
  if (!in || magic[0] != 'P') fail(path, "not a Netpbm file", 0);
  const char kind = magic[1];
  if (kind != '2' && kind != '3' && kind != '5' && kind != '6')
    fail(path, "unsupported Netpbm variant P" + std::string(1, kind), 1);
  const bool color = (kind == '3' || kind == '6');
  const bool binary = (kind == '5' || kind == '6');

  Image img;
  img.width = read_pnm_int(in, path);
  img.height = read_pnm_int(in, path);
  const int maxval = read_pnm_int(in, path);
  if (img.width <= 0 || img.height <= 0)
    fail(path, "non-positive image dimensions", in.tellg());
  if (maxval <= 0 || maxval > 65535) fail(path, "bad maxval", in.tellg());
  img.channels = color ? 3 : 1;
  const size_t count =
      static_cast<size_t>(img.width) * img.height * img.channels;
  img.pixels.resize(count);

  if (binary) {
    // Exactly one whitespace byte separates the header from raster data.
    in.get();
    const int bytes_per = maxval > 255 ? 2 : 1;
    std::vector<unsigned char> raw(count * static_cast<size_t>(bytes_per));
    in.read(reinterpret_cast<char*>(raw.data()),
            static_cast<std::streamsize>(raw.size()));
    if (static_cast<size_t>(in.gcount()) != raw.size())
      fail(path, "truncated raster data", in.tellg());
    for (size_t i = 0; i < count; ++i) {
      img.pixels[i] = bytes_per == 1
                          ? raw[i]
                          : static_cast<double>(raw[2 * i] << 8 | raw[2 * i + 1]);
    }
  } else {
    for (size_t i = 0; i < count; ++i) {
      const int v = read_pnm_int(in, path);
      if (v > maxval) fail(path, "pixel value exceeds maxval", in.tellg());
      img.pixels[i] = v;
    }
  }
  return img;
}

Image load_png(const std::filesystem::path& path) {
  std::unique_ptr<std::FILE, int (*)(std::FILE*)> fp(
      std::fopen(path.string().c_str(), "rb"), std::fclose);
  if (!fp) fail(path, "cannot open file");

  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    if (png) png_destroy_read_struct(&png, &info, nullptr);
    fail(path, "libpng initialization failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(path, "libpng decode error");
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);

  png_set_strip_16(png);
  png_set_strip_alpha(png);
  if (png_get_color_type(png, info) == PNG_COLOR_TYPE_PALETTE)
    png_set_palette_to_rgb(png);
  if (png_get_color_type(png, info) == PNG_COLOR_TYPE_GRAY &&
      png_get_bit_depth(png, info) < 8)
    png_set_expand_gray_1_2_4_to_8(png);
  png_read_update_info(png, info);

  Image img;
  img.width = static_cast<int>(png_get_image_width(png, info));
  img.height = static_cast<int>(png_get_image_height(png, info));
  img.channels = static_cast<int>(png_get_channels(png, info));
  if (img.channels != 1 && img.channels != 3) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(path, "unsupported PNG channel count");
  }
  img.pixels.resize(static_cast<size_t>(img.width) * img.height * img.channels);

  std::vector<png_byte> row(png_get_rowbytes(png, info));
  for (int y = 0; y < img.height; ++y) {
    png_read_row(png, row.data(), nullptr);
    for (int x = 0; x < img.width; ++x)
      for (int c = 0; c < img.channels; ++c)
        img.at(x, y, c) = row[static_cast<size_t>(x * img.channels + c)];
  }
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

Image load_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open file");
  unsigned char magic[2] = {0, 0};
  in.read(reinterpret_cast<char*>(magic), 2);
  in.close();
  if (magic[0] == 'P') return load_pnm(path);
  if (magic[0] == 0x89 && magic[1] == 'P') return load_png(path);
  fail(path, "unrecognized image format");
}

namespace {

Image crop(const Image& img, const CropRect& r,
           const std::filesystem::path* path = nullptr) {
  if (r.x < 0 || r.y < 0 || r.width <= 0 || r.height <= 0 ||
      r.x + r.width > img.width || r.y + r.height > img.height)
    throw std::runtime_error("crop rectangle out of bounds");
  Image out;
  out.width = r.width;
  out.height = r.height;
  out.channels = img.channels;
  out.pixels.resize(static_cast<size_t>(r.width) * r.height * img.channels);
  for (int y = 0; y < r.height; ++y)
    for (int x = 0; x < r.width; ++x)
      for (int c = 0; c < img.channels; ++c)
        out.at(x, y, c) = img.at(r.x + x, r.y + y, c);
  (void)path;
  return out;
}

Image resize_bilinear(const Image& img, int tw, int th) {
  if (tw == img.width && th == img.height) return img;
  Image out;
  out.width = tw;
  out.height = th;
  out.channels = img.channels;
  out.pixels.resize(static_cast<size_t>(tw) * th * img.channels);
  const double sx = static_cast<double>(img.width) / tw;
  const double sy = static_cast<double>(img.height) / th;
  for (int y = 0; y < th; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, img.height - 1.0);
    const int y0 = static_cast<int>(std::floor(fy));
    const int y1 = std::min(y0 + 1, img.height - 1);
    const double wy = fy - y0;
    for (int x = 0; x < tw; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, img.width - 1.0);
      const int x0 = static_cast<int>(std::floor(fx));
      const int x1 = std::min(x0 + 1, img.width - 1);
      const double wx = fx - x0;
      for (int c = 0; c < img.channels; ++c) {
        const double top =
            img.at(x0, y0, c) * (1.0 - wx) + img.at(x1, y0, c) * wx;
        const double bot =
            img.at(x0, y1, c) * (1.0 - wx) + img.at(x1, y1, c) * wx;
        out.at(x, y, c) = top * (1.0 - wy) + bot * wy;
      }
    }
  }
  return out;
}

Image to_gray(const Image& img) {
  if (img.channels == 1) return img;
  Image out;
  out.width = img.width;
  out.height = img.height;
  out.channels = 1;
  out.pixels.resize(static_cast<size_t>(img.width) * img.height);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      out.at(x, y, 0) = 0.299 * img.at(x, y, 0) + 0.587 * img.at(x, y, 1) +
                        0.114 * img.at(x, y, 2);
  return out;
}

}  // namespace

Image preprocess(const Image& img, const PreprocessParams& params) {
  if (img.width <= 0 || img.height <= 0)
    throw std::invalid_argument("preprocess: empty image");
  Image work = params.crop ? crop(img, *params.crop) : img;
  const int tw = params.target_width > 0 ? params.target_width : work.width;
  const int th = params.target_height > 0 ? params.target_height : work.height;
  work = resize_bilinear(work, tw, th);
  if (params.mode == ColorMode::gray) work = to_gray(work);
  if (params.mode == ColorMode::rgb_concat && work.channels != 3)
    throw std::runtime_error("preprocess: rgb_concat needs a 3-channel image");
  return work;
}

Eigen::VectorXd vectorize(const Image& img, ColorMode mode) {
  if (img.width <= 0 || img.height <= 0)
    throw std::invalid_argument("vectorize: empty image");
  const int expected = mode == ColorMode::gray ? 1 : 3;
  if (img.channels != expected)
    throw std::invalid_argument("vectorize: channel count does not match mode");
  Eigen::VectorXd v(static_cast<Eigen::Index>(img.width) * img.height *
                    expected);
  Eigen::Index at = 0;
  for (int c = 0; c < expected; ++c)
    for (int x = 0; x < img.width; ++x)
      for (int y = 0; y < img.height; ++y) v(at++) = img.at(x, y, c);
  return v;
}

Image devectorize(const Eigen::VectorXd& features, int width, int height,
                  ColorMode mode) {
  const int channels = mode == ColorMode::gray ? 1 : 3;
  if (features.size() != static_cast<Eigen::Index>(width) * height * channels)
    throw std::invalid_argument("devectorize: feature length mismatch");
  Image img;
  img.width = width;
  img.height = height;
  img.channels = channels;
  img.pixels.resize(static_cast<size_t>(features.size()));
  Eigen::Index at = 0;
  for (int c = 0; c < channels; ++c)
    for (int x = 0; x < width; ++x)
      for (int y = 0; y < height; ++y) img.at(x, y, c) = features(at++);
  return img;
}

}  // namespace pvrc::data
