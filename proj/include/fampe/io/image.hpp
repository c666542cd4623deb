#pragma once

// Binary PGM (P5, one channel) and PPM (P6, three channels). Pixel values are
// mapped to [0,1] by dividing by maxval; writing quantizes to 8 bits.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <string>

#include "fampe/error.hpp"
#include "fampe/io/files.hpp"
#include "fampe/tensor.hpp"

namespace fampe::io {

inline std::vector<unsigned char> encode_pnm(const Tensor& image) {
  require_chw(image, "encode_pnm");
  const std::size_t C = image.dim(0), H = image.dim(1), W = image.dim(2);
  if (C != 1 && C != 3) throw Error(errc::invalid_argument, "encode_pnm: images need 1 or 3 channels, got " + std::to_string(C));
  const std::string header = std::string(C == 1 ? "P5" : "P6") + "\n" + std::to_string(W) + " " + std::to_string(H) + "\n255\n";
  std::vector<unsigned char> out(header.begin(), header.end());
  for (std::size_t y = 0; y < H; ++y) {
    for (std::size_t x = 0; x < W; ++x) {
      for (std::size_t c = 0; c < C; ++c) {
        const double v = std::clamp(image.at(c, y, x), 0.0, 1.0);
        out.push_back(static_cast<unsigned char>(std::lround(v * 255.0)));
      }
    }
  }
  return out;
}

inline Tensor decode_pnm(const std::vector<unsigned char>& bytes, const std::string& what = "image") {
  std::size_t pos = 0;
  const auto fail = [&](const std::string& why) { return Error(errc::format, what + ": " + why); };
  const auto skip_space = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
  };
  const auto number = [&] {
    skip_space();
    if (pos >= bytes.size() || !std::isdigit(bytes[pos])) throw fail("malformed header");
    std::size_t v = 0;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) {
      v = v * 10 + static_cast<std::size_t>(bytes[pos++] - '0');
      if (v > (1u << 24)) throw fail("header value too large");
    }
    return v;
  };
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6')) throw fail("not a binary PGM/PPM file");
  const std::size_t C = bytes[1] == '5' ? 1 : 3;
  pos = 2;
  const std::size_t W = number(), H = number(), maxval = number();
  if (W == 0 || H == 0) throw fail("zero image extent");
  if (maxval == 0 || maxval > 65535) throw fail("invalid maxval " + std::to_string(maxval));
  if (pos >= bytes.size() || !std::isspace(bytes[pos])) throw fail("malformed header");
  ++pos;
  const std::size_t bpp = maxval < 256 ? 1 : 2;
  const std::size_t need = W * H * C * bpp;
  if (bytes.size() - pos < need) {
    throw fail("truncated pixel data, expected " + std::to_string(need) + " bytes, got " + std::to_string(bytes.size() - pos));
  }
  Tensor image({C, H, W});
  const auto denom = static_cast<double>(maxval);
  for (std::size_t y = 0; y < H; ++y) {
    for (std::size_t x = 0; x < W; ++x) {
      for (std::size_t c = 0; c < C; ++c) {
        std::size_t v = bytes[pos++];
        if (bpp == 2) v = (v << 8) | bytes[pos++];
        image.at(c, y, x) = static_cast<double>(v) / denom;
      }
    }
  }
  return image;
}

inline Tensor read_image(const std::filesystem::path& path) { return decode_pnm(read_bytes(path), path.string()); }

inline void write_image(const std::filesystem::path& path, const Tensor& image) { write_atomic(path, encode_pnm(image)); }

/// 8-bit grayscale rendering of a 2-D grid: min-max normalized to [0,255];
/// constant grids render as all zeros.
inline std::vector<unsigned char> encode_heatmap(const Grid& g) {
  const auto [lo_it, hi_it] = std::minmax_element(g.data.begin(), g.data.end());
  const double lo = *lo_it, hi = *hi_it;
  Tensor img({1, g.rows, g.cols});
  if (hi > lo) {
    for (std::size_t i = 0; i < g.size(); ++i) img[i] = (g.data[i] - lo) / (hi - lo);
  }
  return encode_pnm(img);
}

} // namespace fampe::io
