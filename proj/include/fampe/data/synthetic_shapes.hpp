#pragma once

// Synthetic shapes: a filled disk, square, cross or striped patch on a dim
// background, with additive Gaussian noise.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

#include "fampe/error.hpp"
#include "fampe/random.hpp"
#include "fampe/tensor.hpp"

namespace fampe::data {

inline constexpr std::array<const char*, 4> shape_class_names = {"disk", "square", "cross", "stripes"};

struct SyntheticShapesSpec {
  std::size_t size = 32;
  std::size_t channels = 1;
  std::size_t classes = 4;
  std::size_t samples_per_class = 50;
  double noise = 0.05;
  std::uint64_t seed = 1;

  void validate() const {
    if (size < 8) throw Error(errc::invalid_argument, "synthetic shapes: size must be >= 8");
    if (classes < 2 || classes > shape_class_names.size()) throw Error(errc::invalid_argument, "synthetic shapes: classes must be in [2, 4]");
    if (channels != 1 && channels != 3) throw Error(errc::invalid_argument, "synthetic shapes: channels must be 1 or 3");
    if (samples_per_class < 1) throw Error(errc::invalid_argument, "synthetic shapes: samples_per_class must be >= 1");
    if (!(noise >= 0.0)) throw Error(errc::invalid_argument, "synthetic shapes: noise must be >= 0");
  }
};

inline Tensor render_shape(std::size_t label, const SyntheticShapesSpec& spec, RandomStream& rng) {
  const auto S = static_cast<double>(spec.size);
  const double background = rng.uniform(0.0, 0.2);
  const double fill = rng.uniform(0.6, 1.0);
  const double cx = rng.uniform(0.35 * S, 0.65 * S), cy = rng.uniform(0.35 * S, 0.65 * S);
  const double r = rng.uniform(0.18 * S, 0.3 * S);
  const double bar = std::max(1.0, 0.3 * r);
  const double period = rng.uniform(4.0, 7.0), phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const bool vertical = rng.uniform() < 0.5;

  Grid plane(spec.size, spec.size, background);
  for (std::size_t yi = 0; yi < spec.size; ++yi) {
    for (std::size_t xi = 0; xi < spec.size; ++xi) {
      const double dx = static_cast<double>(xi) + 0.5 - cx, dy = static_cast<double>(yi) + 0.5 - cy;
      bool inside = false;
      switch (label) {
      case 0: inside = dx * dx + dy * dy <= r * r; break;
      case 1: inside = std::abs(dx) <= 0.886 * r && std::abs(dy) <= 0.886 * r; break;
      case 2: inside = (std::abs(dx) <= bar && std::abs(dy) <= r) || (std::abs(dy) <= bar && std::abs(dx) <= r); break;
      default: {
        const double along = vertical ? static_cast<double>(xi) : static_cast<double>(yi);
        inside = std::abs(dx) <= r && std::abs(dy) <= r && std::sin(2.0 * std::numbers::pi * along / period + phase) > 0.0;
      }
      }
      if (inside) plane(yi, xi) = fill;
    }
  }
  Tensor image({spec.channels, spec.size, spec.size});
  for (std::size_t c = 0; c < spec.channels; ++c) {
    const double tint = spec.channels == 1 ? 1.0 : rng.uniform(0.5, 1.0);
    for (std::size_t p = 0; p < plane.size(); ++p) {
      image[c * plane.size() + p] = std::clamp(plane.data[p] * tint + spec.noise * rng.normal(), 0.0, 1.0);
    }
  }
  return image;
}

struct SyntheticSample {
  std::string name;
  std::size_t label = 0;
  Tensor image;
};

/// Class-major order; each image comes from its own (seed, class, index) stream.
inline std::vector<SyntheticSample> synthesize_shapes(const SyntheticShapesSpec& spec) {
  spec.validate();
  std::vector<SyntheticSample> out;
  const char* ext = spec.channels == 1 ? ".pgm" : ".ppm";
  for (std::size_t label = 0; label < spec.classes; ++label) {
    for (std::size_t i = 0; i < spec.samples_per_class; ++i) {
      RandomStream rng(spec.seed, {0x5a9e, label, i});
      char idx[16];
      std::snprintf(idx, sizeof idx, "%05zu", i);
      out.push_back({std::string(shape_class_names[label]) + "_" + idx + ext, label, render_shape(label, spec, rng)});
    }
  }
  return out;
}

} // namespace fampe::data
