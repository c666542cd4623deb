#pragma once

// Insertion / deletion curves.
//
// Pixels (all channels together) are ranked by channel-aggregated importance,
// ties broken by ascending row-major index. With P pixels and S steps, step k
// exposes min(k * ceil(P / S), P) pixels; the curve records the true-class
// probability at every step, including the endpoints at fraction 0 and 1,
// and the score is its trapezoidal area over the fraction axis.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "fampe/attribution/config.hpp"
#include "fampe/error.hpp"
#include "fampe/model/classifier.hpp"
#include "fampe/tensor.hpp"

namespace fampe::evaluation {

enum class BaselineKind { zero, blur };

inline BaselineKind parse_baseline_kind(const std::string& s) {
  if (s == "zero" || s == "black") return BaselineKind::zero;
  if (s == "blur") return BaselineKind::blur;
  throw Error(errc::invalid_argument, "unknown baseline kind '" + s + "' (expected zero or blur)");
}

struct EvalOptions {
  std::size_t steps = 100;
  BaselineKind baseline = BaselineKind::zero;
  double blur_sigma = 5.0;  // pixels, for BaselineKind::blur
};

struct PerturbationCurve {
  std::vector<double> fractions;
  std::vector<double> probabilities;
};

/// Pixel indices in descending importance.
inline std::vector<std::size_t> rank_pixels(const AttributionMap& map) {
  require_finite(map.values.values(), "rank_pixels");
  const Grid importance = map.pixel_importance();
  std::vector<std::size_t> order(importance.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return importance.data[a] > importance.data[b]; });
  return order;
}

/// Separable Gaussian blur with clamped borders.
inline Tensor gaussian_blur(const Tensor& x, double sigma) {
  require_chw(x, "gaussian_blur");
  if (!(sigma > 0.0)) return x;
  const auto radius = static_cast<long long>(std::ceil(3.0 * sigma));
  std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
  double norm = 0.0;
  for (long long i = -radius; i <= radius; ++i) {
    const double v = std::exp(-static_cast<double>(i * i) / (2.0 * sigma * sigma));
    kernel[static_cast<std::size_t>(i + radius)] = v;
    norm += v;
  }
  for (double& v : kernel) v /= norm;
  const std::size_t C = x.dim(0), H = x.dim(1), W = x.dim(2);
  const auto clampi = [](long long v, std::size_t n) {
    return static_cast<std::size_t>(std::clamp<long long>(v, 0, static_cast<long long>(n) - 1));
  };
  Tensor tmp(x.shape()), out(x.shape());
  for (std::size_t c = 0; c < C; ++c) {
    for (std::size_t r = 0; r < H; ++r) {
      for (std::size_t col = 0; col < W; ++col) {
        double acc = 0.0;
        for (long long i = -radius; i <= radius; ++i) {
          acc += kernel[static_cast<std::size_t>(i + radius)] * x.at(c, r, clampi(static_cast<long long>(col) + i, W));
        }
        tmp.at(c, r, col) = acc;
      }
    }
    for (std::size_t r = 0; r < H; ++r) {
      for (std::size_t col = 0; col < W; ++col) {
        double acc = 0.0;
        for (long long i = -radius; i <= radius; ++i) {
          acc += kernel[static_cast<std::size_t>(i + radius)] * tmp.at(c, clampi(static_cast<long long>(r) + i, H), col);
        }
        out.at(c, r, col) = acc;
      }
    }
  }
  return out;
}

inline Tensor make_baseline(const Tensor& x, const EvalOptions& opt) {
  return opt.baseline == BaselineKind::zero ? Tensor(x.shape()) : gaussian_blur(x, opt.blur_sigma);
}

/// Trapezoidal area under the curve over the fraction axis.
inline double curve_area(const PerturbationCurve& curve) {
  double area = 0.0;
  for (std::size_t k = 1; k < curve.fractions.size(); ++k) {
    area += 0.5 * (curve.probabilities[k] + curve.probabilities[k - 1]) * (curve.fractions[k] - curve.fractions[k - 1]);
  }
  return std::clamp(area, 0.0, 1.0);
}

namespace detail {

// Starts from `start` and overwrites ranked pixels with values from `source`.
template <Classifier M>
PerturbationCurve transfer_curve(const M& model, std::size_t y, const Tensor& start, const Tensor& source,
                                 const std::vector<std::size_t>& order, std::size_t steps) {
  if (steps < 1) throw Error(errc::invalid_argument, "insertion/deletion: steps must be >= 1");
  model::require_class(y, model.class_count());
  const std::size_t C = start.dim(0), plane = start.dim(1) * start.dim(2);
  const std::size_t P = plane;
  const std::size_t chunk = (P + steps - 1) / steps;
  Tensor img = start;
  PerturbationCurve curve;
  std::size_t done = 0;
  curve.fractions.push_back(0.0);
  curve.probabilities.push_back(class_probability(model, img, y));
  while (done < P) {
    const std::size_t next = std::min(done + chunk, P);
    for (std::size_t k = done; k < next; ++k) {
      for (std::size_t c = 0; c < C; ++c) img[c * plane + order[k]] = source[c * plane + order[k]];
    }
    done = next;
    curve.fractions.push_back(static_cast<double>(done) / static_cast<double>(P));
    curve.probabilities.push_back(class_probability(model, img, y));
  }
  return curve;
}

} // namespace detail

template <Classifier M>
PerturbationCurve insertion_curve(const M& model, const Tensor& x, std::size_t y, const AttributionMap& map,
                                  const EvalOptions& opt = {}) {
  require_chw(x, "insertion_curve");
  require_same_shape(x, map.values, "insertion_curve");
  return detail::transfer_curve(model, y, make_baseline(x, opt), x, rank_pixels(map), opt.steps);
}

template <Classifier M>
PerturbationCurve deletion_curve(const M& model, const Tensor& x, std::size_t y, const AttributionMap& map,
                                 const EvalOptions& opt = {}) {
  require_chw(x, "deletion_curve");
  require_same_shape(x, map.values, "deletion_curve");
  return detail::transfer_curve(model, y, x, make_baseline(x, opt), rank_pixels(map), opt.steps);
}

template <Classifier M>
double insertion_score(const M& model, const Tensor& x, std::size_t y, const AttributionMap& map, const EvalOptions& opt = {}) {
  return curve_area(insertion_curve(model, x, y, map, opt));
}

template <Classifier M>
double deletion_score(const M& model, const Tensor& x, std::size_t y, const AttributionMap& map, const EvalOptions& opt = {}) {
  return curve_area(deletion_curve(model, x, y, map, opt));
}

struct SampleScore {
  double insertion = 0.0;
  double deletion = 0.0;
};

template <Classifier M>
SampleScore evaluate_map(const M& model, const Tensor& x, std::size_t y, const AttributionMap& map, const EvalOptions& opt = {}) {
  return {insertion_score(model, x, y, map, opt), deletion_score(model, x, y, map, opt)};
}

} // namespace fampe::evaluation
