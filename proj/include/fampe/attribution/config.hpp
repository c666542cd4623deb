#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "fampe/error.hpp"
#include "fampe/tensor.hpp"

namespace fampe {

/// Hyperparameters shared by the FAMPE and AttEXplore engines.
struct FampeConfig {
  double epsilon = 48.0;        // additive spatial noise scale, pixel units (x/255)
  double sigma = 16.0;          // std dev of the multiplicative N(1, sigma) noise
  double eta = 0.05;            // attack step size
  std::size_t n_variants = 20;  // variants averaged per iteration
  std::size_t n_iters = 10;     // attack iterations
  double alpha = 0.5;           // low- vs high-frequency noise weight
  double tau = 0.9;             // energy fraction for the cutoff search
  std::uint64_t seed = 0;

  // Test hook: draw one multiplicative field and reuse it for both bands.
  bool shared_band_noise = false;
  // Clip attack iterates to [0,1]. Off by default.
  bool clip_iterates = false;

  void validate() const {
    const auto bad = [](const std::string& what) { return Error(errc::invalid_argument, "FampeConfig: " + what); };
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw bad("alpha must be in [0,1], got " + std::to_string(alpha));
    if (!(tau > 0.0 && tau <= 1.0)) throw bad("tau must be in (0,1], got " + std::to_string(tau));
    if (n_variants < 1) throw bad("n_variants must be >= 1");
    if (n_iters < 1) throw bad("n_iters must be >= 1");
    if (!(eta > 0.0) || !std::isfinite(eta)) throw bad("eta must be > 0");
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw bad("sigma must be >= 0");
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw bad("epsilon must be >= 0");
  }
};

enum class Aggregation : std::uint8_t { sum = 0, abs_sum = 1 };

inline const char* to_string(Aggregation a) { return a == Aggregation::sum ? "sum" : "abs-sum"; }

inline Aggregation parse_aggregation(const std::string& s) {
  if (s == "sum") return Aggregation::sum;
  if (s == "abs-sum" || s == "abs_sum") return Aggregation::abs_sum;
  throw Error(errc::invalid_argument, "unknown channel aggregation '" + s + "'");
}

/// Per-feature relevance with the input's CxHxW shape.
struct AttributionMap {
  Tensor values;
  Aggregation channel_aggregation = Aggregation::sum;

  /// HxW importance after combining channels with `channel_aggregation`.
  Grid pixel_importance() const {
    require_chw(values, "AttributionMap");
    const std::size_t C = values.dim(0), H = values.dim(1), W = values.dim(2);
    Grid out(H, W);
    for (std::size_t c = 0; c < C; ++c) {
      for (std::size_t p = 0; p < H * W; ++p) {
        const double v = values[c * H * W + p];
        out.data[p] += channel_aggregation == Aggregation::sum ? v : std::abs(v);
      }
    }
    return out;
  }
};

} // namespace fampe
