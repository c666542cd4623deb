#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "fampe/attribution/config.hpp"
#include "fampe/error.hpp"
#include "fampe/model/classifier.hpp"
#include "fampe/tensor.hpp"

namespace fampe {

/// eta * sign(g), with sign(0) = 0.
inline Tensor step_direction(const Tensor& g, double eta) {
  Tensor out(g.shape());
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = g[i] > 0.0 ? eta : (g[i] < 0.0 ? -eta : 0.0);
  return out;
}

/// Average loss gradient over `n` variants produced by `make_variant(i)`;
/// each gradient is taken at the variant itself.
template <Classifier M, class VariantFn>
Tensor average_variant_gradient(const M& model, std::size_t y, std::size_t n, VariantFn&& make_variant) {
  Tensor mean;
  for (std::size_t i = 0; i < n; ++i) {
    const Tensor g = model.input_gradient(make_variant(i), y);
    if (i == 0) {
      mean = Tensor(g.shape());
    }
    for (std::size_t k = 0; k < g.size(); ++k) mean[k] += g[k];
  }
  const double inv = 1.0 / static_cast<double>(n);
  for (double& v : mean.storage()) v *= inv;
  return mean;
}

struct PathState {
  std::size_t t = 0;
  Tensor x_t;
  Tensor accumulated;
};

/// Discretized non-linear path integral shared by FAMPE and AttEXplore:
///   g = mean variant gradient at x_t;  d = eta sign(g);
///   A += d * g;  x_{t+1} = x_t + d   (loss ascent).
/// `make_variant(x_t, i, t)` supplies the variants.
template <Classifier M, class VariantFn>
AttributionMap integrate_attack_path(const M& model, const Tensor& x, std::size_t y, const FampeConfig& cfg,
                                     VariantFn&& make_variant) {
  cfg.validate();
  model::require_class(y, model.class_count());
  PathState state{0, x, Tensor(x.shape())};
  for (; state.t < cfg.n_iters; ++state.t) {
    const Tensor g = average_variant_gradient(model, y, cfg.n_variants,
                                              [&](std::size_t i) { return make_variant(state.x_t, i, state.t); });
    const Tensor delta = step_direction(g, cfg.eta);
    for (std::size_t k = 0; k < x.size(); ++k) {
      state.accumulated[k] += delta[k] * g[k];
      state.x_t[k] += delta[k];
      if (cfg.clip_iterates) state.x_t[k] = std::clamp(state.x_t[k], 0.0, 1.0);
    }
    if (!all_finite(state.accumulated.values()) || !all_finite(state.x_t.values())) {
      throw Error(errc::non_finite, "attack path produced a non-finite value at iteration " + std::to_string(state.t));
    }
  }
  return AttributionMap{std::move(state.accumulated), Aggregation::sum};
}

} // namespace fampe
