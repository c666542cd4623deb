#pragma once

#include <optional>

#include "fampe/attribution/config.hpp"
#include "fampe/attribution/path.hpp"
#include "fampe/attribution/variants.hpp"
#include "fampe/model/classifier.hpp"
#include "fampe/spectral.hpp"

namespace fampe {

/// Cutoff for an image, falling back to r_max / 2 when the image carries no
/// non-DC energy.
inline spectral::CutoffRadius attribution_cutoff(const Tensor& x, double tau) {
  require_chw(x, "attribution_cutoff");
  return spectral::image_energy_cutoff_or_fallback(x, tau);
}

/// Mean loss gradient over the N frequency-aware variants of x_t at iteration t.
template <Classifier M>
Tensor mean_input_gradient(const M& model, const Tensor& x_t, std::size_t y, spectral::CutoffRadius cutoff,
                           const FampeConfig& cfg, std::size_t iter) {
  cfg.validate();
  const BandMasks masks = BandMasks::make(x_t.dim(1), x_t.dim(2), cutoff);
  return average_variant_gradient(model, y, cfg.n_variants,
                                  [&](std::size_t i) { return frequency_aware_variant(x_t, masks, cfg, i, iter); });
}

struct FampeResult {
  AttributionMap map;
  spectral::CutoffRadius cutoff;
};

/// FAMPE attribution. The cutoff is computed once from the original image
/// unless one is supplied.
template <Classifier M>
FampeResult fampe_attribute_with_cutoff(const M& model, const Tensor& x, std::size_t y, const FampeConfig& cfg,
                                        std::optional<spectral::CutoffRadius> cutoff = std::nullopt) {
  require_chw(x, "fampe_attribute");
  const spectral::CutoffRadius cf = cutoff ? *cutoff : attribution_cutoff(x, cfg.tau);
  const BandMasks masks = BandMasks::make(x.dim(1), x.dim(2), cf);
  auto map = integrate_attack_path(model, x, y, cfg, [&](const Tensor& x_t, std::size_t i, std::size_t t) {
    return frequency_aware_variant(x_t, masks, cfg, i, t);
  });
  return {std::move(map), cf};
}

template <Classifier M>
AttributionMap fampe_attribute(const M& model, const Tensor& x, std::size_t y, const FampeConfig& cfg) {
  return fampe_attribute_with_cutoff(model, x, y, cfg).map;
}

/// AttEXplore baseline: same attack loop with all-pass DCT-domain noise.
template <Classifier M>
AttributionMap attexplore_attribute(const M& model, const Tensor& x, std::size_t y, const FampeConfig& cfg) {
  require_chw(x, "attexplore_attribute");
  return integrate_attack_path(model, x, y, cfg, [&](const Tensor& x_t, std::size_t i, std::size_t t) {
    return attexplore_variant(x_t, cfg, i, t);
  });
}

} // namespace fampe
