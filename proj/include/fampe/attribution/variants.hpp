#pragma once

// Sample generators feeding the attack loop.
//
// Both generators draw from one RandomStream per (seed, iteration, variant,
// channel): first the additive spatial noise in row-major order, then the
// multiplicative spectral field. Any variant can be regenerated on its own,
// and scheduling order never changes a draw.

#include <algorithm>
#include <cstdint>

#include "fampe/attribution/config.hpp"
#include "fampe/random.hpp"
#include "fampe/spectral.hpp"
#include "fampe/tensor.hpp"

namespace fampe {

/// Matched low/high masks for one image size and cutoff.
struct BandMasks {
  spectral::FrequencyMask low;
  spectral::FrequencyMask high;

  static BandMasks make(std::size_t rows, std::size_t cols, spectral::CutoffRadius cutoff) {
    return {spectral::gaussian_lowpass_mask(rows, cols, cutoff), spectral::highpass_mask(rows, cols, cutoff)};
  }
};

inline RandomStream variant_stream(std::uint64_t seed, std::size_t iter, std::size_t variant, std::size_t channel) {
  return RandomStream(seed, {iter, variant, channel});
}

/// alpha * L * n1 + (1 - alpha) * H * n2 over the centered spectrum, with
/// n1, n2 ~ N(1, sigma) elementwise (n2 = n1 when `shared`).
inline Grid fampe_spectral_multiplier(const BandMasks& masks, double alpha, double sigma, bool shared, RandomStream& rng) {
  const std::size_t n = masks.low.values.size();
  Grid out(masks.low.values.rows, masks.low.values.cols);
  std::vector<double> n1(n);
  for (auto& v : n1) v = rng.normal(1.0, sigma);
  for (std::size_t k = 0; k < n; ++k) {
    const double n2 = shared ? n1[k] : rng.normal(1.0, sigma);
    out.data[k] = alpha * masks.low.values.data[k] * n1[k] + (1.0 - alpha) * masks.high.values.data[k] * n2;
  }
  return out;
}

/// All-pass N(1, sigma) field over DCT coefficients.
inline Grid attexplore_spectral_multiplier(std::size_t rows, std::size_t cols, double sigma, RandomStream& rng) {
  Grid out(rows, cols);
  for (auto& v : out.data) v = rng.normal(1.0, sigma);
  return out;
}

namespace detail {

inline Grid add_spatial_noise(const Tensor& x, std::size_t c, double epsilon, RandomStream& rng) {
  Grid g = channel_of(x, c);
  const double scale = epsilon / 255.0;
  for (auto& v : g.data) v += rng.normal() * scale;
  return g;
}

} // namespace detail

/// Frequency-aware variant with precomputed masks. `max_imaginary`, when
/// given, receives the largest imaginary residual dropped by the inverse FFT.
inline Tensor frequency_aware_variant(const Tensor& x_t, const BandMasks& masks, const FampeConfig& cfg, std::size_t variant,
                                      std::size_t iter, double* max_imaginary = nullptr) {
  require_chw(x_t, "frequency_aware_variant");
  Tensor out(x_t.shape());
  for (std::size_t c = 0; c < x_t.dim(0); ++c) {
    RandomStream rng = variant_stream(cfg.seed, iter, variant, c);
    const Grid noisy = detail::add_spatial_noise(x_t, c, cfg.epsilon, rng);
    spectral::Spectrum spec = spectral::fftshift(spectral::fft2d(noisy));
    const Grid mult = fampe_spectral_multiplier(masks, cfg.alpha, cfg.sigma, cfg.shared_band_noise, rng);
    for (std::size_t k = 0; k < spec.size(); ++k) spec.data[k] *= mult.data[k];
    const auto back = spectral::ifft2d(spectral::ifftshift(spec));
    if (max_imaginary) *max_imaginary = std::max(*max_imaginary, back.imaginary_residual);
    set_channel(out, c, back.values);
  }
  return out;
}

inline Tensor frequency_aware_variant(const Tensor& x_t, spectral::CutoffRadius cutoff, const FampeConfig& cfg,
                                      std::size_t variant, std::size_t iter) {
  require_chw(x_t, "frequency_aware_variant");
  return frequency_aware_variant(x_t, BandMasks::make(x_t.dim(1), x_t.dim(2), cutoff), cfg, variant, iter);
}

/// idct(dct(x + noise) * N(1, sigma)) per channel.
inline Tensor attexplore_variant(const Tensor& x_t, const FampeConfig& cfg, std::size_t variant, std::size_t iter) {
  require_chw(x_t, "attexplore_variant");
  Tensor out(x_t.shape());
  for (std::size_t c = 0; c < x_t.dim(0); ++c) {
    RandomStream rng = variant_stream(cfg.seed, iter, variant, c);
    Grid coeffs = spectral::dct2d(detail::add_spatial_noise(x_t, c, cfg.epsilon, rng));
    const Grid mult = attexplore_spectral_multiplier(coeffs.rows, coeffs.cols, cfg.sigma, rng);
    for (std::size_t k = 0; k < coeffs.size(); ++k) coeffs.data[k] *= mult.data[k];
    set_channel(out, c, spectral::idct2d(coeffs));
  }
  return out;
}

} // namespace fampe
