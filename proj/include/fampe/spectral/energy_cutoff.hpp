#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "fampe/error.hpp"
#include "fampe/spectral/fft.hpp"
#include "fampe/spectral/mask.hpp"
#include "fampe/tensor.hpp"

namespace fampe::spectral {

// Smallest integer r with r*r >= d2.
inline long long ceil_sqrt(long long d2) {
  auto r = static_cast<long long>(std::sqrt(static_cast<double>(d2)));
  while (r * r < d2) ++r;
  while (r > 0 && (r - 1) * (r - 1) >= d2) --r;
  return r;
}

/// Energy-based cutoff over a centered power grid: the smallest integer radius
/// r >= 1 whose disk (DC excluded) holds at least `tau` of the non-DC energy.
inline CutoffRadius energy_cutoff_from_power(const Grid& power, double tau) {
  if (!(tau > 0.0 && tau <= 1.0)) {
    throw Error(errc::invalid_argument, "energy_cutoff: tau must be in (0, 1], got " + std::to_string(tau));
  }
  const long long max_ring = static_cast<long long>(std::ceil(max_radius(power.rows, power.cols)));
  std::vector<double> ring_energy(static_cast<std::size_t>(max_ring) + 1, 0.0);
  double total = 0.0;
  for (std::size_t r = 0; r < power.rows; ++r) {
    for (std::size_t c = 0; c < power.cols; ++c) {
      const long long d2 = squared_center_distance(power.rows, power.cols, r, c);
      if (d2 == 0) continue;
      ring_energy[static_cast<std::size_t>(ceil_sqrt(d2))] += power(r, c);
      total += power(r, c);
    }
  }
  if (!(total > 0.0)) {
    throw Error(errc::degenerate_spectrum, "energy_cutoff: all non-DC spectral energy is zero");
  }
  const double target = tau * total;
  double cumulative = 0.0;
  for (long long radius = 1; radius <= max_ring; ++radius) {
    cumulative += ring_energy[static_cast<std::size_t>(radius)];
    if (cumulative >= target) return CutoffRadius{static_cast<double>(radius)};
  }
  // Rounding can leave the running sum a few ulps short of tau == 1.
  return CutoffRadius{static_cast<double>(max_ring)};
}

inline Grid power_spectrum(const Spectrum& spec) {
  Grid out(spec.rows, spec.cols);
  for (std::size_t i = 0; i < spec.size(); ++i) out.data[i] = std::norm(spec.data[i]);
  return out;
}

inline CutoffRadius energy_cutoff(const Spectrum& spec, double tau) {
  if (!spec.shifted) throw Error(errc::bad_layout, "energy_cutoff: expects a shifted spectrum");
  return energy_cutoff_from_power(power_spectrum(spec), tau);
}

/// One cutoff per image: the ring search runs on the mean of the per-channel
/// power spectra.
inline CutoffRadius image_energy_cutoff(const Tensor& image, double tau) {
  require_chw(image, "image_energy_cutoff");
  const std::size_t channels = image.dim(0);
  Grid mean_power(image.dim(1), image.dim(2));
  for (std::size_t ch = 0; ch < channels; ++ch) {
    const Grid power = power_spectrum(fftshift(fft2d(channel_of(image, ch))));
    for (std::size_t i = 0; i < power.size(); ++i) mean_power.data[i] += power.data[i] / static_cast<double>(channels);
  }
  return energy_cutoff_from_power(mean_power, tau);
}

/// Cutoff used when the image has no non-DC energy at all.
inline CutoffRadius fallback_cutoff(std::size_t rows, std::size_t cols) {
  return CutoffRadius{max_radius(rows, cols) / 2.0};
}

inline CutoffRadius image_energy_cutoff_or_fallback(const Tensor& image, double tau) {
  try {
    return image_energy_cutoff(image, tau);
  } catch (const Error& e) {
    if (e.code() != errc::degenerate_spectrum) throw;
    return fallback_cutoff(image.dim(1), image.dim(2));
  }
}

} // namespace fampe::spectral
