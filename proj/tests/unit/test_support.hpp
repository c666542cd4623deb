#pragma once

// Independent reference implementations used only by the tests. None of these
// call into the library code paths they check.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "fampe/attribution/config.hpp"
#include "fampe/model/loss.hpp"
#include "fampe/model/spec.hpp"
#include "fampe/random.hpp"
#include "fampe/tensor.hpp"

namespace fampe::testing {

using cplx = std::complex<double>;

inline Grid random_grid(std::size_t rows, std::size_t cols, std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
  RandomStream rng(seed);
  Grid g(rows, cols);
  for (auto& v : g.data) v = rng.uniform(lo, hi);
  return g;
}

inline Tensor random_image(std::size_t c, std::size_t h, std::size_t w, std::uint64_t seed) {
  RandomStream rng(seed);
  Tensor t({c, h, w});
  for (auto& v : t.storage()) v = rng.uniform();
  return t;
}

// Direct 2-D DFT: sum over every input sample for every bin.
inline std::vector<cplx> naive_dft2(const std::vector<cplx>& in, std::size_t H, std::size_t W, int sign) {
  std::vector<cplx> out(H * W);
  for (std::size_t u = 0; u < H; ++u) {
    for (std::size_t v = 0; v < W; ++v) {
      cplx acc = 0.0;
      for (std::size_t y = 0; y < H; ++y) {
        for (std::size_t x = 0; x < W; ++x) {
          const double ang = sign * 2.0 * std::numbers::pi *
                             (static_cast<double>(u * y) / static_cast<double>(H) + static_cast<double>(v * x) / static_cast<double>(W));
          acc += in[y * W + x] * cplx(std::cos(ang), std::sin(ang));
        }
      }
      out[u * W + v] = acc;
    }
  }
  return out;
}

// Centered-layout index of natural-layout bin (u, v): roll by floor(n/2).
inline std::size_t centered_index(std::size_t u, std::size_t v, std::size_t H, std::size_t W) {
  return ((u + H / 2) % H) * W + (v + W / 2) % W;
}

// Spatial filtering through the direct DFT with a mask given in centered layout.
inline Grid naive_filter(const Grid& g, const std::vector<double>& centered_mask) {
  std::vector<cplx> in(g.data.begin(), g.data.end());
  auto F = naive_dft2(in, g.rows, g.cols, -1);
  for (std::size_t u = 0; u < g.rows; ++u) {
    for (std::size_t v = 0; v < g.cols; ++v) F[u * g.cols + v] *= centered_mask[centered_index(u, v, g.rows, g.cols)];
  }
  auto back = naive_dft2(F, g.rows, g.cols, +1);
  Grid out(g.rows, g.cols);
  for (std::size_t i = 0; i < out.size(); ++i) out.data[i] = back[i].real() / static_cast<double>(g.size());
  return out;
}

// Gaussian mask straight from its definition, centered layout.
inline std::vector<double> reference_lowpass(std::size_t H, std::size_t W, double cutoff) {
  std::vector<double> m(H * W);
  for (std::size_t r = 0; r < H; ++r) {
    for (std::size_t c = 0; c < W; ++c) {
      const double dr = static_cast<double>(r) - static_cast<double>(H / 2);
      const double dc = static_cast<double>(c) - static_cast<double>(W / 2);
      m[r * W + c] = std::exp(-(dr * dr + dc * dc) / (2.0 * cutoff * cutoff));
    }
  }
  return m;
}

// Direct 1-D orthonormal DCT-II.
inline std::vector<double> naive_dct1(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += x[j] * std::cos(std::numbers::pi * (2.0 * j + 1.0) * k / (2.0 * n));
    out[k] = acc * (k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n));
  }
  return out;
}

// Linear classifier logits = W x + b, with closed-form gradients.
struct LinearClassifier {
  std::size_t classes = 2;
  Shape input_shape;
  std::vector<double> w;  // classes x features
  std::vector<double> b;

  std::size_t features() const { return shape_size(input_shape); }
  std::size_t class_count() const { return classes; }

  Tensor logits(const Tensor& x) const {
    Tensor z({classes});
    for (std::size_t k = 0; k < classes; ++k) {
      double acc = b.empty() ? 0.0 : b[k];
      for (std::size_t j = 0; j < features(); ++j) acc += w[k * features() + j] * x[j];
      z[k] = acc;
    }
    return z;
  }
  Tensor input_gradient(const Tensor& x, std::size_t y) const {
    Tensor p = model::softmax(logits(x));
    p[y] -= 1.0;
    Tensor g(x.shape());
    for (std::size_t j = 0; j < features(); ++j) {
      for (std::size_t k = 0; k < classes; ++k) g[j] += w[k * features() + j] * p[k];
    }
    return g;
  }
  Tensor logit_gradient(const Tensor& x, std::size_t y) const {
    Tensor g(x.shape());
    for (std::size_t j = 0; j < features(); ++j) g[j] = w[y * features() + j];
    return g;
  }
};

// Smooth two-layer model: logit_k = sum_h v[k,h] tanh(u[h] . x + c[h]).
struct TanhClassifier {
  std::size_t classes = 3;
  std::size_t hidden = 5;
  Shape input_shape;
  std::vector<double> u, c, v;

  static TanhClassifier random(Shape shape, std::size_t classes, std::size_t hidden, std::uint64_t seed) {
    RandomStream rng(seed);
    TanhClassifier m{classes, hidden, shape, {}, {}, {}};
    const std::size_t d = shape_size(shape);
    for (std::size_t i = 0; i < hidden * d; ++i) m.u.push_back(rng.normal(0.0, 1.0 / std::sqrt(static_cast<double>(d))));
    for (std::size_t i = 0; i < hidden; ++i) m.c.push_back(rng.normal(0.0, 0.5));
    for (std::size_t i = 0; i < classes * hidden; ++i) m.v.push_back(rng.normal(0.0, 1.0));
    return m;
  }

  std::size_t class_count() const { return classes; }
  std::size_t dims() const { return shape_size(input_shape); }

  std::vector<double> pre(const Tensor& x) const {
    std::vector<double> a(hidden);
    for (std::size_t h = 0; h < hidden; ++h) {
      double acc = c[h];
      for (std::size_t j = 0; j < dims(); ++j) acc += u[h * dims() + j] * x[j];
      a[h] = acc;
    }
    return a;
  }
  Tensor logits(const Tensor& x) const {
    const auto a = pre(x);
    Tensor z({classes});
    for (std::size_t k = 0; k < classes; ++k) {
      for (std::size_t h = 0; h < hidden; ++h) z[k] += v[k * hidden + h] * std::tanh(a[h]);
    }
    return z;
  }
  Tensor backprop(const Tensor& x, const std::vector<double>& dz) const {
    const auto a = pre(x);
    Tensor g(x.shape());
    for (std::size_t h = 0; h < hidden; ++h) {
      double dh = 0.0;
      for (std::size_t k = 0; k < classes; ++k) dh += dz[k] * v[k * hidden + h];
      dh *= 1.0 - std::tanh(a[h]) * std::tanh(a[h]);
      for (std::size_t j = 0; j < dims(); ++j) g[j] += dh * u[h * dims() + j];
    }
    return g;
  }
  Tensor input_gradient(const Tensor& x, std::size_t y) const {
    Tensor p = model::softmax(logits(x));
    p[y] -= 1.0;
    return backprop(x, p.storage());
  }
  Tensor logit_gradient(const Tensor& x, std::size_t y) const {
    std::vector<double> dz(classes, 0.0);
    dz[y] = 1.0;
    return backprop(x, dz);
  }
};

// Model whose class-0 probability is a fixed function of the input (through
// a user-supplied score). Two classes; logit gap = logit(p).
template <class ProbFn>
struct ProbabilityModel {
  ProbFn prob;
  std::size_t class_count() const { return 2; }
  Tensor logits(const Tensor& x) const {
    const double p = std::clamp(prob(x), 0.0, 1.0);
    Tensor z({2});
    if (p >= 1.0) {
      z[0] = 800.0;
    } else if (p <= 0.0) {
      z[1] = 800.0;
    } else {
      z[0] = std::log(p);
      z[1] = std::log1p(-p);
    }
    return z;
  }
  Tensor input_gradient(const Tensor& x, std::size_t) const { return Tensor(x.shape()); }
  Tensor logit_gradient(const Tensor& x, std::size_t) const { return Tensor(x.shape()); }
};

template <class ProbFn>
ProbabilityModel<ProbFn> probability_model(ProbFn fn) {
  return {fn};
}

// Central finite differences of f at coordinate j.
template <class F>
double central_difference(F&& f, Tensor x, std::size_t j, double h) {
  const double orig = x[j];
  x[j] = orig + h;
  const double fp = f(x);
  x[j] = orig - h;
  const double fm = f(x);
  return (fp - fm) / (2.0 * h);
}

// Brute force: sort non-DC bins by radius, accumulate power until tau of the
// total is reached, report the integer radius that first encloses that bin.
inline double oracle_cutoff(const Grid& g, double tau) {
  const auto F = naive_dft2(std::vector<cplx>(g.data.begin(), g.data.end()), g.rows, g.cols, -1);
  std::vector<std::pair<double, double>> bins;  // (radius, power)
  for (std::size_t u = 0; u < g.rows; ++u) {
    for (std::size_t v = 0; v < g.cols; ++v) {
      const std::size_t ci = centered_index(u, v, g.rows, g.cols);
      const double dr = static_cast<double>(ci / g.cols) - static_cast<double>(g.rows / 2);
      const double dc = static_cast<double>(ci % g.cols) - static_cast<double>(g.cols / 2);
      const double radius = std::sqrt(dr * dr + dc * dc);
      if (radius == 0.0) continue;
      bins.emplace_back(radius, std::norm(F[u * g.cols + v]));
    }
  }
  std::sort(bins.begin(), bins.end());
  double total = 0.0;
  for (auto& b : bins) total += b.second;
  double acc = 0.0;
  for (std::size_t i = 0; i < bins.size(); ++i) {
    acc += bins[i].second;
    // Include every bin tied at this radius before testing.
    if (i + 1 < bins.size() && bins[i + 1].first == bins[i].first) continue;
    if (acc >= tau * total) return std::max(1.0, std::ceil(bins[i].first - 1e-12));
  }
  return std::ceil(bins.back().first - 1e-12);
}

// alpha * lowpass + (1 - alpha) * highpass through the direct DFT.
inline Grid reference_variant(const Grid& g, double cutoff, double alpha) {
  auto low = reference_lowpass(g.rows, g.cols, cutoff);
  for (auto& v : low) v = alpha * v + (1.0 - alpha) * (1.0 - v);
  return naive_filter(g, low);
}

inline double relative_error(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-7}); }

// A spread of architectures covering every layer kind.
inline model::ModelSpec gradient_check_spec(std::size_t k) {
  using L = model::LayerSpec;
  switch (k % 5) {
  case 0: return {{6}, {L::dense(6, 5), L::relu(), L::dense(5, 3)}};
  case 1: return {{1, 6, 6}, {L::conv2d(1, 2, 3), L::relu(), L::flatten(), L::dense(32, 3)}};
  case 2: return {{2, 8, 8}, {L::conv2d(2, 3, 3, 2, 1), L::relu(), L::avgpool2d(2), L::flatten(), L::dense(12, 4)}};
  case 3:
    return {{1, 7, 7},
            {L::conv2d(1, 2, 3, 1, 1), L::relu(), L::conv2d(2, 2, 3, 2, 0), L::avgpool2d(3), L::flatten(), L::dense(2, 4)}};
  default: return model::shapes_cnn(1, 8, 8, 4);
  }
}

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Map whose ranking is exactly `perm` (perm[0] most important).
inline AttributionMap map_for_order(const std::vector<std::size_t>& perm, std::size_t h, std::size_t w, std::size_t channels = 1) {
  Tensor v({channels, h, w});
  for (std::size_t k = 0; k < perm.size(); ++k)
    for (std::size_t c = 0; c < channels; ++c) v[c * h * w + perm[k]] = static_cast<double>(perm.size() - k) / channels;
  return {v, Aggregation::sum};
}

// One pixel per step: reproduce the curve directly from the permutation.
template <class Prob>
double oracle_area(Prob&& prob, const Tensor& start, const Tensor& source, const std::vector<std::size_t>& perm) {
  const std::size_t C = start.dim(0), P = start.dim(1) * start.dim(2);
  std::vector<double> p;
  for (std::size_t k = 0; k <= P; ++k) {
    Tensor img = start;
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t c = 0; c < C; ++c) img[c * P + perm[j]] = source[c * P + perm[j]];
    p.push_back(prob(img));
  }
  double area = 0.0;
  for (std::size_t k = 0; k < P; ++k) area += (p[k] + p[k + 1]) / (2.0 * static_cast<double>(P));
  return area;
}

} // namespace fampe::testing
