#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "fampe/error.hpp"
#include "fampe/model/loss.hpp"
#include "fampe/model/spec.hpp"
#include "fampe/random.hpp"
#include "fampe/tensor.hpp"

namespace fampe::model {

/// Parameter gradients, one tensor per entry of Model::parameters().
using ParameterGradients = std::vector<Tensor>;

/// Feed-forward classifier: a ModelSpec plus its weights. Dense layers own a
/// [out x in] weight and an [out] bias; conv2d layers own an
/// [out_ch x in_ch x k x k] kernel and an [out_ch] bias.
class Model {
public:
  Model() = default;

  Model(ModelSpec spec, std::vector<Tensor> parameters) : spec_(std::move(spec)), params_(std::move(parameters)) {
    spec_.validate();
    shapes_ = spec_.activation_shapes();
    const auto expected = parameter_shapes(spec_);
    if (expected.size() != params_.size()) {
      throw Error(errc::shape_mismatch, "model expects " + std::to_string(expected.size()) + " parameter tensors, got " +
                                            std::to_string(params_.size()));
    }
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (expected[i] != params_[i].shape()) {
        throw Error(errc::shape_mismatch, "parameter tensor " + std::to_string(i) + " has shape " +
                                              shape_string(params_[i].shape()) + ", spec requires " + shape_string(expected[i]));
      }
    }
    build_offsets();
  }

  static std::vector<Shape> parameter_shapes(const ModelSpec& spec) {
    std::vector<Shape> out;
    for (const auto& l : spec.layers) {
      if (l.kind == LayerKind::dense) {
        out.push_back({l.out, l.in});
        out.push_back({l.out});
      } else if (l.kind == LayerKind::conv2d) {
        out.push_back({l.out, l.in, l.kernel, l.kernel});
        out.push_back({l.out});
      }
    }
    return out;
  }

  /// He-uniform weights, zero biases.
  static Model initialize(const ModelSpec& spec, std::uint64_t seed) {
    spec.validate();
    RandomStream rng(seed, {0x1417});
    std::vector<Tensor> params;
    for (const auto& shape : parameter_shapes(spec)) {
      Tensor t(shape);
      if (shape.size() > 1) {
        const double fan_in = static_cast<double>(shape_size(shape) / shape[0]);
        const double bound = std::sqrt(6.0 / fan_in);
        for (double& v : t.storage()) v = rng.uniform(-bound, bound);
      }
      params.push_back(std::move(t));
    }
    return Model(spec, std::move(params));
  }

  /// Model with every parameter set to zero; its logits are identically zero.
  static Model zeros(const ModelSpec& spec) {
    std::vector<Tensor> params;
    for (const auto& shape : parameter_shapes(spec)) params.emplace_back(shape);
    return Model(spec, std::move(params));
  }

  const ModelSpec& spec() const noexcept { return spec_; }
  const Shape& input_shape() const noexcept { return spec_.input_shape; }
  std::size_t class_count() const { return shapes_.back()[0]; }
  const std::vector<Tensor>& parameters() const noexcept { return params_; }
  std::vector<Tensor>& parameters() noexcept { return params_; }

  Tensor logits(const Tensor& x) const {
    std::vector<Tensor> acts;
    return forward_cached(x, acts);
  }

  Tensor probabilities(const Tensor& x) const { return softmax(logits(x)); }

  double loss(const Tensor& x, std::size_t y) const { return cross_entropy(logits(x), y); }

  /// d loss(x, y) / dx by reverse-mode differentiation.
  Tensor input_gradient(const Tensor& x, std::size_t y) const {
    std::vector<Tensor> acts;
    const Tensor z = forward_cached(x, acts);
    return backward(acts, cross_entropy_gradient(z, y), nullptr);
  }

  /// d logits[y] / dx.
  Tensor logit_gradient(const Tensor& x, std::size_t y) const {
    std::vector<Tensor> acts;
    const Tensor z = forward_cached(x, acts);
    require_class(y, z.size());
    Tensor seed(z.shape());
    seed[y] = 1.0;
    return backward(acts, seed, nullptr);
  }

  /// Loss and its gradient with respect to every parameter tensor.
  double parameter_gradient(const Tensor& x, std::size_t y, ParameterGradients& grads) const {
    std::vector<Tensor> acts;
    const Tensor z = forward_cached(x, acts);
    grads.clear();
    for (const auto& p : params_) grads.emplace_back(p.shape());
    backward(acts, cross_entropy_gradient(z, y), &grads);
    return cross_entropy(z, y);
  }

private:
  void build_offsets() {
    param_index_.assign(spec_.layers.size(), 0);
    std::size_t next = 0;
    for (std::size_t i = 0; i < spec_.layers.size(); ++i) {
      if (spec_.layers[i].has_parameters()) {
        param_index_[i] = next;
        next += 2;
      }
    }
  }

  void check_input(const Tensor& x) const {
    if (x.shape() != spec_.input_shape) {
      throw Error(errc::shape_mismatch, "model input shape " + shape_string(spec_.input_shape) + " does not match tensor shape " +
                                            shape_string(x.shape()));
    }
  }

  // acts[i] receives the input of layer i.
  Tensor forward_cached(const Tensor& x, std::vector<Tensor>& acts) const {
    check_input(x);
    acts.clear();
    acts.reserve(spec_.layers.size());
    Tensor cur = x;
    for (std::size_t i = 0; i < spec_.layers.size(); ++i) {
      acts.push_back(cur);
      cur = forward_layer(i, acts.back());
    }
    return cur;
  }

  // Kernel taps [first, last) that land inside an input axis of length n
  // for output position o.
  static std::pair<std::size_t, std::size_t> kernel_span(std::size_t o, const LayerSpec& l, std::size_t n) {
    const std::size_t start = o * l.stride;
    const std::size_t first = start < l.pad ? l.pad - start : 0;
    if (start >= n + l.pad) return {0, 0};
    const std::size_t last = std::min(l.kernel, n + l.pad - start);
    return {std::min(first, last), last};
  }

  // Output positions [first, last) whose tap `t` lands inside an input axis
  // of length n.
  static std::pair<std::size_t, std::size_t> output_span(std::size_t t, const LayerSpec& l, std::size_t n, std::size_t outs) {
    // need o * stride + t >= pad and o * stride + t < n + pad
    const std::size_t first = t >= l.pad ? 0 : (l.pad - t + l.stride - 1) / l.stride;
    if (t >= n + l.pad) return {0, 0};
    const std::size_t last = std::min(outs, (n + l.pad - t + l.stride - 1) / l.stride);
    return {std::min(first, last), last};
  }

  Tensor forward_layer(std::size_t i, const Tensor& in) const {
    const LayerSpec& l = spec_.layers[i];
    const Shape& out_shape = shapes_[i + 1];
    Tensor out(out_shape);
    switch (l.kind) {
    case LayerKind::dense: {
      const Tensor& w = params_[param_index_[i]];
      const Tensor& b = params_[param_index_[i] + 1];
      for (std::size_t o = 0; o < l.out; ++o) {
        double acc = b[o];
        const double* row = w.data() + o * l.in;
        for (std::size_t j = 0; j < l.in; ++j) acc += row[j] * in[j];
        out[o] = acc;
      }
      break;
    }
    case LayerKind::conv2d: {
      const Tensor& w = params_[param_index_[i]];
      const Tensor& b = params_[param_index_[i] + 1];
      const std::size_t H = in.dim(1), W = in.dim(2), OH = out_shape[1], OW = out_shape[2], k = l.kernel;
      const double* src = in.data();
      const double* wp = w.data();
      double* dst = out.data();
      // Each output still sums its taps in (ic, ky, kx) order after the bias.
      for (std::size_t oc = 0; oc < l.out; ++oc) {
        double* plane_out = dst + oc * OH * OW;
        std::fill(plane_out, plane_out + OH * OW, b[oc]);
        for (std::size_t ic = 0; ic < l.in; ++ic) {
          const double* plane = src + ic * H * W;
          for (std::size_t ky = 0; ky < k; ++ky) {
            const auto [oy0, oy1] = output_span(ky, l, H, OH);
            for (std::size_t kx = 0; kx < k; ++kx) {
              const auto [ox0, ox1] = output_span(kx, l, W, OW);
              const double wv = wp[((oc * l.in + ic) * k + ky) * k + kx];
              for (std::size_t oy = oy0; oy < oy1; ++oy) {
                const double* row = plane + (oy * l.stride + ky - l.pad) * W + kx - l.pad;
                double* orow = plane_out + oy * OW;
                for (std::size_t ox = ox0; ox < ox1; ++ox) orow[ox] += wv * row[ox * l.stride];
              }
            }
          }
        }
      }
      break;
    }
    case LayerKind::relu:
      for (std::size_t j = 0; j < in.size(); ++j) out[j] = in[j] > 0.0 ? in[j] : 0.0;
      break;
    case LayerKind::flatten:
      out.storage() = in.storage();
      break;
    case LayerKind::avgpool2d: {
      const std::size_t k = l.kernel;
      const double scale = 1.0 / static_cast<double>(k * k);
      for (std::size_t c = 0; c < out_shape[0]; ++c) {
        for (std::size_t oy = 0; oy < out_shape[1]; ++oy) {
          for (std::size_t ox = 0; ox < out_shape[2]; ++ox) {
            double acc = 0.0;
            for (std::size_t ky = 0; ky < k; ++ky) {
              for (std::size_t kx = 0; kx < k; ++kx) acc += in.at(c, oy * k + ky, ox * k + kx);
            }
            out.at(c, oy, ox) = acc * scale;
          }
        }
      }
      break;
    }
    }
    return out;
  }

  Tensor backward(const std::vector<Tensor>& acts, Tensor grad, ParameterGradients* pgrads) const {
    for (std::size_t i = spec_.layers.size(); i-- > 0;) grad = backward_layer(i, acts[i], grad, pgrads);
    return grad;
  }

  Tensor backward_layer(std::size_t i, const Tensor& in, const Tensor& gout, ParameterGradients* pgrads) const {
    const LayerSpec& l = spec_.layers[i];
    Tensor gin(in.shape());
    switch (l.kind) {
    case LayerKind::dense: {
      const Tensor& w = params_[param_index_[i]];
      for (std::size_t o = 0; o < l.out; ++o) {
        const double go = gout[o];
        if (go == 0.0) continue;
        const double* row = w.data() + o * l.in;
        for (std::size_t j = 0; j < l.in; ++j) gin[j] += row[j] * go;
      }
      if (pgrads) {
        Tensor& gw = (*pgrads)[param_index_[i]];
        Tensor& gb = (*pgrads)[param_index_[i] + 1];
        for (std::size_t o = 0; o < l.out; ++o) {
          gb[o] += gout[o];
          for (std::size_t j = 0; j < l.in; ++j) gw[o * l.in + j] += gout[o] * in[j];
        }
      }
      break;
    }
    case LayerKind::conv2d: {
      const Tensor& w = params_[param_index_[i]];
      const std::size_t H = in.dim(1), W = in.dim(2), OH = gout.dim(1), OW = gout.dim(2), k = l.kernel;
      Tensor* gw = pgrads ? &(*pgrads)[param_index_[i]] : nullptr;
      Tensor* gb = pgrads ? &(*pgrads)[param_index_[i] + 1] : nullptr;
      const double* src = in.data();
      const double* wp = w.data();
      double* gsrc = gin.data();
      for (std::size_t oc = 0; oc < l.out; ++oc) {
        for (std::size_t oy = 0; oy < OH; ++oy) {
          const auto [ky0, ky1] = kernel_span(oy, l, H);
          for (std::size_t ox = 0; ox < OW; ++ox) {
            const double go = gout.at(oc, oy, ox);
            if (gb) (*gb)[oc] += go;
            if (go == 0.0) continue;
            const auto [kx0, kx1] = kernel_span(ox, l, W);
            for (std::size_t ic = 0; ic < l.in; ++ic) {
              const std::size_t wbase = (oc * l.in + ic) * k * k;
              for (std::size_t ky = ky0; ky < ky1; ++ky) {
                const std::size_t base = ic * H * W + (oy * l.stride + ky - l.pad) * W + ox * l.stride - l.pad;
                for (std::size_t kx = kx0; kx < kx1; ++kx) {
                  const std::size_t widx = wbase + ky * k + kx;
                  gsrc[base + kx] += wp[widx] * go;
                  if (gw) (*gw)[widx] += src[base + kx] * go;
                }
              }
            }
          }
        }
      }
      break;
    }
    case LayerKind::relu:
      for (std::size_t j = 0; j < in.size(); ++j) gin[j] = in[j] > 0.0 ? gout[j] : 0.0;
      break;
    case LayerKind::flatten:
      gin.storage() = gout.storage();
      break;
    case LayerKind::avgpool2d: {
      const std::size_t k = l.kernel;
      const double scale = 1.0 / static_cast<double>(k * k);
      for (std::size_t c = 0; c < gout.dim(0); ++c) {
        for (std::size_t oy = 0; oy < gout.dim(1); ++oy) {
          for (std::size_t ox = 0; ox < gout.dim(2); ++ox) {
            const double g = gout.at(c, oy, ox) * scale;
            for (std::size_t ky = 0; ky < k; ++ky) {
              for (std::size_t kx = 0; kx < k; ++kx) gin.at(c, oy * k + ky, ox * k + kx) = g;
            }
          }
        }
      }
      break;
    }
    }
    return gin;
  }

  ModelSpec spec_;
  std::vector<Tensor> params_;
  std::vector<Shape> shapes_;
  std::vector<std::size_t> param_index_;
};

} // namespace fampe::model
