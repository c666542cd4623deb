#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "fampe/error.hpp"
#include "fampe/tensor.hpp"

namespace fampe::model {

inline void require_class(std::size_t y, std::size_t classes) {
  if (y >= classes) {
    throw Error(errc::invalid_argument, "label " + std::to_string(y) + " out of range for " + std::to_string(classes) + " classes");
  }
}

/// softmax over a logit vector, max-subtracted.
inline Tensor softmax(const Tensor& logits) {
  Tensor p(logits.shape());
  const double m = *std::max_element(logits.values().begin(), logits.values().end());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(logits[i] - m);
    sum += p[i];
  }
  for (std::size_t i = 0; i < p.size(); ++i) p[i] /= sum;
  return p;
}

/// Softmax cross-entropy. The largest logit's own exp(0) term is kept out of
/// the sum and added back through log1p, so saturated logits keep their tiny
/// loss instead of rounding to zero.
inline double cross_entropy(const Tensor& logits, std::size_t y) {
  require_class(y, logits.size());
  const auto vals = logits.values();
  const auto top = static_cast<std::size_t>(std::max_element(vals.begin(), vals.end()) - vals.begin());
  const double m = vals[top];
  double rest = 0.0;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (i != top) rest += std::exp(vals[i] - m);
  }
  return std::max(0.0, (m - vals[y]) + std::log1p(rest));
}

/// d(cross_entropy)/d(logits) = softmax - onehot(y).
inline Tensor cross_entropy_gradient(const Tensor& logits, std::size_t y) {
  require_class(y, logits.size());
  Tensor g = softmax(logits);
  g[y] -= 1.0;
  return g;
}

} // namespace fampe::model
