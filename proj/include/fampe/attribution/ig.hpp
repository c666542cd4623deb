#pragma once

#include "fampe/attribution/config.hpp"
#include "fampe/error.hpp"
#include "fampe/model/classifier.hpp"
#include "fampe/tensor.hpp"

namespace fampe {

/// Integrated gradients of the class-y logit along the straight line from
/// `baseline` to `x`, midpoint rule with `steps` evaluations.
template <Classifier M>
AttributionMap ig_attribute(const M& model, const Tensor& x, std::size_t y, const Tensor& baseline, std::size_t steps) {
  require_same_shape(x, baseline, "ig_attribute");
  if (steps < 1) throw Error(errc::invalid_argument, "ig_attribute: steps must be >= 1");
  model::require_class(y, model.class_count());
  Tensor diff(x.shape());
  for (std::size_t k = 0; k < x.size(); ++k) diff[k] = x[k] - baseline[k];

  Tensor grad_sum(x.shape());
  Tensor point(x.shape());
  for (std::size_t s = 1; s <= steps; ++s) {
    const double a = (static_cast<double>(s) - 0.5) / static_cast<double>(steps);
    for (std::size_t k = 0; k < x.size(); ++k) point[k] = baseline[k] + a * diff[k];
    const Tensor g = model.logit_gradient(point, y);
    for (std::size_t k = 0; k < x.size(); ++k) grad_sum[k] += g[k];
  }
  Tensor out(x.shape());
  for (std::size_t k = 0; k < x.size(); ++k) out[k] = diff[k] * grad_sum[k] / static_cast<double>(steps);
  return AttributionMap{std::move(out), Aggregation::sum};
}

} // namespace fampe
