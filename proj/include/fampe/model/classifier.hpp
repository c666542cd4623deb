#pragma once

#include <concepts>
#include <cstddef>

#include "fampe/model/loss.hpp"
#include "fampe/tensor.hpp"

namespace fampe {

/// Anything the attribution and evaluation code can query: logits, the
/// gradient of the cross-entropy loss with respect to the input, and the
/// gradient of a single logit with respect to the input.
template <class M>
concept Classifier = requires(const M& m, const Tensor& x, std::size_t y) {
  { m.class_count() } -> std::convertible_to<std::size_t>;
  { m.logits(x) } -> std::same_as<Tensor>;
  { m.input_gradient(x, y) } -> std::same_as<Tensor>;
  { m.logit_gradient(x, y) } -> std::same_as<Tensor>;
};

template <Classifier M>
double class_probability(const M& model, const Tensor& x, std::size_t y) {
  return model::softmax(model.logits(x))[y];
}

} // namespace fampe
