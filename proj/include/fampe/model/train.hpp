#pragma once

#include <algorithm>
#include <numeric>
#include <set>
#include <vector>

#include "fampe/error.hpp"
#include "fampe/model/model.hpp"
#include "fampe/random.hpp"
#include "fampe/tensor.hpp"

namespace fampe::model {

struct LabeledSample {
  Tensor image;
  std::size_t label = 0;
};

struct TrainOptions {
  std::size_t epochs = 10;
  double learning_rate = 0.05;
  std::uint64_t seed = 7;
};

struct TrainResult {
  double accuracy = 0.0;
  double final_mean_loss = 0.0;
};

inline std::size_t predict(const Model& m, const Tensor& x) {
  const Tensor z = m.logits(x);
  return static_cast<std::size_t>(std::max_element(z.values().begin(), z.values().end()) - z.values().begin());
}

inline double accuracy(const Model& m, const std::vector<LabeledSample>& data) {
  if (data.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& s : data) hits += predict(m, s.image) == s.label;
  return static_cast<double>(hits) / static_cast<double>(data.size());
}

/// Plain per-sample SGD with a seeded shuffle each epoch; updates `m` in place.
inline TrainResult train_sgd(Model& m, const std::vector<LabeledSample>& data, const TrainOptions& opt) {
  if (data.empty()) throw Error(errc::invalid_argument, "train_sgd: empty dataset");
  std::set<std::size_t> labels;
  for (const auto& s : data) {
    require_class(s.label, m.class_count());
    labels.insert(s.label);
  }
  if (labels.size() < 2) throw Error(errc::invalid_argument, "train_sgd: dataset must contain at least 2 classes");

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  RandomStream rng(opt.seed, {0x5ed});
  ParameterGradients grads;
  double epoch_loss = 0.0;
  for (std::size_t epoch = 0; epoch < opt.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);
    epoch_loss = 0.0;
    for (auto idx : order) {
      epoch_loss += m.parameter_gradient(data[idx].image, data[idx].label, grads);
      auto& params = m.parameters();
      for (std::size_t p = 0; p < params.size(); ++p) {
        for (std::size_t j = 0; j < params[p].size(); ++j) params[p][j] -= opt.learning_rate * grads[p][j];
      }
    }
    epoch_loss /= static_cast<double>(data.size());
  }
  return {accuracy(m, data), epoch_loss};
}

} // namespace fampe::model
