#pragma once

#include <vector>

#include "fampe/attribution/fampe.hpp"
#include "fampe/error.hpp"
#include "fampe/evaluation/insertion_deletion.hpp"

namespace fampe {

/// {0.0, 0.1, ..., 1.0}.
inline std::vector<double> default_alpha_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 10; ++i) grid.push_back(i / 10.0);
  return grid;
}

struct AlphaSweepResult {
  std::vector<double> alphas;
  std::vector<AttributionMap> maps;
  std::vector<evaluation::SampleScore> scores;
  spectral::CutoffRadius cutoff;
  double best_insertion = 0.0;
  double best_deletion = 0.0;
  double best_insertion_alpha = 0.0;
  double best_deletion_alpha = 0.0;
};

/// One FAMPE run per alpha with everything else (seed included) held fixed,
/// each map scored by insertion and deletion. Ties resolve to the earliest
/// alpha in the list.
template <Classifier M>
AlphaSweepResult alpha_sweep(const M& model, const Tensor& x, std::size_t y, const FampeConfig& cfg,
                             const std::vector<double>& alphas, const evaluation::EvalOptions& eval = {}) {
  if (alphas.empty()) throw Error(errc::invalid_argument, "alpha_sweep: empty alpha list");
  for (double a : alphas) {
    if (!(a >= 0.0 && a <= 1.0)) throw Error(errc::invalid_argument, "alpha_sweep: alpha " + std::to_string(a) + " outside [0,1]");
  }
  AlphaSweepResult out;
  out.alphas = alphas;
  out.cutoff = attribution_cutoff(x, cfg.tau);
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    FampeConfig run = cfg;
    run.alpha = alphas[a];
    auto map = fampe_attribute_with_cutoff(model, x, y, run, out.cutoff).map;
    const auto score = evaluation::evaluate_map(model, x, y, map, eval);
    if (a == 0 || score.insertion > out.best_insertion) {
      out.best_insertion = score.insertion;
      out.best_insertion_alpha = alphas[a];
    }
    if (a == 0 || score.deletion < out.best_deletion) {
      out.best_deletion = score.deletion;
      out.best_deletion_alpha = alphas[a];
    }
    out.scores.push_back(score);
    out.maps.push_back(std::move(map));
  }
  return out;
}

} // namespace fampe
