#pragma once

// End-to-end commands behind the `fampe` tool. Each takes a RunConfig and an
// output stream for its one-line status reports; files are written
// atomically.

#include <algorithm>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "fampe/attribution.hpp"
#include "fampe/data/synthetic_shapes.hpp"
#include "fampe/evaluation.hpp"
#include "fampe/io/dataset.hpp"
#include "fampe/io/files.hpp"
#include "fampe/io/image.hpp"
#include "fampe/model/model.hpp"
#include "fampe/model/spec.hpp"
#include "fampe/model/train.hpp"
#include "fampe/model/weights_io.hpp"
#include "fampe/parallel.hpp"

namespace fampe::pipeline {

namespace fs = std::filesystem;

enum class Method { fampe, ig, attexplore };

inline Method parse_method(const std::string& s) {
  if (s == "fampe") return Method::fampe;
  if (s == "ig") return Method::ig;
  if (s == "attexplore") return Method::attexplore;
  throw Error(errc::invalid_argument, "unknown method '" + s + "' (expected fampe, ig or attexplore)");
}

inline const char* to_string(Method m) {
  switch (m) {
  case Method::fampe: return "fampe";
  case Method::ig: return "ig";
  case Method::attexplore: return "attexplore";
  }
  return "?";
}

enum class IgBaseline { zero, input };

inline IgBaseline parse_ig_baseline(const std::string& s) {
  if (s == "zero" || s == "black") return IgBaseline::zero;
  if (s == "input") return IgBaseline::input;
  throw Error(errc::invalid_argument, "unknown IG baseline '" + s + "' (expected zero or input)");
}

struct RunConfig {
  // data
  fs::path dataset;
  fs::path out_dir = "out";
  data::SyntheticShapesSpec synth;

  // model
  fs::path model_spec;  // empty: built-in shapes CNN
  fs::path weights = "weights.famw";
  std::size_t classes = 0;  // 0: derive from dataset labels
  model::TrainOptions train;

  // attribution
  Method method = Method::fampe;
  FampeConfig fampe;
  std::size_t ig_steps = 64;
  IgBaseline ig_baseline = IgBaseline::zero;
  Aggregation aggregation = Aggregation::sum;
  std::string sample;  // filename or index within the dataset

  // evaluation
  evaluation::EvalOptions eval;
  std::vector<double> alphas = default_alpha_grid();
  std::size_t limit = 0;  // 0: every sample
  std::size_t threads = 1;
};

inline std::size_t dataset_class_count(const io::Dataset& ds) {
  std::size_t top = 0;
  for (const auto& s : ds.samples) top = std::max(top, s.label);
  return top + 1;
}

inline model::ModelSpec resolve_model_spec(const RunConfig& cfg, const Shape& image_shape, std::size_t classes) {
  if (!cfg.model_spec.empty()) {
    auto spec = model::load_model_spec(cfg.model_spec.string());
    if (spec.input_shape != image_shape) {
      throw Error(errc::shape_mismatch, "model spec input " + shape_string(spec.input_shape) + " does not match image shape " +
                                            shape_string(image_shape));
    }
    return spec;
  }
  return model::shapes_cnn(image_shape[0], image_shape[1], image_shape[2], classes);
}

inline model::Model load_model(const RunConfig& cfg, const io::Dataset& ds) {
  const std::size_t classes = cfg.classes ? cfg.classes : std::max<std::size_t>(dataset_class_count(ds), 2);
  const auto spec = resolve_model_spec(cfg, ds.samples.front().image.shape(), classes);
  if (!fs::exists(cfg.weights)) throw Error(errc::not_found, "weights file '" + cfg.weights.string() + "' does not exist");
  return model::load_weights(spec, cfg.weights);
}

// ---- synth -----------------------------------------------------------------

inline void cmd_synth(const RunConfig& cfg, std::ostream& log) {
  io::ensure_directory(cfg.out_dir);
  std::vector<io::DatasetEntry> entries;
  for (const auto& s : data::synthesize_shapes(cfg.synth)) {
    io::write_image(cfg.out_dir / s.name, s.image);
    entries.push_back({s.name, s.label});
  }
  io::write_atomic(cfg.out_dir / "labels.csv", io::labels_csv(entries));
  log << "samples=" << entries.size() << " dir=" << cfg.out_dir.string() << "\n";
}

// ---- train -----------------------------------------------------------------

inline double cmd_train(const RunConfig& cfg, std::ostream& log) {
  const auto ds = io::load_dataset(cfg.dataset);
  const std::size_t classes = cfg.classes ? cfg.classes : std::max<std::size_t>(dataset_class_count(ds), 2);
  const auto spec = resolve_model_spec(cfg, ds.samples.front().image.shape(), classes);
  auto net = model::Model::initialize(spec, cfg.train.seed);
  const auto result = model::train_sgd(net, ds.samples, cfg.train);
  if (cfg.weights.has_parent_path()) io::ensure_directory(cfg.weights.parent_path());
  model::save_weights(net, cfg.weights);
  log << "train_acc=" << evaluation::format_number(result.accuracy) << "\n";
  return result.accuracy;
}

// ---- attribution dispatch --------------------------------------------------

struct MethodOutput {
  AttributionMap map;
  std::optional<double> cutoff;
};

template <Classifier M>
MethodOutput compute_attribution(const RunConfig& cfg, const M& net, const Tensor& x, std::size_t y) {
  MethodOutput out;
  switch (cfg.method) {
  case Method::fampe: {
    auto r = fampe_attribute_with_cutoff(net, x, y, cfg.fampe);
    out.map = std::move(r.map);
    out.cutoff = r.cutoff.value;
    break;
  }
  case Method::ig: {
    const Tensor baseline = cfg.ig_baseline == IgBaseline::zero ? Tensor(x.shape()) : x;
    out.map = ig_attribute(net, x, y, baseline, cfg.ig_steps);
    break;
  }
  case Method::attexplore:
    out.map = attexplore_attribute(net, x, y, cfg.fampe);
    break;
  }
  out.map.channel_aggregation = cfg.aggregation;
  return out;
}

inline std::size_t find_sample(const io::Dataset& ds, const std::string& key) {
  for (std::size_t i = 0; i < ds.names.size(); ++i) {
    if (ds.names[i] == key) return i;
  }
  if (!key.empty() && key.find_first_not_of("0123456789") == std::string::npos) {
    const auto idx = static_cast<std::size_t>(std::stoull(key));
    if (idx < ds.size()) return idx;
  }
  if (key.empty()) return 0;
  throw Error(errc::not_found, "sample '" + key + "' not found in dataset");
}

struct AttributeOutputs {
  fs::path map_file;
  fs::path text_file;
  fs::path heatmap_file;
  AttributionMap map;
};

inline AttributeOutputs cmd_attribute(const RunConfig& cfg, std::ostream& log) {
  const auto ds = io::load_dataset(cfg.dataset);
  const auto net = load_model(cfg, ds);
  const std::size_t idx = find_sample(ds, cfg.sample);
  const auto& sample = ds.samples[idx];
  auto out = compute_attribution(cfg, net, sample.image, sample.label);

  io::ensure_directory(cfg.out_dir);
  AttributeOutputs files{cfg.out_dir / "map.fama", cfg.out_dir / "map.txt", cfg.out_dir / "heatmap.pgm", out.map};
  save_map(out.map, files.map_file);
  io::write_atomic(files.text_file, map_text(out.map));
  io::write_atomic(files.heatmap_file, io::encode_heatmap(out.map.pixel_importance()));
  log << "sample=" << ds.names[idx] << " method=" << to_string(cfg.method);
  if (out.cutoff) log << " cutoff=" << evaluation::format_number(*out.cutoff);
  log << " map=" << files.map_file.string() << "\n";
  return files;
}

// ---- evaluate --------------------------------------------------------------

inline std::size_t sample_count(const RunConfig& cfg, const io::Dataset& ds) {
  return cfg.limit ? std::min(cfg.limit, ds.size()) : ds.size();
}

inline evaluation::ScoreReport cmd_evaluate(const RunConfig& cfg, std::ostream& log) {
  cfg.fampe.validate();
  const auto ds = io::load_dataset(cfg.dataset);
  const auto net = load_model(cfg, ds);
  const std::size_t n = sample_count(cfg, ds);

  std::vector<evaluation::ScoreRow> rows(n);
  std::vector<evaluation::SampleScore> scores(n);
  parallel_for(n, cfg.threads, [&](std::size_t i) {
    const auto& s = ds.samples[i];
    const auto out = compute_attribution(cfg, net, s.image, s.label);
    scores[i] = evaluation::evaluate_map(net, s.image, s.label, out.map, cfg.eval);
    rows[i] = {ds.names[i], cfg.method == Method::fampe ? std::optional<double>(cfg.fampe.alpha) : std::nullopt,
               scores[i].insertion, scores[i].deletion, out.cutoff};
  });
  const auto report = evaluation::aggregate_report(scores);
  io::ensure_directory(cfg.out_dir);
  io::write_atomic(cfg.out_dir / "scores.csv", evaluation::score_csv(rows));
  const std::vector<double> grid = cfg.method == Method::fampe ? std::vector<double>{cfg.fampe.alpha} : std::vector<double>{};
  io::write_atomic(cfg.out_dir / "summary.json", evaluation::summary_json(to_string(cfg.method), report, grid));
  log << "method=" << to_string(cfg.method) << " n=" << n << " mean_insertion=" << evaluation::format_number(report.mean_insertion)
      << " mean_deletion=" << evaluation::format_number(report.mean_deletion) << "\n";
  return report;
}

// ---- ablate ----------------------------------------------------------------

struct AblationResult {
  evaluation::ScoreReport fampe;       // per-sample best over alpha, with per-alpha breakdown
  evaluation::ScoreReport attexplore;  // baseline at the same hyperparameters
  std::vector<double> cutoffs;
  std::string table_csv;
};

inline std::string ablation_table_csv(const evaluation::ScoreReport& fampe, const evaluation::ScoreReport& baseline) {
  using evaluation::format_number;
  const auto& br = *fampe.per_alpha;
  std::string out = "row,insertion,deletion,insertion_freq_pct,deletion_freq_pct\n";
  out += "AttEXplore," + format_number(baseline.mean_insertion) + "," + format_number(baseline.mean_deletion) + ",,\n";
  out += "FAMPE," + format_number(fampe.mean_insertion) + "," + format_number(fampe.mean_deletion) + ",,\n";
  for (std::size_t a = 0; a < br.alphas.size(); ++a) {
    out += format_number(br.alphas[a]) + "," + format_number(br.mean_insertion[a]) + "," + format_number(br.mean_deletion[a]) + "," +
           format_number(br.insertion_best_frequency[a]) + "," + format_number(br.deletion_best_frequency[a]) + "\n";
  }
  return out;
}

inline AblationResult cmd_ablate_alpha(const RunConfig& cfg, std::ostream& log) {
  cfg.fampe.validate();
  const auto ds = io::load_dataset(cfg.dataset);
  const auto net = load_model(cfg, ds);
  const std::size_t n = sample_count(cfg, ds);

  std::vector<std::vector<evaluation::SampleScore>> matrix(n);
  std::vector<evaluation::SampleScore> baseline(n);
  std::vector<double> cutoffs(n);
  parallel_for(n, cfg.threads, [&](std::size_t i) {
    const auto& s = ds.samples[i];
    const auto sweep = alpha_sweep(net, s.image, s.label, cfg.fampe, cfg.alphas, cfg.eval);
    matrix[i] = sweep.scores;
    cutoffs[i] = sweep.cutoff.value;
    auto base_map = attexplore_attribute(net, s.image, s.label, cfg.fampe);
    base_map.channel_aggregation = cfg.aggregation;
    baseline[i] = evaluation::evaluate_map(net, s.image, s.label, base_map, cfg.eval);
  });

  AblationResult result;
  result.fampe = evaluation::aggregate_alpha_report(cfg.alphas, matrix);
  result.attexplore = evaluation::aggregate_report(baseline);
  result.cutoffs = cutoffs;
  result.table_csv = ablation_table_csv(result.fampe, result.attexplore);

  std::vector<evaluation::ScoreRow> rows, base_rows;
  std::vector<std::pair<double, double>> scatter;
  const auto& br = *result.fampe.per_alpha;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < cfg.alphas.size(); ++a) {
      rows.push_back({ds.names[i], cfg.alphas[a], matrix[i][a].insertion, matrix[i][a].deletion, cutoffs[i]});
    }
    base_rows.push_back({ds.names[i], std::nullopt, baseline[i].insertion, baseline[i].deletion, std::nullopt});
    scatter.emplace_back(cutoffs[i], cfg.alphas[br.best_insertion_index[i]]);
  }
  io::ensure_directory(cfg.out_dir);
  io::write_atomic(cfg.out_dir / "ablation.csv", result.table_csv);
  io::write_atomic(cfg.out_dir / "scores.csv", evaluation::score_csv(rows));
  io::write_atomic(cfg.out_dir / "attexplore_scores.csv", evaluation::score_csv(base_rows));
  io::write_atomic(cfg.out_dir / "scatter.txt", evaluation::emit_cutoff_alpha_scatter(scatter));
  io::write_atomic(cfg.out_dir / "summary.json", evaluation::summary_json("fampe", result.fampe, cfg.alphas));
  log << result.table_csv;
  return result;
}

} // namespace fampe::pipeline
