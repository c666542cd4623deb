// fampe: synthesize data, train a classifier, compute and score attribution maps.
//
// Option precedence: command-line flags > --config file > FAMPE_SEED > defaults.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fampe/pipeline/commands.hpp"

namespace {

using fampe::pipeline::RunConfig;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

// `key = value` lines, '#' comments, become `--key=value` arguments.
std::vector<std::string> config_arguments(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw fampe::Error(fampe::errc::not_found, "cannot open config file '" + path + "'");
  std::vector<std::string> args;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw fampe::Error(fampe::errc::format, "config line " + std::to_string(line_no) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    for (char& c : key) {
      if (c == '_') c = '-';
    }
    args.push_back("--" + key + "=" + trim(line.substr(eq + 1)));
  }
  return args;
}

std::string find_config_path(const std::vector<std::string>& args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  return path;
}

std::vector<double> parse_alpha_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    item = trim(item);
    if (item.empty()) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw fampe::Error(fampe::errc::invalid_argument, "alpha list entry '" + item + "' is not a number");
    if (!(v >= 0.0 && v <= 1.0)) throw fampe::Error(fampe::errc::invalid_argument, "alpha " + item + " outside [0,1]");
    out.push_back(v);
  }
  if (out.empty()) throw fampe::Error(fampe::errc::invalid_argument, "alpha list is empty");
  return out;
}

struct Strings {
  std::string dataset, out_dir, model_spec, weights, method = "fampe", ig_baseline = "zero", aggregation = "sum",
                                                        baseline = "zero", alphas, config;
};

void add_model_options(CLI::App* sub, RunConfig& cfg, Strings& s) {
  sub->add_option("--dataset", s.dataset, "Dataset directory (images + labels.csv)")->required();
  sub->add_option("--model-spec", s.model_spec, "Model spec file (default: built-in shapes CNN)");
  sub->add_option("--weights", s.weights, "FAMW weights file");
  sub->add_option("--classes", cfg.classes, "Class count for the built-in CNN (0: from labels)");
}

void add_attribution_options(CLI::App* sub, RunConfig& cfg, Strings& s) {
  sub->add_option("--method", s.method, "fampe | ig | attexplore");
  sub->add_option("--epsilon", cfg.fampe.epsilon, "Additive noise scale in pixel units (/255)");
  sub->add_option("--sigma", cfg.fampe.sigma, "Std dev of the multiplicative spectral noise");
  sub->add_option("--eta", cfg.fampe.eta, "Attack step size");
  sub->add_option("--variants", cfg.fampe.n_variants, "Variants per iteration");
  sub->add_option("--iters", cfg.fampe.n_iters, "Attack iterations");
  sub->add_option("--alpha", cfg.fampe.alpha, "Low/high frequency noise weight");
  sub->add_option("--tau", cfg.fampe.tau, "Energy fraction for the cutoff");
  sub->add_flag("--clip", cfg.fampe.clip_iterates, "Clip attack iterates to [0,1]");
  sub->add_flag("--shared-noise", cfg.fampe.shared_band_noise, "Share one noise field across both bands");
  sub->add_option("--ig-steps", cfg.ig_steps, "Integrated-gradients steps");
  sub->add_option("--ig-baseline", s.ig_baseline, "zero | input");
  sub->add_option("--aggregation", s.aggregation, "Channel aggregation: sum | abs-sum");
}

void add_eval_options(CLI::App* sub, RunConfig& cfg, Strings& s) {
  sub->add_option("--steps", cfg.eval.steps, "Insertion/deletion steps");
  sub->add_option("--baseline", s.baseline, "Insertion/deletion baseline: zero | blur");
  sub->add_option("--blur-sigma", cfg.eval.blur_sigma, "Blur baseline sigma in pixels");
  sub->add_option("--limit", cfg.limit, "Evaluate only the first N samples (0: all)");
  sub->add_option("--threads", cfg.threads, "Worker threads");
}

int run(int argc, char** argv) {
  std::vector<std::string> user(argv + 1, argv + argc);

  // Lowest-precedence arguments go first; options keep their last value.
  std::vector<std::string> args;
  if (!user.empty() && user[0].rfind("-", 0) != 0) {
    args.push_back(user[0]);
    if (const char* env = std::getenv("FAMPE_SEED"); env && *env) args.push_back(std::string("--seed=") + env);
    if (const auto path = find_config_path(user); !path.empty()) {
      for (auto& a : config_arguments(path)) args.push_back(std::move(a));
    }
    args.insert(args.end(), user.begin() + 1, user.end());
  } else {
    args = user;
  }

  RunConfig cfg;
  cfg.threads = fampe::default_thread_count();
  Strings s;
  std::uint64_t seed = 7;

  CLI::App app{"Frequency-aware adversarial attribution toolkit"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  auto* synth = app.add_subcommand("synth", "Generate the synthetic shapes dataset");
  auto* train = app.add_subcommand("train", "Train a classifier");
  auto* attribute = app.add_subcommand("attribute", "Compute one attribution map and heatmap");
  auto* evaluate = app.add_subcommand("evaluate", "Score a method with insertion/deletion");
  auto* ablate = app.add_subcommand("ablate", "Alpha ablation with per-sample best-alpha selection");

  for (auto* sub : {synth, train, attribute, evaluate, ablate}) {
    sub->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    sub->add_option("--config", s.config, "key = value config file");
    sub->add_option("--seed", seed, "Random seed");
  }
  synth->add_option("--out-dir", s.out_dir, "Output dataset directory")->required();
  synth->add_option("--size", cfg.synth.size, "Image side length");
  synth->add_option("--channels", cfg.synth.channels, "1 (PGM) or 3 (PPM)");
  synth->add_option("--classes", cfg.synth.classes, "Number of shape classes (2-4)");
  synth->add_option("--per-class", cfg.synth.samples_per_class, "Samples per class");
  synth->add_option("--noise", cfg.synth.noise, "Additive noise std dev");

  add_model_options(train, cfg, s);
  train->add_option("--epochs", cfg.train.epochs, "Training epochs");
  train->add_option("--learning-rate", cfg.train.learning_rate, "SGD learning rate");

  add_model_options(attribute, cfg, s);
  add_attribution_options(attribute, cfg, s);
  attribute->add_option("--sample", cfg.sample, "Sample filename or index");
  attribute->add_option("--out-dir", s.out_dir, "Output directory");

  for (auto* sub : {evaluate, ablate}) {
    add_model_options(sub, cfg, s);
    add_attribution_options(sub, cfg, s);
    add_eval_options(sub, cfg, s);
    sub->add_option("--out-dir", s.out_dir, "Output directory");
  }
  ablate->add_option("--alphas", s.alphas, "Comma-separated alpha grid (default 0,0.1,...,1)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    for (char& c : msg) {
      if (c == '\n') c = ' ';
    }
    std::cerr << "error: usage: " << msg << "\n";
    return 2;
  }

  if (!s.dataset.empty()) cfg.dataset = s.dataset;
  if (!s.out_dir.empty()) cfg.out_dir = s.out_dir;
  if (!s.model_spec.empty()) cfg.model_spec = s.model_spec;
  if (!s.weights.empty()) cfg.weights = s.weights;
  cfg.method = fampe::pipeline::parse_method(s.method);
  cfg.ig_baseline = fampe::pipeline::parse_ig_baseline(s.ig_baseline);
  cfg.aggregation = fampe::parse_aggregation(s.aggregation);
  cfg.eval.baseline = fampe::evaluation::parse_baseline_kind(s.baseline);
  if (!s.alphas.empty()) cfg.alphas = parse_alpha_list(s.alphas);
  cfg.synth.seed = seed;
  cfg.train.seed = seed;
  cfg.fampe.seed = seed;

  if (*synth) {
    fampe::pipeline::cmd_synth(cfg, std::cout);
  } else if (*train) {
    fampe::pipeline::cmd_train(cfg, std::cout);
  } else if (*attribute) {
    cfg.fampe.validate();
    fampe::pipeline::cmd_attribute(cfg, std::cout);
  } else if (*evaluate) {
    fampe::pipeline::cmd_evaluate(cfg, std::cout);
  } else if (*ablate) {
    fampe::pipeline::cmd_ablate_alpha(cfg, std::cout);
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const fampe::Error& e) {
    std::cerr << "error: " << e.code() << ": " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
  }
  return 1;
}
