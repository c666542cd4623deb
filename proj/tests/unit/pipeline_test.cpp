#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "fampe/attribution.hpp"
#include "fampe/io/dataset.hpp"
#include "fampe/io/files.hpp"
#include "fampe/io/image.hpp"
#include "fampe/model/model.hpp"
#include "fampe/model/weights_io.hpp"
#include "fampe/spectral.hpp"

namespace fampe {
namespace {

namespace fs = std::filesystem;

struct RunResult {
  int status = 0;
  std::string out;
  std::string err;
};

// Runs the CLI with `args` from `cwd`; stdout and stderr are captured.
RunResult run_cli(const fs::path& cwd, const std::string& args, const std::string& env = "") {
  const fs::path out = cwd / "stdout.txt", err = cwd / "stderr.txt";
  const std::string cmd = "cd '" + cwd.string() + "' && " + env + " '" + FAMPE_CLI_PATH + "' " + args + " > '" + out.string() +
                          "' 2> '" + err.string() + "'";
  const int raw = std::system(cmd.c_str());
  RunResult r;
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = io::read_text(out);
  r.err = io::read_text(err);
  return r;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

// One shared dataset and trained model for the whole suite.
class Pipeline : public ::testing::Test {
protected:
  static inline fs::path root;
  static inline std::string train_stdout;

  static void SetUpTestSuite() {
    root = fs::temp_directory_path() / "fampe_pipeline_test";
    fs::remove_all(root);
    fs::create_directories(root);
    const auto synth = run_cli(root, "synth --out-dir ds --per-class 50 --seed 1");
    ASSERT_EQ(synth.status, 0) << synth.err;
    const auto train = run_cli(root, "train --dataset ds --weights w.famw --seed 7");
    ASSERT_EQ(train.status, 0) << train.err;
    train_stdout = train.out;
  }
  static void TearDownTestSuite() { fs::remove_all(root); }

  fs::path work() const {
    const fs::path dir = root / ::testing::UnitTest::GetInstance()->current_test_info()->name();
    fs::create_directories(dir);
    return dir;
  }
  static std::string model_args() { return "--dataset ../ds --weights ../w.famw"; }
};

TEST_F(Pipeline, SynthWritesImagesAndLabels) {
  std::size_t images = 0;
  for (const auto& e : fs::directory_iterator(root / "ds")) images += e.path().extension() == ".pgm";
  EXPECT_EQ(images, 200u);
  const auto rows = lines(io::read_text(root / "ds" / "labels.csv"));
  ASSERT_EQ(rows.size(), 201u);
  EXPECT_EQ(rows[0], "filename,label");
}

TEST_F(Pipeline, SynthIsBytewiseDeterministic) {
  const fs::path dir = work();
  ASSERT_EQ(run_cli(dir, "synth --out-dir again --per-class 50 --seed 1").status, 0);
  for (const auto& e : fs::directory_iterator(root / "ds")) {
    EXPECT_EQ(io::read_bytes(e.path()), io::read_bytes(dir / "again" / e.path().filename())) << e.path();
  }
}

TEST_F(Pipeline, TrainReportsPinnedAccuracy) {
  ASSERT_EQ(train_stdout.rfind("train_acc=", 0), 0u) << train_stdout;
  const double acc = std::stod(train_stdout.substr(10));
  EXPECT_GE(acc, 0.95);
  // Regression value from the first verified run.
  EXPECT_EQ(train_stdout, "train_acc=0.995\n");
}

TEST_F(Pipeline, ZeroEpochsWritesInitialization) {
  const fs::path dir = work();
  ASSERT_EQ(run_cli(dir, "train --dataset ../ds --weights init.famw --epochs 0 --seed 13").status, 0);
  const auto init = model::Model::initialize(model::shapes_cnn(1, 32, 32, 4), 13);
  EXPECT_EQ(io::read_bytes(dir / "init.famw"), model::encode_weights(init.parameters()));
}

TEST_F(Pipeline, MissingDatasetFailsNamingPath) {
  const auto r = run_cli(work(), "train --dataset no_such_dir --weights w.famw");
  EXPECT_NE(r.status, 0);
  const auto err = lines(r.err);
  ASSERT_EQ(err.size(), 1u) << r.err;
  EXPECT_EQ(err[0].rfind("error: not_found: ", 0), 0u);
  EXPECT_NE(err[0].find("no_such_dir"), std::string::npos);
}

TEST_F(Pipeline, ErrorsAreSingleMachineParseableLines) {
  const fs::path dir = work();
  for (const std::string& args : {"attribute " + model_args() + " --method bogus", "attribute " + model_args() + " --alpha 1.5",
                                 std::string("train --dataset ../ds --no-such-flag"), std::string("train")}) {
    const auto r = run_cli(dir, args);
    EXPECT_NE(r.status, 0) << args;
    const auto err = lines(r.err);
    ASSERT_EQ(err.size(), 1u) << args << "\n" << r.err;
    EXPECT_EQ(err[0].rfind("error: ", 0), 0u) << err[0];
    EXPECT_NE(err[0].find(": ", 7), std::string::npos) << err[0];
  }
}

TEST_F(Pipeline, AttributeWritesMapAndHeatmap) {
  const fs::path dir = work();
  const auto r = run_cli(dir, "attribute " + model_args() + " --method fampe --alpha 0.3 --sample disk_00004.pgm --out-dir out");
  ASSERT_EQ(r.status, 0) << r.err;
  const auto heat_bytes = io::read_bytes(dir / "out" / "heatmap.pgm");
  EXPECT_EQ(std::string(heat_bytes.begin(), heat_bytes.begin() + 3), "P5\n");
  const Tensor heat = io::decode_pnm(heat_bytes);
  EXPECT_EQ(heat.shape(), (Shape{1, 32, 32}));
  EXPECT_EQ(*std::max_element(heat.values().begin(), heat.values().end()), 1.0);
  const auto map = load_map(dir / "out" / "map.fama");
  EXPECT_EQ(map.values.shape(), (Shape{1, 32, 32}));
  EXPECT_EQ(lines(io::read_text(dir / "out" / "map.txt")).size(), 1024u);
}

TEST_F(Pipeline, IgWithInputBaselineIsZero) {
  const fs::path dir = work();
  ASSERT_EQ(run_cli(dir, "attribute " + model_args() + " --method ig --ig-baseline input --sample 3 --out-dir out").status, 0);
  const auto map = load_map(dir / "out" / "map.fama");
  for (double v : map.values.values()) EXPECT_EQ(v, 0.0);
  const Tensor heat = io::read_image(dir / "out" / "heatmap.pgm");
  for (double v : heat.values()) EXPECT_EQ(v, 0.0);
}

TEST_F(Pipeline, NoiselessLowpassSingleStepMatchesModuleOps) {
  const fs::path dir = work();
  const auto r = run_cli(dir, "attribute " + model_args() + " --method fampe --sigma 0 --epsilon 0 --alpha 1 --iters 1 --sample cross_00002.pgm --out-dir out");
  ASSERT_EQ(r.status, 0) << r.err;
  const auto map = load_map(dir / "out" / "map.fama");

  const Tensor x = io::read_image(root / "ds" / "cross_00002.pgm");
  const auto net = model::load_weights(model::shapes_cnn(1, 32, 32, 4), root / "w.famw");
  const auto cf = spectral::image_energy_cutoff(x, 0.9);
  auto spec = spectral::fftshift(spectral::fft2d(channel_of(x, 0)));
  const auto low = spectral::gaussian_lowpass_mask(32, 32, cf);
  for (std::size_t k = 0; k < spec.size(); ++k) spec.data[k] *= low.values.data[k];
  Tensor point(x.shape());
  set_channel(point, 0, spectral::ifft2d(spectral::ifftshift(spec)).values);
  const Tensor g = net.input_gradient(point, 2);
  for (std::size_t k = 0; k < x.size(); ++k) EXPECT_NEAR(map.values[k], 0.05 * std::abs(g[k]), 1e-9);
}

TEST_F(Pipeline, EvaluateCsvSummaryAndDeterminism) {
  const fs::path dir = work();
  const std::string args = "evaluate " + model_args() + " --variants 3 --iters 2 --steps 32 --limit 5";
  ASSERT_EQ(run_cli(dir, args + " --out-dir a").status, 0);
  ASSERT_EQ(run_cli(dir, args + " --out-dir b --threads 3").status, 0);
  EXPECT_EQ(io::read_bytes(dir / "a" / "scores.csv"), io::read_bytes(dir / "b" / "scores.csv"));
  const auto rows = lines(io::read_text(dir / "a" / "scores.csv"));
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows[0], "sample_id,alpha,insertion,deletion,cutoff");
  double ins = 0.0, del = 0.0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto cells = split(rows[i]);
    ASSERT_EQ(cells.size(), 5u);
    ins += std::stod(cells[2]) / 5.0;
    del += std::stod(cells[3]) / 5.0;
  }
  const auto summary = nlohmann::json::parse(io::read_text(dir / "a" / "summary.json"));
  EXPECT_EQ(summary["n_samples"], 5);
  EXPECT_NEAR(summary["mean_insertion"].get<double>(), ins, 1e-12);
  EXPECT_NEAR(summary["mean_deletion"].get<double>(), del, 1e-12);

  ASSERT_EQ(run_cli(dir, "evaluate " + model_args() + " --method ig --ig-steps 8 --steps 16 --limit 1 --out-dir ig").status, 0);
  const auto ig_rows = lines(io::read_text(dir / "ig" / "scores.csv"));
  ASSERT_EQ(ig_rows.size(), 2u);
  EXPECT_EQ(split(ig_rows[1])[1], "");
}

TEST_F(Pipeline, AblateTableShape) {
  const fs::path dir = work();
  const auto r = run_cli(dir, "ablate " + model_args() + " --variants 2 --iters 2 --steps 16 --limit 6 --out-dir ab");
  ASSERT_EQ(r.status, 0) << r.err;
  const auto table = lines(io::read_text(dir / "ab" / "ablation.csv"));
  ASSERT_EQ(table.size(), 1u + 2u + 11u);
  EXPECT_EQ(split(table[1])[0], "AttEXplore");
  EXPECT_EQ(split(table[2])[0], "FAMPE");
  const double fampe_ins = std::stod(split(table[2])[1]);
  double best_mean = 0.0, freq = 0.0;
  for (std::size_t i = 3; i < table.size(); ++i) {
    const auto cells = split(table[i]);
    best_mean = std::max(best_mean, std::stod(cells[1]));
    freq += std::stod(cells[3]);
  }
  EXPECT_GE(fampe_ins, best_mean);
  EXPECT_NEAR(freq, 100.0, 0.5);
  EXPECT_EQ(lines(io::read_text(dir / "ab" / "scatter.txt")).size(), 6u);
  EXPECT_EQ(lines(io::read_text(dir / "ab" / "scores.csv")).size(), 1u + 6u * 11u);
  EXPECT_EQ(lines(io::read_text(dir / "ab" / "attexplore_scores.csv")).size(), 7u);
}

TEST_F(Pipeline, ConfigFileAndEnvironmentPrecedence) {
  const fs::path dir = work();
  io::write_atomic(dir / "run.cfg", std::string("# attribution settings\nalpha = 0.2\nvariants = 2\niters = 1\nseed = 5\n"));
  const std::string base = "attribute " + model_args() + " --sample 1 --config run.cfg";
  ASSERT_EQ(run_cli(dir, base + " --out-dir from_config").status, 0);
  ASSERT_EQ(run_cli(dir, base + " --alpha 0.2 --variants 2 --iters 1 --seed 5 --out-dir explicit").status, 0);
  EXPECT_EQ(io::read_bytes(dir / "from_config" / "map.fama"), io::read_bytes(dir / "explicit" / "map.fama"));
  ASSERT_EQ(run_cli(dir, base + " --alpha 0.9 --out-dir flag").status, 0);
  EXPECT_NE(io::read_bytes(dir / "flag" / "map.fama"), io::read_bytes(dir / "from_config" / "map.fama"));

  // FAMPE_SEED sits below the config file and above the built-in default.
  ASSERT_EQ(run_cli(dir, base + " --out-dir env", "FAMPE_SEED=99").status, 0);
  EXPECT_EQ(io::read_bytes(dir / "env" / "map.fama"), io::read_bytes(dir / "from_config" / "map.fama"));
  const std::string no_cfg = "attribute " + model_args() + " --sample 1 --variants 2 --iters 1";
  ASSERT_EQ(run_cli(dir, no_cfg + " --out-dir env99", "FAMPE_SEED=99").status, 0);
  ASSERT_EQ(run_cli(dir, no_cfg + " --seed 99 --out-dir seed99").status, 0);
  ASSERT_EQ(run_cli(dir, no_cfg + " --out-dir default_seed").status, 0);
  EXPECT_EQ(io::read_bytes(dir / "env99" / "map.fama"), io::read_bytes(dir / "seed99" / "map.fama"));
  EXPECT_NE(io::read_bytes(dir / "env99" / "map.fama"), io::read_bytes(dir / "default_seed" / "map.fama"));
}

} // namespace
} // namespace fampe
