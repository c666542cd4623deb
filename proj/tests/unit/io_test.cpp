#include <gtest/gtest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <string>

#include "fampe/data/synthetic_shapes.hpp"
#include "fampe/io/dataset.hpp"
#include "fampe/io/files.hpp"
#include "fampe/io/image.hpp"
#include "fampe/parallel.hpp"
#include "fampe/spectral.hpp"
#include "test_support.hpp"

namespace fampe {
namespace {

namespace fs = std::filesystem;

class TempDir : public ::testing::Test {
protected:
  fs::path dir;
  void SetUp() override {
    dir = fs::temp_directory_path() / ("fampe_io_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }
};

Tensor quantized_image(std::size_t c, std::size_t h, std::size_t w, std::uint64_t seed) {
  RandomStream rng(seed);
  Tensor t({c, h, w});
  for (auto& v : t.storage()) v = static_cast<double>(rng.index(256)) / 255.0;
  return t;
}

TEST(Pnm, GrayAndColorRoundTrip) {
  for (std::size_t c : {1, 3}) {
    const Tensor img = quantized_image(c, 5, 7, c);
    const auto bytes = io::encode_pnm(img);
    const std::string header = c == 1 ? "P5\n7 5\n255\n" : "P6\n7 5\n255\n";
    EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + header.size()), header);
    EXPECT_EQ(bytes.size(), header.size() + c * 35);
    EXPECT_EQ(io::decode_pnm(bytes), img);
  }
}

TEST(Pnm, ColorIsPixelInterleaved) {
  Tensor img({3, 1, 2});
  img.at(0, 0, 0) = 1.0;
  img.at(2, 0, 1) = 1.0;
  const auto bytes = io::encode_pnm(img);
  const std::vector<unsigned char> payload(bytes.end() - 6, bytes.end());
  EXPECT_EQ(payload, (std::vector<unsigned char>{255, 0, 0, 0, 0, 255}));
}

TEST(Pnm, CommentsAndSixteenBit) {
  const std::string text = "P5\n# a comment\n2 1\n# another\n65535\n";
  std::vector<unsigned char> bytes(text.begin(), text.end());
  for (unsigned char b : {0xff, 0xff, 0x80, 0x00}) bytes.push_back(b);
  const Tensor img = io::decode_pnm(bytes);
  EXPECT_EQ(img.shape(), (Shape{1, 1, 2}));
  EXPECT_EQ(img[0], 1.0);
  EXPECT_DOUBLE_EQ(img[1], 32768.0 / 65535.0);
}

TEST(Pnm, Errors) {
  const auto encoded = io::encode_pnm(quantized_image(1, 4, 4, 1));
  auto truncated = encoded;
  truncated.resize(truncated.size() - 2);
  try {
    io::decode_pnm(truncated, "x.pgm");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), errc::format);
    EXPECT_NE(std::string(e.what()).find("expected 16 bytes, got 14"), std::string::npos) << e.what();
  }
  const std::string ascii = "P2\n1 1\n255\n0\n";
  EXPECT_THROW(io::decode_pnm({ascii.begin(), ascii.end()}), Error);
  const std::string zero = "P5\n0 1\n255\n";
  EXPECT_THROW(io::decode_pnm({zero.begin(), zero.end()}), Error);
  EXPECT_THROW(io::encode_pnm(Tensor({2, 2, 2})), Error);
}

TEST(Heatmap, NormalizationAndConstant) {
  Grid g(3, 4);
  for (std::size_t i = 0; i < g.size(); ++i) g.data[i] = static_cast<double>(i) * 0.3 - 1.0;
  const Tensor img = io::decode_pnm(io::encode_heatmap(g));
  EXPECT_EQ(img.shape(), (Shape{1, 3, 4}));
  EXPECT_EQ(*std::max_element(img.values().begin(), img.values().end()), 1.0);
  EXPECT_EQ(*std::min_element(img.values().begin(), img.values().end()), 0.0);
  const auto flat = io::encode_heatmap(Grid(3, 4, 2.5));
  const Tensor f = io::decode_pnm(flat);
  for (double v : f.values()) EXPECT_EQ(v, 0.0);
  const std::string head(flat.begin(), flat.begin() + 2);
  EXPECT_EQ(head, "P5");
}

TEST(Labels, ParseAndErrors) {
  const auto e = io::parse_labels_csv("filename,label\na,b.pgm,2\r\n\nc.pgm,0\n", "labels");
  ASSERT_EQ(e.size(), 2u);
  EXPECT_EQ(e[0].filename, "a,b.pgm");
  EXPECT_EQ(e[0].label, 2u);
  EXPECT_THROW(io::parse_labels_csv("filename,label\nnolabel\n", "labels"), Error);
  EXPECT_THROW(io::parse_labels_csv("x.pgm,-1\n", "labels"), Error);
  EXPECT_EQ(io::labels_csv({{"a.pgm", 1}}), "filename,label\na.pgm,1\n");
}

TEST_F(TempDir, DatasetLoadAndMissingPath) {
  const Tensor a = quantized_image(1, 4, 4, 1), b = quantized_image(1, 4, 4, 2);
  io::write_image(dir / "a.pgm", a);
  io::write_image(dir / "b.pgm", b);
  io::write_atomic(dir / "labels.csv", io::labels_csv({{"a.pgm", 0}, {"b.pgm", 1}}));
  const auto ds = io::load_dataset(dir);
  ASSERT_EQ(ds.size(), 2u);
  EXPECT_EQ(ds.samples[1].image, b);
  EXPECT_EQ(ds.samples[1].label, 1u);

  const fs::path missing = dir / "nowhere";
  try {
    io::load_dataset(missing);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), errc::not_found);
    EXPECT_NE(std::string(e.what()).find(missing.string()), std::string::npos);
  }
  io::write_image(dir / "c.pgm", quantized_image(1, 5, 4, 3));
  io::write_atomic(dir / "labels.csv", io::labels_csv({{"a.pgm", 0}, {"c.pgm", 1}}));
  EXPECT_THROW(io::load_dataset(dir), Error);
}

TEST_F(TempDir, AtomicWriteLeavesNoTemporary) {
  io::write_atomic(dir / "out.txt", std::string("hello"));
  io::write_atomic(dir / "out.txt", std::string("world"));
  EXPECT_EQ(io::read_text(dir / "out.txt"), "world");
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& entry : fs::directory_iterator(dir)) ++files;
  EXPECT_EQ(files, 1u);
  EXPECT_THROW(io::read_bytes(dir / "absent.bin"), Error);
}

TEST(Synthetic, CountsNamesAndDeterminism) {
  data::SyntheticShapesSpec spec;
  const auto a = data::synthesize_shapes(spec);
  const auto b = data::synthesize_shapes(spec);
  ASSERT_EQ(a.size(), 200u);
  EXPECT_EQ(a.front().name, "disk_00000.pgm");
  EXPECT_EQ(a.back().name, "stripes_00049.pgm");
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(io::encode_pnm(a[i].image), io::encode_pnm(b[i].image));
    EXPECT_EQ(a[i].image.shape(), (Shape{1, 32, 32}));
    for (double v : a[i].image.values()) ASSERT_TRUE(v >= 0.0 && v <= 1.0);
  }
  spec.seed = 2;
  EXPECT_NE(data::synthesize_shapes(spec)[0].image, a[0].image);
}

TEST(Synthetic, DiskImagesHaveNonDcEnergy) {
  data::SyntheticShapesSpec spec;
  for (const auto& s : data::synthesize_shapes(spec)) {
    if (s.label != 0) continue;
    // Quantize as the files would be, then run the cutoff search.
    const Tensor stored = io::decode_pnm(io::encode_pnm(s.image));
    const auto cf = spectral::image_energy_cutoff(stored, 0.9);
    EXPECT_GT(cf.value, 0.0) << s.name;
  }
}

TEST(Synthetic, ValidateAndColor) {
  data::SyntheticShapesSpec spec;
  spec.size = 7;
  EXPECT_THROW(data::synthesize_shapes(spec), Error);
  spec.size = 16;
  spec.classes = 1;
  EXPECT_THROW(data::synthesize_shapes(spec), Error);
  spec.classes = 3;
  spec.channels = 3;
  spec.samples_per_class = 2;
  const auto s = data::synthesize_shapes(spec);
  ASSERT_EQ(s.size(), 6u);
  EXPECT_EQ(s[0].name, "disk_00000.ppm");
  EXPECT_EQ(s[0].image.shape(), (Shape{3, 16, 16}));
}

TEST(Parallel, CoversEveryIndexOnceAndRethrows) {
  for (std::size_t threads : {1, 3, 8}) {
    std::vector<std::atomic<int>> hits(101);
    parallel_for(hits.size(), threads, [&](std::size_t i) { ++hits[i]; });
    for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  }
  EXPECT_THROW(parallel_for(10, 4, [](std::size_t i) {
                 if (i == 6) throw Error(errc::invalid_argument, "boom");
               }),
               Error);
}

} // namespace
} // namespace fampe
