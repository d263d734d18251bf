#include "doctest.h"

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "lc/datagen.hpp"
#include "lc/dataset.hpp"
#include "lc/errors.hpp"
#include "lc/idx.hpp"

namespace {

namespace fs = std::filesystem;

fs::path tmp_dir() {
  const fs::path dir = fs::temp_directory_path() / "lc_data_test";
  fs::create_directories(dir);
  return dir;
}

void write_bytes(const fs::path& path, const std::vector<std::uint8_t>& b) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(b.data()),
            std::streamsize(b.size()));
  REQUIRE(bool(out));
}

void push_be32(std::vector<std::uint8_t>& b, std::uint32_t v) {
  b.push_back(std::uint8_t(v >> 24));
  b.push_back(std::uint8_t(v >> 16));
  b.push_back(std::uint8_t(v >> 8));
  b.push_back(std::uint8_t(v));
}

lc::BiasedDataset tiny_dataset() {
  lc::BiasedDataset ds;
  ds.d = 2;
  ds.L = 2;
  ds.K = 2;
  ds.minority_ratio = 0.25;
  ds.topology = lc::CorrelationTopology::one_to_one(2);
  ds.features = lc::TensorF({3, 2}, {1.5f, -2.0f, 0.25f, 8.0f, 0.0f, 3.0f});
  ds.labels = {0, 1, 1};
  ds.attrs = {0, 1, 0};
  ds.split_flag = {0, 0, 1};
  return ds;
}

} // namespace

TEST_CASE("dataset container round-trips every field") {
  const lc::BiasedDataset ds =
      lc::make_gaussian_toy(2, 2, 0.1, 2, 2, 2.0, 77,
                            {.n_train = 60, .n_test = 16});
  const fs::path path = tmp_dir() / "roundtrip.lcds";
  lc::save_dataset(ds, path.string());
  const lc::BiasedDataset back = lc::load_dataset(path.string());

  CHECK(back.d == ds.d);
  CHECK(back.L == ds.L);
  CHECK(back.K == ds.K);
  CHECK(back.topology.kind == ds.topology.kind);
  CHECK(back.minority_ratio == doctest::Approx(ds.minority_ratio)
                                   .epsilon(1e-7));
  REQUIRE(back.size() == ds.size());
  CHECK(back.labels == ds.labels);
  CHECK(back.attrs == ds.attrs);
  CHECK(back.split_flag == ds.split_flag);
  REQUIRE(back.features.data.size() == ds.features.data.size());
  // float32 payload both sides, so equality is exact
  CHECK(std::memcmp(back.features.data.data(), ds.features.data.data(),
                    ds.features.data.size() * sizeof(float)) == 0);
}

TEST_CASE("container size is header plus fixed-width records") {
  lc::BiasedDataset ds = tiny_dataset();
  ds.features = lc::TensorF({1, 2}, {4.0f, 5.0f});
  ds.labels = {1};
  ds.attrs = {0};
  ds.split_flag = {0};
  const fs::path path = tmp_dir() / "one_sample.lcds";
  lc::save_dataset(ds, path.string());
  // magic(5) + 5 x int32 + float32 ratio = 29, then d*4 + 3 per sample
  CHECK(fs::file_size(path) == 29 + ds.d * 4 + 3);
}

TEST_CASE("a future container version is rejected by name") {
  const fs::path path = tmp_dir() / "future.lcds";
  write_bytes(path, {'L', 'C', 'D', 'S', '2', 0, 0, 0, 0});
  CHECK_THROWS_WITH_AS(lc::load_dataset(path.string()),
                       doctest::Contains("expected LCDS1"), lc::io_error);
}

TEST_CASE("a truncated container names the failing sample") {
  lc::BiasedDataset ds = tiny_dataset();
  const fs::path path = tmp_dir() / "trunc.lcds";
  lc::save_dataset(ds, path.string());
  fs::resize_file(path, fs::file_size(path) - 2);
  CHECK_THROWS_WITH_AS(lc::load_dataset(path.string()),
                       doctest::Contains("sample 2"), lc::io_error);
}

TEST_CASE("dataset validation rejects broken invariants") {
  lc::BiasedDataset ds = tiny_dataset();
  ds.labels[0] = 7;
  CHECK_THROWS_AS(ds.validate(), lc::config_error);

  ds = tiny_dataset();
  ds.attrs.pop_back();
  CHECK_THROWS_AS(ds.validate(), lc::config_error);

  ds = tiny_dataset();
  ds.features = lc::TensorF::zeros({3, 5});
  CHECK_THROWS_AS(ds.validate(), lc::config_error);
}

TEST_CASE("the manifest lists one row per sample") {
  const lc::BiasedDataset ds = tiny_dataset();
  const fs::path path = tmp_dir() / "manifest.csv";
  lc::write_dataset_manifest_csv(ds, path.string());
  std::ifstream in(path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  CHECK(text ==
        "index,y,a,group,split\n"
        "0,0,0,0,train\n"
        "1,1,1,3,train\n"
        "2,1,0,2,test\n");
}

TEST_CASE("idx images decode big-endian headers and scale to unit range") {
  std::vector<std::uint8_t> b;
  push_be32(b, 0x00000803u);
  push_be32(b, 2); // images
  push_be32(b, 2); // rows
  push_be32(b, 2); // cols
  for (std::uint8_t px : {0, 255, 128, 64, 10, 20, 30, 40}) b.push_back(px);
  const fs::path path = tmp_dir() / "img.idx";
  write_bytes(path, b);

  const lc::IdxImages img = lc::load_idx_images(path.string());
  CHECK(img.count == 2);
  CHECK(img.rows == 2);
  CHECK(img.cols == 2);
  REQUIRE(img.pixels.data.size() == 8);
  CHECK(img.pixels.data[0] == doctest::Approx(0.0));
  CHECK(img.pixels.data[1] == doctest::Approx(1.0));
  CHECK(img.pixels.data[2] == doctest::Approx(128.0 / 255.0));
  CHECK(img.pixels.data[7] == doctest::Approx(40.0 / 255.0));
}

TEST_CASE("idx labels decode and magic mismatches name the expected code") {
  std::vector<std::uint8_t> b;
  push_be32(b, 0x00000801u);
  push_be32(b, 2);
  b.push_back(3);
  b.push_back(7);
  const fs::path lab_path = tmp_dir() / "lab.idx";
  write_bytes(lab_path, b);
  CHECK(lc::load_idx_labels(lab_path.string()) ==
        std::vector<std::uint8_t>{3, 7});

  // feeding the label file to the image loader reports both codes
  CHECK_THROWS_WITH_AS(lc::load_idx_images(lab_path.string()),
                       doctest::Contains("expected image magic 0x00000803"),
                       lc::io_error);
  std::vector<std::uint8_t> img_hdr;
  push_be32(img_hdr, 0x00000803u);
  const fs::path img_path = tmp_dir() / "imghdr.idx";
  write_bytes(img_path, img_hdr);
  CHECK_THROWS_WITH_AS(lc::load_idx_labels(img_path.string()),
                       doctest::Contains("expected label magic 0x00000801"),
                       lc::io_error);
}

TEST_CASE("a short idx payload is reported as truncated") {
  std::vector<std::uint8_t> b;
  push_be32(b, 0x00000803u);
  push_be32(b, 3); // claims 3 images
  push_be32(b, 2);
  push_be32(b, 2);
  for (int i = 0; i < 8; ++i) b.push_back(0); // only two images worth
  const fs::path path = tmp_dir() / "short.idx";
  write_bytes(path, b);
  CHECK_THROWS_WITH_AS(lc::load_idx_images(path.string()),
                       doctest::Contains("truncated payload"), lc::io_error);
}

TEST_CASE("glyph corpus is deterministic and worker-count invariant") {
  std::vector<std::uint8_t> lab1, lab3;
  const lc::IdxImages a = lc::make_glyph_images(3, 5, &lab1, 1);
  const lc::IdxImages b = lc::make_glyph_images(3, 5, &lab3, 3);
  CHECK(a.count == 30);
  CHECK(a.rows == 28);
  CHECK(a.cols == 28);
  CHECK(lab1 == lab3);
  for (std::size_t i = 0; i < 30; ++i)
    CHECK(lab1[i] == std::uint8_t(i / 3));
  REQUIRE(a.pixels.data.size() == b.pixels.data.size());
  CHECK(std::memcmp(a.pixels.data.data(), b.pixels.data.data(),
                    a.pixels.data.size() * sizeof(float)) == 0);

  const lc::IdxImages c = lc::make_glyph_images(3, 6, nullptr, 1);
  CHECK(std::memcmp(a.pixels.data.data(), c.pixels.data.data(),
                    a.pixels.data.size() * sizeof(float)) != 0);
}

TEST_CASE("glyphs keep pixel values inside the unit interval") {
  const lc::IdxImages a = lc::make_glyph_images(2, 9, nullptr, 1);
  double peak = 0.0;
  for (float v : a.pixels.data) {
    CHECK(v >= 0.0f);
    CHECK(v <= 1.0f);
    peak = std::max(peak, double(v));
  }
  CHECK(peak > 0.5); // strokes actually got drawn
}

TEST_CASE("colored digits hit the requested minority count per class") {
  std::vector<std::uint8_t> train_lab, test_lab;
  const lc::IdxImages train = lc::make_glyph_images(8, 21, &train_lab, 1);
  const lc::IdxImages test = lc::make_glyph_images(12, 22, &test_lab, 1);
  const auto topo = lc::CorrelationTopology::one_to_one(10);
  const auto palette = lc::make_palette(10);
  const lc::BiasedDataset ds = lc::make_colored_mnist(
      train, train_lab, test, test_lab, topo, 0.25, palette, 31);

  CHECK(ds.L == 10);
  CHECK(ds.K == 10);
  CHECK(ds.d == 3 * 28 * 28);
  const auto tr = ds.train_indices();
  CHECK(tr.size() == 80);
  std::map<std::size_t, std::size_t> minority_per_class;
  for (std::size_t i : tr) {
    if (ds.attrs[i] != ds.labels[i])
      ++minority_per_class[ds.labels[i]];
  }
  // llround(0.25 * 8) = 2 skewed color assignments per class
  for (std::size_t y = 0; y < 10; ++y) CHECK(minority_per_class[y] == 2);
}

TEST_CASE("colored test split is exactly balanced over label-color cells") {
  std::vector<std::uint8_t> train_lab, test_lab;
  const lc::IdxImages train = lc::make_glyph_images(4, 41, &train_lab, 1);
  const lc::IdxImages test = lc::make_glyph_images(25, 42, &test_lab, 1);
  const auto topo = lc::CorrelationTopology::one_to_one(10);
  const lc::BiasedDataset ds = lc::make_colored_mnist(
      train, train_lab, test, test_lab, topo, 0.3, lc::make_palette(10), 43,
      {.test_per_cell = 2});

  std::map<std::size_t, std::size_t> cell;
  for (std::size_t i : ds.test_indices()) ++cell[ds.group_id(i)];
  CHECK(cell.size() == 100);
  for (const auto& [g, n] : cell) CHECK(n == 2);
}

TEST_CASE("tinting is planar: an all-red sample has empty green and blue") {
  std::vector<std::uint8_t> train_lab, test_lab;
  const lc::IdxImages train = lc::make_glyph_images(4, 51, &train_lab, 1);
  const lc::IdxImages test = lc::make_glyph_images(12, 52, &test_lab, 1);
  const lc::BiasedDataset ds = lc::make_colored_mnist(
      train, train_lab, test, test_lab, lc::CorrelationTopology::one_to_one(10),
      0.3, lc::make_palette(10), 53);

  const std::size_t hw = 28 * 28;
  bool found = false;
  for (std::size_t i = 0; i < ds.size() && !found; ++i) {
    if (ds.attrs[i] != 0) continue; // palette slot 0 is pure red
    found = true;
    const float* row = ds.features.data.data() + i * ds.d;
    double red = 0.0, rest = 0.0;
    for (std::size_t p = 0; p < hw; ++p) red += row[p];
    for (std::size_t p = hw; p < 3 * hw; ++p) rest += std::abs(row[p]);
    CHECK(red > 0.0);
    CHECK(rest == 0.0);
  }
  CHECK(found);
}

TEST_CASE("a label owning several colors splits its aligned samples evenly") {
  // two labels, three colors; label 0 owns colors {0, 1}
  const auto topo = lc::canonical_topology(lc::TopologyKind::OneToMany, 2, 3);
  lc::IdxImages train;
  train.count = 12;
  train.rows = train.cols = 2;
  train.pixels = lc::TensorF::zeros({12, 4});
  for (auto& v : train.pixels.data) v = 0.5f;
  std::vector<std::uint8_t> train_lab = {0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1};
  lc::IdxImages test;
  test.count = 6;
  test.rows = test.cols = 2;
  test.pixels = lc::TensorF::zeros({6, 4});
  std::vector<std::uint8_t> test_lab = {0, 0, 0, 1, 1, 1};

  const lc::BiasedDataset ds = lc::make_colored_mnist(
      train, train_lab, test, test_lab, topo, 0.25, lc::make_palette(3), 61);

  std::map<std::size_t, std::size_t> attr_count_y0;
  std::size_t y0_minority = 0, y1_minority = 0;
  for (std::size_t i : ds.train_indices()) {
    if (ds.labels[i] == 0) {
      if (ds.attrs[i] == 2)
        ++y0_minority;
      else
        ++attr_count_y0[ds.attrs[i]];
    } else if (!ds.is_aligned(i)) {
      ++y1_minority;
    }
  }
  // class 0: 8 digits, 2 skewed, 6 aligned cycled over colors 0 and 1
  CHECK(y0_minority == 2);
  CHECK(attr_count_y0[0] == 3);
  CHECK(attr_count_y0[1] == 3);
  // class 1: 4 digits, llround(1) = 1 skewed
  CHECK(y1_minority == 1);
}

TEST_CASE("colored digits reject a palette that does not match K") {
  std::vector<std::uint8_t> train_lab, test_lab;
  const lc::IdxImages train = lc::make_glyph_images(4, 71, &train_lab, 1);
  const lc::IdxImages test = lc::make_glyph_images(12, 72, &test_lab, 1);
  CHECK_THROWS_AS(
      lc::make_colored_mnist(train, train_lab, test, test_lab,
                             lc::CorrelationTopology::one_to_one(10), 0.3,
                             lc::make_palette(9), 73),
      lc::config_error);
}

TEST_CASE("gaussian toy is deterministic in every byte") {
  const lc::GaussianToyOptions opts{.n_train = 100, .n_test = 40};
  const lc::BiasedDataset a = lc::make_gaussian_toy(2, 2, 0.1, 2, 2, 2.0, 5,
                                                    opts);
  const lc::BiasedDataset b = lc::make_gaussian_toy(2, 2, 0.1, 2, 2, 2.0, 5,
                                                    opts);
  CHECK(a.labels == b.labels);
  CHECK(a.attrs == b.attrs);
  CHECK(std::memcmp(a.features.data.data(), b.features.data.data(),
                    a.features.data.size() * sizeof(float)) == 0);
  const lc::BiasedDataset c = lc::make_gaussian_toy(2, 2, 0.1, 2, 2, 2.0, 6,
                                                    opts);
  CHECK(std::memcmp(a.features.data.data(), c.features.data.data(),
                    a.features.data.size() * sizeof(float)) != 0);
}

TEST_CASE("gaussian toy hits minority counts and balanced test cells") {
  const lc::BiasedDataset ds = lc::make_gaussian_toy(
      2, 2, 0.1, 2, 2, 2.0, 11, {.n_train = 100, .n_test = 40});
  std::map<std::size_t, std::size_t> minority, cell;
  for (std::size_t i : ds.train_indices())
    if (ds.attrs[i] != ds.labels[i]) ++minority[ds.labels[i]];
  // llround(0.1 * 50) = 5 per class
  CHECK(minority[0] == 5);
  CHECK(minority[1] == 5);
  for (std::size_t i : ds.test_indices()) ++cell[ds.group_id(i)];
  CHECK(cell.size() == 4);
  for (const auto& [g, n] : cell) CHECK(n == 10);
}

TEST_CASE("spurious coordinates sit farther apart than core ones") {
  // separation 2 puts class means 2 apart; the spurious block defaults to
  // max(4, 2 * separation) = 4
  const lc::BiasedDataset ds = lc::make_gaussian_toy(
      2, 2, 0.2, 2, 2, 2.0, 13, {.n_train = 2000, .n_test = 8});
  double core_mean[2] = {0, 0}, spur_mean[2] = {0, 0};
  std::size_t count[2] = {0, 0};
  for (std::size_t i : ds.train_indices()) {
    const float* x = ds.features.data.data() + i * ds.d;
    const std::size_t y = ds.labels[i];
    if (ds.attrs[i] != y) continue; // aligned samples only
    core_mean[y] += x[y];
    spur_mean[y] += x[2 + ds.attrs[i]];
    ++count[y];
  }
  for (int y = 0; y < 2; ++y) {
    core_mean[y] /= double(count[y]);
    spur_mean[y] /= double(count[y]);
    CHECK(core_mean[y] == doctest::Approx(2.0 / std::sqrt(2.0)).epsilon(0.15));
    CHECK(spur_mean[y] == doctest::Approx(4.0 / std::sqrt(2.0)).epsilon(0.15));
  }
}

TEST_CASE("toy generator rejects out-of-range ratios and shapes") {
  CHECK_THROWS_AS(lc::make_gaussian_toy(2, 3, 0.1, 2, 2, 2.0, 1),
                  lc::config_error);
  CHECK_THROWS_AS(lc::make_gaussian_toy(2, 2, 0.0, 2, 2, 2.0, 1),
                  lc::config_error);
  CHECK_THROWS_AS(lc::make_gaussian_toy(2, 2, 1.0, 2, 2, 2.0, 1),
                  lc::config_error);
  CHECK_THROWS_AS(lc::make_gaussian_toy(2, 2, 0.1, 0, 2, 2.0, 1),
                  lc::config_error);
  CHECK_THROWS_AS(
      lc::make_gaussian_toy(2, 2, 0.1, 2, 2, 2.0, 1, {.n_test = 2}),
      lc::config_error);
}

TEST_CASE("palette size is bounded and prefixes are stable") {
  CHECK_THROWS_AS(lc::make_palette(0), lc::config_error);
  CHECK_THROWS_AS(lc::make_palette(17), lc::config_error);
  const auto p10 = lc::make_palette(10);
  const auto p16 = lc::make_palette(16);
  for (std::size_t i = 0; i < 10; ++i) CHECK(p10[i] == p16[i]);
}
