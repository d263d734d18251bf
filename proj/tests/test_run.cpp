#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <map>
#include <string>

#include "json.hpp"

#include "lc/datagen.hpp"
#include "lc/run.hpp"

namespace {

namespace fs = std::filesystem;

fs::path tmp_dir(const std::string& leaf) {
  const fs::path dir = fs::temp_directory_path() / "lc_run_test" / leaf;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::map<std::string, std::string> parse_summary(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(bool(in));
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    REQUIRE(eq != std::string::npos);
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

lc::BiasedDataset toy() {
  return lc::make_gaussian_toy(2, 2, 0.1, 2, 2, 2.0, 23,
                               {.n_train = 40, .n_test = 16});
}

lc::TrainConfig quick_cfg() {
  lc::TrainConfig cfg;
  cfg.epochs = 2;
  cfg.batch_size = 20;
  cfg.hidden = {6};
  cfg.seed = 8;
  return cfg;
}

} // namespace

TEST_CASE("the hash matches published reference vectors") {
  CHECK(lc::fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(lc::fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(lc::fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("hashing a file equals hashing its bytes") {
  const fs::path path = tmp_dir("hash") / "probe.bin";
  {
    std::ofstream out(path, std::ios::binary);
    out << "foobar";
  }
  CHECK(lc::fnv1a64_file(path.string()) == lc::fnv1a64("foobar"));
  CHECK_THROWS_AS(lc::fnv1a64_file((path.parent_path() / "nope").string()),
                  lc::io_error);
}

TEST_CASE("the canonical config text is frozen") {
  lc::TrainConfig cfg;
  cfg.epochs = 20;
  cfg.batch_size = 256;
  cfg.q = 0.7;
  cfg.learning_rate = 0.01;
  cfg.lr_decay = {{10000, 0.5}};
  cfg.alpha = 0.5;
  cfg.rampup_epochs = 2;
  cfg.strategy = lc::PriorStrategy::MovingAvg;
  cfg.loss_mode = lc::LossMode::LC;
  cfg.seed = 0;
  cfg.hidden = {100, 100, 100};

  // any drift here silently invalidates stored config hashes
  const std::string want =
      "alpha=0.5\n"
      "assume_one_to_one=0\n"
      "batch_size=256\n"
      "epochs=20\n"
      "eval_batch=512\n"
      "floor_epsilon=1e-08\n"
      "freeze_prior_uniform=0\n"
      "hidden=100,100,100\n"
      "learning_rate=0.01\n"
      "loss_mode=lc\n"
      "lr_decay=10000:0.5\n"
      "margin_stride=1\n"
      "mixup_enabled=0\n"
      "per_sample_ema=0\n"
      "prior_strategy=moving-avg\n"
      "q=0.7\n"
      "rampup_epochs=2\n"
      "seed=0\n"
      "static_lambda=0\n";
  CHECK(lc::canonical_config_text(cfg) == want);
}

TEST_CASE("a run writes every artifact and a parsable summary") {
  const lc::BiasedDataset ds = toy();
  const fs::path ds_path = tmp_dir("data") / "toy.lcds";
  lc::save_dataset(ds, ds_path.string());
  const fs::path dir = tmp_dir("artifacts");
  const lc::RunOutputs out =
      lc::run_training(ds, quick_cfg(), dir.string(), ds_path.string());

  CHECK(fs::exists(out.paths.epochs_csv));
  CHECK(fs::exists(out.paths.margins_csv));
  CHECK(fs::exists(out.paths.summary));
  CHECK(fs::exists(out.paths.checkpoint));
  CHECK(fs::exists(out.paths.erm_checkpoint));
  CHECK(fs::exists(out.paths.prior_csv));
  CHECK(fs::exists(out.paths.manifest));

  const auto kv = parse_summary(out.paths.summary);
  for (const char* key :
       {"final_gba", "final_worst", "best_gba", "final_overall",
        "final_margin_ratio", "loss_mode", "mixup", "prior_strategy",
        "ratio", "epochs", "seed", "config_hash"})
    CHECK_MESSAGE(kv.count(key) == 1, key);
  CHECK(kv.at("loss_mode") == "lc");
  CHECK(kv.at("mixup") == "off");
  CHECK(kv.at("ratio") == "0.1");
  CHECK(kv.at("epochs") == "2");
  CHECK(kv.at("config_hash").size() == 16);
  CHECK(std::stod(kv.at("final_gba")) ==
        doctest::Approx(out.result.final_record().eval.gba));

  // summary hash equals the hash of the canonical text
  char want_hash[24];
  std::snprintf(want_hash, sizeof(want_hash), "%016llx",
                static_cast<unsigned long long>(
                    lc::fnv1a64(lc::canonical_config_text(quick_cfg()))));
  CHECK(kv.at("config_hash") == want_hash);
  CHECK(out.config_hash == lc::fnv1a64(lc::canonical_config_text(quick_cfg())));
}

TEST_CASE("the manifest checksums match the files on disk") {
  const lc::BiasedDataset ds = toy();
  const fs::path ds_path = tmp_dir("mdata") / "toy.lcds";
  lc::save_dataset(ds, ds_path.string());
  const fs::path dir = tmp_dir("manifest");
  const lc::RunOutputs out =
      lc::run_training(ds, quick_cfg(), dir.string(), ds_path.string());

  std::ifstream in(out.paths.manifest);
  REQUIRE(bool(in));
  const nlohmann::json m = nlohmann::json::parse(in);
  const auto hex = [](std::uint64_t v) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(v));
    return std::string(buf);
  };
  CHECK(m.at("config_hash").get<std::string>() == hex(out.config_hash));
  CHECK(m.at("dataset_checksum").get<std::string>() ==
        hex(lc::fnv1a64_file(ds_path.string())));
  CHECK(m.at("outputs").at("summary").get<std::string>() ==
        hex(lc::fnv1a64_file(out.paths.summary)));
  CHECK(m.at("outputs").at("checkpoint").get<std::string>() ==
        hex(lc::fnv1a64_file(out.paths.checkpoint)));
  CHECK(m.at("config").at("loss_mode").get<std::string>() == "lc");
  CHECK(m.at("config").at("epochs").get<std::string>() == "2");
  CHECK(m.at("synthetic_glyphs").get<bool>() == false);
}

TEST_CASE("identical configs reproduce identical artifacts") {
  const lc::BiasedDataset ds = toy();
  const fs::path dir_a = tmp_dir("rerun_a");
  const fs::path dir_b = tmp_dir("rerun_b");
  const lc::RunOutputs a = lc::run_training(ds, quick_cfg(), dir_a.string());
  const lc::RunOutputs b = lc::run_training(ds, quick_cfg(), dir_b.string());

  CHECK(lc::fnv1a64_file(a.paths.epochs_csv) ==
        lc::fnv1a64_file(b.paths.epochs_csv));
  CHECK(lc::fnv1a64_file(a.paths.margins_csv) ==
        lc::fnv1a64_file(b.paths.margins_csv));
  CHECK(lc::fnv1a64_file(a.paths.summary) ==
        lc::fnv1a64_file(b.paths.summary));
  CHECK(lc::fnv1a64_file(a.paths.prior_csv) ==
        lc::fnv1a64_file(b.paths.prior_csv));
  CHECK(lc::fnv1a64_file(a.paths.checkpoint) ==
        lc::fnv1a64_file(b.paths.checkpoint));
  CHECK(lc::fnv1a64_file(a.paths.erm_checkpoint) ==
        lc::fnv1a64_file(b.paths.erm_checkpoint));

  lc::TrainConfig other = quick_cfg();
  other.seed = 9;
  const fs::path dir_c = tmp_dir("rerun_c");
  const lc::RunOutputs c = lc::run_training(ds, other, dir_c.string());
  CHECK(lc::fnv1a64_file(a.paths.checkpoint) !=
        lc::fnv1a64_file(c.paths.checkpoint));
  CHECK(a.config_hash != c.config_hash);
}
