#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "lc/datagen.hpp"
#include "lc/dataset.hpp"
#include "lc/errors.hpp"
#include "lc/idx.hpp"
#include "lc/oracle.hpp"
#include "lc/run.hpp"
#include "lc/trainer.hpp"

namespace {

std::size_t env_threads() {
  const char* v = std::getenv("LC_THREADS");
  if (!v) return 1;
  const long n = std::strtol(v, nullptr, 10);
  if (n < 1) return 1;
  return std::min<long>(n, 64);
}

struct GenDataArgs {
  std::string dataset = "cmnist";
  double ratio = 0.01;
  std::uint64_t seed = 0;
  std::string out;
  std::string mnist_dir;
  std::size_t glyph_per_class = 700;
  std::size_t train_per_class = 0;
  std::size_t test_per_cell = 5;
  std::size_t toy_classes = 2;
  std::size_t toy_train = 10000;
  std::size_t toy_test = 2000;
  double toy_separation = 1.0;
};

int cmd_gen_data(const GenDataArgs& a) {
  if (!(a.ratio > 0.0 && a.ratio < 1.0))
    throw lc::config_error("--ratio must lie strictly between 0 and 1");

  lc::BiasedDataset ds;
  bool synthetic = true;
  if (a.dataset == "gauss") {
    lc::GaussianToyOptions opts;
    opts.n_train = a.toy_train;
    opts.n_test = a.toy_test;
    ds = lc::make_gaussian_toy(a.toy_classes, a.toy_classes, a.ratio, 1, 1,
                               a.toy_separation, a.seed, opts);
  } else {
    lc::TopologyKind kind;
    std::size_t L = 10, K = 10;
    if (a.dataset == "cmnist") {
      kind = lc::TopologyKind::OneToOne;
    } else if (a.dataset == "cmnist-m2o") {
      kind = lc::TopologyKind::ManyToOne;
      K = 9;
    } else if (a.dataset == "cmnist-o2m") {
      kind = lc::TopologyKind::OneToMany;
      K = 11;
    } else if (a.dataset == "cmnist-m2m") {
      kind = lc::TopologyKind::ManyToMany;
      K = 10;
    } else {
      throw lc::config_error("unknown dataset: " + a.dataset);
    }
    const lc::CorrelationTopology topo = lc::canonical_topology(kind, L, K);
    const auto palette = lc::make_palette(K);

    lc::IdxImages train_images, test_images;
    std::vector<std::uint8_t> train_labels, test_labels;
    const std::string ti = a.mnist_dir + "/train-images-idx3-ubyte";
    if (!a.mnist_dir.empty() && std::filesystem::exists(ti)) {
      train_images = lc::load_idx_images(ti);
      train_labels =
          lc::load_idx_labels(a.mnist_dir + "/train-labels-idx1-ubyte");
      test_images =
          lc::load_idx_images(a.mnist_dir + "/t10k-images-idx3-ubyte");
      test_labels =
          lc::load_idx_labels(a.mnist_dir + "/t10k-labels-idx1-ubyte");
      synthetic = false;
    } else {
      const std::size_t threads = env_threads();
      train_images = lc::make_glyph_images(a.glyph_per_class, a.seed * 2 + 1,
                                           &train_labels, threads);
      const std::size_t test_pc =
          std::max<std::size_t>(a.test_per_cell * K + K, 64);
      test_images = lc::make_glyph_images(test_pc, a.seed * 2 + 2,
                                          &test_labels, threads);
    }
    lc::ColoredMnistOptions opts;
    opts.train_per_class = a.train_per_class;
    opts.test_per_cell = a.test_per_cell;
    ds = lc::make_colored_mnist(train_images, train_labels, test_images,
                                test_labels, topo, a.ratio, palette, a.seed,
                                opts);
    ds.synthetic_glyphs = synthetic;
  }

  lc::save_dataset(ds, a.out);
  lc::write_dataset_manifest_csv(ds, a.out + ".manifest.csv");

  nlohmann::json manifest;
  manifest["dataset"] = a.dataset;
  manifest["ratio"] = ds.minority_ratio;
  manifest["seed"] = a.seed;
  manifest["n"] = ds.size();
  manifest["n_train"] = ds.train_indices().size();
  manifest["n_test"] = ds.test_indices().size();
  manifest["d"] = ds.d;
  manifest["L"] = ds.L;
  manifest["K"] = ds.K;
  manifest["topology"] = lc::to_string(ds.topology.kind);
  manifest["synthetic_glyphs"] = ds.synthetic_glyphs;
  manifest["checksum"] = [&] {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(lc::fnv1a64_file(a.out)));
    return std::string(buf);
  }();
  for (const auto& w : ds.warnings) manifest["warnings"].push_back(w);
  std::ofstream mf(a.out + ".manifest.json", std::ios::trunc);
  if (!mf) throw lc::io_error("cannot write " + a.out + ".manifest.json");
  mf << manifest.dump(2) << '\n';

  std::cout << "wrote " << a.out << " (" << ds.size() << " samples, d=" << ds.d
            << ", checksum " << manifest["checksum"].get<std::string>()
            << ")\n";
  for (const auto& w : ds.warnings) std::cout << "warning: " << w << '\n';
  return 0;
}

struct TrainArgs {
  std::string data;
  std::string out = "run";
  std::string loss = "lc";
  std::string mixup = "off";
  std::string prior = "moving";
  std::size_t epochs = 20;
  std::size_t batch_size = 256;
  double lr = 1e-2;
  double q = 0.7;
  double alpha = 0.5;
  std::size_t rampup = 2;
  std::uint64_t seed = 0;
  bool per_sample_ema = false;
  bool static_lambda = false;
  bool freeze_prior = false;
  bool assume_1to1 = false;
};

int cmd_train(const TrainArgs& a) {
  const lc::BiasedDataset ds = lc::load_dataset(a.data);
  lc::TrainConfig cfg;
  cfg.loss_mode = lc::loss_mode_from_string(a.loss);
  if (a.mixup == "on")
    cfg.mixup_enabled = true;
  else if (a.mixup == "off")
    cfg.mixup_enabled = false;
  else
    throw lc::config_error("--mixup takes on or off");
  if (a.prior == "moving")
    cfg.strategy = lc::PriorStrategy::MovingAvg;
  else if (a.prior == "batch")
    cfg.strategy = lc::PriorStrategy::BatchAvg;
  else if (a.prior == "dataset")
    cfg.strategy = lc::PriorStrategy::DatasetAvg;
  else
    throw lc::config_error("--prior takes moving, batch, or dataset");
  cfg.epochs = a.epochs;
  cfg.batch_size = a.batch_size;
  cfg.learning_rate = a.lr;
  cfg.q = a.q;
  cfg.alpha = a.alpha;
  cfg.rampup_epochs = a.rampup;
  cfg.seed = a.seed;
  cfg.per_sample_ema = a.per_sample_ema;
  cfg.static_lambda = a.static_lambda;
  cfg.freeze_prior_uniform = a.freeze_prior;
  cfg.assume_one_to_one = a.assume_1to1;

  const lc::RunOutputs out = lc::run_training(ds, cfg, a.out, a.data);
  const lc::EpochRecord& last = out.result.final_record();
  std::cout << "final_gba=" << last.eval.gba
            << " final_worst=" << last.eval.worst
            << " best_gba=" << out.result.best_gba() << '\n';
  std::cout << "artifacts in " << a.out << '\n';
  return 0;
}

int cmd_eval(const std::string& checkpoint, const std::string& data) {
  const lc::BiasedDataset ds = lc::load_dataset(data);
  const lc::MlpF model = lc::load_checkpoint(checkpoint);
  const lc::EvalResult r = lc::evaluate(model, ds);
  for (const auto& [g, acc] : r.group_accuracy)
    std::cout << "group y=" << g / ds.K << " a=" << g % ds.K
              << " accuracy=" << acc << " n=" << r.group_total.at(g) << '\n';
  for (const auto& w : r.warnings) std::cout << "warning: " << w << '\n';
  std::cout << "gba=" << r.gba << " worst=" << r.worst
            << " overall=" << r.overall << '\n';
  return 0;
}

int cmd_oracle_check(std::size_t instances, const std::string& mode,
                     std::uint64_t seed, std::size_t X, std::size_t L,
                     std::size_t K) {
  const lc::LossMode m = lc::loss_mode_from_string(mode);
  std::size_t matches = 0;
  for (std::size_t i = 0; i < instances; ++i) {
    const std::uint64_t s = seed + i;
    const lc::DiscreteInstance inst =
        lc::DiscreteInstance::random(s, X, L, K, true);
    const lc::ConsistencyResult r = lc::surrogate_consistency_check(inst, m);
    if (r.match) ++matches;
    std::printf("%llu,%s,%s,%.12f,%.12f\n",
                static_cast<unsigned long long>(s), mode.c_str(),
                r.match ? "true" : "false", r.max_gba, r.achieved_gba);
  }
  std::printf("match %zu/%zu\n", matches, instances);
  return 0;
}

int cmd_report(const std::vector<std::string>& runs,
               const std::string& out_path) {
  std::vector<std::string> missing;
  std::vector<std::map<std::string, std::string>> rows;
  for (const auto& dir : runs) {
    const std::string path = dir + "/summary.txt";
    std::ifstream in(path);
    if (!in) {
      missing.push_back(dir);
      continue;
    }
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
      const auto eq = line.find('=');
      if (eq != std::string::npos)
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    kv["run"] = dir;
    rows.push_back(std::move(kv));
  }
  if (!missing.empty()) {
    std::string names;
    for (const auto& m : missing) names += (names.empty() ? "" : ", ") + m;
    throw lc::io_error("missing run directories: " + names);
  }
  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path, std::ios::trunc);
    if (!file) throw lc::io_error("cannot write " + out_path);
    out = &file;
  }
  *out << "loss,mixup,prior,ratio,seed,final_gba,final_worst,best_gba,"
          "config_hash,run\n";
  for (const auto& kv : rows) {
    auto get = [&](const char* k) {
      const auto it = kv.find(k);
      return it == kv.end() ? std::string("?") : it->second;
    };
    *out << get("loss_mode") << ',' << get("mixup") << ','
         << get("prior_strategy") << ',' << get("ratio") << ','
         << get("seed") << ',' << get("final_gba") << ','
         << get("final_worst") << ',' << get("best_gba") << ','
         << get("config_hash") << ',' << get("run") << '\n';
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-branch debiasing trainer with group-prior logit "
               "correction"};
  app.require_subcommand(1);

  GenDataArgs gd;
  CLI::App* gen = app.add_subcommand("gen-data", "Build a biased dataset");
  gen->add_option("--dataset", gd.dataset,
                  "cmnist | cmnist-m2o | cmnist-o2m | cmnist-m2m | gauss");
  gen->add_option("--ratio", gd.ratio, "minority fraction in (0,1)");
  gen->add_option("--seed", gd.seed, "generator seed");
  gen->add_option("--out", gd.out, "output dataset path")->required();
  gen->add_option("--mnist-dir", gd.mnist_dir,
                  "directory with IDX files (glyph fallback when absent)");
  gen->add_option("--glyph-per-class", gd.glyph_per_class,
                  "synthetic digits per class for the train pool");
  gen->add_option("--train-per-class", gd.train_per_class,
                  "cap on train samples per class (0 = all)");
  gen->add_option("--test-per-cell", gd.test_per_cell,
                  "test samples per (label, color) cell (0 = max)");
  gen->add_option("--classes", gd.toy_classes, "gauss: class count");
  gen->add_option("--toy-train", gd.toy_train, "gauss: train samples");
  gen->add_option("--toy-test", gd.toy_test, "gauss: test samples");
  gen->add_option("--separation", gd.toy_separation,
                  "gauss: core feature separation");

  TrainArgs ta;
  CLI::App* tr = app.add_subcommand("train", "Train the two branches");
  tr->add_option("--data", ta.data, "LCDS1 dataset path")->required();
  tr->add_option("--out", ta.out, "run output directory");
  tr->add_option("--loss", ta.loss, "lc | ce | rwce");
  tr->add_option("--mixup", ta.mixup, "on | off");
  tr->add_option("--prior", ta.prior, "moving | batch | dataset");
  tr->add_option("--epochs", ta.epochs, "training epochs");
  tr->add_option("--batch-size", ta.batch_size, "minibatch size");
  tr->add_option("--lr", ta.lr, "learning rate");
  tr->add_option("--q", ta.q, "generalized CE exponent");
  tr->add_option("--alpha", ta.alpha, "prior EMA momentum");
  tr->add_option("--rampup", ta.rampup, "mixup rampup epochs");
  tr->add_option("--seed", ta.seed, "training seed");
  tr->add_flag("--per-sample-ema", ta.per_sample_ema,
               "per-sample prior EMA variant");
  tr->add_flag("--static-lambda", ta.static_lambda,
               "draw mixup lambda from U(0.5, 1)");
  tr->add_flag("--freeze-prior", ta.freeze_prior,
               "keep the group prior uniform");
  tr->add_flag("--assume-1to1", ta.assume_1to1,
               "run the prior as if colors mapped one-to-one onto classes");

  std::string ev_checkpoint, ev_data;
  CLI::App* ev = app.add_subcommand("eval", "Evaluate a checkpoint");
  ev->add_option("--checkpoint", ev_checkpoint, "LCMLP1 checkpoint")
      ->required();
  ev->add_option("--data", ev_data, "LCDS1 dataset path")->required();

  std::size_t oc_instances = 50, oc_x = 5, oc_l = 2, oc_k = 2;
  std::string oc_mode = "lc";
  std::uint64_t oc_seed = 1;
  CLI::App* oc = app.add_subcommand(
      "oracle-check", "Surrogate consistency on enumerable instances");
  oc->add_option("--instances", oc_instances, "instance count");
  oc->add_option("--mode", oc_mode, "lc | ce | rwce");
  oc->add_option("--seed", oc_seed, "base seed");
  oc->add_option("--x", oc_x, "domain size");
  oc->add_option("--classes", oc_l, "label count");
  oc->add_option("--attrs", oc_k, "attribute count");

  std::vector<std::string> rp_runs;
  std::string rp_out;
  CLI::App* rp = app.add_subcommand("report", "Merge run summaries");
  rp->add_option("--runs", rp_runs, "run directories")->required();
  rp->add_option("--out", rp_out, "output CSV (default stdout)");

  try {
    app.parse(argc, argv);
    if (gen->parsed()) return cmd_gen_data(gd);
    if (tr->parsed()) return cmd_train(ta);
    if (ev->parsed()) return cmd_eval(ev_checkpoint, ev_data);
    if (oc->parsed())
      return cmd_oracle_check(oc_instances, oc_mode, oc_seed, oc_x, oc_l,
                              oc_k);
    if (rp->parsed()) return cmd_report(rp_runs, rp_out);
    return 2;
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  } catch (const lc::config_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const lc::numeric_error& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return 3;
  } catch (const lc::io_error& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return 4;
  }
}
