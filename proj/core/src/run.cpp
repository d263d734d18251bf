#include "lc/run.hpp"

#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "lc/errors.hpp"

namespace lc {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t fnv1a64_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return fnv1a64(ss.str());
}

namespace {

std::string fmt_double(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string fmt_hex64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(v));
  return buf;
}

} // namespace

std::string canonical_config_text(const TrainConfig& cfg) {
  std::ostringstream out;
  out << "alpha=" << fmt_double(cfg.alpha) << '\n';
  out << "assume_one_to_one=" << (cfg.assume_one_to_one ? 1 : 0) << '\n';
  out << "batch_size=" << cfg.batch_size << '\n';
  out << "epochs=" << cfg.epochs << '\n';
  out << "eval_batch=" << cfg.eval_batch << '\n';
  out << "floor_epsilon=" << fmt_double(cfg.floor_epsilon) << '\n';
  out << "freeze_prior_uniform=" << (cfg.freeze_prior_uniform ? 1 : 0)
      << '\n';
  out << "hidden=";
  for (std::size_t i = 0; i < cfg.hidden.size(); ++i)
    out << (i ? "," : "") << cfg.hidden[i];
  out << '\n';
  out << "learning_rate=" << fmt_double(cfg.learning_rate) << '\n';
  out << "loss_mode=" << to_string(cfg.loss_mode) << '\n';
  out << "lr_decay=";
  for (std::size_t i = 0; i < cfg.lr_decay.size(); ++i)
    out << (i ? ";" : "") << cfg.lr_decay[i].first << ":"
        << fmt_double(cfg.lr_decay[i].second);
  out << '\n';
  out << "margin_stride=" << cfg.margin_stride << '\n';
  out << "mixup_enabled=" << (cfg.mixup_enabled ? 1 : 0) << '\n';
  out << "per_sample_ema=" << (cfg.per_sample_ema ? 1 : 0) << '\n';
  out << "prior_strategy=" << to_string(cfg.strategy) << '\n';
  out << "q=" << fmt_double(cfg.q) << '\n';
  out << "rampup_epochs=" << cfg.rampup_epochs << '\n';
  out << "seed=" << cfg.seed << '\n';
  out << "static_lambda=" << (cfg.static_lambda ? 1 : 0) << '\n';
  return out.str();
}

RunPaths run_paths(const std::string& out_dir) {
  RunPaths p;
  p.dir = out_dir;
  p.epochs_csv = out_dir + "/epochs.csv";
  p.margins_csv = out_dir + "/margins.csv";
  p.summary = out_dir + "/summary.txt";
  p.checkpoint = out_dir + "/robust.lcmlp";
  p.erm_checkpoint = out_dir + "/erm.lcmlp";
  p.prior_csv = out_dir + "/prior.csv";
  p.manifest = out_dir + "/manifest.json";
  return p;
}

namespace {

void write_epochs_csv(const std::string& path, const TrainResult& tr,
                      std::size_t K) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw io_error("cannot write " + path);
  out << "epoch,split,group_y,group_a,accuracy,n\n";
  for (const auto& rec : tr.records) {
    for (const auto& [g, acc] : rec.eval.group_accuracy) {
      out << rec.epoch << ",test," << g / K << ',' << g % K << ','
          << fmt_double(acc) << ',' << rec.eval.group_total.at(g) << '\n';
    }
  }
  if (!out) throw io_error("short write to " + path);
}

void write_margins_csv(const std::string& path, const TrainResult& tr) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw io_error("cannot write " + path);
  out << "epoch,majority_mean,minority_mean,ratio,majority_min,"
         "minority_min\n";
  for (const auto& rec : tr.records)
    out << rec.epoch << ',' << fmt_double(rec.margins.majority_mean) << ','
        << fmt_double(rec.margins.minority_mean) << ','
        << fmt_double(rec.margins.ratio) << ','
        << fmt_double(rec.margins.majority_min) << ','
        << fmt_double(rec.margins.minority_min) << '\n';
  if (!out) throw io_error("short write to " + path);
}

void write_prior_csv(const std::string& path, const GroupPrior& prior) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw io_error("cannot write " + path);
  out << "y,a,p_hat\n";
  for (std::size_t y = 0; y < prior.L(); ++y)
    for (std::size_t a = 0; a < prior.K(); ++a)
      out << y << ',' << a << ',' << fmt_double(prior.at(y, a)) << '\n';
  if (!out) throw io_error("short write to " + path);
}

void write_summary(const std::string& path, const TrainResult& tr,
                   const TrainConfig& cfg, double ratio,
                   std::uint64_t config_hash) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw io_error("cannot write " + path);
  const EpochRecord& last = tr.final_record();
  out << "final_gba=" << fmt_double(last.eval.gba) << '\n';
  out << "final_worst=" << fmt_double(last.eval.worst) << '\n';
  out << "best_gba=" << fmt_double(tr.best_gba()) << '\n';
  out << "final_overall=" << fmt_double(last.eval.overall) << '\n';
  out << "final_margin_ratio=" << fmt_double(last.margins.ratio) << '\n';
  out << "loss_mode=" << to_string(cfg.loss_mode) << '\n';
  out << "mixup=" << (cfg.mixup_enabled ? "on" : "off") << '\n';
  out << "prior_strategy=" << to_string(cfg.strategy) << '\n';
  out << "ratio=" << fmt_double(ratio) << '\n';
  out << "epochs=" << cfg.epochs << '\n';
  out << "seed=" << cfg.seed << '\n';
  out << "config_hash=" << fmt_hex64(config_hash) << '\n';
  if (!out) throw io_error("short write to " + path);
}

} // namespace

RunOutputs run_training(const BiasedDataset& ds, const TrainConfig& cfg,
                        const std::string& out_dir,
                        const std::string& dataset_path) {
  std::filesystem::create_directories(out_dir);
  RunOutputs out;
  out.paths = run_paths(out_dir);
  out.config_hash = fnv1a64(canonical_config_text(cfg));
  out.result = train(ds, cfg);

  write_epochs_csv(out.paths.epochs_csv, out.result, ds.K);
  write_margins_csv(out.paths.margins_csv, out.result);
  write_prior_csv(out.paths.prior_csv, out.result.prior);
  write_summary(out.paths.summary, out.result, cfg, ds.minority_ratio,
                out.config_hash);
  save_checkpoint(out.result.robust, out.paths.checkpoint);
  save_checkpoint(out.result.erm, out.paths.erm_checkpoint);

  nlohmann::json manifest;
  manifest["config"] = nlohmann::json::object();
  {
    std::istringstream cfg_text(canonical_config_text(cfg));
    std::string line;
    while (std::getline(cfg_text, line)) {
      const auto eq = line.find('=');
      manifest["config"][line.substr(0, eq)] = line.substr(eq + 1);
    }
  }
  manifest["config_hash"] = fmt_hex64(out.config_hash);
  if (!dataset_path.empty())
    manifest["dataset_checksum"] = fmt_hex64(fnv1a64_file(dataset_path));
  manifest["outputs"] = {
      {"epochs_csv", fmt_hex64(fnv1a64_file(out.paths.epochs_csv))},
      {"margins_csv", fmt_hex64(fnv1a64_file(out.paths.margins_csv))},
      {"summary", fmt_hex64(fnv1a64_file(out.paths.summary))},
      {"prior_csv", fmt_hex64(fnv1a64_file(out.paths.prior_csv))},
      {"checkpoint", fmt_hex64(fnv1a64_file(out.paths.checkpoint))},
  };
  manifest["generated_at"] = static_cast<long long>(std::time(nullptr));
  manifest["synthetic_glyphs"] = ds.synthetic_glyphs;
  std::ofstream mf(out.paths.manifest, std::ios::trunc);
  if (!mf) throw io_error("cannot write " + out.paths.manifest);
  mf << manifest.dump(2) << '\n';
  return out;
}

} // namespace lc
