#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "lc/dataset.hpp"
#include "lc/trainer.hpp"

namespace lc {

std::uint64_t fnv1a64(std::string_view bytes);
std::uint64_t fnv1a64_file(const std::string& path);

// One line per field, sorted fixed order, locale-independent formatting.
// The config hash in summaries is the FNV-1a of exactly this text.
std::string canonical_config_text(const TrainConfig& cfg);

struct RunPaths {
  std::string dir;
  std::string epochs_csv;   // epoch,split,group_y,group_a,accuracy,n
  std::string margins_csv;  // epoch + margin summary columns
  std::string summary;      // key=value lines
  std::string checkpoint;   // robust branch, LCMLP1
  std::string erm_checkpoint;
  std::string prior_csv;    // y,a,p_hat
  std::string manifest;     // resolved config + checksums, JSON
};

RunPaths run_paths(const std::string& out_dir);

// Trains, then writes every artifact under out_dir. dataset_path, when
// given, is checksummed into the manifest.
struct RunOutputs {
  TrainResult result;
  RunPaths paths;
  std::uint64_t config_hash = 0;
};

RunOutputs run_training(const BiasedDataset& ds, const TrainConfig& cfg,
                        const std::string& out_dir,
                        const std::string& dataset_path = "");

} // namespace lc
