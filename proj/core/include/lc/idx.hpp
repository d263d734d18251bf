#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "lc/tensor.hpp"

namespace lc {

struct IdxImages {
  std::size_t count = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  TensorF pixels; // count x (rows*cols), values in [0, 1]
};

// IDX containers: big-endian magic 0x00000803 (images) or 0x00000801
// (labels), big-endian dimension sizes, then raw unsigned bytes.
IdxImages load_idx_images(const std::string& path);
std::vector<std::uint8_t> load_idx_labels(const std::string& path);

} // namespace lc
