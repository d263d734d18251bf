#include "lc/idx.hpp"

#include <cstdio>
#include <fstream>

#include "lc/errors.hpp"

namespace lc {

namespace {

std::vector<std::uint8_t> read_all(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return bytes;
}

std::uint32_t be32(const std::vector<std::uint8_t>& b, std::size_t off,
                   const std::string& path) {
  if (off + 4 > b.size())
    throw io_error(path + ": truncated header at byte " +
                   std::to_string(off));
  return (std::uint32_t(b[off]) << 24) | (std::uint32_t(b[off + 1]) << 16) |
         (std::uint32_t(b[off + 2]) << 8) | std::uint32_t(b[off + 3]);
}

std::string hex32(std::uint32_t v) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "0x%08x", v);
  return buf;
}

} // namespace

IdxImages load_idx_images(const std::string& path) {
  const auto bytes = read_all(path);
  const std::uint32_t magic = be32(bytes, 0, path);
  if (magic != 0x00000803u)
    throw io_error(path + ": expected image magic 0x00000803, got " +
                   hex32(magic) + " at byte 0");
  const std::uint32_t n = be32(bytes, 4, path);
  const std::uint32_t rows = be32(bytes, 8, path);
  const std::uint32_t cols = be32(bytes, 12, path);
  if (rows == 0 || cols == 0 || rows > 4096 || cols > 4096)
    throw io_error(path + ": implausible image dimensions at byte 8");
  const std::size_t pixels = std::size_t(rows) * cols;
  if (n > 0 && pixels > (std::size_t(1) << 40) / n)
    throw io_error(path + ": dimension product overflows at byte 4");
  const std::size_t need = 16 + std::size_t(n) * pixels;
  if (bytes.size() < need)
    throw io_error(path + ": truncated payload, need " +
                   std::to_string(need) + " bytes, have " +
                   std::to_string(bytes.size()) + " at byte " +
                   std::to_string(bytes.size()));
  IdxImages out;
  out.count = n;
  out.rows = rows;
  out.cols = cols;
  out.pixels = TensorF::zeros({out.count, pixels});
  for (std::size_t i = 0; i < out.pixels.data.size(); ++i)
    out.pixels.data[i] = float(bytes[16 + i]) / 255.0f;
  return out;
}

std::vector<std::uint8_t> load_idx_labels(const std::string& path) {
  const auto bytes = read_all(path);
  const std::uint32_t magic = be32(bytes, 0, path);
  if (magic != 0x00000801u)
    throw io_error(path + ": expected label magic 0x00000801, got " +
                   hex32(magic) + " at byte 0");
  const std::uint32_t n = be32(bytes, 4, path);
  const std::size_t need = 8 + std::size_t(n);
  if (bytes.size() < need)
    throw io_error(path + ": truncated payload, need " +
                   std::to_string(need) + " bytes, have " +
                   std::to_string(bytes.size()) + " at byte " +
                   std::to_string(bytes.size()));
  return std::vector<std::uint8_t>(bytes.begin() + 8, bytes.begin() + need);
}

} // namespace lc
