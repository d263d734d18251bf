#include <cstring>
#include <fstream>

#include "lc/mlp.hpp"

namespace lc {

namespace {

void put_i32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_i32(std::istream& in, const std::string& path) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4))
    throw io_error(path + ": truncated checkpoint");
  return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) |
         (std::uint32_t(b[2]) << 16) | (std::uint32_t(b[3]) << 24);
}

void put_f32_block(std::ostream& out, const std::vector<float>& v) {
  out.write(reinterpret_cast<const char*>(v.data()),
            std::streamsize(v.size() * sizeof(float)));
}

void get_f32_block(std::istream& in, std::vector<float>& v,
                   const std::string& path) {
  if (!in.read(reinterpret_cast<char*>(v.data()),
               std::streamsize(v.size() * sizeof(float))))
    throw io_error(path + ": truncated parameter block");
}

} // namespace

void save_checkpoint(const MlpF& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot write " + path);
  out.write("LCMLP1", 6);
  put_i32(out, std::uint32_t(model.num_layers()));
  for (std::size_t l = 0; l < model.num_layers(); ++l) {
    put_i32(out, std::uint32_t(model.dims[l]));
    put_i32(out, std::uint32_t(model.dims[l + 1]));
    put_f32_block(out, model.weights[l].data);
    put_f32_block(out, model.biases[l].data);
  }
  if (!out) throw io_error("short write to " + path);
}

MlpF load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open " + path);
  char magic[6];
  if (!in.read(magic, 6)) throw io_error(path + ": truncated magic");
  if (std::memcmp(magic, "LCMLP1", 6) != 0)
    throw io_error(path + ": bad checkpoint magic, expected LCMLP1");
  const std::uint32_t layers = get_i32(in, path);
  if (layers == 0 || layers > 64)
    throw io_error(path + ": implausible layer count");
  MlpF model;
  for (std::uint32_t l = 0; l < layers; ++l) {
    const std::uint32_t fan_in = get_i32(in, path);
    const std::uint32_t fan_out = get_i32(in, path);
    if (fan_in == 0 || fan_out == 0)
      throw io_error(path + ": zero layer dimension");
    if (l == 0) model.dims.push_back(fan_in);
    if (model.dims.back() != fan_in)
      throw io_error(path + ": layer dimensions do not chain");
    model.dims.push_back(fan_out);
    TensorF w = TensorF::zeros({fan_in, fan_out});
    get_f32_block(in, w.data, path);
    TensorF b = TensorF::zeros({fan_out});
    get_f32_block(in, b.data, path);
    model.weights.push_back(std::move(w));
    model.biases.push_back(std::move(b));
  }
  return model;
}

} // namespace lc
