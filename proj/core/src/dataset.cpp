#include "lc/dataset.hpp"

#include <cstring>
#include <fstream>

#include "lc/errors.hpp"

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
    throw io_error(path + ": truncated header");
  return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) |
         (std::uint32_t(b[2]) << 16) | (std::uint32_t(b[3]) << 24);
}

void put_f32(std::ostream& out, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  put_i32(out, bits);
}

float get_f32(std::istream& in, const std::string& path) {
  const std::uint32_t bits = get_i32(in, path);
  float v;
  std::memcpy(&v, &bits, 4);
  return v;
}

} // namespace

void BiasedDataset::validate() const {
  topology.validate();
  if (topology.L != L || topology.K != K)
    throw config_error("dataset topology disagrees with L/K");
  const std::size_t n = labels.size();
  if (attrs.size() != n || split_flag.size() != n)
    throw config_error("dataset per-sample arrays disagree in length");
  if (features.shape.size() != 2 || features.rows() != n ||
      features.cols() != d)
    throw config_error("dataset feature matrix shape mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] >= L) throw config_error("dataset label out of range");
    if (attrs[i] >= K) throw config_error("dataset attribute out of range");
    if (split_flag[i] > 1) throw config_error("dataset split flag invalid");
  }
}

CorrelationTopology canonical_topology(TopologyKind kind, std::size_t L,
                                       std::size_t K) {
  switch (kind) {
    case TopologyKind::OneToOne:
      if (L != K) throw config_error("one-to-one needs L == K");
      return CorrelationTopology::one_to_one(L);
    case TopologyKind::ManyToOne: {
      if (K >= L) throw config_error("many-to-one needs K < L");
      std::vector<std::size_t> label_to_attr(L);
      const std::size_t merged = L - K + 1;
      for (std::size_t y = 0; y < L; ++y)
        label_to_attr[y] = y < merged ? 0 : y - merged + 1;
      return CorrelationTopology::many_to_one(label_to_attr, K);
    }
    case TopologyKind::OneToMany: {
      if (K <= L) throw config_error("one-to-many needs K > L");
      std::vector<std::size_t> mult(L, 1);
      mult[0] = K - L + 1;
      return CorrelationTopology::one_to_many(mult);
    }
    case TopologyKind::ManyToMany: {
      if (L < 3) throw config_error("many-to-many needs L >= 3");
      const std::size_t groups = L - 1;
      if (K < groups + 1)
        throw config_error("many-to-many needs K >= L");
      std::vector<std::size_t> label_to_group(L);
      for (std::size_t y = 0; y < L; ++y)
        label_to_group[y] = y < 2 ? 0 : y - 1;
      std::vector<std::size_t> mult(groups, 1);
      mult[0] = K - groups + 1;
      return CorrelationTopology::many_to_many(label_to_group, mult);
    }
  }
  throw config_error("unknown topology kind");
}

void save_dataset(const BiasedDataset& ds, const std::string& path) {
  ds.validate();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot write " + path);
  out.write("LCDS1", 5);
  put_i32(out, std::uint32_t(ds.size()));
  put_i32(out, std::uint32_t(ds.d));
  put_i32(out, std::uint32_t(ds.L));
  put_i32(out, std::uint32_t(ds.K));
  put_i32(out, std::uint32_t(ds.topology.kind));
  put_f32(out, float(ds.minority_ratio));
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const float* row = ds.features.data.data() + i * ds.d;
    out.write(reinterpret_cast<const char*>(row),
              std::streamsize(ds.d * sizeof(float)));
    const unsigned char tail[3] = {ds.labels[i], ds.attrs[i],
                                   ds.split_flag[i]};
    out.write(reinterpret_cast<const char*>(tail), 3);
  }
  if (!out) throw io_error("short write to " + path);
}

BiasedDataset load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open " + path);
  char magic[5];
  if (!in.read(magic, 5)) throw io_error(path + ": truncated magic");
  if (std::memcmp(magic, "LCDS1", 5) != 0)
    throw io_error(path + ": unsupported container version '" +
                   std::string(magic, 5) + "', expected LCDS1");
  BiasedDataset ds;
  const std::uint32_t n = get_i32(in, path);
  ds.d = get_i32(in, path);
  ds.L = get_i32(in, path);
  ds.K = get_i32(in, path);
  const std::uint32_t kind = get_i32(in, path);
  if (kind > 3) throw io_error(path + ": invalid topology code");
  ds.minority_ratio = double(get_f32(in, path));
  ds.topology = canonical_topology(TopologyKind(int(kind)), ds.L, ds.K);
  ds.features = TensorF::zeros({std::size_t(n), ds.d});
  ds.labels.resize(n);
  ds.attrs.resize(n);
  ds.split_flag.resize(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    float* row = ds.features.data.data() + std::size_t(i) * ds.d;
    if (!in.read(reinterpret_cast<char*>(row),
                 std::streamsize(ds.d * sizeof(float))))
      throw io_error(path + ": truncated features at sample " +
                     std::to_string(i));
    unsigned char tail[3];
    if (!in.read(reinterpret_cast<char*>(tail), 3))
      throw io_error(path + ": truncated record tail at sample " +
                     std::to_string(i));
    ds.labels[i] = tail[0];
    ds.attrs[i] = tail[1];
    ds.split_flag[i] = tail[2];
  }
  ds.validate();
  return ds;
}

void write_dataset_manifest_csv(const BiasedDataset& ds,
                                const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw io_error("cannot write " + path);
  out << "index,y,a,group,split\n";
  for (std::size_t i = 0; i < ds.size(); ++i)
    out << i << ',' << unsigned(ds.labels[i]) << ',' << unsigned(ds.attrs[i])
        << ',' << ds.group_id(i) << ','
        << (ds.split_flag[i] == 0 ? "train" : "test") << '\n';
  if (!out) throw io_error("short write to " + path);
}

} // namespace lc
