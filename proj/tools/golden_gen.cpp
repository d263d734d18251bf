// Regenerates the stored forward-pass fixture used by the unit tests.
// Usage: lc_golden_gen <out.txt>
#include <cstdio>
#include <string>
#include <vector>

#include "lc/mlp.hpp"
#include "lc/rng.hpp"

namespace {

// %.9g round-trips binary32 exactly, so the file carries the same floats
// the test will parse back.
float roundtrip(float v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", double(v));
  return std::strtof(buf, nullptr);
}

} // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: %s <out.txt>\n", argv[0]);
    return 2;
  }
  const std::vector<std::size_t> dims = {5, 7, 4, 3};
  const std::size_t n = 6;

  lc::Rng xrng(1007);
  lc::TensorF x = lc::TensorF::zeros({n, dims.front()});
  for (auto& v : x.data) v = roundtrip(float(xrng.normal()));

  lc::Rng rng(7);
  lc::MlpF model(dims, rng);
  lc::MlpF::Cache cache;
  const lc::TensorF logits = model.forward(x, cache);

  std::FILE* out = std::fopen(argv[1], "w");
  if (!out) {
    std::fprintf(stderr, "cannot write %s\n", argv[1]);
    return 2;
  }
  std::fprintf(out, "%zu %zu %zu %zu\n", dims.size(), n, dims.front(),
               dims.back());
  for (std::size_t i = 0; i < dims.size(); ++i)
    std::fprintf(out, "%zu%c", dims[i], i + 1 == dims.size() ? '\n' : ' ');
  for (std::size_t i = 0; i < x.data.size(); ++i)
    std::fprintf(out, "%.9g%c", double(x.data[i]),
                 (i + 1) % dims.front() == 0 ? '\n' : ' ');
  for (std::size_t i = 0; i < logits.data.size(); ++i)
    std::fprintf(out, "%.9g%c", double(logits.data[i]),
                 (i + 1) % dims.back() == 0 ? '\n' : ' ');
  std::fclose(out);
  return 0;
}
