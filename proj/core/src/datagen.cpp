#include "lc/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "lc/errors.hpp"

namespace lc {

std::vector<Rgb> make_palette(std::size_t k) {
  static const std::vector<Rgb> base = {
      {1.0f, 0.0f, 0.0f},  {0.0f, 1.0f, 0.0f},   {0.0f, 0.0f, 1.0f},
      {1.0f, 1.0f, 0.0f},  {1.0f, 0.0f, 1.0f},   {0.0f, 1.0f, 1.0f},
      {1.0f, 0.5f, 0.0f},  {0.5f, 0.0f, 1.0f},   {1.0f, 0.0f, 0.5f},
      {0.5f, 1.0f, 0.0f},  {1.0f, 1.0f, 1.0f},   {0.0f, 1.0f, 0.5f},
      {1.0f, 0.5f, 0.5f},  {0.5f, 0.5f, 1.0f},   {0.75f, 0.75f, 0.25f},
      {0.0f, 0.5f, 1.0f}};
  if (k == 0 || k > base.size())
    throw config_error("palette supports 1 to " +
                       std::to_string(base.size()) + " colors");
  return std::vector<Rgb>(base.begin(), base.begin() + k);
}

namespace {

// 7-segment layout, half-open pixel rects.
struct Seg {
  int r0, r1, c0, c1;
};

void seg_rects(int t, Seg out[7]) {
  const int y0 = 5, ym = 13, y2 = 21, x0 = 9, x1 = 20;
  out[0] = {y0, y0 + t, x0, x1};          // a: top bar
  out[1] = {y0, ym + t, x1 - t, x1};      // b: upper right
  out[2] = {ym, y2 + t, x1 - t, x1};      // c: lower right
  out[3] = {y2, y2 + t, x0, x1};          // d: bottom bar
  out[4] = {ym, y2 + t, x0, x0 + t};      // e: lower left
  out[5] = {y0, ym + t, x0, x0 + t};      // f: upper left
  out[6] = {ym, ym + t, x0, x1};          // g: middle bar
}

constexpr std::uint8_t kDigitSegs[10] = {
    0b0111111, // 0: abcdef
    0b0000110, // 1: bc
    0b1011011, // 2: abdeg
    0b1001111, // 3: abcdg
    0b1100110, // 4: bcfg
    0b1101101, // 5: acdfg
    0b1111101, // 6: acdefg
    0b0000111, // 7: abc
    0b1111111, // 8
    0b1101111, // 9: abcdfg
};

// Strokes are drawn on a canonical grid with per-segment jitter, then pushed
// through a random affine map. Without the warp a class is recoverable from a
// handful of fixed pixels, which defeats the point of a shape/color contest.
void draw_glyph(std::size_t digit, Rng& rng, float* img) {
  float canon[28 * 28];
  std::fill(canon, canon + 28 * 28, 0.0f);
  const float base = float(0.85 + 0.15 * rng.uniform());
  Seg segs[7];
  seg_rects(2, segs);
  for (int s = 0; s < 7; ++s) {
    if (!(kDigitSegs[digit] >> s & 1)) continue;
    const float level = base * float(0.85 + 0.15 * rng.uniform());
    Seg g = segs[s];
    const int jr = int(rng.uniform_index(3)) - 1;
    const int jc = int(rng.uniform_index(3)) - 1;
    g.r0 += jr;
    g.r1 += jr;
    g.c0 += jc;
    g.c1 += jc;
    if (rng.uniform() < 0.5) {
      // thicken along whichever axis is the stroke width
      if (g.r1 - g.r0 < g.c1 - g.c0)
        ++g.r1;
      else
        ++g.c1;
    }
    for (int r = std::max(0, g.r0); r < std::min(28, g.r1); ++r)
      for (int c = std::max(0, g.c0); c < std::min(28, g.c1); ++c)
        canon[r * 28 + c] = std::max(canon[r * 28 + c], level);
  }

  const float rot = float((rng.uniform() * 2.0 - 1.0) * 0.25);
  const float shear = float((rng.uniform() * 2.0 - 1.0) * 0.14);
  const float sx = float(0.86 + 0.26 * rng.uniform());
  const float sy = float(0.86 + 0.26 * rng.uniform());
  const float tx = float((rng.uniform() * 2.0 - 1.0) * 2.5);
  const float ty = float((rng.uniform() * 2.0 - 1.0) * 2.5);
  const float ct = std::cos(rot), st = std::sin(rot);
  // forward map: rotate * shear * scale about the image centre, then shift
  const float a00 = ct * sx, a01 = (ct * shear - st) * sy;
  const float a10 = st * sx, a11 = (st * shear + ct) * sy;
  const float det = a00 * a11 - a01 * a10; // = sx * sy, never near zero
  const float i00 = a11 / det, i01 = -a01 / det;
  const float i10 = -a10 / det, i11 = a00 / det;
  const float cx = 14.0f, cy = 14.0f;
  auto at = [&](int rr, int cc) -> float {
    return (rr < 0 || rr >= 28 || cc < 0 || cc >= 28) ? 0.0f
                                                      : canon[rr * 28 + cc];
  };
  for (int r = 0; r < 28; ++r) {
    for (int c = 0; c < 28; ++c) {
      const float ux = float(c) - cx - tx;
      const float uy = float(r) - cy - ty;
      const float srcx = i00 * ux + i01 * uy + cx;
      const float srcy = i10 * ux + i11 * uy + cy;
      const int x0 = int(std::floor(srcx));
      const int y0 = int(std::floor(srcy));
      const float fx = srcx - float(x0);
      const float fy = srcy - float(y0);
      const float v =
          (1.0f - fy) * ((1.0f - fx) * at(y0, x0) + fx * at(y0, x0 + 1)) +
          fy * ((1.0f - fx) * at(y0 + 1, x0) + fx * at(y0 + 1, x0 + 1));
      img[r * 28 + c] = v;
    }
  }
  for (int p = 0; p < 28 * 28; ++p) {
    if (rng.uniform() < 0.07)
      img[p] = std::min(1.0f, img[p] + float(0.4 * rng.uniform()));
  }
}

} // namespace

IdxImages make_glyph_images(std::size_t per_class, std::uint64_t seed,
                            std::vector<std::uint8_t>* labels_out,
                            std::size_t threads) {
  if (per_class == 0) throw config_error("glyph corpus needs per_class >= 1");
  IdxImages out;
  out.count = per_class * 10;
  out.rows = out.cols = 28;
  out.pixels = TensorF::zeros({out.count, std::size_t(28 * 28)});
  if (labels_out) labels_out->resize(out.count);
  const Rng base(seed);
  auto render = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      Rng rng = base.fork(i);
      draw_glyph(i / per_class, rng, out.pixels.data.data() + i * 28 * 28);
    }
  };
  const std::size_t workers =
      std::max<std::size_t>(1, std::min(threads, out.count));
  if (workers == 1) {
    render(0, out.count);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (out.count + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t lo = w * chunk;
      const std::size_t hi = std::min(out.count, lo + chunk);
      if (lo < hi) pool.emplace_back(render, lo, hi);
    }
    for (auto& t : pool) t.join();
  }
  if (labels_out)
    for (std::size_t i = 0; i < out.count; ++i)
      (*labels_out)[i] = std::uint8_t(i / per_class);
  return out;
}

namespace {

void tint_into(const float* gray, std::size_t hw, const Rgb& color,
               float* out) {
  for (std::size_t ch = 0; ch < 3; ++ch)
    for (std::size_t p = 0; p < hw; ++p) out[ch * hw + p] = gray[p] * color[ch];
}

std::vector<std::vector<std::size_t>> pools_by_label(
    const std::vector<std::uint8_t>& labels, std::size_t L) {
  std::vector<std::vector<std::size_t>> pools(L);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= L)
      throw config_error("source label " + std::to_string(labels[i]) +
                         " exceeds topology L");
    pools[labels[i]].push_back(i);
  }
  return pools;
}

} // namespace

BiasedDataset make_colored_mnist(const IdxImages& train_images,
                                 const std::vector<std::uint8_t>& train_labels,
                                 const IdxImages& test_images,
                                 const std::vector<std::uint8_t>& test_labels,
                                 const CorrelationTopology& topology,
                                 double rho, const std::vector<Rgb>& palette,
                                 std::uint64_t seed,
                                 const ColoredMnistOptions& opts) {
  topology.validate();
  const std::size_t L = topology.L;
  const std::size_t K = topology.K;
  if (palette.size() != K)
    throw config_error("palette size " + std::to_string(palette.size()) +
                       " must equal K = " + std::to_string(K));
  if (!(rho > 0.0 && rho < 1.0))
    throw config_error("minority ratio must lie in (0, 1)");
  if (train_images.count != train_labels.size() ||
      test_images.count != test_labels.size())
    throw config_error("image/label counts disagree");
  if (train_images.rows != test_images.rows ||
      train_images.cols != test_images.cols)
    throw config_error("train/test image dimensions disagree");

  const std::size_t hw = train_images.rows * train_images.cols;
  BiasedDataset ds;
  ds.d = 3 * hw;
  ds.L = L;
  ds.K = K;
  ds.minority_ratio = rho;
  ds.topology = topology;
  ds.seed = seed;

  Rng rng(seed);
  auto train_pools = pools_by_label(train_labels, L);
  auto test_pools = pools_by_label(test_labels, L);

  // Sizing pass so the feature matrix can be allocated up front.
  std::vector<std::size_t> take_train(L);
  for (std::size_t y = 0; y < L; ++y) {
    take_train[y] = train_pools[y].size();
    if (opts.train_per_class > 0)
      take_train[y] = std::min(take_train[y], opts.train_per_class);
    if (take_train[y] < 2)
      throw config_error("class " + std::to_string(y) +
                         " has fewer than 2 training digits");
  }
  std::size_t per_cell = std::size_t(-1);
  for (std::size_t y = 0; y < L; ++y)
    per_cell = std::min(per_cell, test_pools[y].size() / K);
  if (opts.test_per_cell > 0) per_cell = std::min(per_cell, opts.test_per_cell);
  if (per_cell == 0)
    throw config_error("not enough held-out digits for a balanced test split");

  std::size_t total = 0;
  for (std::size_t y = 0; y < L; ++y) total += take_train[y];
  total += per_cell * L * K;
  ds.features = TensorF::zeros({total, ds.d});
  ds.labels.reserve(total);
  ds.attrs.reserve(total);
  ds.split_flag.reserve(total);

  std::size_t row = 0;
  auto emit = [&](const IdxImages& src, std::size_t src_idx, std::size_t y,
                  std::size_t a, std::uint8_t split) {
    tint_into(src.pixels.data.data() + src_idx * hw, hw, palette[a],
              ds.features.data.data() + row * ds.d);
    ds.labels.push_back(std::uint8_t(y));
    ds.attrs.push_back(std::uint8_t(a));
    ds.split_flag.push_back(split);
    ++row;
  };

  for (std::size_t y = 0; y < L; ++y) {
    auto& pool = train_pools[y];
    rng.shuffle(pool);
    const std::size_t n_y = take_train[y];
    long long want = std::llround(rho * double(n_y));
    if (want == 0) {
      ds.warnings.push_back("class " + std::to_string(y) +
                            ": ratio rounds to zero minority samples, "
                            "forcing 1");
      want = 1;
    }
    const std::size_t m_y =
        std::min(std::size_t(want), n_y - 1);
    const auto& aligned = topology.group_to_attrs[topology.group_of_label(y)];
    std::vector<std::size_t> others;
    for (std::size_t a = 0; a < K; ++a)
      if (std::find(aligned.begin(), aligned.end(), a) == aligned.end())
        others.push_back(a);
    if (others.empty())
      throw config_error("topology leaves no off-group color for class " +
                         std::to_string(y));
    for (std::size_t j = 0; j < n_y; ++j) {
      std::size_t a;
      if (j < m_y) {
        a = others[rng.uniform_index(others.size())];
      } else {
        a = aligned[(j - m_y) % aligned.size()];
      }
      emit(train_images, pool[j], y, a, 0);
    }
  }

  for (std::size_t y = 0; y < L; ++y) {
    auto& pool = test_pools[y];
    rng.shuffle(pool);
    std::size_t j = 0;
    for (std::size_t a = 0; a < K; ++a)
      for (std::size_t c = 0; c < per_cell; ++c, ++j)
        emit(test_images, pool[j], y, a, 1);
  }

  ds.validate();
  return ds;
}

BiasedDataset make_gaussian_toy(std::size_t L, std::size_t K, double rho,
                                std::size_t d_core, std::size_t d_spur,
                                double separation, std::uint64_t seed,
                                const GaussianToyOptions& opts) {
  if (L != K) throw config_error("gaussian toy supports one-to-one only");
  if (L < 2) throw config_error("gaussian toy needs L >= 2");
  if (d_core == 0 || d_spur == 0)
    throw config_error("gaussian toy needs d_core, d_spur >= 1");
  if (!(rho > 0.0 && rho < 1.0))
    throw config_error("minority ratio must lie in (0, 1)");
  if (separation < 0.0) throw config_error("separation must be >= 0");
  const double spur_sep = opts.spur_separation > 0.0
                              ? opts.spur_separation
                              : std::max(4.0, 2.0 * separation);

  BiasedDataset ds;
  ds.d = d_core + d_spur;
  ds.L = L;
  ds.K = K;
  ds.minority_ratio = rho;
  ds.topology = CorrelationTopology::one_to_one(L);
  ds.seed = seed;

  // Means sit on coordinate axes when room allows, otherwise spaced along
  // the first coordinate.
  auto mean_at = [](std::size_t idx, std::size_t dims, std::size_t count,
                    double sep, std::size_t coord) -> double {
    if (dims >= count) return coord == idx ? sep / std::sqrt(2.0) : 0.0;
    return coord == 0 ? sep * double(idx) : 0.0;
  };

  Rng rng(seed);
  const std::size_t n_train = opts.n_train;
  const std::size_t n_test_cell = opts.n_test / (L * K);
  if (n_train < L) throw config_error("gaussian toy train split too small");
  if (n_test_cell == 0)
    throw config_error("gaussian toy test split too small for balance");
  const std::size_t total = n_train + n_test_cell * L * K;
  ds.features = TensorF::zeros({total, ds.d});
  ds.labels.reserve(total);
  ds.attrs.reserve(total);
  ds.split_flag.reserve(total);

  std::size_t row = 0;
  auto emit = [&](std::size_t y, std::size_t a, std::uint8_t split) {
    float* x = ds.features.data.data() + row * ds.d;
    for (std::size_t c = 0; c < d_core; ++c)
      x[c] = float(mean_at(y, d_core, L, separation, c) + rng.normal());
    for (std::size_t c = 0; c < d_spur; ++c)
      x[d_core + c] =
          float(mean_at(a, d_spur, K, spur_sep, c) + rng.normal());
    ds.labels.push_back(std::uint8_t(y));
    ds.attrs.push_back(std::uint8_t(a));
    ds.split_flag.push_back(split);
    ++row;
  };

  for (std::size_t y = 0; y < L; ++y) {
    const std::size_t n_y = n_train / L + (y < n_train % L ? 1 : 0);
    long long want = std::llround(rho * double(n_y));
    if (want == 0) {
      ds.warnings.push_back("class " + std::to_string(y) +
                            ": ratio rounds to zero minority samples, "
                            "forcing 1");
      want = 1;
    }
    const std::size_t m_y = std::min(std::size_t(want), n_y - 1);
    for (std::size_t j = 0; j < n_y; ++j) {
      std::size_t a;
      if (j < m_y) {
        const std::size_t off = rng.uniform_index(K - 1);
        a = off >= y ? off + 1 : off;
      } else {
        a = y;
      }
      emit(y, a, 0);
    }
  }
  for (std::size_t y = 0; y < L; ++y)
    for (std::size_t a = 0; a < K; ++a)
      for (std::size_t c = 0; c < n_test_cell; ++c) emit(y, a, 1);

  ds.validate();
  return ds;
}

} // namespace lc
