#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "lc/dataset.hpp"
#include "lc/idx.hpp"
#include "lc/rng.hpp"
#include "lc/topology.hpp"

namespace lc {

using Rgb = std::array<float, 3>;

// First 10 entries are fixed, mutually distant colors; up to 6 more are
// available for topologies that need extra attribute values.
std::vector<Rgb> make_palette(std::size_t k);

// Procedurally drawn 7-segment style digits, 28x28 grayscale in [0, 1],
// with per-sample jitter, stroke-thickness wobble, and pixel noise. Stands
// in for MNIST when the real files are absent. Each image draws from its
// own forked stream, so the result is identical for any worker count.
IdxImages make_glyph_images(std::size_t per_class, std::uint64_t seed,
                            std::vector<std::uint8_t>* labels_out,
                            std::size_t threads = 1);

struct ColoredMnistOptions {
  std::size_t train_per_class = 0; // 0 = use everything available
  std::size_t test_per_cell = 0;   // 0 = as many as balance allows
};

// Foreground-tints grayscale digits: aligned samples get a color owned by
// their label's group (split evenly when the group owns several), minority
// samples a random color from outside the group. The test split is exactly
// balanced over all (label, color) cells.
BiasedDataset make_colored_mnist(const IdxImages& train_images,
                                 const std::vector<std::uint8_t>& train_labels,
                                 const IdxImages& test_images,
                                 const std::vector<std::uint8_t>& test_labels,
                                 const CorrelationTopology& topology,
                                 double rho, const std::vector<Rgb>& palette,
                                 std::uint64_t seed,
                                 const ColoredMnistOptions& opts = {});

struct GaussianToyOptions {
  std::size_t n_train = 10000;
  std::size_t n_test = 2000;
  double spur_separation = 0.0; // 0 = max(4, 2 * separation)
};

// Unit-variance Gaussians: class means `separation` apart on the core
// coordinates, attribute means further apart on the spurious coordinates,
// attribute aligned with the label's group with probability 1 - rho.
BiasedDataset make_gaussian_toy(std::size_t L, std::size_t K, double rho,
                                std::size_t d_core, std::size_t d_spur,
                                double separation, std::uint64_t seed,
                                const GaussianToyOptions& opts = {});

} // namespace lc
