// Copyright 2026 The GMP Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "gmp/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "gmp/error.hpp"

namespace gmp {
namespace {

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent stream per (purpose, a, b, c) so that identities and images
// can be generated in any order.
std::mt19937_64 stream(std::uint64_t seed, std::uint64_t purpose,
                       std::uint64_t a = 0, std::uint64_t b = 0,
                       std::uint64_t c = 0) {
  std::uint64_t s = mix(seed ^ mix(purpose));
  s = mix(s ^ a);
  s = mix(s ^ (b + 0x1234567ULL));
  s = mix(s ^ (c + 0x89abcdefULL));
  return std::mt19937_64(s);
}

enum Purpose : std::uint64_t {
  kSignature = 1,
  kWordMap = 2,
  kImage = 3,
  kPrototype = 4,
};

}  // namespace

void SynthSpec::validate() const {
  if (n_views < 2) throw ArgumentError("synthetic data needs >= 2 views");
  if (n_identities < 2) throw ArgumentError("synthetic data needs >= 2 identities");
  if (images_per_entity < 1) throw ArgumentError("images_per_entity must be >= 1");
  if (grid_width < 2 || grid_height < 2) {
    throw ArgumentError("grid must be at least 2x2");
  }
  if (n_parts < 1 ||
      n_parts > static_cast<std::uint64_t>(grid_width) * grid_height) {
    throw ArgumentError("n_parts must lie in [1, grid area]");
  }
  if (k_words < 1) throw ArgumentError("k_words must be >= 1");
  if (!(word_noise >= 0.0 && word_noise <= 1.0)) {
    throw ArgumentError("word_noise must lie in [0, 1]");
  }
  if (2 * jitter >= std::min(grid_width, grid_height)) {
    throw ArgumentError("jitter must be below half the smaller grid side");
  }
}

std::vector<std::uint32_t> part_layout(const SynthSpec& spec) {
  const std::uint32_t w = spec.grid_width, h = spec.grid_height;
  auto cols = static_cast<std::uint32_t>(std::ceil(
      std::sqrt(static_cast<double>(spec.n_parts) * w / h)));
  cols = std::clamp<std::uint32_t>(cols, 1, std::min(spec.n_parts, w));
  std::uint32_t rows = (spec.n_parts + cols - 1) / cols;
  if (rows > h) {
    rows = h;
    cols = (spec.n_parts + rows - 1) / rows;
  }
  std::vector<std::uint32_t> owner(static_cast<std::size_t>(w) * h);
  for (std::uint32_t y = 0; y < h; ++y) {
    const std::uint32_t r = static_cast<std::uint32_t>(
        static_cast<std::uint64_t>(y) * rows / h);
    for (std::uint32_t x = 0; x < w; ++x) {
      const std::uint32_t c = static_cast<std::uint32_t>(
          static_cast<std::uint64_t>(x) * cols / w);
      // Cells past the last part wrap around onto earlier parts.
      owner[static_cast<std::size_t>(y) * w + x] = (r * cols + c) % spec.n_parts;
    }
  }
  return owner;
}

SynthDataset generate(const SynthSpec& spec) {
  spec.validate();
  SynthDataset data;
  data.spec = spec;
  const std::uint32_t w = spec.grid_width, h = spec.grid_height;
  const std::size_t area = static_cast<std::size_t>(w) * h;
  const auto owner = part_layout(spec);

  data.signatures.resize(spec.n_identities);
  for (std::uint32_t id = 0; id < spec.n_identities; ++id) {
    auto rng = stream(spec.seed, kSignature, id);
    std::uniform_int_distribution<std::uint32_t> latent(0, spec.k_words - 1);
    data.signatures[id].resize(spec.n_parts);
    for (auto& s : data.signatures[id]) s = latent(rng);
  }
  data.word_maps.resize(spec.n_views);
  for (std::uint32_t m = 0; m < spec.n_views; ++m) {
    auto rng = stream(spec.seed, kWordMap, m);
    auto& map = data.word_maps[m];
    map.resize(spec.k_words);
    std::iota(map.begin(), map.end(), 0u);
    std::shuffle(map.begin(), map.end(), rng);
  }

  // Part cells, for jittered repainting.
  std::vector<std::vector<std::size_t>> cells(spec.n_parts);
  for (std::size_t i = 0; i < area; ++i) cells[owner[i]].push_back(i);

  data.views.resize(spec.n_views);
  std::vector<std::uint32_t> painted(area);
  for (std::uint32_t m = 0; m < spec.n_views; ++m) {
    auto& entities = data.views[m];
    entities.resize(spec.n_identities);
    for (std::uint32_t id = 0; id < spec.n_identities; ++id) {
      SynthEntity& entity = entities[id];
      entity.identity = id;
      for (std::uint32_t n = 0; n < spec.images_per_entity; ++n) {
        auto rng = stream(spec.seed, kImage, m, id, n);
        painted = owner;
        if (spec.jitter > 0) {
          const int j = static_cast<int>(spec.jitter);
          std::uniform_int_distribution<int> shift(-j, j);
          for (std::uint32_t p = 0; p < spec.n_parts; ++p) {
            const int dx = shift(rng), dy = shift(rng);
            for (std::size_t i : cells[p]) {
              const int x = static_cast<int>(i % w) + dx;
              const int y = static_cast<int>(i / w) + dy;
              if (x < 0 || y < 0 || x >= static_cast<int>(w) ||
                  y >= static_cast<int>(h)) {
                continue;
              }
              painted[static_cast<std::size_t>(y) * w + x] = p;
            }
          }
        }
        WordGrid grid{w, h, spec.k_words, std::vector<std::uint32_t>(area)};
        std::bernoulli_distribution corrupt(spec.word_noise);
        std::uniform_int_distribution<std::uint32_t> any(0, spec.k_words - 1);
        for (std::size_t i = 0; i < area; ++i) {
          const std::uint32_t latent = data.signatures[id][painted[i]];
          grid.words[i] = data.word_maps[m][latent];
          if (corrupt(rng)) grid.words[i] = any(rng);
        }
        entity.images.push_back(std::move(grid));
      }
    }
  }
  return data;
}

std::vector<float> synth_prototypes(const SynthSpec& spec, std::uint32_t view,
                                    std::uint32_t dim) {
  auto rng = stream(spec.seed, kPrototype, view);
  std::uniform_real_distribution<float> unit(0.0f, 1.0f);
  std::vector<float> out(static_cast<std::size_t>(spec.k_words) * dim);
  for (auto& v : out) v = unit(rng);
  return out;
}

FeatureField render_features(const WordGrid& grid,
                             std::span<const float> prototypes,
                             std::uint32_t dim, double amplitude,
                             std::uint64_t seed) {
  if (dim == 0 || prototypes.size() != static_cast<std::size_t>(grid.k) * dim) {
    throw ArgumentError("prototype table does not match the word grid");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> noise(-amplitude, amplitude);
  FeatureField field{grid.width, grid.height, dim, {}};
  field.data.resize(grid.size() * dim);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const float* proto = prototypes.data() + static_cast<std::size_t>(grid.words[i]) * dim;
    for (std::uint32_t d = 0; d < dim; ++d) {
      const double v = proto[d] + (amplitude > 0.0 ? noise(rng) : 0.0);
      field.data[i * dim + d] = static_cast<float>(std::clamp(v, 0.0, 1.0));
    }
  }
  return field;
}

std::vector<double> oracle_appearance(std::span<const WordGrid> stack,
                                      const KernelParams& params) {
  params.validate();
  if (stack.empty()) throw ArgumentError("oracle_appearance: empty stack");
  const WordGrid& first = stack.front();
  const LocationGrid grid{first.width, first.height, params.stride};
  const std::size_t locations = grid.size();
  std::vector<double> sum(static_cast<std::size_t>(first.k) * locations, 0.0);
  std::vector<double> best(static_cast<std::size_t>(first.k));
  for (const WordGrid& image : stack) {
    if (image.width != first.width || image.height != first.height ||
        image.k != first.k) {
      throw ArgumentError("oracle_appearance: stack shapes differ");
    }
    std::size_t h = 0;
    for (std::uint32_t ly = 0; ly < image.height; ly += params.stride) {
      for (std::uint32_t lx = 0; lx < image.width; lx += params.stride, ++h) {
        std::fill(best.begin(), best.end(), 0.0);
        for (std::uint32_t y = 0; y < image.height; ++y) {
          for (std::uint32_t x = 0; x < image.width; ++x) {
            const long dx = std::labs(static_cast<long>(x) - static_cast<long>(lx));
            const long dy = std::labs(static_cast<long>(y) - static_cast<long>(ly));
            const double d = static_cast<double>(std::max(dx, dy));
            const double kappa = d <= params.alpha ? std::exp(-d / params.sigma) : 0.0;
            double& b = best[image.at(x, y)];
            b = std::max(b, kappa);
          }
        }
        for (std::uint32_t z = 0; z < image.k; ++z) {
          if (best[z] >= kStorageCutoff) sum[z * locations + h] += best[z];
        }
      }
    }
  }
  const double n = static_cast<double>(stack.size());
  if (stack.size() > 1) {
    for (double& v : sum) v /= n;
  }
  return sum;
}

double oracle_group_score(std::span<const std::vector<WordGrid>> stacks,
                          const BilinearModel& model) {
  const auto views = static_cast<std::uint32_t>(stacks.size());
  if (views != model.num_views) {
    throw ArgumentError("oracle_group_score: view count mismatch");
  }
  if (views > kOracleMaxViews) {
    throw ArgumentError("oracle_group_score: too many views for the oracle");
  }
  std::vector<std::vector<double>> dense(views);
  std::vector<std::uint32_t> k(views);
  std::size_t locations = 0;
  for (std::uint32_t m = 0; m < views; ++m) {
    if (stacks[m].empty()) throw ArgumentError("oracle_group_score: empty stack");
    const WordGrid& g = stacks[m].front();
    k[m] = g.k;
    locations = LocationGrid{g.width, g.height, model.kernel.stride}.size();
    if (g.k > kOracleMaxWords || locations > kOracleMaxLocations) {
      throw ArgumentError("oracle_group_score: instance too large");
    }
    dense[m] = oracle_appearance(stacks[m], model.kernel);
  }
  if (model.shared.values.size() != locations) {
    throw ArgumentError("oracle_group_score: shared weights do not match");
  }
  const auto pairs = all_view_pairs(views);
  double total = 0.0;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const std::uint32_t a = pairs[p].first, b = pairs[p].second;
    const PairWeights& w = model.pair_weights[p];
    if (w.rows != k[a] || w.cols != k[b]) {
      throw ArgumentError("oracle_group_score: weight shape mismatch");
    }
    // phi[(i, j), h] = P_a[i, h] * P_b[j, h], then w^T phi w_h.
    std::vector<double> phi(static_cast<std::size_t>(k[a]) * k[b] * locations);
    for (std::uint32_t i = 0; i < k[a]; ++i) {
      for (std::uint32_t j = 0; j < k[b]; ++j) {
        for (std::size_t h = 0; h < locations; ++h) {
          phi[(static_cast<std::size_t>(i) * k[b] + j) * locations + h] =
              dense[a][i * locations + h] * dense[b][j * locations + h];
        }
      }
    }
    double term = 0.0;
    for (std::size_t row = 0; row < static_cast<std::size_t>(k[a]) * k[b]; ++row) {
      double inner = 0.0;
      for (std::size_t h = 0; h < locations; ++h) {
        inner += phi[row * locations + h] * model.shared.values[h];
      }
      term += w.values[row] * inner;
    }
    total += model.coeffs.beta[p] * term;
  }
  return total;
}

}  // namespace gmp
