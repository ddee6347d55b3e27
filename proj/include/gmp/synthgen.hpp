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

#ifndef GMP_SYNTHGEN_HPP_
#define GMP_SYNTHGEN_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "gmp/encoding.hpp"
#include "gmp/imaging.hpp"
#include "gmp/scoring.hpp"
#include "gmp/vocab.hpp"

namespace gmp {

// Latent-parts generator. Each identity owns one latent appearance per part;
// parts sit on a fixed lattice over the grid; each view renders latent
// appearances through its own random word permutation. Every image then
// jitters each part by up to `jitter` pixels and replaces each pixel's word
// with a uniform random word with probability `word_noise`.
struct SynthSpec {
  std::uint32_t n_views = 2;
  std::uint32_t n_identities = 100;
  std::uint32_t images_per_entity = 1;
  std::uint32_t grid_width = 24;
  std::uint32_t grid_height = 40;
  std::uint32_t n_parts = 20;
  std::uint32_t k_words = 50;
  double word_noise = 0.1;
  std::uint32_t jitter = 1;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SynthEntity {
  std::uint32_t identity = 0;
  std::vector<WordGrid> images;
};

struct SynthDataset {
  SynthSpec spec;
  // views[m][i] is identity i seen in view m.
  std::vector<std::vector<SynthEntity>> views;
  std::vector<std::vector<std::uint32_t>> signatures;  // [identity][part]
  std::vector<std::vector<std::uint32_t>> word_maps;   // [view][latent]
};

SynthDataset generate(const SynthSpec& spec);

// Part index owning each pixel of the unjittered lattice layout.
std::vector<std::uint32_t> part_layout(const SynthSpec& spec);

// Feature prototypes of one view (k_words x dim, values in [0,1]) and a
// feature field rendering of a word grid: prototype plus uniform noise of
// the given amplitude, clamped to [0,1].
std::vector<float> synth_prototypes(const SynthSpec& spec, std::uint32_t view,
                                    std::uint32_t dim);
FeatureField render_features(const WordGrid& grid,
                             std::span<const float> prototypes,
                             std::uint32_t dim, double amplitude,
                             std::uint64_t seed);

// Limits for the brute-force oracles.
inline constexpr std::uint32_t kOracleMaxWords = 10;
inline constexpr std::size_t kOracleMaxLocations = 30;
inline constexpr std::uint32_t kOracleMaxViews = 3;

// Dense k x |h| appearance matrix of an image stack evaluated pixel pair by
// pixel pair: for every sampled location, the max kernel value over pixels
// carrying the word (values under kStorageCutoff count as 0), averaged over
// the stack.
std::vector<double> oracle_appearance(std::span<const WordGrid> stack,
                                      const KernelParams& params);

// Group score by explicit per-pixel kernels and a dense co-occurrence
// matrix per view pair. stacks[m] holds the images of view m. Small
// instances only.
double oracle_group_score(std::span<const std::vector<WordGrid>> stacks,
                          const BilinearModel& model);

}  // namespace gmp

#endif  // GMP_SYNTHGEN_HPP_
