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

#ifndef GMP_VOCAB_HPP_
#define GMP_VOCAB_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gmp/imaging.hpp"

namespace gmp {

// Row-major set of feature vectors sharing one dimensionality.
struct SampleSet {
  std::size_t dim = 0;
  std::vector<float> values;

  std::size_t size() const { return dim == 0 ? 0 : values.size() / dim; }
  std::span<const float> row(std::size_t i) const {
    return {values.data() + i * dim, dim};
  }
};

// Per-view visual vocabulary: k centroids of a fixed feature dimension.
struct Vocabulary {
  std::uint32_t view = 0;
  std::size_t dim = 0;
  std::vector<double> centroids;  // k * dim, row-major
  std::uint64_t seed = 0;

  std::size_t k() const { return dim == 0 ? 0 : centroids.size() / dim; }
  std::span<const double> centroid(std::size_t i) const {
    return {centroids.data() + i * dim, dim};
  }
};

// Word index per anchor location, row-major. Every index is < k.
struct WordGrid {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::uint32_t k = 0;
  std::vector<std::uint32_t> words;

  std::size_t size() const {
    return static_cast<std::size_t>(width) * height;
  }
  std::uint32_t at(std::uint32_t x, std::uint32_t y) const {
    return words[static_cast<std::size_t>(y) * width + x];
  }
};

struct KMeansResult {
  Vocabulary vocabulary;
  std::vector<std::uint32_t> assignment;
  // Inertia after every assignment step, in iteration order.
  std::vector<double> inertia_trace;
  std::size_t iterations = 0;
};

// Lloyd's algorithm from a seeded k-means++ start. Stops after max_iter
// assignment steps or once assignments stop changing. An emptied cluster
// is reseeded at the point farthest from its current centroid.
KMeansResult kmeans_fit(const SampleSet& samples, std::size_t k,
                        std::uint64_t seed, std::size_t max_iter,
                        std::uint32_t view = 0);

std::size_t count_distinct(const SampleSet& samples);

// Index of the nearest centroid by Euclidean distance; ties go to the
// lowest index.
std::uint32_t nearest_centroid(const Vocabulary& vocab,
                               std::span<const float> x);

WordGrid quantize(const FeatureField& field, const Vocabulary& vocab);

// Draws n vectors uniformly without replacement across all fields, or with
// replacement when n exceeds the total.
SampleSet sample_training_features(std::span<const FeatureField> fields,
                                   std::size_t n, std::uint64_t seed);

// One centroid per line, comma separated, full precision.
std::string vocabulary_csv(const Vocabulary& vocab);

}  // namespace gmp

#endif  // GMP_VOCAB_HPP_
