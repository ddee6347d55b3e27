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

#ifndef GMP_ENCODING_HPP_
#define GMP_ENCODING_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <span>
#include <vector>

#include "gmp/vocab.hpp"

namespace gmp {

// Spatial kernel: exp(-d / sigma) for d <= alpha, zero beyond. Distances
// are chessboard distances on the pixel grid; appearance maps are sampled
// every `stride` pixels along both axes.
struct KernelParams {
  double sigma = 3.0;
  double alpha = 6.0;
  std::uint32_t stride = 4;

  void validate() const;
};

// Kernel values below this are not stored.
inline constexpr double kStorageCutoff = 1e-6;

inline constexpr std::int32_t kUnreachable =
    std::numeric_limits<std::int32_t>::max();

struct DistanceField {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<std::int32_t> distances;  // kUnreachable where no seed exists

  std::int32_t at(std::uint32_t x, std::uint32_t y) const {
    return distances[static_cast<std::size_t>(y) * width + x];
  }
};

// Exact chessboard distance transform of a seed mask (nonzero = seed) by a
// forward and a backward raster sweep over the 8-neighbourhood.
DistanceField chessboard_dt(std::span<const std::uint8_t> seeds,
                            std::uint32_t width, std::uint32_t height);
DistanceField chessboard_dt(const WordGrid& grid, std::uint32_t word);

double kernel_value(double distance, const KernelParams& params);

// Strided sampling grid over a width x height image; locations are
// numbered row-major.
struct LocationGrid {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::uint32_t stride = 1;

  std::uint32_t columns() const { return (width + stride - 1) / stride; }
  std::uint32_t rows() const { return (height + stride - 1) / stride; }
  std::size_t size() const {
    return static_cast<std::size_t>(columns()) * rows();
  }
  bool operator==(const LocationGrid&) const = default;
};

struct MapEntry {
  std::uint32_t word;
  std::uint32_t location;
  double value;
};

// Sparse p(word | entity, location) over a strided location grid. Storage
// is location-major: the words present at location h are
// words[offsets[h] .. offsets[h+1]) in increasing order.
class AppearanceMap {
 public:
  AppearanceMap() = default;
  // Entries may come in any order; (word, location) pairs must be unique
  // and values must lie in (0, 1].
  AppearanceMap(std::uint32_t view, std::uint32_t k, LocationGrid grid,
                std::vector<MapEntry> entries);

  std::uint32_t view() const { return view_; }
  std::uint32_t k() const { return k_; }
  const LocationGrid& grid() const { return grid_; }
  std::size_t num_locations() const { return grid_.size(); }
  std::size_t nnz() const { return words_.size(); }

  std::span<const std::uint32_t> words_at(std::size_t location) const {
    return {words_.data() + offsets_[location],
            offsets_[location + 1] - offsets_[location]};
  }
  std::span<const double> values_at(std::size_t location) const {
    return {values_.data() + offsets_[location],
            offsets_[location + 1] - offsets_[location]};
  }
  double at(std::uint32_t word, std::size_t location) const;

  // Entries sorted by (word, location).
  std::vector<MapEntry> entries() const;

  bool operator==(const AppearanceMap&) const = default;

 private:
  std::uint32_t view_ = 0;
  std::uint32_t k_ = 0;
  LocationGrid grid_;
  std::vector<std::uint32_t> offsets_{0};
  std::vector<std::uint32_t> words_;
  std::vector<double> values_;
};

AppearanceMap encode_image(const WordGrid& words, const KernelParams& params,
                           std::uint32_t view = 0);

// Entry-wise mean of the per-image maps of one entity.
AppearanceMap encode_entity(std::span<const WordGrid> stack,
                            const KernelParams& params,
                            std::uint32_t view = 0);

// Encoded-entity files ("GMPE", version 1, little-endian). Values are
// stored as 32-bit floats, so a saved map reloads rounded to float.
std::vector<std::uint8_t> serialize_entity(const AppearanceMap& map);
AppearanceMap deserialize_entity(std::span<const std::uint8_t> bytes);
void save_entity(const std::filesystem::path& path, const AppearanceMap& map);
AppearanceMap load_entity(const std::filesystem::path& path);

}  // namespace gmp

#endif  // GMP_ENCODING_HPP_
