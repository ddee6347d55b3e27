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

#include "gmp/encoding.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "binary_io.hpp"
#include "gmp/error.hpp"

namespace gmp {
namespace {

constexpr char kEntityMagic[] = "GMPE";
constexpr std::uint32_t kEntityVersion = 1;

inline std::int32_t step(std::int32_t d) {
  return d == kUnreachable ? kUnreachable : d + 1;
}

}  // namespace

void KernelParams::validate() const {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ArgumentError("kernel sigma must be > 0");
  }
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw ArgumentError("kernel alpha must be >= 0");
  }
  if (stride < 1) throw ArgumentError("location stride must be >= 1");
}

DistanceField chessboard_dt(std::span<const std::uint8_t> seeds,
                            std::uint32_t width, std::uint32_t height) {
  const std::size_t n = static_cast<std::size_t>(width) * height;
  if (seeds.size() != n) {
    throw ArgumentError("seed mask size does not match grid shape");
  }
  DistanceField field{width, height, std::vector<std::int32_t>(n)};
  auto& d = field.distances;
  for (std::size_t i = 0; i < n; ++i) d[i] = seeds[i] ? 0 : kUnreachable;
  const auto w = static_cast<std::int64_t>(width);
  const auto h = static_cast<std::int64_t>(height);
  auto at = [&](std::int64_t x, std::int64_t y) -> std::int32_t& {
    return d[static_cast<std::size_t>(y * w + x)];
  };

  // Forward sweep: W, NW, N, NE.
  for (std::int64_t y = 0; y < h; ++y) {
    for (std::int64_t x = 0; x < w; ++x) {
      std::int32_t best = at(x, y);
      if (best == 0) continue;
      if (x > 0) best = std::min(best, step(at(x - 1, y)));
      if (y > 0) {
        best = std::min(best, step(at(x, y - 1)));
        if (x > 0) best = std::min(best, step(at(x - 1, y - 1)));
        if (x + 1 < w) best = std::min(best, step(at(x + 1, y - 1)));
      }
      at(x, y) = best;
    }
  }
  // Backward sweep: E, SE, S, SW.
  for (std::int64_t y = h - 1; y >= 0; --y) {
    for (std::int64_t x = w - 1; x >= 0; --x) {
      std::int32_t best = at(x, y);
      if (best == 0) continue;
      if (x + 1 < w) best = std::min(best, step(at(x + 1, y)));
      if (y + 1 < h) {
        best = std::min(best, step(at(x, y + 1)));
        if (x + 1 < w) best = std::min(best, step(at(x + 1, y + 1)));
        if (x > 0) best = std::min(best, step(at(x - 1, y + 1)));
      }
      at(x, y) = best;
    }
  }
  return field;
}

DistanceField chessboard_dt(const WordGrid& grid, std::uint32_t word) {
  std::vector<std::uint8_t> mask(grid.size());
  for (std::size_t i = 0; i < mask.size(); ++i) {
    mask[i] = grid.words[i] == word ? 1 : 0;
  }
  return chessboard_dt(mask, grid.width, grid.height);
}

double kernel_value(double distance, const KernelParams& params) {
  if (!std::isfinite(distance) || distance > params.alpha) return 0.0;
  return std::exp(-distance / params.sigma);
}

AppearanceMap::AppearanceMap(std::uint32_t view, std::uint32_t k,
                             LocationGrid grid, std::vector<MapEntry> entries)
    : view_(view), k_(k), grid_(grid) {
  if (grid.width == 0 || grid.height == 0 || grid.stride == 0) {
    throw ArgumentError("appearance map grid must be nonempty");
  }
  if (k == 0) throw ArgumentError("appearance map needs k >= 1");
  const std::size_t locations = grid.size();
  std::sort(entries.begin(), entries.end(),
            [](const MapEntry& a, const MapEntry& b) {
              return a.location != b.location ? a.location < b.location
                                              : a.word < b.word;
            });
  offsets_.assign(locations + 1, 0);
  words_.reserve(entries.size());
  values_.reserve(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const MapEntry& e = entries[i];
    if (e.word >= k || e.location >= locations) {
      throw ArgumentError("appearance entry out of range");
    }
    if (!(e.value > 0.0 && e.value <= 1.0)) {
      throw ArgumentError("appearance value outside (0,1]");
    }
    if (i > 0 && entries[i - 1].location == e.location &&
        entries[i - 1].word == e.word) {
      throw ArgumentError("duplicate appearance entry");
    }
    ++offsets_[e.location + 1];
    words_.push_back(e.word);
    values_.push_back(e.value);
  }
  for (std::size_t h = 0; h < locations; ++h) offsets_[h + 1] += offsets_[h];
}

double AppearanceMap::at(std::uint32_t word, std::size_t location) const {
  const auto w = words_at(location);
  const auto it = std::lower_bound(w.begin(), w.end(), word);
  if (it == w.end() || *it != word) return 0.0;
  return values_at(location)[static_cast<std::size_t>(it - w.begin())];
}

std::vector<MapEntry> AppearanceMap::entries() const {
  std::vector<MapEntry> out;
  out.reserve(nnz());
  for (std::size_t h = 0; h < num_locations(); ++h) {
    const auto w = words_at(h);
    const auto v = values_at(h);
    for (std::size_t i = 0; i < w.size(); ++i) {
      out.push_back({w[i], static_cast<std::uint32_t>(h), v[i]});
    }
  }
  std::sort(out.begin(), out.end(), [](const MapEntry& a, const MapEntry& b) {
    return a.word != b.word ? a.word < b.word : a.location < b.location;
  });
  return out;
}

AppearanceMap encode_image(const WordGrid& words, const KernelParams& params,
                           std::uint32_t view) {
  params.validate();
  if (words.size() == 0 || words.words.size() != words.size()) {
    throw ArgumentError("encode_image: empty or malformed word grid");
  }
  if (words.k == 0) throw ArgumentError("encode_image: word grid has k = 0");
  std::vector<bool> present(words.k, false);
  for (std::uint32_t w : words.words) {
    if (w >= words.k) throw ArgumentError("encode_image: word index >= k");
    present[w] = true;
  }
  const LocationGrid grid{words.width, words.height, params.stride};
  std::vector<MapEntry> entries;
  for (std::uint32_t word = 0; word < words.k; ++word) {
    if (!present[word]) continue;
    const DistanceField dt = chessboard_dt(words, word);
    std::uint32_t location = 0;
    for (std::uint32_t y = 0; y < words.height; y += params.stride) {
      for (std::uint32_t x = 0; x < words.width; x += params.stride) {
        const std::int32_t d = dt.at(x, y);
        if (d != kUnreachable) {
          const double v = kernel_value(static_cast<double>(d), params);
          if (v >= kStorageCutoff) entries.push_back({word, location, v});
        }
        ++location;
      }
    }
  }
  return AppearanceMap(view, words.k, grid, std::move(entries));
}

AppearanceMap encode_entity(std::span<const WordGrid> stack,
                            const KernelParams& params, std::uint32_t view) {
  if (stack.empty()) throw ArgumentError("encode_entity: empty image stack");
  const WordGrid& first = stack.front();
  for (const WordGrid& g : stack) {
    if (g.width != first.width || g.height != first.height || g.k != first.k) {
      throw ArgumentError("encode_entity: images differ in shape or k");
    }
  }
  if (stack.size() == 1) return encode_image(first, params, view);

  const LocationGrid grid{first.width, first.height, params.stride};
  const std::size_t locations = grid.size();
  std::vector<double> sum(static_cast<std::size_t>(first.k) * locations, 0.0);
  for (const WordGrid& g : stack) {
    const AppearanceMap m = encode_image(g, params, view);
    for (std::size_t h = 0; h < locations; ++h) {
      const auto w = m.words_at(h);
      const auto v = m.values_at(h);
      for (std::size_t i = 0; i < w.size(); ++i) {
        sum[static_cast<std::size_t>(w[i]) * locations + h] += v[i];
      }
    }
  }
  const double n = static_cast<double>(stack.size());
  std::vector<MapEntry> entries;
  for (std::uint32_t word = 0; word < first.k; ++word) {
    for (std::size_t h = 0; h < locations; ++h) {
      const double s = sum[static_cast<std::size_t>(word) * locations + h];
      if (s > 0.0) {
        entries.push_back({word, static_cast<std::uint32_t>(h), s / n});
      }
    }
  }
  return AppearanceMap(view, first.k, grid, std::move(entries));
}

std::vector<std::uint8_t> serialize_entity(const AppearanceMap& map) {
  io::ByteWriter w;
  w.put_bytes({kEntityMagic, 4});
  w.put(kEntityVersion);
  w.put(map.view());
  w.put(map.k());
  w.put(map.grid().width);
  w.put(map.grid().height);
  w.put(map.grid().stride);
  const auto entries = map.entries();
  w.put(static_cast<std::uint64_t>(entries.size()));
  for (const MapEntry& e : entries) {
    w.put(e.word);
    w.put(e.location);
    w.put(static_cast<float>(e.value));
  }
  return w.take();
}

AppearanceMap deserialize_entity(std::span<const std::uint8_t> bytes) {
  io::ByteReader r(bytes, "encoded entity");
  r.expect_magic({kEntityMagic, 4});
  std::size_t at = r.offset();
  if (r.get<std::uint32_t>("version") != kEntityVersion) {
    r.fail(at, "unsupported version");
  }
  const auto view = r.get<std::uint32_t>("view");
  at = r.offset();
  const auto k = r.get<std::uint32_t>("k");
  LocationGrid grid;
  grid.width = r.get<std::uint32_t>("grid_w");
  grid.height = r.get<std::uint32_t>("grid_h");
  grid.stride = r.get<std::uint32_t>("stride");
  if (k == 0 || grid.width == 0 || grid.height == 0 || grid.stride == 0) {
    r.fail(at, "zero k, grid dimension or stride");
  }
  const auto count = r.get<std::uint64_t>("entry_count");
  constexpr std::size_t kTriplet = 12;
  if (count > r.remaining() / kTriplet || count * kTriplet != r.remaining()) {
    r.fail(r.offset(), "entry_count " + std::to_string(count) +
                           " does not match payload of " +
                           std::to_string(r.remaining()) + " bytes");
  }
  const std::size_t locations = grid.size();
  std::vector<MapEntry> entries;
  entries.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    at = r.offset();
    MapEntry e;
    e.word = r.get<std::uint32_t>("word");
    e.location = r.get<std::uint32_t>("location");
    const float v = r.get<float>("value");
    if (e.word >= k || e.location >= locations) r.fail(at, "key out of range");
    if (!(v > 0.0f && v <= 1.0f)) r.fail(at, "value outside (0,1]");
    if (!entries.empty()) {
      const MapEntry& p = entries.back();
      if (p.word > e.word || (p.word == e.word && p.location >= e.location)) {
        r.fail(at, "keys not strictly increasing");
      }
    }
    e.value = v;
    entries.push_back(e);
  }
  return AppearanceMap(view, k, grid, std::move(entries));
}

void save_entity(const std::filesystem::path& path, const AppearanceMap& map) {
  io::write_file(path, serialize_entity(map));
}

AppearanceMap load_entity(const std::filesystem::path& path) {
  const auto bytes = io::read_file(path);
  try {
    return deserialize_entity(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace gmp
