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

#ifndef GMP_IMAGING_HPP_
#define GMP_IMAGING_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace gmp {

// Pixel-interleaved image with channel values in [0,1].
// values[(y * width + x) * channels + c].
struct ImageGrid {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<float> values;

  float at(int x, int y, int c) const {
    return values[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
};

// Dense per-anchor feature vectors, row-major over anchors with the
// feature dimension innermost.
struct FeatureField {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::uint32_t dim = 0;
  std::vector<float> data;

  std::size_t size() const {
    return static_cast<std::size_t>(width) * height;
  }
  std::span<const float> vector_at(std::size_t location) const {
    return {data.data() + location * dim, dim};
  }
  std::span<const float> vector_at(std::uint32_t x, std::uint32_t y) const {
    return vector_at(static_cast<std::size_t>(y) * width + x);
  }
};

// Decodes an 8-bit grayscale or color image and bilinearly resamples it
// to target_width x target_height. Color images come back as RGB.
ImageGrid load_image(const std::filesystem::path& path, int target_width,
                     int target_height);

// Bilinear resampling with pixel-center alignment. A same-size resize is
// the identity and constant images stay constant.
ImageGrid resize_bilinear(const ImageGrid& image, int target_width,
                          int target_height);

// Hexcone HSV with all three channels scaled to [0,1]. Achromatic pixels
// get hue 0.
ImageGrid rgb_to_hsv(const ImageGrid& rgb);

// Concatenates channel values over every patch_width x patch_height window
// whose top-left anchor keeps it inside the image (anchor step 1). The
// vector layout is channel-major: all patch pixels of channel 0 in raster
// order, then channel 1, and so on.
FeatureField hsv_patch_features(const ImageGrid& hsv, int patch_width,
                                int patch_height);

// Encoded feature-field files ("GMPF", version 1, little-endian).
std::vector<std::uint8_t> encode_feature_field(const FeatureField& field);
FeatureField decode_feature_field(std::span<const std::uint8_t> bytes);
void write_feature_field(const std::filesystem::path& path,
                         const FeatureField& field);
FeatureField ingest_feature_field(const std::filesystem::path& path);

}  // namespace gmp

#endif  // GMP_IMAGING_HPP_
