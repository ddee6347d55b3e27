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

#include "gmp/imaging.hpp"

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include <algorithm>
#include <cmath>

#include "binary_io.hpp"
#include "gmp/error.hpp"

namespace gmp {
namespace {

constexpr char kFieldMagic[] = "GMPF";
constexpr std::uint32_t kFieldVersion = 1;

void check_grid(const ImageGrid& image) {
  if (image.width < 1 || image.height < 1 || image.channels < 1 ||
      image.values.size() != static_cast<std::size_t>(image.width) *
                                 image.height * image.channels) {
    throw ArgumentError("malformed image grid");
  }
}

}  // namespace

ImageGrid resize_bilinear(const ImageGrid& image, int target_width,
                          int target_height) {
  check_grid(image);
  if (target_width <= 0 || target_height <= 0) {
    throw ArgumentError("resize target dimensions must be positive");
  }
  ImageGrid out{target_width, target_height, image.channels, {}};
  out.values.resize(static_cast<std::size_t>(target_width) * target_height *
                    image.channels);
  const double sx = static_cast<double>(image.width) / target_width;
  const double sy = static_cast<double>(image.height) / target_height;

  // Source coordinate of a target pixel center, clamped to the border.
  auto source = [](int i, double scale, int limit, int& i0, int& i1,
                   double& frac) {
    double s = (i + 0.5) * scale - 0.5;
    s = std::clamp(s, 0.0, static_cast<double>(limit - 1));
    i0 = static_cast<int>(std::floor(s));
    i1 = std::min(i0 + 1, limit - 1);
    frac = s - i0;
  };

  for (int y = 0; y < target_height; ++y) {
    int y0, y1;
    double fy;
    source(y, sy, image.height, y0, y1, fy);
    for (int x = 0; x < target_width; ++x) {
      int x0, x1;
      double fx;
      source(x, sx, image.width, x0, x1, fx);
      for (int c = 0; c < image.channels; ++c) {
        // lerp as a + f*(b-a) so that equal endpoints reproduce exactly
        const double a = image.at(x0, y0, c), b = image.at(x1, y0, c);
        const double d = image.at(x0, y1, c), e = image.at(x1, y1, c);
        const double top = a + fx * (b - a);
        const double bottom = d + fx * (e - d);
        out.values[(static_cast<std::size_t>(y) * target_width + x) *
                       image.channels +
                   c] = static_cast<float>(top + fy * (bottom - top));
      }
    }
  }
  return out;
}

ImageGrid load_image(const std::filesystem::path& path, int target_width,
                     int target_height) {
  if (target_width <= 0 || target_height <= 0) {
    throw ArgumentError("target size must be positive for " + path.string());
  }
  cv::Mat raw = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
  if (raw.empty()) throw FormatError("cannot decode image " + path.string());
  if (raw.depth() != CV_8U) {
    throw FormatError("image is not 8-bit: " + path.string());
  }
  int channels = raw.channels();
  if (channels != 1 && channels != 3 && channels != 4) {
    throw FormatError("unsupported channel count in " + path.string());
  }
  const int out_channels = channels == 1 ? 1 : 3;
  ImageGrid image{raw.cols, raw.rows, out_channels, {}};
  image.values.resize(static_cast<std::size_t>(raw.cols) * raw.rows *
                      out_channels);
  for (int y = 0; y < raw.rows; ++y) {
    const std::uint8_t* row = raw.ptr<std::uint8_t>(y);
    for (int x = 0; x < raw.cols; ++x) {
      float* dst = &image.values[(static_cast<std::size_t>(y) * raw.cols + x) *
                                 out_channels];
      const std::uint8_t* src = row + static_cast<std::size_t>(x) * channels;
      if (out_channels == 1) {
        dst[0] = src[0] / 255.0f;
      } else {  // OpenCV stores BGR(A)
        dst[0] = src[2] / 255.0f;
        dst[1] = src[1] / 255.0f;
        dst[2] = src[0] / 255.0f;
      }
    }
  }
  if (image.width == target_width && image.height == target_height) {
    return image;
  }
  return resize_bilinear(image, target_width, target_height);
}

ImageGrid rgb_to_hsv(const ImageGrid& rgb) {
  check_grid(rgb);
  if (rgb.channels != 3) {
    throw ArgumentError("rgb_to_hsv needs 3 channels, got " +
                        std::to_string(rgb.channels));
  }
  ImageGrid hsv = rgb;
  const std::size_t n = static_cast<std::size_t>(rgb.width) * rgb.height;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = rgb.values[3 * i], g = rgb.values[3 * i + 1],
                 b = rgb.values[3 * i + 2];
    const double mx = std::max({r, g, b});
    const double mn = std::min({r, g, b});
    const double delta = mx - mn;
    double h = 0.0;
    if (delta > 0.0) {
      if (mx == r) {
        h = (g - b) / delta;
        if (h < 0.0) h += 6.0;
      } else if (mx == g) {
        h = (b - r) / delta + 2.0;
      } else {
        h = (r - g) / delta + 4.0;
      }
      h /= 6.0;
    }
    const double s = mx > 0.0 ? delta / mx : 0.0;
    hsv.values[3 * i] = static_cast<float>(h);
    hsv.values[3 * i + 1] = static_cast<float>(s);
    hsv.values[3 * i + 2] = static_cast<float>(mx);
  }
  return hsv;
}

FeatureField hsv_patch_features(const ImageGrid& hsv, int patch_width,
                                int patch_height) {
  check_grid(hsv);
  if (patch_width < 1 || patch_height < 1 || patch_width > hsv.width ||
      patch_height > hsv.height) {
    throw ArgumentError("patch " + std::to_string(patch_width) + "x" +
                        std::to_string(patch_height) +
                        " does not fit image " + std::to_string(hsv.width) +
                        "x" + std::to_string(hsv.height));
  }
  FeatureField field;
  field.width = static_cast<std::uint32_t>(hsv.width - patch_width + 1);
  field.height = static_cast<std::uint32_t>(hsv.height - patch_height + 1);
  field.dim =
      static_cast<std::uint32_t>(hsv.channels * patch_width * patch_height);
  field.data.resize(field.size() * field.dim);
  float* out = field.data.data();
  for (std::uint32_t ay = 0; ay < field.height; ++ay) {
    for (std::uint32_t ax = 0; ax < field.width; ++ax) {
      for (int c = 0; c < hsv.channels; ++c) {
        for (int dy = 0; dy < patch_height; ++dy) {
          for (int dx = 0; dx < patch_width; ++dx) {
            *out++ = hsv.at(static_cast<int>(ax) + dx,
                            static_cast<int>(ay) + dy, c);
          }
        }
      }
    }
  }
  return field;
}

std::vector<std::uint8_t> encode_feature_field(const FeatureField& field) {
  if (field.dim == 0 || field.width == 0 || field.height == 0 ||
      field.data.size() != field.size() * field.dim) {
    throw ArgumentError("malformed feature field");
  }
  io::ByteWriter w;
  w.put_bytes({kFieldMagic, 4});
  w.put(kFieldVersion);
  w.put(field.width);
  w.put(field.height);
  w.put(field.dim);
  for (float v : field.data) w.put(v);
  return w.take();
}

FeatureField decode_feature_field(std::span<const std::uint8_t> bytes) {
  io::ByteReader r(bytes, "feature field");
  r.expect_magic({kFieldMagic, 4});
  const std::size_t version_at = r.offset();
  if (r.get<std::uint32_t>("version") != kFieldVersion) {
    r.fail(version_at, "unsupported version");
  }
  FeatureField field;
  const std::size_t dims_at = r.offset();
  field.width = r.get<std::uint32_t>("width");
  field.height = r.get<std::uint32_t>("height");
  field.dim = r.get<std::uint32_t>("dim");
  if (field.width == 0 || field.height == 0 || field.dim == 0) {
    r.fail(dims_at, "zero width, height or dim");
  }
  const std::uint64_t count =
      static_cast<std::uint64_t>(field.width) * field.height * field.dim;
  if (count * sizeof(float) != r.remaining()) {
    r.fail(r.offset(), "payload holds " + std::to_string(r.remaining()) +
                           " bytes, header declares " +
                           std::to_string(count * sizeof(float)));
  }
  field.data.resize(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::size_t at = r.offset();
    field.data[i] = r.get<float>("payload");
    if (!std::isfinite(field.data[i])) r.fail(at, "non-finite value");
  }
  r.expect_end();
  return field;
}

void write_feature_field(const std::filesystem::path& path,
                         const FeatureField& field) {
  io::write_file(path, encode_feature_field(field));
}

FeatureField ingest_feature_field(const std::filesystem::path& path) {
  const auto bytes = io::read_file(path);
  try {
    return decode_feature_field(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace gmp
