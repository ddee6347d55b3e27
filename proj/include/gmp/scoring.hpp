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

#ifndef GMP_SCORING_HPP_
#define GMP_SCORING_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gmp/encoding.hpp"
#include "gmp/vocab.hpp"

namespace gmp {

struct ViewPair {
  std::uint32_t first = 0;
  std::uint32_t second = 1;
  bool operator==(const ViewPair&) const = default;
};

// Unordered view pairs (i < j) in lexicographic order.
std::vector<ViewPair> all_view_pairs(std::uint32_t num_views);

// Word-pair weights of one view pair, |z_first| x |z_second| row-major.
struct PairWeights {
  ViewPair views;
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::vector<double> values;

  double at(std::uint32_t i, std::uint32_t j) const {
    return values[static_cast<std::size_t>(i) * cols + j];
  }
  static PairWeights filled(ViewPair views, std::uint32_t rows,
                            std::uint32_t cols, double value);
};

// Location weights shared by every view pair.
struct SharedWeights {
  std::vector<double> values;
};

// One nonnegative coefficient per unordered view pair.
struct PairCoefficients {
  std::vector<double> beta;
};

struct BilinearModel {
  std::uint32_t num_views = 2;
  std::vector<PairWeights> pair_weights;  // in all_view_pairs order
  SharedWeights shared;
  PairCoefficients coeffs;
  std::vector<Vocabulary> vocabs;  // optional, one per view
  KernelParams kernel;
  std::string config_json = "{}";  // training-config snapshot

  // Throws ArgumentError when the parts disagree in shape.
  void validate() const;
};

// sum_h wh[h] * a_h^T W b_h over the sparse columns of a and b.
double pair_score(const AppearanceMap& a, const AppearanceMap& b,
                  const PairWeights& w, const SharedWeights& wh);

// Beta-weighted sum of pair scores over all unordered view pairs.
// maps[m] is the entity seen in view m. score >= 0 predicts a shared label.
double group_score(std::span<const AppearanceMap> maps,
                   const BilinearModel& model);

// v[(i, j)] = sum_h wh[h] a[i,h] b[j,h], flattened row-major. For any W,
// dot(W, v) == pair_score(a, b, W, wh).
std::vector<double> collapsed_pair_feature(const AppearanceMap& a,
                                           const AppearanceMap& b,
                                           const SharedWeights& wh);

// Sparse form of collapsed_pair_feature: (flat index, value) with indices
// increasing.
struct SparseVector {
  std::vector<std::uint32_t> indices;
  std::vector<double> values;
};
void collapsed_pair_feature_sparse(const AppearanceMap& a,
                                   const AppearanceMap& b,
                                   const SharedWeights& wh,
                                   std::vector<double>& scratch,
                                   SparseVector& out);

// u[h] = a_h^T W b_h. For any wh, dot(wh, u) == pair_score(a, b, W, wh).
std::vector<double> collapsed_location_feature(const AppearanceMap& a,
                                               const AppearanceMap& b,
                                               const PairWeights& w);

}  // namespace gmp

#endif  // GMP_SCORING_HPP_
