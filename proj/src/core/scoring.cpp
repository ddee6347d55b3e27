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

#include "gmp/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gmp/error.hpp"

namespace gmp {
namespace {

void check_pair(const AppearanceMap& a, const AppearanceMap& b,
                const PairWeights& w) {
  if (!(a.grid() == b.grid())) {
    throw ArgumentError("appearance maps use different location grids");
  }
  if (a.k() != w.rows || b.k() != w.cols) {
    throw ArgumentError("pair weights are " + std::to_string(w.rows) + "x" +
                        std::to_string(w.cols) + " but maps have k = " +
                        std::to_string(a.k()) + ", " + std::to_string(b.k()));
  }
  if (w.values.size() != static_cast<std::size_t>(w.rows) * w.cols) {
    throw ArgumentError("pair weight matrix has wrong size");
  }
}

void check_shared(const AppearanceMap& a, const SharedWeights& wh) {
  if (wh.values.size() != a.num_locations()) {
    throw ArgumentError("shared weights have " +
                        std::to_string(wh.values.size()) +
                        " entries for " + std::to_string(a.num_locations()) +
                        " locations");
  }
}

// a_h^T W b_h
inline double location_term(const AppearanceMap& a, const AppearanceMap& b,
                            const PairWeights& w, std::size_t h) {
  const auto aw = a.words_at(h);
  const auto av = a.values_at(h);
  const auto bw = b.words_at(h);
  const auto bv = b.values_at(h);
  double t = 0.0;
  for (std::size_t i = 0; i < aw.size(); ++i) {
    const double* row = w.values.data() + static_cast<std::size_t>(aw[i]) * w.cols;
    double inner = 0.0;
    for (std::size_t j = 0; j < bw.size(); ++j) inner += row[bw[j]] * bv[j];
    t += av[i] * inner;
  }
  return t;
}

}  // namespace

std::vector<ViewPair> all_view_pairs(std::uint32_t num_views) {
  std::vector<ViewPair> pairs;
  for (std::uint32_t i = 0; i < num_views; ++i) {
    for (std::uint32_t j = i + 1; j < num_views; ++j) pairs.push_back({i, j});
  }
  return pairs;
}

PairWeights PairWeights::filled(ViewPair views, std::uint32_t rows,
                                std::uint32_t cols, double value) {
  return {views, rows, cols,
          std::vector<double>(static_cast<std::size_t>(rows) * cols, value)};
}

void BilinearModel::validate() const {
  if (num_views < 2) throw ArgumentError("model needs at least two views");
  const auto pairs = all_view_pairs(num_views);
  if (pair_weights.size() != pairs.size() ||
      coeffs.beta.size() != pairs.size()) {
    throw ArgumentError("model must hold one weight matrix and one beta per "
                        "view pair");
  }
  std::vector<std::uint32_t> k(num_views, 0);
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const PairWeights& w = pair_weights[p];
    if (!(w.views == pairs[p])) {
      throw ArgumentError("pair weights out of view-pair order");
    }
    if (w.values.size() != static_cast<std::size_t>(w.rows) * w.cols) {
      throw ArgumentError("pair weight matrix has wrong size");
    }
    for (auto [view, dim] : {std::pair{w.views.first, w.rows},
                             std::pair{w.views.second, w.cols}}) {
      if (k[view] != 0 && k[view] != dim) {
        throw ArgumentError("inconsistent word counts for view " +
                            std::to_string(view));
      }
      k[view] = dim;
    }
    if (!(coeffs.beta[p] >= 0.0) || !std::isfinite(coeffs.beta[p])) {
      throw ArgumentError("beta must be finite and >= 0");
    }
    for (double v : w.values) {
      if (!std::isfinite(v)) throw ArgumentError("non-finite pair weight");
    }
  }
  if (shared.values.empty()) throw ArgumentError("model has no location weights");
  for (double v : shared.values) {
    if (!std::isfinite(v)) throw ArgumentError("non-finite location weight");
  }
  if (!vocabs.empty()) {
    if (vocabs.size() != num_views) {
      throw ArgumentError("model needs one vocabulary per view");
    }
    for (std::uint32_t m = 0; m < num_views; ++m) {
      if (vocabs[m].k() != k[m]) {
        throw ArgumentError("vocabulary size of view " + std::to_string(m) +
                            " does not match the weights");
      }
    }
  }
  kernel.validate();
}

double pair_score(const AppearanceMap& a, const AppearanceMap& b,
                  const PairWeights& w, const SharedWeights& wh) {
  check_pair(a, b, w);
  check_shared(a, wh);
  double score = 0.0;
  for (std::size_t h = 0; h < a.num_locations(); ++h) {
    score += wh.values[h] * location_term(a, b, w, h);
  }
  return score;
}

double group_score(std::span<const AppearanceMap> maps,
                   const BilinearModel& model) {
  if (maps.size() != model.num_views) {
    throw ArgumentError("group_score needs " +
                        std::to_string(model.num_views) + " views, got " +
                        std::to_string(maps.size()));
  }
  const auto pairs = all_view_pairs(model.num_views);
  if (model.pair_weights.size() != pairs.size() ||
      model.coeffs.beta.size() != pairs.size()) {
    throw ArgumentError("model is missing view-pair parameters");
  }
  double score = 0.0;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    score += model.coeffs.beta[p] *
             pair_score(maps[pairs[p].first], maps[pairs[p].second],
                        model.pair_weights[p], model.shared);
  }
  return score;
}

std::vector<double> collapsed_pair_feature(const AppearanceMap& a,
                                           const AppearanceMap& b,
                                           const SharedWeights& wh) {
  if (!(a.grid() == b.grid())) {
    throw ArgumentError("appearance maps use different location grids");
  }
  check_shared(a, wh);
  std::vector<double> v(static_cast<std::size_t>(a.k()) * b.k(), 0.0);
  for (std::size_t h = 0; h < a.num_locations(); ++h) {
    const double weight = wh.values[h];
    const auto aw = a.words_at(h);
    const auto av = a.values_at(h);
    const auto bw = b.words_at(h);
    const auto bv = b.values_at(h);
    for (std::size_t i = 0; i < aw.size(); ++i) {
      double* row = v.data() + static_cast<std::size_t>(aw[i]) * b.k();
      const double scale = weight * av[i];
      for (std::size_t j = 0; j < bw.size(); ++j) row[bw[j]] += scale * bv[j];
    }
  }
  return v;
}

void collapsed_pair_feature_sparse(const AppearanceMap& a,
                                   const AppearanceMap& b,
                                   const SharedWeights& wh,
                                   std::vector<double>& scratch,
                                   SparseVector& out) {
  if (!(a.grid() == b.grid())) {
    throw ArgumentError("appearance maps use different location grids");
  }
  check_shared(a, wh);
  const std::size_t dim = static_cast<std::size_t>(a.k()) * b.k();
  if (scratch.size() != dim) scratch.assign(dim, 0.0);
  out.indices.clear();
  out.values.clear();
  // Mark touched slots with an exact zero check; a slot whose running sum
  // returns to zero is still emitted (as 0) which is harmless.
  std::vector<std::uint32_t>& touched = out.indices;
  for (std::size_t h = 0; h < a.num_locations(); ++h) {
    const double weight = wh.values[h];
    const auto aw = a.words_at(h);
    const auto av = a.values_at(h);
    const auto bw = b.words_at(h);
    const auto bv = b.values_at(h);
    for (std::size_t i = 0; i < aw.size(); ++i) {
      const std::size_t base = static_cast<std::size_t>(aw[i]) * b.k();
      const double scale = weight * av[i];
      for (std::size_t j = 0; j < bw.size(); ++j) {
        const std::size_t slot = base + bw[j];
        if (scratch[slot] == 0.0) touched.push_back(static_cast<std::uint32_t>(slot));
        scratch[slot] += scale * bv[j];
      }
    }
  }
  std::sort(touched.begin(), touched.end());
  touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
  out.values.resize(touched.size());
  for (std::size_t i = 0; i < touched.size(); ++i) {
    out.values[i] = scratch[touched[i]];
    scratch[touched[i]] = 0.0;
  }
}

std::vector<double> collapsed_location_feature(const AppearanceMap& a,
                                               const AppearanceMap& b,
                                               const PairWeights& w) {
  check_pair(a, b, w);
  std::vector<double> u(a.num_locations());
  for (std::size_t h = 0; h < u.size(); ++h) u[h] = location_term(a, b, w, h);
  return u;
}

}  // namespace gmp
