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

#ifndef GMP_TESTS_ORACLES_HPP_
#define GMP_TESTS_ORACLES_HPP_

// Brute-force reference implementations. Nothing here calls into the
// library beyond plain data types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <limits>
#include <vector>

#include "gmp/encoding.hpp"
#include "gmp/eval.hpp"
#include "gmp/scoring.hpp"
#include "gmp/vocab.hpp"

namespace oracle {

inline constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max();

// Minimum chessboard distance from (x, y) to any seed; kInf without seeds.
inline std::vector<std::int64_t> distance_field(const std::vector<std::uint8_t>& seeds,
                                                int w, int h) {
  std::vector<std::int64_t> out(static_cast<std::size_t>(w) * h, kInf);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int sy = 0; sy < h; ++sy) {
        for (int sx = 0; sx < w; ++sx) {
          if (!seeds[static_cast<std::size_t>(sy) * w + sx]) continue;
          const std::int64_t d = std::max(std::abs(x - sx), std::abs(y - sy));
          auto& o = out[static_cast<std::size_t>(y) * w + x];
          o = std::min(o, d);
        }
      }
    }
  }
  return out;
}

// Dense k x |h| appearance matrix: per image, the max over same-word pixels
// of the truncated exponential kernel; values below 1e-6 dropped; averaged
// over the stack.
inline std::vector<double> appearance(const std::vector<gmp::WordGrid>& stack,
                                      double sigma, double alpha, int stride) {
  const int w = static_cast<int>(stack[0].width), h = static_cast<int>(stack[0].height);
  const int k = static_cast<int>(stack[0].k);
  const int cols = (w + stride - 1) / stride, rows = (h + stride - 1) / stride;
  const int locations = cols * rows;
  std::vector<double> out(static_cast<std::size_t>(k) * locations, 0.0);
  for (const auto& g : stack) {
    for (int ly = 0; ly < rows; ++ly) {
      for (int lx = 0; lx < cols; ++lx) {
        const int px = lx * stride, py = ly * stride;
        for (int z = 0; z < k; ++z) {
          double best = 0.0;
          for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
              if (static_cast<int>(g.words[static_cast<std::size_t>(y) * w + x]) != z) continue;
              const double d = std::max(std::abs(x - px), std::abs(y - py));
              const double v = d <= alpha ? std::exp(-d / sigma) : 0.0;
              best = std::max(best, v);
            }
          }
          if (best >= 1e-6) out[static_cast<std::size_t>(z) * locations + ly * cols + lx] += best;
        }
      }
    }
  }
  if (stack.size() > 1) {
    for (double& v : out) v /= static_cast<double>(stack.size());
  }
  return out;
}

// Dense copy of a sparse map, k x |h|.
inline std::vector<double> dense(const gmp::AppearanceMap& m) {
  std::vector<double> out(static_cast<std::size_t>(m.k()) * m.num_locations(), 0.0);
  for (const auto& e : m.entries()) out[e.word * m.num_locations() + e.location] = e.value;
  return out;
}

// w^T phi w_h with phi[(i,j),h] = a[i,h] b[j,h] materialised in full.
inline double dense_pair_score(const std::vector<double>& a, const std::vector<double>& b,
                               std::size_t ka, std::size_t kb, std::size_t locations,
                               const std::vector<double>& w, const std::vector<double>& wh) {
  std::vector<double> phi(ka * kb * locations);
  for (std::size_t i = 0; i < ka; ++i)
    for (std::size_t j = 0; j < kb; ++j)
      for (std::size_t h = 0; h < locations; ++h)
        phi[(i * kb + j) * locations + h] = a[i * locations + h] * b[j * locations + h];
  double s = 0.0;
  for (std::size_t r = 0; r < ka * kb; ++r) {
    double inner = 0.0;
    for (std::size_t h = 0; h < locations; ++h) inner += phi[r * locations + h] * wh[h];
    s += w[r] * inner;
  }
  return s;
}

inline double dense_group_score(const std::vector<std::vector<double>>& maps,
                                const std::vector<std::size_t>& ks, std::size_t locations,
                                const gmp::BilinearModel& model) {
  double s = 0.0;
  std::size_t p = 0;
  for (std::size_t i = 0; i < maps.size(); ++i) {
    for (std::size_t j = i + 1; j < maps.size(); ++j, ++p) {
      s += model.coeffs.beta[p] *
           dense_pair_score(maps[i], maps[j], ks[i], ks[j], locations,
                            model.pair_weights[p].values, model.shared.values);
    }
  }
  return s;
}

// 1-based rank by counting: entries scoring higher, plus equal entries at a
// lower index.
inline std::size_t rank_of(const std::vector<double>& row, std::size_t truth) {
  std::size_t r = 1;
  for (std::size_t g = 0; g < row.size(); ++g) {
    if (row[g] > row[truth] || (row[g] == row[truth] && g < truth)) ++r;
  }
  return r;
}

inline std::vector<double> cmc(const std::vector<std::vector<double>>& scores,
                               const std::vector<std::size_t>& truth, std::size_t max_rank) {
  std::vector<double> rates(max_rank);
  for (std::size_t r = 1; r <= max_rank; ++r) {
    std::size_t hits = 0;
    for (std::size_t p = 0; p < scores.size(); ++p) hits += rank_of(scores[p], truth[p]) <= r;
    rates[r - 1] = static_cast<double>(hits) / static_cast<double>(scores.size());
  }
  return rates;
}

// Reduce a 3-axis tensor (last axis fastest) to the (a, b) matrix.
inline std::vector<double> reduce3(const std::vector<double>& t, std::size_t n0,
                                   std::size_t n1, std::size_t n2, int a, int b, bool use_max) {
  const std::size_t dims[3] = {n0, n1, n2};
  const int c = 3 - a - b;
  std::vector<double> out(dims[a] * dims[b]);
  for (std::size_t i = 0; i < dims[a]; ++i) {
    for (std::size_t j = 0; j < dims[b]; ++j) {
      double acc = use_max ? -std::numeric_limits<double>::infinity() : 0.0;
      for (std::size_t r = 0; r < dims[c]; ++r) {
        std::size_t idx[3];
        idx[a] = i;
        idx[b] = j;
        idx[c] = r;
        const double v = t[(idx[0] * n1 + idx[1]) * n2 + idx[2]];
        acc = use_max ? std::max(acc, v) : acc + v;
      }
      out[i * dims[b] + j] = acc;
    }
  }
  return out;
}

// Minimum of a convex function on [lo, hi] by golden-section search.
inline double golden_min(const std::function<double(double)>& f, double lo, double hi,
                         int iters = 200) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iters; ++i) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return std::min({fc, fd, f((a + b) / 2.0)});
}

struct Point2 {
  double x, y;
  int label;
};

inline double svm_objective2(const std::vector<Point2>& pts, double lambda, double w0,
                             double w1) {
  double s = 0.5 * lambda * (w0 * w0 + w1 * w1);
  for (const auto& p : pts) s += std::max(0.0, 1.0 - p.label * (w0 * p.x + w1 * p.y));
  return s;
}

// Reference minimum of the 2-D hinge objective by nested golden-section
// search over a box that contains the minimiser.
inline double svm_reference2(const std::vector<Point2>& pts, double lambda, bool nonneg) {
  const double r = std::sqrt(2.0 * static_cast<double>(pts.size()) / lambda) + 1e-9;
  const double lo = nonneg ? 0.0 : -r;
  auto inner = [&](double w0) {
    return golden_min([&](double w1) { return svm_objective2(pts, lambda, w0, w1); }, lo, r);
  };
  return golden_min(inner, lo, r);
}

}  // namespace oracle

#endif  // GMP_TESTS_ORACLES_HPP_
