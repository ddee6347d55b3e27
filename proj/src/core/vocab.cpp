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

#include "gmp/vocab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "gmp/error.hpp"

namespace gmp {
namespace {

double squared_distance(std::span<const float> x, std::span<const double> c) {
  double s = 0.0;
  for (std::size_t d = 0; d < x.size(); ++d) {
    const double diff = static_cast<double>(x[d]) - c[d];
    s += diff * diff;
  }
  return s;
}

struct Assignment {
  std::uint32_t index;
  double distance;
};

Assignment nearest(const std::vector<double>& centroids, std::size_t dim,
                   std::span<const float> x) {
  const std::size_t k = centroids.size() / dim;
  Assignment best{0, std::numeric_limits<double>::infinity()};
  for (std::size_t c = 0; c < k; ++c) {
    const double d =
        squared_distance(x, {centroids.data() + c * dim, dim});
    if (d < best.distance) best = {static_cast<std::uint32_t>(c), d};
  }
  return best;
}

// k-means++ seeding: first center uniform, the rest by D^2 sampling.
std::vector<double> kmeanspp_init(const SampleSet& samples, std::size_t k,
                                  std::mt19937_64& rng) {
  const std::size_t n = samples.size(), dim = samples.dim;
  std::vector<double> centroids;
  centroids.reserve(k * dim);
  auto push = [&](std::size_t i) {
    for (float v : samples.row(i)) centroids.push_back(v);
  };
  push(std::uniform_int_distribution<std::size_t>(0, n - 1)(rng));

  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) {
    d2[i] = squared_distance(samples.row(i), {centroids.data(), dim});
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t c = 1; c < k; ++c) {
    const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    // total > 0 whenever fewer than `distinct` centers have been chosen
    const double target = unit(rng) * total;
    double cumulative = 0.0;
    std::size_t pick = n;
    std::size_t last_positive = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (d2[i] <= 0.0) continue;
      last_positive = i;
      cumulative += d2[i];
      if (cumulative > target) {
        pick = i;
        break;
      }
    }
    if (pick == n) pick = last_positive;
    push(pick);
    const std::span<const double> added{centroids.data() + c * dim, dim};
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], squared_distance(samples.row(i), added));
    }
  }
  return centroids;
}

}  // namespace

std::size_t count_distinct(const SampleSet& samples) {
  const std::size_t n = samples.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto less = [&](std::size_t a, std::size_t b) {
    auto ra = samples.row(a), rb = samples.row(b);
    return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(),
                                        rb.end());
  };
  std::sort(order.begin(), order.end(), less);
  std::size_t distinct = n == 0 ? 0 : 1;
  for (std::size_t i = 1; i < n; ++i) {
    if (less(order[i - 1], order[i])) ++distinct;
  }
  return distinct;
}

KMeansResult kmeans_fit(const SampleSet& samples, std::size_t k,
                        std::uint64_t seed, std::size_t max_iter,
                        std::uint32_t view) {
  const std::size_t n = samples.size(), dim = samples.dim;
  if (n == 0) throw ArgumentError("kmeans_fit: no samples");
  if (k == 0) throw ArgumentError("kmeans_fit: k must be at least 1");
  if (max_iter == 0) throw ArgumentError("kmeans_fit: max_iter must be >= 1");
  for (float v : samples.values) {
    if (!std::isfinite(v)) throw ArgumentError("kmeans_fit: non-finite sample");
  }
  const std::size_t distinct = count_distinct(samples);
  if (k > distinct) {
    throw ArgumentError("kmeans_fit: k=" + std::to_string(k) + " exceeds " +
                        std::to_string(distinct) + " distinct samples");
  }

  std::mt19937_64 rng(seed);
  KMeansResult result;
  std::vector<double> centroids = kmeanspp_init(samples, k, rng);
  std::vector<std::uint32_t> assign(n, 0);
  std::vector<double> dist(n, 0.0);
  std::vector<double> sums(k * dim);
  std::vector<std::size_t> counts(k);

  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    bool changed = iter == 0;
    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const Assignment a = nearest(centroids, dim, samples.row(i));
      if (a.index != assign[i]) changed = true;
      assign[i] = a.index;
      dist[i] = a.distance;
      inertia += a.distance;
    }
    result.inertia_trace.push_back(inertia);
    result.iterations = iter + 1;
    if (!changed) break;

    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = samples.row(i);
      double* s = &sums[assign[i] * dim];
      for (std::size_t d = 0; d < dim; ++d) s[d] += row[d];
      ++counts[assign[i]];
    }
    std::vector<bool> taken(n, false);
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        for (std::size_t d = 0; d < dim; ++d) {
          centroids[c * dim + d] =
              sums[c * dim + d] / static_cast<double>(counts[c]);
        }
        continue;
      }
      // Empty cluster: move it onto the worst-served point.
      std::size_t far = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (!taken[i] && (far == n || dist[i] > dist[far])) far = i;
      }
      taken[far] = true;
      dist[far] = 0.0;
      const auto row = samples.row(far);
      std::copy(row.begin(), row.end(), centroids.begin() + c * dim);
    }
  }

  result.vocabulary.view = view;
  result.vocabulary.dim = dim;
  result.vocabulary.centroids = std::move(centroids);
  result.vocabulary.seed = seed;
  result.assignment = std::move(assign);
  return result;
}

std::uint32_t nearest_centroid(const Vocabulary& vocab,
                               std::span<const float> x) {
  if (x.size() != vocab.dim) {
    throw ArgumentError("feature dim " + std::to_string(x.size()) +
                        " does not match vocabulary dim " +
                        std::to_string(vocab.dim));
  }
  return nearest(vocab.centroids, vocab.dim, x).index;
}

WordGrid quantize(const FeatureField& field, const Vocabulary& vocab) {
  if (field.dim != vocab.dim) {
    throw ArgumentError("quantize: field dim " + std::to_string(field.dim) +
                        " vs vocabulary dim " + std::to_string(vocab.dim));
  }
  if (vocab.k() == 0) throw ArgumentError("quantize: empty vocabulary");
  WordGrid grid{field.width, field.height,
                static_cast<std::uint32_t>(vocab.k()), {}};
  grid.words.resize(field.size());
  for (std::size_t i = 0; i < field.size(); ++i) {
    grid.words[i] = nearest(vocab.centroids, vocab.dim, field.vector_at(i)).index;
  }
  return grid;
}

SampleSet sample_training_features(std::span<const FeatureField> fields,
                                   std::size_t n, std::uint64_t seed) {
  if (fields.empty()) {
    throw ArgumentError("sample_training_features: no feature fields");
  }
  const std::size_t dim = fields.front().dim;
  std::vector<std::size_t> starts;
  std::size_t total = 0;
  for (const auto& f : fields) {
    if (f.dim != dim) {
      throw FormatError("mixed feature dimensions: " + std::to_string(dim) +
                        " and " + std::to_string(f.dim));
    }
    starts.push_back(total);
    total += f.size();
  }
  if (total == 0) {
    throw ArgumentError("sample_training_features: fields are empty");
  }

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> picks;
  if (n <= total) {
    // Partial Fisher-Yates over the global index space.
    std::vector<std::size_t> index(total);
    std::iota(index.begin(), index.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, total - 1);
      std::swap(index[i], index[pick(rng)]);
    }
    picks.assign(index.begin(), index.begin() + static_cast<long>(n));
  } else {
    std::uniform_int_distribution<std::size_t> pick(0, total - 1);
    picks.resize(n);
    for (auto& p : picks) p = pick(rng);
  }

  SampleSet out;
  out.dim = dim;
  out.values.reserve(n * dim);
  for (std::size_t g : picks) {
    const auto it = std::upper_bound(starts.begin(), starts.end(), g) - 1;
    const auto& f = fields[static_cast<std::size_t>(it - starts.begin())];
    const auto v = f.vector_at(g - *it);
    out.values.insert(out.values.end(), v.begin(), v.end());
  }
  return out;
}

std::string vocabulary_csv(const Vocabulary& vocab) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t c = 0; c < vocab.k(); ++c) {
    const auto row = vocab.centroid(c);
    for (std::size_t d = 0; d < row.size(); ++d) {
      if (d) os << ',';
      os << row[d];
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace gmp
