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

#include "gmp/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "gmp/error.hpp"

namespace gmp {

SvmProblem::SvmProblem(std::size_t dim, double lambda, bool nonneg)
    : dim_(dim), lambda_(lambda), nonneg_(nonneg) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw ArgumentError("svm lambda must be finite and >= 0");
  }
}

void SvmProblem::add_dense_row(std::span<const double> x, int label) {
  if (x.size() != dim_) {
    throw ArgumentError("svm row has " + std::to_string(x.size()) +
                        " features, expected " + std::to_string(dim_));
  }
  if (label != 1 && label != -1) throw ArgumentError("svm labels must be +-1");
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (!std::isfinite(x[j])) throw ArgumentError("svm feature is not finite");
    indices_.push_back(static_cast<std::uint32_t>(j));
    values_.push_back(x[j]);
  }
  offsets_.push_back(indices_.size());
  labels_.push_back(label);
}

void SvmProblem::add_sparse_row(std::span<const std::uint32_t> indices,
                                std::span<const double> values, int label) {
  if (indices.size() != values.size()) {
    throw ArgumentError("sparse row index/value length mismatch");
  }
  if (label != 1 && label != -1) throw ArgumentError("svm labels must be +-1");
  for (std::size_t j = 0; j < indices.size(); ++j) {
    if (indices[j] >= dim_) throw ArgumentError("sparse index out of range");
    if (!std::isfinite(values[j])) {
      throw ArgumentError("svm feature is not finite");
    }
  }
  indices_.insert(indices_.end(), indices.begin(), indices.end());
  values_.insert(values_.end(), values.begin(), values.end());
  offsets_.push_back(indices_.size());
  labels_.push_back(label);
}

double SvmProblem::dot(std::size_t i, std::span<const double> w) const {
  const auto idx = row_indices(i);
  const auto val = row_values(i);
  double s = 0.0;
  for (std::size_t j = 0; j < idx.size(); ++j) s += val[j] * w[idx[j]];
  return s;
}

double primal_objective(const SvmProblem& problem, std::span<const double> w) {
  if (w.size() != problem.dim()) {
    throw ArgumentError("weight vector has " + std::to_string(w.size()) +
                        " entries, problem dim is " +
                        std::to_string(problem.dim()));
  }
  double norm2 = 0.0;
  for (double v : w) norm2 += v * v;
  double loss = 0.0;
  for (std::size_t i = 0; i < problem.size(); ++i) {
    loss += std::max(0.0, 1.0 - problem.label(i) * problem.dot(i, w));
  }
  return 0.5 * problem.lambda() * norm2 + loss;
}

// Scaling the standard dual problem (1/2)|w|^2 + C sum hinge by lambda with
// C = 1/lambda gives the objective above, so the box is [0, 1/lambda].
SvmSolution svm_train(const SvmProblem& problem, double tol,
                      std::size_t max_pass, std::uint64_t seed) {
  if (!(tol > 0.0)) throw ArgumentError("svm tol must be > 0");
  const std::size_t n = problem.size(), dim = problem.dim();
  if (n == 0) throw ArgumentError("svm problem has no rows");
  const double upper = problem.lambda() > 0.0
                           ? 1.0 / problem.lambda()
                           : std::numeric_limits<double>::infinity();
  const bool nonneg = problem.nonneg();

  std::vector<double> alpha(n, 0.0);
  std::vector<double> v(dim, 0.0);  // sum_i alpha_i y_i x_i
  std::vector<double> w(dim, 0.0);  // v, or its positive part
  std::vector<double> qii(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (double x : problem.row_values(i)) qii[i] += x * x;
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);

  // Dual ascent does not make the primal monotone, so the best primal
  // iterate seen at the end of a pass is what gets returned.
  SvmSolution solution;
  std::vector<double> best = w;
  double best_objective = primal_objective(problem, w);
  for (std::size_t pass = 0; pass < max_pass; ++pass) {
    std::shuffle(order.begin(), order.end(), rng);
    double max_violation = 0.0;
    for (std::size_t i : order) {
      if (qii[i] == 0.0) continue;  // row cannot move w
      const double y = problem.label(i);
      const double g = y * problem.dot(i, w) - 1.0;
      double pg = g;
      if (alpha[i] <= 0.0) {
        pg = std::min(g, 0.0);
      } else if (alpha[i] >= upper) {
        pg = std::max(g, 0.0);
      }
      max_violation = std::max(max_violation, std::abs(pg));
      if (pg == 0.0) continue;
      // With nonneg, the dual curvature along i is at most qii (the positive
      // part is 1-Lipschitz), so this step still ascends.
      const double next = std::clamp(alpha[i] - g / qii[i], 0.0, upper);
      const double delta = (next - alpha[i]) * y;
      alpha[i] = next;
      if (delta == 0.0) continue;
      const auto idx = problem.row_indices(i);
      const auto val = problem.row_values(i);
      for (std::size_t j = 0; j < idx.size(); ++j) {
        const std::uint32_t k = idx[j];
        v[k] += delta * val[j];
        w[k] = nonneg ? std::max(v[k], 0.0) : v[k];
      }
    }
    solution.iterations = pass + 1;
    const double objective = primal_objective(problem, w);
    if (objective < best_objective) {
      best_objective = objective;
      best = w;
    }
    solution.pass_objectives.push_back(best_objective);
    if (max_violation < tol) break;
  }

  solution.weights = std::move(best);
  solution.objective = best_objective;
  if (!std::isfinite(solution.objective)) {
    throw NumericError("svm objective is not finite");
  }
  return solution;
}

}  // namespace gmp
