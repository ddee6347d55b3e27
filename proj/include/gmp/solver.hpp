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

#ifndef GMP_SOLVER_HPP_
#define GMP_SOLVER_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace gmp {

// Binary linear problem min_w (lambda/2)|w|^2 + sum_i max(0, 1 - y_i w.x_i)
// with no bias term, optionally subject to w >= 0. Rows are stored sparse
// (CSR); add_dense_row keeps every entry, zeros included.
class SvmProblem {
 public:
  explicit SvmProblem(std::size_t dim, double lambda = 1.0,
                      bool nonneg = false);

  void add_dense_row(std::span<const double> x, int label);
  void add_sparse_row(std::span<const std::uint32_t> indices,
                      std::span<const double> values, int label);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return labels_.size(); }
  double lambda() const { return lambda_; }
  bool nonneg() const { return nonneg_; }
  int label(std::size_t i) const { return labels_[i]; }
  std::span<const std::uint32_t> row_indices(std::size_t i) const {
    return {indices_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }
  std::span<const double> row_values(std::size_t i) const {
    return {values_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }
  double dot(std::size_t i, std::span<const double> w) const;

 private:
  std::size_t dim_;
  double lambda_;
  bool nonneg_;
  std::vector<std::size_t> offsets_{0};
  std::vector<std::uint32_t> indices_;
  std::vector<double> values_;
  std::vector<int> labels_;
};

struct SvmSolution {
  std::vector<double> weights;
  double objective = 0.0;
  std::size_t iterations = 0;  // full passes over the data
  // Objective of the returned iterate after each pass; non-increasing.
  std::vector<double> pass_objectives;
};

// Dual coordinate descent (C = 1/lambda in the usual dual). Coordinates are
// visited in a freshly shuffled order every pass. With nonneg set, the
// primal weights are the positive part of sum_i alpha_i y_i x_i, which is
// exactly the minimiser of the constrained problem for the current alpha.
// Stops when the largest projected-gradient magnitude falls below tol.
// Returns the lowest-objective iterate observed at the end of a pass.
SvmSolution svm_train(const SvmProblem& problem, double tol,
                      std::size_t max_pass, std::uint64_t seed);

double primal_objective(const SvmProblem& problem, std::span<const double> w);

}  // namespace gmp

#endif  // GMP_SOLVER_HPP_
