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

#ifndef GMP_TRAINING_HPP_
#define GMP_TRAINING_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "gmp/encoding.hpp"
#include "gmp/scoring.hpp"

namespace gmp {

enum class TrainMode { kMultiView, kDoubleView, kDirectTwoView };

std::string to_string(TrainMode mode);
// Accepts "multi-view", "double-view" and "direct".
TrainMode parse_train_mode(const std::string& name);

struct TrainConfig {
  double lambda1 = 1.0;  // pair weights
  double lambda2 = 1.0;  // shared location weights
  double lambda3 = 1.0;  // pair coefficients
  TrainMode mode = TrainMode::kMultiView;
  std::size_t max_outer = 20;
  double outer_tol = 1e-4;  // relative objective change per outer iteration
  std::size_t n_samples = 30000;
  double pos_fraction = 0.5;
  std::uint64_t seed = 0;
  double svm_tol = 1e-3;
  std::size_t svm_max_pass = 500;
  bool record_parameters = false;

  void validate() const;
  std::string to_json() const;
};

// One training group: an entity index per view. group_label is +1 when all
// identities agree; pair_labels follow all_view_pairs order.
struct GroupSample {
  std::vector<std::uint32_t> entities;
  int group_label = -1;
  std::vector<int> pair_labels;
};

// identities[m][e] is the identity of entity e in view m. Exactly
// round(n * pos_fraction) samples are positive; the rest contain at least
// one mismatch. Order is shuffled.
std::vector<GroupSample> sample_groups(
    const std::vector<std::vector<std::uint32_t>>& identities, std::size_t n,
    double pos_fraction, std::uint64_t seed);

struct TrainingData {
  std::vector<std::vector<AppearanceMap>> maps;  // [view][entity]
  std::vector<GroupSample> samples;
};

enum class Block { kInit, kPairWeights, kShared, kBeta };
std::string to_string(Block block);

struct TraceEntry {
  std::size_t outer = 0;
  Block block = Block::kInit;
  double objective = 0.0;
  double wall_ms = 0.0;
  bool accepted = true;  // false when the block solve did not improve
};

struct ParameterSnapshot {
  std::vector<std::vector<double>> pair_weights;
  std::vector<double> shared;
  std::vector<double> beta;
};

struct TrainingRun {
  BilinearModel model;
  std::vector<TraceEntry> trace;
  std::vector<ParameterSnapshot> parameters;  // parallel to trace if recorded
  bool converged = false;
  std::size_t outer_iterations = 0;

  // beta scaled to unit sum, for reporting.
  std::vector<double> normalized_beta() const;
};

// Two-view bilinear classifier: alternate SVM solves for the word-pair
// weights (lambda1) and the location weights (lambda2).
TrainingRun train_direct_two_view(const TrainingData& data,
                                  const TrainConfig& cfg);

// Pairwise decomposition: alternate over all pair weights, the shared
// location weights and the nonnegative pair coefficients. Multi-view mode
// scores the group label; double-view mode scores every pair label.
TrainingRun train_pairwise(const TrainingData& data, const TrainConfig& cfg);

// Dispatches on cfg.mode.
TrainingRun train(const TrainingData& data, const TrainConfig& cfg);

// Regularised objective of `mode` recomputed from scratch with pair_score.
double training_objective(const TrainingData& data, const BilinearModel& model,
                          const TrainConfig& cfg);

// CSV with columns outer_iter,block,objective,wall_ms.
std::string trace_csv(const TrainingRun& run);

}  // namespace gmp

#endif  // GMP_TRAINING_HPP_
