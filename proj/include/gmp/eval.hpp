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

#ifndef GMP_EVAL_HPP_
#define GMP_EVAL_HPP_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "gmp/encoding.hpp"
#include "gmp/scoring.hpp"

namespace gmp {

// Row-major probe x gallery scores.
struct ScoreMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
  std::span<const double> row(std::size_t r) const {
    return {values.data() + r * cols, cols};
  }
};

// rates[r - 1] is the fraction of probes whose true match ranks <= r.
struct CmcCurve {
  std::vector<double> rates;
};

inline constexpr std::size_t kNoMatch = std::numeric_limits<std::size_t>::max();

// 1-based rank of gallery entry `truth` within one probe's scores. Higher
// scores rank first; equal scores rank by lower gallery index.
std::size_t match_rank(std::span<const double> scores, std::size_t truth);

// truth[p] is the gallery index of probe p's match. max_rank 0 means the
// full gallery size.
CmcCurve cmc(const ScoreMatrix& scores, std::span<const std::size_t> truth,
             std::size_t max_rank = 0);

// Mean of the CMC rates over the evaluated ranks, in [0, 1].
double cmc_auc(const CmcCurve& curve);

struct ScoredLabel {
  double score;
  int label;  // +1 same group, -1 otherwise
};

// Fraction of items where (score >= threshold) agrees with label == +1.
double verification_rate(std::span<const ScoredLabel> items,
                         double threshold = 0.0);

// Group scores over all candidate tuples, one axis per view, last axis
// fastest.
struct ScoreTensor {
  std::vector<std::size_t> shape;
  std::vector<double> values;

  std::size_t size() const;
};

enum class ReduceOp { kSum, kMax };
std::string to_string(ReduceOp op);
ReduceOp parse_reduce_op(const std::string& name);

// Marginalises every axis other than keep.first (rows) and keep.second
// (columns) with the chosen reduction.
ScoreMatrix reduce_tensor(const ScoreTensor& tensor, ViewPair keep,
                          ReduceOp op);

// Evaluation entities of one view; identities must be unique within a view
// (multi-shot entities are averaged at encoding time).
struct ViewEntities {
  std::vector<AppearanceMap> maps;
  std::vector<std::uint32_t> identities;
};

// pair_score of every (entity of view a, entity of view b), one matrix per
// view pair in all_view_pairs order.
std::vector<ScoreMatrix> pair_score_matrices(
    const BilinearModel& model, std::span<const ViewEntities> views);

// Tensor of group scores assembled from precomputed pair matrices; entry
// (e_1..e_M) equals group_score of that tuple.
ScoreTensor group_score_tensor(const BilinearModel& model,
                               std::span<const ScoreMatrix> pair_matrices,
                               std::span<const std::size_t> shape);

struct ProtocolConfig {
  ReduceOp reduce = ReduceOp::kSum;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  std::size_t max_rank = 0;             // 0: full gallery
  std::size_t verification_groups = 0;  // 0: twice the smallest view size
};

struct PairReport {
  ViewPair views;
  std::uint32_t probe_view = 0;
  std::uint32_t gallery_view = 1;
  std::size_t probes = 0;
  std::size_t gallery = 0;
  CmcCurve curve;
  double auc = 0.0;
};

struct TrialReport {
  std::uint64_t seed = 0;
  double verification_rate = 0.0;
};

struct ProtocolReport {
  ReduceOp reduce = ReduceOp::kSum;
  std::vector<PairReport> pairs;
  std::vector<TrialReport> trials;
  double mean_verification_rate = 0.0;
  double mean_auc = 0.0;
};

// Ranks every view pair (smaller view as gallery, the other as probes;
// the second view is the gallery on ties), reducing the group-score tensor
// when there are more than two views, and measures verification on
// balanced groups sampled with seeds seed, seed+1, ... per trial.
ProtocolReport evaluate_protocol(const BilinearModel& model,
                                 std::span<const ViewEntities> views,
                                 const ProtocolConfig& cfg);

// Report renderers.
std::string cmc_csv(const ProtocolReport& report);
std::string auc_csv(const ProtocolReport& report);
std::string verification_csv(const ProtocolReport& report);
std::string cmc_svg(const ProtocolReport& report);

}  // namespace gmp

#endif  // GMP_EVAL_HPP_
