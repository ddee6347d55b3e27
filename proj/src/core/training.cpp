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

#include "gmp/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "gmp/error.hpp"
#include "gmp/solver.hpp"

namespace gmp {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed for one block solve. Pair-local solves add the pair index so that a
// single-pair problem gets the same seed as the joint one.
std::uint64_t block_seed(std::uint64_t seed, std::size_t outer, Block block) {
  return splitmix64(seed ^ splitmix64(outer * 4 + static_cast<int>(block)));
}

double hinge(double margin) { return std::max(0.0, 1.0 - margin); }

double squared_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

class AlternatingTrainer {
 public:
  AlternatingTrainer(const TrainingData& data, const TrainConfig& cfg)
      : data_(data), cfg_(cfg), pairs_(all_view_pairs(check_views(data))) {
    const auto views = static_cast<std::uint32_t>(data.maps.size());
    for (std::uint32_t m = 0; m < views; ++m) {
      if (data.maps[m].empty()) {
        throw ArgumentError("view " + std::to_string(m) + " has no entities");
      }
      k_.push_back(data.maps[m].front().k());
    }
    const AppearanceMap& ref = data.maps[0][0];
    locations_ = ref.num_locations();
    for (std::uint32_t m = 0; m < views; ++m) {
      for (const AppearanceMap& a : data.maps[m]) {
        if (!(a.grid() == ref.grid()) || a.k() != k_[m]) {
          throw ArgumentError("entities of view " + std::to_string(m) +
                              " disagree in grid or vocabulary size");
        }
      }
    }
    if (data.samples.empty()) throw ArgumentError("no training groups");
    for (const GroupSample& s : data.samples) {
      if (s.entities.size() != views || s.pair_labels.size() != pairs_.size()) {
        throw ArgumentError("training group does not match the view count");
      }
      for (std::uint32_t m = 0; m < views; ++m) {
        if (s.entities[m] >= data.maps[m].size()) {
          throw ArgumentError("training group references a missing entity");
        }
      }
    }

    model_.num_views = views;
    for (std::size_t p = 0; p < pairs_.size(); ++p) {
      model_.pair_weights.push_back(PairWeights::filled(
          pairs_[p], k_[pairs_[p].first], k_[pairs_[p].second], 1.0));
    }
    model_.shared.values.assign(locations_, 1.0);
    model_.coeffs.beta.assign(pairs_.size(), 1.0);
    model_.kernel.stride = ref.grid().stride;
    model_.config_json = cfg.to_json();
  }

  TrainingRun run() {
    const auto start = std::chrono::steady_clock::now();
    auto elapsed = [&] {
      return std::chrono::duration<double, std::milli>(
                 std::chrono::steady_clock::now() - start)
          .count();
    };
    const std::size_t n = data_.samples.size();
    scores_.assign(pairs_.size(), std::vector<double>(n));
    for (std::size_t p = 0; p < pairs_.size(); ++p) {
      for (std::size_t k = 0; k < n; ++k) {
        scores_[p][k] = pair_score(map(k, pairs_[p].first),
                                   map(k, pairs_[p].second),
                                   model_.pair_weights[p], model_.shared);
      }
    }
    objective_ = objective(scores_, model_);
    record(0, Block::kInit, objective_, elapsed(), true);

    const bool with_beta = cfg_.mode != TrainMode::kDirectTwoView;
    for (std::size_t outer = 1; outer <= cfg_.max_outer; ++outer) {
      const double before = objective_;
      bool accepted = step_pair_weights(outer);
      record(outer, Block::kPairWeights, objective_, elapsed(), accepted);
      accepted = step_shared(outer);
      record(outer, Block::kShared, objective_, elapsed(), accepted);
      if (with_beta) {
        accepted = step_beta(outer);
        record(outer, Block::kBeta, objective_, elapsed(), accepted);
      }
      run_.outer_iterations = outer;
      const double change =
          std::abs(before - objective_) /
          std::max(std::abs(before), std::numeric_limits<double>::min());
      if (change < cfg_.outer_tol) {
        run_.converged = true;
        break;
      }
    }
    run_.model = model_;
    return std::move(run_);
  }

 private:
  static std::uint32_t check_views(const TrainingData& data) {
    if (data.maps.size() < 2) {
      throw ArgumentError("training needs at least two views");
    }
    return static_cast<std::uint32_t>(data.maps.size());
  }

  bool double_view() const { return cfg_.mode == TrainMode::kDoubleView; }
  bool with_beta() const { return cfg_.mode != TrainMode::kDirectTwoView; }

  const AppearanceMap& map(std::size_t sample, std::uint32_t view) const {
    return data_.maps[view][data_.samples[sample].entities[view]];
  }
  int label(std::size_t sample, std::size_t pair) const {
    const GroupSample& s = data_.samples[sample];
    return double_view() ? s.pair_labels[pair] : s.group_label;
  }

  double objective(const std::vector<std::vector<double>>& scores,
                   const BilinearModel& m) const {
    double reg = 0.0;
    for (const PairWeights& w : m.pair_weights) reg += squared_norm(w.values);
    double total = 0.5 * cfg_.lambda1 * reg +
                   0.5 * cfg_.lambda2 * squared_norm(m.shared.values);
    if (with_beta()) total += 0.5 * cfg_.lambda3 * squared_norm(m.coeffs.beta);
    const std::size_t n = data_.samples.size();
    for (std::size_t k = 0; k < n; ++k) {
      if (double_view()) {
        for (std::size_t p = 0; p < pairs_.size(); ++p) {
          total += hinge(data_.samples[k].pair_labels[p] * m.coeffs.beta[p] *
                         scores[p][k]);
        }
      } else {
        double f = 0.0;
        for (std::size_t p = 0; p < pairs_.size(); ++p) {
          f += m.coeffs.beta[p] * scores[p][k];
        }
        total += hinge(data_.samples[k].group_label * f);
      }
    }
    if (!std::isfinite(total)) {
      throw NumericError("training objective is not finite");
    }
    return total;
  }

  // Keeps the candidate only if it does not raise the objective.
  bool accept(BilinearModel& candidate,
              std::vector<std::vector<double>>& candidate_scores) {
    const double value = objective(candidate_scores, candidate);
    if (value > objective_) return false;
    objective_ = value;
    model_ = std::move(candidate);
    scores_ = std::move(candidate_scores);
    return true;
  }

  SvmSolution solve(const SvmProblem& problem, std::uint64_t seed) const {
    return svm_train(problem, cfg_.svm_tol, cfg_.svm_max_pass, seed);
  }

  bool step_pair_weights(std::size_t outer) {
    const std::size_t n = data_.samples.size();
    // Collapse the location axis with the current w_h.
    std::vector<std::vector<SparseVector>> v(pairs_.size(),
                                             std::vector<SparseVector>(n));
    std::vector<double> scratch;
    for (std::size_t p = 0; p < pairs_.size(); ++p) {
      scratch.clear();
      for (std::size_t k = 0; k < n; ++k) {
        collapsed_pair_feature_sparse(map(k, pairs_[p].first),
                                      map(k, pairs_[p].second), model_.shared,
                                      scratch, v[p][k]);
      }
    }
    const std::uint64_t seed = block_seed(cfg_.seed, outer, Block::kPairWeights);
    BilinearModel candidate = model_;
    auto scaled = [&](std::size_t p, std::size_t k, std::size_t offset,
                      std::vector<std::uint32_t>& idx,
                      std::vector<double>& val) {
      const double beta = model_.coeffs.beta[p];
      for (std::size_t j = 0; j < v[p][k].indices.size(); ++j) {
        idx.push_back(static_cast<std::uint32_t>(offset + v[p][k].indices[j]));
        val.push_back(beta * v[p][k].values[j]);
      }
    };

    if (double_view()) {
      // Pair terms decouple: one problem per view pair.
      for (std::size_t p = 0; p < pairs_.size(); ++p) {
        SvmProblem problem(model_.pair_weights[p].values.size(), cfg_.lambda1);
        std::vector<std::uint32_t> idx;
        std::vector<double> val;
        for (std::size_t k = 0; k < n; ++k) {
          idx.clear();
          val.clear();
          scaled(p, k, 0, idx, val);
          problem.add_sparse_row(idx, val, label(k, p));
        }
        candidate.pair_weights[p].values = solve(problem, seed + p).weights;
      }
    } else {
      std::vector<std::size_t> offsets{0};
      for (const PairWeights& w : model_.pair_weights) {
        offsets.push_back(offsets.back() + w.values.size());
      }
      SvmProblem problem(offsets.back(), cfg_.lambda1);
      std::vector<std::uint32_t> idx;
      std::vector<double> val;
      for (std::size_t k = 0; k < n; ++k) {
        idx.clear();
        val.clear();
        for (std::size_t p = 0; p < pairs_.size(); ++p) {
          scaled(p, k, offsets[p], idx, val);
        }
        problem.add_sparse_row(idx, val, data_.samples[k].group_label);
      }
      const auto w = solve(problem, seed).weights;
      for (std::size_t p = 0; p < pairs_.size(); ++p) {
        auto& dst = candidate.pair_weights[p].values;
        std::copy(w.begin() + static_cast<long>(offsets[p]),
                  w.begin() + static_cast<long>(offsets[p + 1]), dst.begin());
      }
    }

    std::vector<std::vector<double>> scores(pairs_.size(),
                                            std::vector<double>(n));
    for (std::size_t p = 0; p < pairs_.size(); ++p) {
      const auto& w = candidate.pair_weights[p].values;
      for (std::size_t k = 0; k < n; ++k) {
        double s = 0.0;
        for (std::size_t j = 0; j < v[p][k].indices.size(); ++j) {
          s += w[v[p][k].indices[j]] * v[p][k].values[j];
        }
        scores[p][k] = s;
      }
    }
    return accept(candidate, scores);
  }

  bool step_shared(std::size_t outer) {
    const std::size_t n = data_.samples.size();
    std::vector<std::vector<std::vector<double>>> u(
        pairs_.size(), std::vector<std::vector<double>>(n));
    for (std::size_t p = 0; p < pairs_.size(); ++p) {
      for (std::size_t k = 0; k < n; ++k) {
        u[p][k] = collapsed_location_feature(map(k, pairs_[p].first),
                                             map(k, pairs_[p].second),
                                             model_.pair_weights[p]);
      }
    }
    SvmProblem problem(locations_, cfg_.lambda2);
    std::vector<double> row(locations_);
    for (std::size_t k = 0; k < n; ++k) {
      if (double_view()) {
        for (std::size_t p = 0; p < pairs_.size(); ++p) {
          const double beta = model_.coeffs.beta[p];
          for (std::size_t h = 0; h < locations_; ++h) row[h] = beta * u[p][k][h];
          problem.add_dense_row(row, label(k, p));
        }
      } else {
        std::fill(row.begin(), row.end(), 0.0);
        for (std::size_t p = 0; p < pairs_.size(); ++p) {
          const double beta = model_.coeffs.beta[p];
          for (std::size_t h = 0; h < locations_; ++h) row[h] += beta * u[p][k][h];
        }
        problem.add_dense_row(row, data_.samples[k].group_label);
      }
    }
    BilinearModel candidate = model_;
    candidate.shared.values =
        solve(problem, block_seed(cfg_.seed, outer, Block::kShared)).weights;

    std::vector<std::vector<double>> scores(pairs_.size(),
                                            std::vector<double>(n));
    for (std::size_t p = 0; p < pairs_.size(); ++p) {
      for (std::size_t k = 0; k < n; ++k) {
        double s = 0.0;
        for (std::size_t h = 0; h < locations_; ++h) {
          s += candidate.shared.values[h] * u[p][k][h];
        }
        scores[p][k] = s;
      }
    }
    return accept(candidate, scores);
  }

  bool step_beta(std::size_t outer) {
    const std::size_t n = data_.samples.size();
    const std::size_t pairs = pairs_.size();
    SvmProblem problem(pairs, cfg_.lambda3, /*nonneg=*/true);
    std::vector<std::uint32_t> idx(pairs);
    std::iota(idx.begin(), idx.end(), 0u);
    std::vector<double> row(pairs);
    for (std::size_t k = 0; k < n; ++k) {
      if (double_view()) {
        for (std::size_t p = 0; p < pairs; ++p) {
          const std::uint32_t at = static_cast<std::uint32_t>(p);
          const double s = scores_[p][k];
          problem.add_sparse_row({&at, 1}, {&s, 1}, label(k, p));
        }
      } else {
        for (std::size_t p = 0; p < pairs; ++p) row[p] = scores_[p][k];
        problem.add_sparse_row(idx, row, data_.samples[k].group_label);
      }
    }
    BilinearModel candidate = model_;
    candidate.coeffs.beta =
        solve(problem, block_seed(cfg_.seed, outer, Block::kBeta)).weights;
    auto scores = scores_;
    return accept(candidate, scores);
  }

  void record(std::size_t outer, Block block, double value, double ms,
              bool accepted) {
    run_.trace.push_back({outer, block, value, ms, accepted});
    if (cfg_.record_parameters) {
      ParameterSnapshot snap;
      for (const PairWeights& w : model_.pair_weights) {
        snap.pair_weights.push_back(w.values);
      }
      snap.shared = model_.shared.values;
      snap.beta = model_.coeffs.beta;
      run_.parameters.push_back(std::move(snap));
    }
  }

  const TrainingData& data_;
  const TrainConfig& cfg_;
  std::vector<ViewPair> pairs_;
  std::vector<std::uint32_t> k_;
  std::size_t locations_ = 0;
  BilinearModel model_;
  std::vector<std::vector<double>> scores_;  // [pair][sample] = w^T phi w_h
  double objective_ = 0.0;
  TrainingRun run_;
};

}  // namespace

std::string to_string(TrainMode mode) {
  switch (mode) {
    case TrainMode::kMultiView: return "multi-view";
    case TrainMode::kDoubleView: return "double-view";
    case TrainMode::kDirectTwoView: return "direct";
  }
  return "unknown";
}

TrainMode parse_train_mode(const std::string& name) {
  if (name == "multi-view") return TrainMode::kMultiView;
  if (name == "double-view") return TrainMode::kDoubleView;
  if (name == "direct" || name == "direct-two-view") {
    return TrainMode::kDirectTwoView;
  }
  throw ArgumentError("unknown training mode '" + name + "'");
}

std::string to_string(Block block) {
  switch (block) {
    case Block::kInit: return "init";
    case Block::kPairWeights: return "pair_weights";
    case Block::kShared: return "shared";
    case Block::kBeta: return "beta";
  }
  return "unknown";
}

void TrainConfig::validate() const {
  for (double l : {lambda1, lambda2, lambda3}) {
    if (!(l >= 0.0) || !std::isfinite(l)) {
      throw ArgumentError("regularisers must be finite and >= 0");
    }
  }
  if (!(pos_fraction > 0.0 && pos_fraction < 1.0)) {
    throw ArgumentError("pos_fraction must lie strictly between 0 and 1");
  }
  if (max_outer < 1) throw ArgumentError("max_outer must be >= 1");
  if (!(outer_tol >= 0.0)) throw ArgumentError("outer_tol must be >= 0");
  if (n_samples < 1) throw ArgumentError("n_samples must be >= 1");
  if (!(svm_tol > 0.0)) throw ArgumentError("svm_tol must be > 0");
  if (svm_max_pass < 1) throw ArgumentError("svm_max_pass must be >= 1");
}

std::string TrainConfig::to_json() const {
  nlohmann::json j;
  j["lambda1"] = lambda1;
  j["lambda2"] = lambda2;
  j["lambda3"] = lambda3;
  j["mode"] = to_string(mode);
  j["max_outer"] = max_outer;
  j["outer_tol"] = outer_tol;
  j["n_samples"] = n_samples;
  j["pos_fraction"] = pos_fraction;
  j["seed"] = seed;
  j["svm_tol"] = svm_tol;
  j["svm_max_pass"] = svm_max_pass;
  return j.dump();
}

std::vector<GroupSample> sample_groups(
    const std::vector<std::vector<std::uint32_t>>& identities, std::size_t n,
    double pos_fraction, std::uint64_t seed) {
  const std::size_t views = identities.size();
  if (views < 2) throw ArgumentError("sample_groups needs at least two views");
  if (!(pos_fraction >= 0.0 && pos_fraction <= 1.0)) {
    throw ArgumentError("pos_fraction must lie in [0, 1]");
  }
  std::vector<std::map<std::uint32_t, std::vector<std::uint32_t>>> by_id(views);
  for (std::size_t m = 0; m < views; ++m) {
    for (std::size_t e = 0; e < identities[m].size(); ++e) {
      by_id[m][identities[m][e]].push_back(static_cast<std::uint32_t>(e));
    }
    if (by_id[m].size() < 2) {
      throw ArgumentError("view " + std::to_string(m) +
                          " needs at least two identities");
    }
  }
  std::vector<std::uint32_t> shared;
  for (const auto& [id, entities] : by_id[0]) {
    bool everywhere = true;
    for (std::size_t m = 1; m < views && everywhere; ++m) {
      everywhere = by_id[m].count(id) > 0;
    }
    if (everywhere) shared.push_back(id);
  }
  const auto n_pos = static_cast<std::size_t>(
      std::llround(static_cast<double>(n) * pos_fraction));
  if (n_pos > 0 && shared.empty()) {
    throw ArgumentError("no identity appears in every view; cannot form "
                        "positive groups");
  }

  const auto pairs = all_view_pairs(static_cast<std::uint32_t>(views));
  std::mt19937_64 rng(seed);
  auto uniform = [&](std::size_t size) {
    return std::uniform_int_distribution<std::size_t>(0, size - 1)(rng);
  };
  auto finish = [&](GroupSample& s) {
    s.pair_labels.clear();
    bool all = true;
    for (const ViewPair& p : pairs) {
      const bool same = identities[p.first][s.entities[p.first]] ==
                        identities[p.second][s.entities[p.second]];
      s.pair_labels.push_back(same ? 1 : -1);
      all = all && same;
    }
    s.group_label = all ? 1 : -1;
  };

  std::vector<GroupSample> samples(n);
  for (std::size_t i = 0; i < n; ++i) {
    GroupSample& s = samples[i];
    s.entities.resize(views);
    if (i < n_pos) {
      const std::uint32_t id = shared[uniform(shared.size())];
      for (std::size_t m = 0; m < views; ++m) {
        const auto& candidates = by_id[m].at(id);
        s.entities[m] = candidates[uniform(candidates.size())];
      }
    } else {
      do {
        for (std::size_t m = 0; m < views; ++m) {
          s.entities[m] =
              static_cast<std::uint32_t>(uniform(identities[m].size()));
        }
        finish(s);
      } while (s.group_label == 1);
    }
    finish(s);
  }
  std::shuffle(samples.begin(), samples.end(), rng);
  return samples;
}

std::vector<double> TrainingRun::normalized_beta() const {
  std::vector<double> beta = model.coeffs.beta;
  const double sum = std::accumulate(beta.begin(), beta.end(), 0.0);
  if (sum > 0.0) {
    for (double& b : beta) b /= sum;
  }
  return beta;
}

TrainingRun train_direct_two_view(const TrainingData& data,
                                  const TrainConfig& cfg) {
  if (data.maps.size() != 2) {
    throw ArgumentError("direct training needs exactly two views, got " +
                        std::to_string(data.maps.size()));
  }
  TrainConfig direct = cfg;
  direct.mode = TrainMode::kDirectTwoView;
  direct.validate();
  return AlternatingTrainer(data, direct).run();
}

TrainingRun train_pairwise(const TrainingData& data, const TrainConfig& cfg) {
  if (cfg.mode != TrainMode::kMultiView && cfg.mode != TrainMode::kDoubleView) {
    throw ArgumentError("pairwise training needs multi-view or double-view "
                        "mode");
  }
  cfg.validate();
  return AlternatingTrainer(data, cfg).run();
}

TrainingRun train(const TrainingData& data, const TrainConfig& cfg) {
  return cfg.mode == TrainMode::kDirectTwoView
             ? train_direct_two_view(data, cfg)
             : train_pairwise(data, cfg);
}

double training_objective(const TrainingData& data, const BilinearModel& model,
                          const TrainConfig& cfg) {
  const auto pairs = all_view_pairs(model.num_views);
  double total = 0.0;
  for (const PairWeights& w : model.pair_weights) {
    total += 0.5 * cfg.lambda1 * squared_norm(w.values);
  }
  total += 0.5 * cfg.lambda2 * squared_norm(model.shared.values);
  if (cfg.mode != TrainMode::kDirectTwoView) {
    total += 0.5 * cfg.lambda3 * squared_norm(model.coeffs.beta);
  }
  for (const GroupSample& s : data.samples) {
    auto entity = [&](std::uint32_t view) -> const AppearanceMap& {
      return data.maps[view][s.entities[view]];
    };
    double f = 0.0;
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const double term =
          model.coeffs.beta[p] * pair_score(entity(pairs[p].first),
                                            entity(pairs[p].second),
                                            model.pair_weights[p],
                                            model.shared);
      if (cfg.mode == TrainMode::kDoubleView) {
        total += hinge(s.pair_labels[p] * term);
      } else {
        f += term;
      }
    }
    if (cfg.mode != TrainMode::kDoubleView) total += hinge(s.group_label * f);
  }
  return total;
}

std::string trace_csv(const TrainingRun& run) {
  std::ostringstream os;
  os.precision(17);
  os << "outer_iter,block,objective,wall_ms\n";
  for (const TraceEntry& e : run.trace) {
    os << e.outer << ',' << to_string(e.block) << ',' << e.objective << ','
       << e.wall_ms << '\n';
  }
  return os.str();
}

}  // namespace gmp
