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

#include "gmp/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "gmp/error.hpp"
#include "gmp/training.hpp"

namespace gmp {
namespace {

constexpr std::size_t kMaxTensorEntries = std::size_t{1} << 26;

std::string pair_name(ViewPair p) {
  return "v" + std::to_string(p.first) + "-v" + std::to_string(p.second);
}

}  // namespace

std::size_t match_rank(std::span<const double> scores, std::size_t truth) {
  if (truth >= scores.size()) throw ArgumentError("truth index out of range");
  const double target = scores[truth];
  if (!std::isfinite(target)) throw ArgumentError("non-finite score");
  std::size_t rank = 1;
  for (std::size_t j = 0; j < scores.size(); ++j) {
    if (!std::isfinite(scores[j])) throw ArgumentError("non-finite score");
    if (scores[j] > target || (scores[j] == target && j < truth)) ++rank;
  }
  return rank;
}

CmcCurve cmc(const ScoreMatrix& scores, std::span<const std::size_t> truth,
             std::size_t max_rank) {
  if (scores.rows == 0 || scores.cols == 0) {
    throw ArgumentError("cmc needs a nonempty score matrix");
  }
  if (scores.values.size() != scores.rows * scores.cols) {
    throw ArgumentError("score matrix has wrong size");
  }
  if (truth.size() != scores.rows) {
    throw ArgumentError("cmc needs one truth entry per probe");
  }
  const std::size_t ranks = max_rank == 0 ? scores.cols : max_rank;
  std::vector<std::size_t> hits(ranks + 1, 0);
  for (std::size_t p = 0; p < scores.rows; ++p) {
    if (truth[p] == kNoMatch || truth[p] >= scores.cols) {
      throw ArgumentError("probe " + std::to_string(p) +
                          " has no true gallery match");
    }
    const std::size_t r = match_rank(scores.row(p), truth[p]);
    if (r <= ranks) ++hits[r];
  }
  CmcCurve curve;
  curve.rates.resize(ranks);
  std::size_t cumulative = 0;
  for (std::size_t r = 1; r <= ranks; ++r) {
    cumulative += hits[r];
    curve.rates[r - 1] =
        static_cast<double>(cumulative) / static_cast<double>(scores.rows);
  }
  return curve;
}

double cmc_auc(const CmcCurve& curve) {
  if (curve.rates.empty()) throw ArgumentError("cmc_auc of an empty curve");
  const double sum =
      std::accumulate(curve.rates.begin(), curve.rates.end(), 0.0);
  return sum / static_cast<double>(curve.rates.size());
}

double verification_rate(std::span<const ScoredLabel> items,
                         double threshold) {
  if (items.empty()) throw ArgumentError("verification_rate of no items");
  std::size_t correct = 0;
  for (const ScoredLabel& item : items) {
    const int predicted = item.score >= threshold ? 1 : -1;
    if (predicted == item.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(items.size());
}

std::size_t ScoreTensor::size() const {
  std::size_t n = shape.empty() ? 0 : 1;
  for (std::size_t s : shape) n *= s;
  return n;
}

std::string to_string(ReduceOp op) {
  return op == ReduceOp::kSum ? "sum" : "max";
}

ReduceOp parse_reduce_op(const std::string& name) {
  if (name == "sum") return ReduceOp::kSum;
  if (name == "max") return ReduceOp::kMax;
  throw ArgumentError("unknown reduction '" + name + "'");
}

ScoreMatrix reduce_tensor(const ScoreTensor& tensor, ViewPair keep,
                          ReduceOp op) {
  const std::size_t order = tensor.shape.size();
  if (order < 2) throw ArgumentError("score tensor needs at least two axes");
  if (keep.first >= order || keep.second >= order) {
    throw ArgumentError("reduce_tensor: kept view does not exist");
  }
  if (keep.first == keep.second) {
    throw ArgumentError("reduce_tensor: kept views must differ");
  }
  if (tensor.values.size() != tensor.size()) {
    throw ArgumentError("score tensor has wrong size");
  }
  ScoreMatrix out;
  out.rows = tensor.shape[keep.first];
  out.cols = tensor.shape[keep.second];
  const double init = op == ReduceOp::kSum
                          ? 0.0
                          : -std::numeric_limits<double>::infinity();
  out.values.assign(out.rows * out.cols, init);
  std::vector<std::size_t> index(order, 0);
  for (double value : tensor.values) {
    double& slot = out.values[index[keep.first] * out.cols + index[keep.second]];
    slot = op == ReduceOp::kSum ? slot + value : std::max(slot, value);
    for (std::size_t axis = order; axis-- > 0;) {
      if (++index[axis] < tensor.shape[axis]) break;
      index[axis] = 0;
    }
  }
  return out;
}

std::vector<ScoreMatrix> pair_score_matrices(
    const BilinearModel& model, std::span<const ViewEntities> views) {
  if (views.size() != model.num_views) {
    throw ArgumentError("model has " + std::to_string(model.num_views) +
                        " views but " + std::to_string(views.size()) +
                        " entity sets were given");
  }
  const auto pairs = all_view_pairs(model.num_views);
  std::vector<ScoreMatrix> out;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const ViewEntities& a = views[pairs[p].first];
    const ViewEntities& b = views[pairs[p].second];
    ScoreMatrix s{a.maps.size(), b.maps.size(), {}};
    s.values.resize(s.rows * s.cols);
    for (std::size_t i = 0; i < s.rows; ++i) {
      for (std::size_t j = 0; j < s.cols; ++j) {
        s.values[i * s.cols + j] = pair_score(
            a.maps[i], b.maps[j], model.pair_weights[p], model.shared);
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

ScoreTensor group_score_tensor(const BilinearModel& model,
                               std::span<const ScoreMatrix> pair_matrices,
                               std::span<const std::size_t> shape) {
  const auto pairs = all_view_pairs(model.num_views);
  if (shape.size() != model.num_views || pair_matrices.size() != pairs.size()) {
    throw ArgumentError("group_score_tensor: shape does not match the model");
  }
  ScoreTensor t;
  t.shape.assign(shape.begin(), shape.end());
  const std::size_t total = t.size();
  if (total == 0) throw ArgumentError("group_score_tensor: empty axis");
  if (total > kMaxTensorEntries) {
    throw ArgumentError("score tensor with " + std::to_string(total) +
                        " entries is too large");
  }
  t.values.resize(total);
  std::vector<std::size_t> index(shape.size(), 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    // Same accumulation order as group_score.
    double score = 0.0;
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      score += model.coeffs.beta[p] *
               pair_matrices[p].at(index[pairs[p].first],
                                   index[pairs[p].second]);
    }
    t.values[flat] = score;
    for (std::size_t axis = shape.size(); axis-- > 0;) {
      if (++index[axis] < shape[axis]) break;
      index[axis] = 0;
    }
  }
  return t;
}

ProtocolReport evaluate_protocol(const BilinearModel& model,
                                 std::span<const ViewEntities> views,
                                 const ProtocolConfig& cfg) {
  if (views.size() != model.num_views) {
    throw ArgumentError("evaluation needs one entity set per model view");
  }
  if (cfg.trials < 1) throw ArgumentError("trials must be >= 1");
  std::vector<std::size_t> shape;
  std::vector<std::vector<std::uint32_t>> identities;
  for (std::size_t m = 0; m < views.size(); ++m) {
    const ViewEntities& v = views[m];
    if (v.maps.empty()) {
      throw ArgumentError("view " + std::to_string(m) +
                          " has no probe/gallery entities");
    }
    if (v.maps.size() != v.identities.size()) {
      throw ArgumentError("entity and identity counts differ");
    }
    std::vector<std::uint32_t> sorted = v.identities;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw ArgumentError("view " + std::to_string(m) +
                          " repeats an identity; merge its entities first");
    }
    shape.push_back(v.maps.size());
    identities.push_back(v.identities);
  }

  const auto matrices = pair_score_matrices(model, views);
  const ScoreTensor tensor = group_score_tensor(model, matrices, shape);

  ProtocolReport report;
  report.reduce = cfg.reduce;
  for (const ViewPair& pair : all_view_pairs(model.num_views)) {
    PairReport pr;
    pr.views = pair;
    const bool first_is_gallery = shape[pair.first] < shape[pair.second];
    pr.gallery_view = first_is_gallery ? pair.first : pair.second;
    pr.probe_view = first_is_gallery ? pair.second : pair.first;
    const ScoreMatrix full =
        reduce_tensor(tensor, {pr.probe_view, pr.gallery_view}, cfg.reduce);

    std::map<std::uint32_t, std::size_t> gallery_index;
    for (std::size_t j = 0; j < shape[pr.gallery_view]; ++j) {
      gallery_index[identities[pr.gallery_view][j]] = j;
    }
    ScoreMatrix ranked{0, full.cols, {}};
    std::vector<std::size_t> truth;
    for (std::size_t i = 0; i < full.rows; ++i) {
      const auto it = gallery_index.find(identities[pr.probe_view][i]);
      if (it == gallery_index.end()) continue;  // no match to rank
      const auto row = full.row(i);
      ranked.values.insert(ranked.values.end(), row.begin(), row.end());
      ++ranked.rows;
      truth.push_back(it->second);
    }
    if (ranked.rows == 0) {
      throw ArgumentError("no probe of view " +
                          std::to_string(pr.probe_view) +
                          " has a match in gallery view " +
                          std::to_string(pr.gallery_view));
    }
    pr.probes = ranked.rows;
    pr.gallery = ranked.cols;
    pr.curve = cmc(ranked, truth, cfg.max_rank);
    pr.auc = cmc_auc(pr.curve);
    report.mean_auc += pr.auc;
    report.pairs.push_back(std::move(pr));
  }
  report.mean_auc /= static_cast<double>(report.pairs.size());

  const std::size_t groups =
      cfg.verification_groups != 0
          ? cfg.verification_groups
          : 2 * *std::min_element(shape.begin(), shape.end());
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    TrialReport trial;
    trial.seed = cfg.seed + t;
    const auto samples = sample_groups(identities, groups, 0.5, trial.seed);
    std::vector<ScoredLabel> items;
    items.reserve(samples.size());
    for (const GroupSample& s : samples) {
      std::size_t flat = 0;
      for (std::size_t m = 0; m < shape.size(); ++m) {
        flat = flat * shape[m] + s.entities[m];
      }
      items.push_back({tensor.values[flat], s.group_label});
    }
    trial.verification_rate = verification_rate(items);
    report.mean_verification_rate += trial.verification_rate;
    report.trials.push_back(trial);
  }
  report.mean_verification_rate /= static_cast<double>(cfg.trials);
  return report;
}

std::string cmc_csv(const ProtocolReport& report) {
  std::ostringstream os;
  os.precision(17);
  os << "rank";
  std::size_t ranks = 0;
  for (const PairReport& p : report.pairs) {
    os << ',' << pair_name(p.views);
    ranks = std::max(ranks, p.curve.rates.size());
  }
  os << '\n';
  for (std::size_t r = 0; r < ranks; ++r) {
    os << r + 1;
    for (const PairReport& p : report.pairs) {
      os << ',';
      if (r < p.curve.rates.size()) os << p.curve.rates[r];
    }
    os << '\n';
  }
  return os.str();
}

std::string auc_csv(const ProtocolReport& report) {
  std::ostringstream os;
  os.precision(17);
  os << "pair,probe_view,gallery_view,probes,gallery,rank1,auc\n";
  for (const PairReport& p : report.pairs) {
    os << pair_name(p.views) << ',' << p.probe_view << ',' << p.gallery_view
       << ',' << p.probes << ',' << p.gallery << ',' << p.curve.rates.front()
       << ',' << p.auc << '\n';
  }
  os << "mean,,,,,," << report.mean_auc << '\n';
  return os.str();
}

std::string verification_csv(const ProtocolReport& report) {
  std::ostringstream os;
  os.precision(17);
  os << "trial,seed,verification_rate\n";
  for (std::size_t t = 0; t < report.trials.size(); ++t) {
    os << t << ',' << report.trials[t].seed << ','
       << report.trials[t].verification_rate << '\n';
  }
  os << "mean,," << report.mean_verification_rate << '\n';
  return os.str();
}

std::string cmc_svg(const ProtocolReport& report) {
  constexpr double kW = 640, kH = 400, kLeft = 60, kRight = 150, kTop = 20,
                   kBottom = 50;
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                  "#9467bd", "#8c564b", "#e377c2", "#17becf"};
  std::size_t ranks = 1;
  for (const PairReport& p : report.pairs) {
    ranks = std::max(ranks, p.curve.rates.size());
  }
  const double plot_w = kW - kLeft - kRight, plot_h = kH - kTop - kBottom;
  auto px = [&](std::size_t rank) {
    return kLeft + (ranks == 1 ? 0.0
                               : plot_w * static_cast<double>(rank - 1) /
                                     static_cast<double>(ranks - 1));
  };
  auto py = [&](double rate) { return kTop + plot_h * (1.0 - rate); };

  std::ostringstream os;
  os.precision(6);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW
     << "\" height=\"" << kH << "\" font-family=\"sans-serif\" "
        "font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<g stroke=\"#ccc\">\n";
  for (int i = 0; i <= 10; ++i) {
    const double y = py(i / 10.0);
    os << "<line x1=\"" << kLeft << "\" y1=\"" << y << "\" x2=\""
       << kLeft + plot_w << "\" y2=\"" << y << "\"/>\n";
  }
  os << "</g>\n";
  os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w
     << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 10; i += 2) {
    os << "<text x=\"" << kLeft - 8 << "\" y=\"" << py(i / 10.0) + 4
       << "\" text-anchor=\"end\">" << i * 10 << "</text>\n";
  }
  os << "<text x=\"" << kLeft << "\" y=\"" << kH - 30
     << "\" text-anchor=\"middle\">1</text>\n";
  os << "<text x=\"" << kLeft + plot_w << "\" y=\"" << kH - 30
     << "\" text-anchor=\"middle\">" << ranks << "</text>\n";
  os << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kH - 10
     << "\" text-anchor=\"middle\">rank</text>\n";
  os << "<text transform=\"translate(16," << kTop + plot_h / 2
     << ") rotate(-90)\" text-anchor=\"middle\">matching rate (%)</text>\n";
  for (std::size_t i = 0; i < report.pairs.size(); ++i) {
    const PairReport& p = report.pairs[i];
    const char* color = kColors[i % 8];
    os << "<polyline fill=\"none\" stroke=\"" << color
       << "\" stroke-width=\"2\" points=\"";
    for (std::size_t r = 1; r <= p.curve.rates.size(); ++r) {
      os << px(r) << ',' << py(p.curve.rates[r - 1]) << ' ';
    }
    os << "\"/>\n";
    const double ly = kTop + 16.0 + 18.0 * static_cast<double>(i);
    os << "<line x1=\"" << kW - kRight + 12 << "\" y1=\"" << ly << "\" x2=\""
       << kW - kRight + 32 << "\" y2=\"" << ly << "\" stroke=\"" << color
       << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << kW - kRight + 38 << "\" y=\"" << ly + 4 << "\">"
       << pair_name(p.views) << " (" << to_string(report.reduce) << ")"
       << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace gmp
