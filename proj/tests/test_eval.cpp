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


#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "generators.hpp"
#include "gmp/error.hpp"
#include "gmp/eval.hpp"
#include "oracles.hpp"

namespace {

gmp::ScoreMatrix random_matrix(gen::Rng& rng, std::size_t rows, std::size_t cols,
                               bool coarse) {
  gmp::ScoreMatrix m{rows, cols, {}};
  for (std::size_t i = 0; i < rows * cols; ++i) {
    // Coarse values force ties.
    m.values.push_back(coarse ? gen::uniform(rng, 0, 4) : gen::real(rng, -1.0, 1.0));
  }
  return m;
}

std::vector<std::vector<double>> rows_of(const gmp::ScoreMatrix& m) {
  std::vector<std::vector<double>> out;
  for (std::size_t r = 0; r < m.rows; ++r) {
    const auto row = m.row(r);
    out.emplace_back(row.begin(), row.end());
  }
  return out;
}

// Entity i carries word i at a single location; with W = 2I - 1 pair scores
// are +1 for equal identities and -1 otherwise.
gmp::BilinearModel identity_model(std::uint32_t views, std::uint32_t k) {
  gmp::BilinearModel m;
  m.num_views = views;
  for (const auto& p : gmp::all_view_pairs(views)) {
    auto w = gmp::PairWeights::filled(p, k, k, -1.0);
    for (std::uint32_t i = 0; i < k; ++i) w.values[i * k + i] = 1.0;
    m.pair_weights.push_back(w);
  }
  m.shared.values = {1.0};
  m.coeffs.beta.assign(m.pair_weights.size(), 1.0);
  return m;
}

gmp::ViewEntities identity_view(std::uint32_t view, std::uint32_t k,
                                const std::vector<std::uint32_t>& ids) {
  gmp::ViewEntities v;
  for (std::uint32_t id : ids) {
    v.maps.emplace_back(view, k, gmp::LocationGrid{1, 1, 1},
                        std::vector<gmp::MapEntry>{{id, 0, 1.0}});
    v.identities.push_back(id);
  }
  return v;
}

}  // namespace

TEST_CASE("cmc examples") {
  gmp::ScoreMatrix diag{3, 3, {5, 1, 1, 0, 4, 2, 1, 1, 9}};
  const std::vector<std::size_t> truth{0, 1, 2};
  CHECK(gmp::cmc(diag, truth).rates == std::vector<double>{1, 1, 1});

  gmp::ScoreMatrix one{1, 5, {0.9, 0.8, 0.5, 0.4, 0.1}};
  const std::vector<std::size_t> third{2};
  CHECK(gmp::cmc(one, third).rates == std::vector<double>{0, 0, 1, 1, 1});
  CHECK(gmp::cmc(one, third, 2).rates == std::vector<double>{0, 0});
}

TEST_CASE("cmc breaks ties toward the lower gallery index") {
  gmp::ScoreMatrix m{1, 3, {1.0, 1.0, 1.0}};
  CHECK(gmp::match_rank(m.row(0), 0) == 1);
  CHECK(gmp::match_rank(m.row(0), 2) == 3);
}

TEST_CASE("cmc errors") {
  gmp::ScoreMatrix m{2, 2, {1, 0, 0, 1}};
  const std::vector<std::size_t> short_truth{0};
  CHECK_THROWS_AS(gmp::cmc(m, short_truth), gmp::ArgumentError);
  const std::vector<std::size_t> bad{0, 5};
  CHECK_THROWS_AS(gmp::cmc(m, bad), gmp::ArgumentError);
  CHECK_THROWS_AS(gmp::cmc_auc(gmp::CmcCurve{}), gmp::ArgumentError);
  CHECK_THROWS_AS(gmp::verification_rate({}), gmp::ArgumentError);
}

TEST_CASE("cmc matches brute-force ranking") {
  gen::Rng rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t rows = trial == 0 ? 20 : gen::uniform(rng, 1, 25);
    const std::size_t cols = trial == 0 ? 50 : gen::uniform(rng, 1, 40);
    const auto m = random_matrix(rng, rows, cols, trial % 2 == 1);
    std::vector<std::size_t> truth;
    for (std::size_t r = 0; r < rows; ++r) truth.push_back(gen::uniform(rng, 0, cols - 1));
    const auto curve = gmp::cmc(m, truth);
    CHECK(curve.rates == oracle::cmc(rows_of(m), truth, cols));
    CHECK(curve.rates.back() == 1.0);
    for (std::size_t r = 1; r < curve.rates.size(); ++r) {
      CHECK(curve.rates[r] >= curve.rates[r - 1]);
    }
    // Invariant under a strictly increasing transform.
    auto shifted = m;
    for (double& v : shifted.values) v = std::exp(3.0 * v) + 7.0;
    CHECK(gmp::cmc(shifted, truth).rates == curve.rates);
  }
}

TEST_CASE("cmc_auc is the mean rate") {
  CHECK(gmp::cmc_auc({{1, 1, 1, 1}}) == 1.0);
  CHECK(gmp::cmc_auc({{0, 0, 1, 1, 1}}) == doctest::Approx(0.6).epsilon(1e-15));
  gen::Rng rng(42);
  for (int trial = 0; trial < 100; ++trial) {
    gmp::CmcCurve c;
    const std::size_t n = gen::uniform(rng, 1, 60);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      acc = std::min(1.0, acc + gen::real(rng, 0.0, 0.1));
      c.rates.push_back(acc);
    }
    long double sum = 0.0L;
    for (double r : c.rates) sum += r;
    CHECK(std::abs(gmp::cmc_auc(c) - static_cast<double>(sum / n)) <= 1e-12);
  }
}

TEST_CASE("verification_rate examples and counting") {
  std::vector<gmp::ScoredLabel> items{{1, 1}, {1, 1}, {-1, -1}, {-1, -1}};
  CHECK(gmp::verification_rate(items) == 1.0);
  for (auto& it : items) it.label = -it.label;
  CHECK(gmp::verification_rate(items) == 0.0);
  CHECK(gmp::verification_rate(std::vector<gmp::ScoredLabel>{{0.0, 1}}) == 1.0);

  gen::Rng rng(43);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<gmp::ScoredLabel> xs;
    const std::size_t n = gen::uniform(rng, 1, 80);
    for (std::size_t i = 0; i < n; ++i) {
      xs.push_back({gen::real(rng, -2, 2), gen::uniform(rng, 0, 1) ? 1 : -1});
    }
    const double t = gen::real(rng, -1, 1);
    std::size_t right = 0;
    for (const auto& x : xs) right += (x.score >= t ? 1 : -1) == x.label;
    const double expected = static_cast<double>(right) / static_cast<double>(n);
    CHECK(gmp::verification_rate(xs, t) == expected);
    auto moved = xs;
    for (auto& x : moved) x.score += 0.5;
    CHECK(gmp::verification_rate(moved, t + 0.5) == expected);
  }
}

TEST_CASE("reduce_tensor with two views is the identity") {
  gmp::ScoreTensor t{{2, 3}, {1, 2, 3, 4, 5, 6}};
  for (auto op : {gmp::ReduceOp::kSum, gmp::ReduceOp::kMax}) {
    const auto m = gmp::reduce_tensor(t, {0, 1}, op);
    CHECK(m.rows == 2);
    CHECK(m.cols == 3);
    CHECK(m.values == t.values);
  }
  const auto swapped = gmp::reduce_tensor(t, {1, 0}, gmp::ReduceOp::kSum);
  CHECK(swapped.values == std::vector<double>{1, 4, 2, 5, 3, 6});
  CHECK_THROWS_AS(gmp::reduce_tensor(t, {1, 1}, gmp::ReduceOp::kSum), gmp::ArgumentError);
  CHECK_THROWS_AS(gmp::reduce_tensor(t, {0, 2}, gmp::ReduceOp::kSum), gmp::ArgumentError);
}

TEST_CASE("reduce_tensor on three views matches nested loops") {
  gen::Rng rng(44);
  const std::pair<int, int> keeps[] = {{0, 1}, {1, 0}, {0, 2}, {2, 0}, {1, 2}, {2, 1}};
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n0 = gen::uniform(rng, 1, 5), n1 = gen::uniform(rng, 1, 5),
                      n2 = gen::uniform(rng, 1, 5);
    gmp::ScoreTensor t{{n0, n1, n2}, {}};
    for (std::size_t i = 0; i < n0 * n1 * n2; ++i) t.values.push_back(gen::real(rng, -3, 3));
    const auto [a, b] = keeps[trial % 6];
    const gmp::ViewPair keep{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)};
    CHECK(gmp::reduce_tensor(t, keep, gmp::ReduceOp::kMax).values ==
          oracle::reduce3(t.values, n0, n1, n2, a, b, true));
    const auto sum = gmp::reduce_tensor(t, keep, gmp::ReduceOp::kSum);
    const auto ref = oracle::reduce3(t.values, n0, n1, n2, a, b, false);
    REQUIRE(sum.values.size() == ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) {
      CHECK(std::abs(sum.values[i] - ref[i]) <= 1e-12);
    }
    // Linearity of the sum reduction.
    auto doubled = t;
    for (double& v : doubled.values) v *= 2.0;
    const auto d = gmp::reduce_tensor(doubled, keep, gmp::ReduceOp::kSum);
    for (std::size_t i = 0; i < ref.size(); ++i) CHECK(d.values[i] == 2.0 * sum.values[i]);
  }
}

TEST_CASE("reduce op names") {
  CHECK(gmp::parse_reduce_op("max") == gmp::ReduceOp::kMax);
  CHECK(gmp::to_string(gmp::ReduceOp::kSum) == "sum");
  CHECK_THROWS_AS(gmp::parse_reduce_op("mean"), gmp::ArgumentError);
}

TEST_CASE("identity scoring gives perfect rank-1 and verification") {
  for (std::uint32_t views : {2u, 3u}) {
    const std::uint32_t k = 6;
    const auto model = identity_model(views, k);
    std::vector<gmp::ViewEntities> es;
    for (std::uint32_t m = 0; m < views; ++m) {
      std::vector<std::uint32_t> ids{0, 1, 2, 3, 4, 5};
      std::rotate(ids.begin(), ids.begin() + m, ids.end());
      // A smaller view becomes the gallery. With three views every identity
      // stays present, since max-reduction ties otherwise.
      if (m == 1 && views == 2) ids.pop_back();
      es.push_back(identity_view(m, k, ids));
    }
    for (auto op : {gmp::ReduceOp::kSum, gmp::ReduceOp::kMax}) {
      gmp::ProtocolConfig cfg;
      cfg.reduce = op;
      cfg.trials = 3;
      const auto report = gmp::evaluate_protocol(model, es, cfg);
      REQUIRE(report.pairs.size() == views * (views - 1) / 2);
      for (const auto& p : report.pairs) {
        CHECK(p.curve.rates.front() == 1.0);
        CHECK(p.auc == 1.0);
      }
      CHECK(report.pairs[0].gallery_view == 1);
      CHECK(report.pairs[0].probes == (views == 2 ? 5u : 6u));
      REQUIRE(report.trials.size() == 3);
      CHECK(report.trials[2].seed == 2);
      CHECK(report.mean_verification_rate == 1.0);
    }
  }
}

TEST_CASE("trial averaging reports the arithmetic mean") {
  const auto model = identity_model(2, 4);
  std::vector<gmp::ViewEntities> es{identity_view(0, 4, {0, 1, 2, 3}),
                                    identity_view(1, 4, {0, 1, 2, 3})};
  auto flipped = model;
  for (double& w : flipped.pair_weights[0].values) w = -w;
  gmp::ProtocolConfig cfg;
  cfg.trials = 3;
  cfg.seed = 10;
  const auto report = gmp::evaluate_protocol(flipped, es, cfg);
  double sum = 0.0;
  for (const auto& t : report.trials) sum += t.verification_rate;
  CHECK(report.mean_verification_rate == doctest::Approx(sum / 3.0).epsilon(1e-15));
  CHECK(report.trials[0].seed == 10);
}

TEST_CASE("evaluate_protocol rejects empty or mismatched views") {
  const auto model = identity_model(2, 3);
  std::vector<gmp::ViewEntities> es{identity_view(0, 3, {0, 1}), gmp::ViewEntities{}};
  CHECK_THROWS_AS(gmp::evaluate_protocol(model, es, {}), gmp::ArgumentError);
  std::vector<gmp::ViewEntities> disjoint{identity_view(0, 3, {0}), identity_view(1, 3, {1, 2})};
  CHECK_THROWS_AS(gmp::evaluate_protocol(model, disjoint, {}), gmp::ArgumentError);
  std::vector<gmp::ViewEntities> one{identity_view(0, 3, {0, 1})};
  CHECK_THROWS_AS(gmp::evaluate_protocol(model, one, {}), gmp::ArgumentError);
}

TEST_CASE("report tables") {
  const auto model = identity_model(2, 3);
  std::vector<gmp::ViewEntities> es{identity_view(0, 3, {0, 1, 2}),
                                    identity_view(1, 3, {0, 1, 2})};
  const auto report = gmp::evaluate_protocol(model, es, {});
  CHECK(gmp::cmc_csv(report).rfind("rank", 0) == 0);
  CHECK(gmp::auc_csv(report).find('\n') != std::string::npos);
  CHECK(gmp::verification_csv(report).find('\n') != std::string::npos);
  const auto svg = gmp::cmc_svg(report);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
}
