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


// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "generators.hpp"
#include "gmp/encoding.hpp"
#include "gmp/eval.hpp"
#include "gmp/persistence.hpp"
#include "gmp/pipeline.hpp"
#include "gmp/scoring.hpp"
#include "gmp/solver.hpp"
#include "gmp/synthgen.hpp"
#include "gmp/training.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

// ---- 1 ---------------------------------------------------------------------

Outcome kernel_encoding_oracle() {
  gen::Rng rng(1001);
  double worst = 0.0, encode_s = 0.0;
  for (int i = 0; i < 100; ++i) {
    const gmp::KernelParams kp{i % 2 ? 3.0 : 1.0, (i / 2) % 2 ? 6.0 : 2.0,
                               static_cast<std::uint32_t>((i / 4) % 2 ? 2 : 1)};
    const std::vector<gmp::WordGrid> stack{i % 3 ? gen::blob_grid(rng, 16, 12, 8)
                                                 : gen::word_grid(rng, 16, 12, 8)};
    const auto t0 = Clock::now();
    const auto map = gmp::encode_entity(stack, kp);
    encode_s += seconds_since(t0);
    const auto got = oracle::dense(map);
    const auto ref = oracle::appearance(stack, kp.sigma, kp.alpha, static_cast<int>(kp.stride));
    if (got.size() != ref.size()) return {false, "shape mismatch"};
    for (std::size_t j = 0; j < ref.size(); ++j) worst = std::max(worst, std::abs(got[j] - ref[j]));
  }
  return {worst <= 1e-12 && encode_s < 5.0,
          fmt("max abs err %.3g (<= 1e-12), encode time %.3f s (< 5 s)", worst, encode_s)};
}

// ---- 2 ---------------------------------------------------------------------

Outcome distance_transform_oracle() {
  gen::Rng rng(1002);
  std::size_t mismatches = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::uint32_t w = gen::uniform(rng, 1, 32), h = gen::uniform(rng, 1, 32);
    const double density = i % 10 == 0 ? 0.0 : gen::real(rng, 0.0, 0.3);
    std::bernoulli_distribution seed(density);
    std::vector<std::uint8_t> seeds(static_cast<std::size_t>(w) * h);
    for (auto& s : seeds) s = seed(rng);
    const auto dt = gmp::chessboard_dt(seeds, w, h);
    const auto ref = oracle::distance_field(seeds, static_cast<int>(w), static_cast<int>(h));
    for (std::size_t j = 0; j < ref.size(); ++j) {
      const std::int64_t got =
          dt.distances[j] == gmp::kUnreachable ? oracle::kInf : dt.distances[j];
      mismatches += got != ref[j];
    }
  }
  return {mismatches == 0, fmt("%.0f mismatching cells over 1000 grids (exact)", mismatches)};
}

// ---- 3 ---------------------------------------------------------------------

Outcome implicit_vs_dense() {
  gen::Rng rng(1003);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const std::uint32_t views = gen::uniform(rng, 2, 3);
    const std::uint32_t w = gen::uniform(rng, 2, 8), h = gen::uniform(rng, 2, 8);
    gmp::KernelParams kp{gen::real(rng, 0.5, 3.0), gen::real(rng, 1.0, 6.0), 1};
    while (gmp::LocationGrid{w, h, kp.stride}.size() > 30) ++kp.stride;
    std::vector<std::uint32_t> ks;
    std::vector<std::vector<gmp::WordGrid>> stacks(views);
    std::vector<gmp::AppearanceMap> maps;
    std::vector<std::vector<double>> dense;
    for (std::uint32_t m = 0; m < views; ++m) {
      ks.push_back(gen::uniform(rng, 1, 10));
      stacks[m].push_back(gen::blob_grid(rng, w, h, ks[m]));
      maps.push_back(gmp::encode_entity(stacks[m], kp, m));
      dense.push_back(oracle::dense(maps[m]));
    }
    const std::size_t locations = maps[0].num_locations();
    auto model = gen::model(rng, ks, locations);
    model.kernel = kp;
    auto rel = [](double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); };
    const auto pairs = gmp::all_view_pairs(views);
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const auto [a, b] = pairs[p];
      const double fast = gmp::pair_score(maps[a], maps[b], model.pair_weights[p], model.shared);
      const double ref = oracle::dense_pair_score(dense[a], dense[b], ks[a], ks[b], locations,
                                                  model.pair_weights[p].values,
                                                  model.shared.values);
      worst = std::max(worst, rel(fast, ref));
    }
    const std::vector<std::size_t> kk(ks.begin(), ks.end());
    const double g = gmp::group_score(maps, model);
    worst = std::max(worst, rel(g, oracle::dense_group_score(dense, kk, locations, model)));
    worst = std::max(worst, rel(g, gmp::oracle_group_score(stacks, model)));
  }
  return {worst <= 1e-10, fmt("max relative err %.3g (<= 1e-10)", worst)};
}

// ---- 4, 5, 7: training ------------------------------------------------------

gmp::SynthSpec training_spec(std::uint32_t views, std::uint32_t identities, std::uint64_t seed) {
  gmp::SynthSpec s;
  s.n_views = views;
  s.n_identities = identities;
  s.grid_width = 16;
  s.grid_height = 24;
  s.n_parts = 12;
  s.k_words = 20;
  s.word_noise = 0.1;
  s.jitter = 1;
  s.seed = seed;
  return s;
}

const gmp::KernelParams kTrainKernel{3.0, 6.0, 2};

gmp::TrainConfig training_config(gmp::TrainMode mode) {
  gmp::TrainConfig c;
  c.mode = mode;
  c.max_outer = 20;
  c.outer_tol = 0.0;
  c.record_parameters = true;
  c.seed = 17;
  return c;
}

Outcome monotone_half_steps() {
  const auto data = gmp::generate(training_spec(3, 30, 2004));
  const auto enc = fixture::encode(data, kTrainKernel, 0, 30);
  const auto d = fixture::training_data(enc, 600, 0.5, 3);
  std::string detail;
  bool pass = true;
  for (auto mode : {gmp::TrainMode::kMultiView, gmp::TrainMode::kDoubleView}) {
    const auto cfg = training_config(mode);
    const auto run = gmp::train(d, cfg);
    std::size_t violations = 0;
    double worst_recompute = 0.0;
    double prev = 0.0;
    for (std::size_t i = 0; i < run.parameters.size(); ++i) {
      const double obj =
          gmp::training_objective(d, fixture::with_parameters(run.model, run.parameters[i]), cfg);
      worst_recompute = std::max(worst_recompute, std::abs(obj - run.trace[i].objective) /
                                                      (1.0 + std::abs(obj)));
      if (i > 0 && obj > prev + 1e-9 * (1.0 + std::abs(prev))) ++violations;
      for (double b : run.parameters[i].beta) violations += b < 0.0;
      prev = obj;
    }
    const bool ok = violations == 0 && run.outer_iterations == 20 && worst_recompute <= 1e-9;
    pass = pass && ok;
    detail += gmp::to_string(mode) + ": " + std::to_string(run.trace.size() - 1) +
              " half-steps, " + std::to_string(violations) + " increases; ";
  }
  return {pass, detail + "slack 1e-9*(1+|obj|), 20 outer iterations, M=3, 30 identities"};
}

Outcome two_view_equivalence() {
  const auto data = gmp::generate(training_spec(2, 30, 2005));
  const auto enc = fixture::encode(data, kTrainKernel, 0, 30);
  const auto d = fixture::training_data(enc, 600, 0.5, 4);
  const auto a = gmp::train(d, training_config(gmp::TrainMode::kMultiView));
  const auto b = gmp::train(d, training_config(gmp::TrainMode::kDoubleView));
  if (a.parameters.size() != b.parameters.size()) return {false, "trace lengths differ"};
  double worst = 0.0;
  auto cmp = [&](const std::vector<double>& x, const std::vector<double>& y) {
    for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, std::abs(x[i] - y[i]));
  };
  for (std::size_t i = 0; i < a.parameters.size(); ++i) {
    cmp(a.parameters[i].pair_weights[0], b.parameters[i].pair_weights[0]);
    cmp(a.parameters[i].shared, b.parameters[i].shared);
    cmp(a.parameters[i].beta, b.parameters[i].beta);
    worst = std::max(worst, std::abs(a.trace[i].objective - b.trace[i].objective));
  }
  return {worst <= 1e-9, fmt("max parameter difference %.3g over %.0f snapshots (<= 1e-9)",
                             worst, static_cast<double>(a.parameters.size()))};
}

Outcome beta_sanity() {
  // Views 0 and 1 carry identity. View 2 is label-independent noise: every
  // group gets its own freshly drawn, fully corrupted image.
  const auto data = gmp::generate(training_spec(3, 30, 2007));
  const auto enc = fixture::encode(data, kTrainKernel, 0, 30);
  auto d = fixture::training_data(enc, 600, 0.5, 5);
  auto noise_spec = training_spec(2, 2, 0);
  noise_spec.word_noise = 1.0;
  d.maps[2].clear();
  for (std::size_t i = 0; i < d.samples.size(); ++i) {
    noise_spec.seed = 20000 + i;
    const auto noise = gmp::generate(noise_spec);
    d.maps[2].push_back(gmp::encode_entity(noise.views[0][0].images, kTrainKernel, 2));
    d.samples[i].entities[2] = static_cast<std::uint32_t>(i);
  }
  std::string detail;
  bool pass = true;
  for (auto mode : {gmp::TrainMode::kMultiView, gmp::TrainMode::kDoubleView}) {
    auto cfg = training_config(mode);
    cfg.max_outer = 8;
    cfg.outer_tol = 1e-4;
    const auto run = gmp::train(d, cfg);
    const auto& beta = run.model.coeffs.beta;  // (0,1), (0,2), (1,2)
    bool ok = beta[0] > beta[1] && beta[0] > beta[2];
    for (const auto& snap : run.parameters)
      for (double b : snap.beta) ok = ok && b >= 0.0;
    pass = pass && ok;
    detail += gmp::to_string(mode) + fmt(" beta=(%.4g, %.4g, %.4g); ", beta[0], beta[1], beta[2]);
  }
  return {pass, detail + "need beta(0,1) strictly largest and beta >= 0"};
}

// ---- 6 ---------------------------------------------------------------------

struct EndToEnd {
  double rank1 = 0.0;
  double seconds = 0.0;
};

EndToEnd run_end_to_end(double noise, std::uint32_t jitter, const std::string& tag) {
  testutil::TempDir dir("acceptance_" + tag);
  const auto t0 = Clock::now();
  gmp::SynthOptions so;
  so.spec.n_views = 2;
  so.spec.n_identities = 100;
  so.spec.n_parts = 20;
  so.spec.k_words = 50;
  so.spec.word_noise = noise;
  so.spec.jitter = jitter;
  so.spec.seed = 6;
  so.train_fraction = 0.5;
  so.out = dir / "data";
  gmp::run_synth(so);

  gmp::VocabOptions vo;
  vo.data = dir / "data";
  vo.k = 50;
  vo.seed = 6;
  vo.out = dir / "vocab";
  gmp::run_build_vocab(vo);

  gmp::EncodeOptions eo;
  eo.data = dir / "data";
  eo.vocab = dir / "vocab";
  eo.kernel = {3.0, 6.0, 4};
  eo.out = dir / "encoded";
  gmp::run_encode(eo);

  gmp::TrainOptions to;
  to.encoded = dir / "encoded";
  to.split = dir / "data" / "split.csv";
  to.config.n_samples = 3000;
  to.config.seed = 6;
  to.out = dir / "model";
  gmp::run_train(to);

  gmp::EvalOptions ev;
  ev.model = dir / "model" / "model.gmpm";
  ev.encoded = dir / "encoded";
  ev.split = dir / "data" / "split.csv";
  ev.out = dir / "report";
  const auto report = gmp::run_eval(ev).report;
  EndToEnd r;
  r.rank1 = report.pairs.at(0).curve.rates.at(0);
  r.seconds = seconds_since(t0);
  return r;
}

Outcome synthetic_end_to_end() {
  const auto noisy = run_end_to_end(0.1, 1, "noisy");
  const auto clean = run_end_to_end(0.0, 0, "clean");
  const bool pass = noisy.rank1 >= 0.90 && clean.rank1 >= 0.99 && noisy.seconds < 60.0 &&
                    clean.seconds < 60.0;
  return {pass, fmt("noisy rank-1 %.3f (>= 0.90) in %.1f s; noiseless rank-1 %.3f (>= 0.99) "
                    "in %.1f s (< 60 s each)",
                    noisy.rank1, noisy.seconds, clean.rank1, clean.seconds)};
}

// ---- 8 ---------------------------------------------------------------------

Outcome metric_oracles() {
  gen::Rng rng(1008);
  std::size_t exact_fail = 0;
  double mean_err = 0.0;
  for (int i = 0; i < 100; ++i) {
    // cmc
    const std::size_t rows = gen::uniform(rng, 1, 20), cols = gen::uniform(rng, 1, 30);
    gmp::ScoreMatrix m{rows, cols, {}};
    std::vector<std::vector<double>> dense(rows);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) {
        const double v = i % 2 ? gen::uniform(rng, 0, 3) : gen::real(rng, -1, 1);
        m.values.push_back(v);
        dense[r].push_back(v);
      }
    }
    std::vector<std::size_t> truth;
    for (std::size_t r = 0; r < rows; ++r) truth.push_back(gen::uniform(rng, 0, cols - 1));
    const auto curve = gmp::cmc(m, truth);
    exact_fail += curve.rates != oracle::cmc(dense, truth, cols);

    // cmc_auc
    long double sum = 0.0L;
    for (double r : curve.rates) sum += r;
    mean_err = std::max(mean_err, std::abs(gmp::cmc_auc(curve) -
                                           static_cast<double>(sum / curve.rates.size())));

    // verification_rate
    std::vector<gmp::ScoredLabel> items;
    std::size_t right = 0;
    const double t = gen::real(rng, -0.5, 0.5);
    for (std::size_t j = 0, n = gen::uniform(rng, 1, 100); j < n; ++j) {
      items.push_back({gen::real(rng, -1, 1), gen::uniform(rng, 0, 1) ? 1 : -1});
      right += (items.back().score >= t ? 1 : -1) == items.back().label;
    }
    exact_fail += gmp::verification_rate(items, t) !=
                  static_cast<double>(right) / static_cast<double>(items.size());

    // reduce_tensor
    const std::size_t n0 = gen::uniform(rng, 1, 6), n1 = gen::uniform(rng, 1, 6),
                      n2 = gen::uniform(rng, 1, 6);
    gmp::ScoreTensor tensor{{n0, n1, n2}, {}};
    for (std::size_t j = 0; j < n0 * n1 * n2; ++j) tensor.values.push_back(gen::real(rng, -2, 2));
    const int a = static_cast<int>(gen::uniform(rng, 0, 2));
    const int b = (a + 1 + static_cast<int>(gen::uniform(rng, 0, 1))) % 3;
    const gmp::ViewPair keep{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)};
    exact_fail += gmp::reduce_tensor(tensor, keep, gmp::ReduceOp::kMax).values !=
                  oracle::reduce3(tensor.values, n0, n1, n2, a, b, true);
    const auto s = gmp::reduce_tensor(tensor, keep, gmp::ReduceOp::kSum).values;
    const auto ref = oracle::reduce3(tensor.values, n0, n1, n2, a, b, false);
    for (std::size_t j = 0; j < ref.size(); ++j) mean_err = std::max(mean_err, std::abs(s[j] - ref[j]));
  }
  return {exact_fail == 0 && mean_err <= 1e-12,
          fmt("%.0f counting mismatches (exact), max error of means/sums %.3g (<= 1e-12)",
              static_cast<double>(exact_fail), mean_err)};
}

// ---- 9 ---------------------------------------------------------------------

Outcome svm_correctness() {
  gen::Rng rng(1009);
  double worst = 0.0;
  auto rel = [](double a, double b) { return std::abs(a - b) / std::max(1e-12, std::abs(b)); };
  for (int i = 0; i < 20; ++i) {
    const auto pts = gen::separable(rng, gen::uniform(rng, 2, 30));
    const double lambda = gen::real(rng, 0.05, 3.0);
    gmp::SvmProblem p(2, lambda);
    for (const auto& q : pts) {
      const double row[2] = {q.x, q.y};
      p.add_dense_row(row, q.label);
    }
    const auto s = gmp::svm_train(p, 1e-10, 200000, static_cast<std::uint64_t>(i));
    worst = std::max(worst, rel(s.objective, oracle::svm_reference2(pts, lambda, false)));
  }
  // Single point at lambda 2 and 0.5, and a symmetric pair at lambda 1.
  const double e1[2] = {1, 0}, neg[2] = {-1, 0};
  const std::pair<double, double> singles[] = {{2.0, 0.75}, {0.5, 0.25}};
  for (const auto& [lambda, expect] : singles) {
    gmp::SvmProblem p(2, lambda);
    p.add_dense_row(e1, 1);
    worst = std::max(worst, rel(gmp::svm_train(p, 1e-12, 1000, 0).objective, expect));
  }
  gmp::SvmProblem pair(2, 1.0);
  pair.add_dense_row(e1, 1);
  pair.add_dense_row(neg, -1);
  worst = std::max(worst, rel(gmp::svm_train(pair, 1e-12, 1000, 0).objective, 0.5));
  return {worst <= 1e-6, fmt("max relative objective gap %.3g over 23 problems (<= 1e-6)", worst)};
}

// ---- 10 --------------------------------------------------------------------

Outcome efficiency() {
  gmp::SynthSpec spec;
  spec.n_identities = 8;
  spec.grid_width = 48;
  spec.grid_height = 128;
  spec.n_parts = 20;
  spec.k_words = 300;
  spec.word_noise = 0.1;
  spec.jitter = 1;
  spec.seed = 10;
  const auto data = gmp::generate(spec);
  gen::Rng rng(1010);
  std::string detail;
  bool pass = true;
  for (std::uint32_t stride : {4u, 2u}) {
    const gmp::KernelParams kp{3.0, 6.0, stride};
    std::vector<gmp::AppearanceMap> a, b;
    std::size_t largest = 0;
    for (std::uint32_t i = 0; i < spec.n_identities; ++i) {
      a.push_back(gmp::encode_entity(data.views[0][i].images, kp, 0));
      b.push_back(gmp::encode_entity(data.views[1][i].images, kp, 1));
      largest = std::max({largest, gmp::serialize_entity(a.back()).size(),
                          gmp::serialize_entity(b.back()).size()});
    }
    const auto model = gen::model(rng, {300, 300}, a[0].num_locations());
    // Warm up, then time every (a, b) combination several times.
    double sink = gmp::pair_score(a[0], b[0], model.pair_weights[0], model.shared);
    const int reps = 5;
    const auto t0 = Clock::now();
    for (int r = 0; r < reps; ++r)
      for (const auto& x : a)
        for (const auto& y : b) sink += gmp::pair_score(x, y, model.pair_weights[0], model.shared);
    const double ms = 1e3 * seconds_since(t0) / (reps * a.size() * b.size());
    const bool time_ok = ms <= 10.0 && std::isfinite(sink);
    const bool size_ok = stride != 4 || largest <= 300 * 1024;
    pass = pass && time_ok && size_ok;
    detail += fmt("|h|=%.0f: %.3f ms/pair score (<= 10 ms), largest file %.1f KB", 
                  static_cast<double>(a[0].num_locations()), ms, largest / 1024.0);
    detail += stride == 4 ? " (<= 300 KB); " : "";
  }
  return {pass, detail};
}

// ---- 11 --------------------------------------------------------------------

Outcome persistence() {
  gen::Rng rng(1011);
  testutil::TempDir dir("acceptance_persist");
  const gmp::LocationGrid grid{6, 5, 1};
  auto model = gen::model(rng, {7, 5, 6}, grid.size());
  model.kernel = {2.0, 5.0, 1};
  std::size_t failures = 0;

  const auto bytes = gmp::encode_model(model);
  gmp::save_model(dir / "m.gmpm", model);
  const auto loaded = gmp::load_model(dir / "m.gmpm");
  failures += gmp::encode_model(loaded) != bytes;
  failures += testutil::read_bytes(dir / "m.gmpm") != bytes;

  for (int i = 0; i < 20; ++i) {
    const auto map = gen::sparse_map(rng, 1, 5, grid, 0.4);
    gmp::save_entity(dir / "e.gmpe", map);
    const auto once = gmp::load_entity(dir / "e.gmpe");
    gmp::save_entity(dir / "f.gmpe", once);
    failures += testutil::read_bytes(dir / "e.gmpe") != testutil::read_bytes(dir / "f.gmpe");
    failures += !(gmp::load_entity(dir / "f.gmpe") == once);
  }

  std::size_t differing = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::vector<gmp::AppearanceMap> maps{gen::sparse_map(rng, 0, 7, grid, 0.3),
                                               gen::sparse_map(rng, 1, 5, grid, 0.3),
                                               gen::sparse_map(rng, 2, 6, grid, 0.3)};
    const double x = gmp::group_score(maps, model);
    const double y = gmp::group_score(maps, loaded);
    differing += std::bit_cast<std::uint64_t>(x) != std::bit_cast<std::uint64_t>(y);
  }
  return {failures == 0 && differing == 0,
          fmt("%.0f round-trip mismatches, %.0f of 1000 reloaded scores differ (bit-exact)",
              static_cast<double>(failures), static_cast<double>(differing))};
}

}  // namespace

// Optional arguments select criteria by number; default runs all.
int main(int argc, char** argv) {
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"kernel/encoding oracle", kernel_encoding_oracle},
      {"distance-transform oracle", distance_transform_oracle},
      {"implicit vs dense scoring", implicit_vs_dense},
      {"monotone half-steps", monotone_half_steps},
      {"two-view trainer equivalence", two_view_equivalence},
      {"synthetic end-to-end", synthetic_end_to_end},
      {"beta sanity", beta_sanity},
      {"metric oracles", metric_oracles},
      {"svm correctness", svm_correctness},
      {"efficiency", efficiency},
      {"persistence", persistence},
  };
  int failed = 0;
  int id = 1;
  for (const auto& [name, check] : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) {
      ++id;
      continue;
    }
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", id++, name, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
