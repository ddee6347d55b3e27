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

#ifndef GMP_PIPELINE_HPP_
#define GMP_PIPELINE_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "gmp/encoding.hpp"
#include "gmp/eval.hpp"
#include "gmp/synthgen.hpp"
#include "gmp/training.hpp"

// File-level commands. A dataset directory holds
//   view<m>/<entity_id>/<image or .gmpf files>
//   labels.csv  (entity_id,view,identity)
//   split.csv   (identity,split) with split "train" or "test", optional.
// Encoded directories hold view<m>/<entity_id>.gmpe plus encode.json.
namespace gmp {

struct SynthOptions {
  SynthSpec spec;
  double train_fraction = 0.5;
  std::uint32_t feature_dim = 12;
  double feature_noise = 0.05;  // uniform amplitude around word prototypes
  KernelParams truth_kernel;    // for the ground-truth encodings
  std::filesystem::path out;
};

struct VocabOptions {
  std::filesystem::path data;
  std::filesystem::path labels;  // empty: <data>/labels.csv
  std::filesystem::path split;   // empty: <data>/split.csv when present
  std::size_t k = 300;
  std::size_t n_features = 20000;
  std::size_t max_iter = 100;
  std::uint64_t seed = 0;
  int image_width = 48;
  int image_height = 128;
  int patch = 2;
  std::filesystem::path out;
};

struct EncodeOptions {
  std::filesystem::path data;
  std::filesystem::path labels;  // empty: <data>/labels.csv
  std::filesystem::path vocab;
  KernelParams kernel;
  int image_width = 48;
  int image_height = 128;
  int patch = 2;
  std::filesystem::path out;
};

struct TrainOptions {
  std::filesystem::path encoded;
  std::filesystem::path split;  // empty: every encoded entity trains
  TrainConfig config;
  std::filesystem::path out;
};

struct EvalOptions {
  std::filesystem::path model;
  std::filesystem::path encoded;
  std::filesystem::path split;  // empty: every encoded entity is evaluated
  ProtocolConfig protocol;
  bool reduce_auto = false;  // pick sum or max by AUC on the train split
  std::filesystem::path out;
};

struct SynthResult {
  std::string manifest_digest;
  std::string summary;
};

struct VocabResult {
  std::vector<std::string> digests;  // one per view
  std::string summary;
};

struct EncodeResult {
  std::size_t entities = 0;
  double mean_entries = 0.0;
  double mean_bytes = 0.0;
  std::vector<std::string> digests;  // in encode.json order
  std::string summary;
};

struct TrainResult {
  std::string model_digest;
  std::size_t samples = 0;
  std::size_t positives = 0;
  double final_objective = 0.0;
  std::string summary;
};

struct EvalResult {
  ProtocolReport report;
  std::string summary;
};

SynthResult run_synth(const SynthOptions& opts);
VocabResult run_build_vocab(const VocabOptions& opts);
EncodeResult run_encode(const EncodeOptions& opts);
TrainResult run_train(const TrainOptions& opts);
EvalResult run_eval(const EvalOptions& opts);

}  // namespace gmp

#endif  // GMP_PIPELINE_HPP_
