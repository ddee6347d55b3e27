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

#ifndef GMP_TESTS_FIXTURES_HPP_
#define GMP_TESTS_FIXTURES_HPP_

#include <vector>

#include "gmp/encoding.hpp"
#include "gmp/eval.hpp"
#include "gmp/synthgen.hpp"
#include "gmp/training.hpp"

namespace fixture {

// Encoded synthetic entities. maps[m][i] is identity ids[m][i] in view m.
struct Encoded {
  std::vector<std::vector<gmp::AppearanceMap>> maps;
  std::vector<std::vector<std::uint32_t>> ids;
};

// Encodes the identities in [first, last) of every view.
inline Encoded encode(const gmp::SynthDataset& data, const gmp::KernelParams& kernel,
                      std::uint32_t first, std::uint32_t last) {
  Encoded out;
  out.maps.resize(data.views.size());
  out.ids.resize(data.views.size());
  for (std::uint32_t m = 0; m < data.views.size(); ++m) {
    for (std::uint32_t i = first; i < last; ++i) {
      const auto& e = data.views[m][i];
      out.maps[m].push_back(gmp::encode_entity(e.images, kernel, m));
      out.ids[m].push_back(e.identity);
    }
  }
  return out;
}

inline gmp::TrainingData training_data(const Encoded& enc, std::size_t n, double pos,
                                       std::uint64_t seed) {
  gmp::TrainingData d;
  d.maps = enc.maps;
  d.samples = gmp::sample_groups(enc.ids, n, pos, seed);
  return d;
}

inline std::vector<gmp::ViewEntities> view_entities(const Encoded& enc) {
  std::vector<gmp::ViewEntities> out(enc.maps.size());
  for (std::size_t m = 0; m < enc.maps.size(); ++m) {
    out[m].maps = enc.maps[m];
    out[m].identities = enc.ids[m];
  }
  return out;
}

// Rebuilds the model state recorded in a parameter snapshot.
inline gmp::BilinearModel with_parameters(gmp::BilinearModel model,
                                          const gmp::ParameterSnapshot& s) {
  for (std::size_t p = 0; p < model.pair_weights.size(); ++p) {
    model.pair_weights[p].values = s.pair_weights[p];
  }
  model.shared.values = s.shared;
  model.coeffs.beta = s.beta;
  return model;
}

}  // namespace fixture

#endif  // GMP_TESTS_FIXTURES_HPP_
