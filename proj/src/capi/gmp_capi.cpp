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

#include "gmp/gmpr.h"

#include <cstring>
#include <filesystem>
#include <new>
#include <string>
#include <vector>

#include "gmp/encoding.hpp"
#include "gmp/error.hpp"
#include "gmp/persistence.hpp"
#include "gmp/pipeline.hpp"
#include "gmp/scoring.hpp"

struct gmpr_model {
  gmp::BilinearModel model;
};

struct gmpr_entity {
  gmp::AppearanceMap map;
};

namespace {

thread_local std::string last_error;

template <typename F>
gmpr_status guarded(F&& f) {
  try {
    f();
    last_error.clear();
    return GMPR_OK;
  } catch (const gmp::Error& e) {
    last_error = e.what();
    return static_cast<gmpr_status>(static_cast<int>(e.kind()));
  } catch (const std::filesystem::filesystem_error& e) {
    last_error = e.what();
    return GMPR_E_DATA;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return GMPR_E_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return GMPR_E_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return GMPR_E_INTERNAL;
  }
}

template <typename T>
const T& need(const T* p, const char* what) {
  if (p == nullptr) throw gmp::ArgumentError(std::string(what) + " is null");
  return *p;
}

std::filesystem::path need_path(const char* s) {
  if (s == nullptr || *s == '\0') throw gmp::ArgumentError("path is null or empty");
  return s;
}

std::filesystem::path path_or_empty(const char* s) {
  return s == nullptr ? std::filesystem::path() : std::filesystem::path(s);
}

void emit(gmpr_message_fn fn, void* user, const std::string& text) {
  if (fn != nullptr && !text.empty()) fn(text.c_str(), user);
}

void copy_digest(const std::string& digest, char* out) {
  if (out == nullptr) return;
  std::memset(out, 0, GMPR_DIGEST_SIZE);
  std::memcpy(out, digest.data(), std::min<std::size_t>(digest.size(), GMPR_DIGEST_SIZE - 1));
}

}  // namespace

extern "C" {

const char* gmpr_last_error(void) { return last_error.c_str(); }

const char* gmpr_version(void) { return "1.0.0"; }

gmpr_status gmpr_model_load(const char* path, gmpr_model** out) {
  return guarded([&] {
    if (out == nullptr) throw gmp::ArgumentError("output handle is null");
    *out = nullptr;
    auto model = gmp::load_model(need_path(path));
    *out = new gmpr_model{std::move(model)};
  });
}

gmpr_status gmpr_model_save(const gmpr_model* model, const char* path,
                          char digest[GMPR_DIGEST_SIZE]) {
  return guarded([&] {
    const auto d = gmp::save_model(need_path(path), need(model, "model").model);
    copy_digest(d, digest);
  });
}

void gmpr_model_free(gmpr_model* model) { delete model; }

gmpr_status gmpr_model_num_views(const gmpr_model* model, uint32_t* out) {
  return guarded([&] {
    if (out == nullptr) throw gmp::ArgumentError("output is null");
    *out = need(model, "model").model.num_views;
  });
}

gmpr_status gmpr_model_beta(const gmpr_model* model, double* out, size_t capacity,
                          size_t* count) {
  return guarded([&] {
    const auto& beta = need(model, "model").model.coeffs.beta;
    if (count != nullptr) *count = beta.size();
    if (out == nullptr) return;
    if (capacity < beta.size()) throw gmp::ArgumentError("beta buffer too small");
    std::copy(beta.begin(), beta.end(), out);
  });
}

gmpr_status gmpr_entity_load(const char* path, gmpr_entity** out) {
  return guarded([&] {
    if (out == nullptr) throw gmp::ArgumentError("output handle is null");
    *out = nullptr;
    auto map = gmp::load_entity(need_path(path));
    *out = new gmpr_entity{std::move(map)};
  });
}

gmpr_status gmpr_entity_save(const gmpr_entity* entity, const char* path) {
  return guarded([&] { gmp::save_entity(need_path(path), need(entity, "entity").map); });
}

void gmpr_entity_free(gmpr_entity* entity) { delete entity; }

gmpr_status gmpr_entity_info(const gmpr_entity* entity, uint32_t* view,
                           uint32_t* k, uint64_t* nnz) {
  return guarded([&] {
    const auto& map = need(entity, "entity").map;
    if (view != nullptr) *view = map.view();
    if (k != nullptr) *k = map.k();
    if (nnz != nullptr) *nnz = map.nnz();
  });
}

gmpr_status gmpr_pair_score(const gmpr_model* model, size_t pair,
                          const gmpr_entity* a, const gmpr_entity* b,
                          double* out) {
  return guarded([&] {
    if (out == nullptr) throw gmp::ArgumentError("output is null");
    const auto& m = need(model, "model").model;
    if (pair >= m.pair_weights.size()) throw gmp::ArgumentError("pair index out of range");
    *out = gmp::pair_score(need(a, "entity a").map, need(b, "entity b").map,
                           m.pair_weights[pair], m.shared);
  });
}

gmpr_status gmpr_group_score(const gmpr_model* model,
                           const gmpr_entity* const* entities, size_t count,
                           double* out) {
  return guarded([&] {
    if (out == nullptr) throw gmp::ArgumentError("output is null");
    if (entities == nullptr && count > 0) throw gmp::ArgumentError("entities is null");
    std::vector<gmp::AppearanceMap> maps;
    maps.reserve(count);
    for (size_t i = 0; i < count; ++i) maps.push_back(need(entities[i], "entity").map);
    *out = gmp::group_score(maps, need(model, "model").model);
  });
}

void gmpr_synth_options_default(gmpr_synth_options* o) {
  if (o == nullptr) return;
  const gmp::SynthOptions d;
  *o = gmpr_synth_options{};
  o->views = d.spec.n_views;
  o->identities = d.spec.n_identities;
  o->images_per_entity = d.spec.images_per_entity;
  o->grid_width = d.spec.grid_width;
  o->grid_height = d.spec.grid_height;
  o->parts = d.spec.n_parts;
  o->k_words = d.spec.k_words;
  o->word_noise = d.spec.word_noise;
  o->jitter = d.spec.jitter;
  o->seed = d.spec.seed;
  o->train_fraction = d.train_fraction;
  o->feature_dim = d.feature_dim;
  o->feature_noise = d.feature_noise;
  o->sigma = d.truth_kernel.sigma;
  o->alpha = d.truth_kernel.alpha;
  o->stride = d.truth_kernel.stride;
}

void gmpr_vocab_options_default(gmpr_vocab_options* o) {
  if (o == nullptr) return;
  const gmp::VocabOptions d;
  *o = gmpr_vocab_options{};
  o->k = d.k;
  o->n_features = d.n_features;
  o->max_iter = d.max_iter;
  o->seed = d.seed;
  o->image_width = d.image_width;
  o->image_height = d.image_height;
  o->patch = d.patch;
}

void gmpr_encode_options_default(gmpr_encode_options* o) {
  if (o == nullptr) return;
  const gmp::EncodeOptions d;
  *o = gmpr_encode_options{};
  o->sigma = d.kernel.sigma;
  o->alpha = d.kernel.alpha;
  o->stride = d.kernel.stride;
  o->image_width = d.image_width;
  o->image_height = d.image_height;
  o->patch = d.patch;
}

void gmpr_train_options_default(gmpr_train_options* o) {
  if (o == nullptr) return;
  const gmp::TrainConfig d;
  *o = gmpr_train_options{};
  o->lambda1 = d.lambda1;
  o->lambda2 = d.lambda2;
  o->lambda3 = d.lambda3;
  o->mode = "multi-view";
  o->max_outer = d.max_outer;
  o->outer_tol = d.outer_tol;
  o->n_samples = d.n_samples;
  o->pos_fraction = d.pos_fraction;
  o->seed = d.seed;
  o->svm_tol = d.svm_tol;
  o->svm_max_pass = d.svm_max_pass;
}

void gmpr_eval_options_default(gmpr_eval_options* o) {
  if (o == nullptr) return;
  const gmp::ProtocolConfig d;
  *o = gmpr_eval_options{};
  o->reduce = "sum";
  o->trials = d.trials;
  o->seed = d.seed;
  o->max_rank = d.max_rank;
  o->verification_groups = d.verification_groups;
}

gmpr_status gmpr_run_synth(const gmpr_synth_options* opts, gmpr_message_fn fn,
                         void* user) {
  return guarded([&] {
    const auto& o = need(opts, "options");
    gmp::SynthOptions s;
    s.spec.n_views = o.views;
    s.spec.n_identities = o.identities;
    s.spec.images_per_entity = o.images_per_entity;
    s.spec.grid_width = o.grid_width;
    s.spec.grid_height = o.grid_height;
    s.spec.n_parts = o.parts;
    s.spec.k_words = o.k_words;
    s.spec.word_noise = o.word_noise;
    s.spec.jitter = o.jitter;
    s.spec.seed = o.seed;
    s.train_fraction = o.train_fraction;
    s.feature_dim = o.feature_dim;
    s.feature_noise = o.feature_noise;
    s.truth_kernel = {o.sigma, o.alpha, o.stride};
    s.out = path_or_empty(o.out);
    emit(fn, user, gmp::run_synth(s).summary);
  });
}

gmpr_status gmpr_run_build_vocab(const gmpr_vocab_options* opts,
                               gmpr_message_fn fn, void* user) {
  return guarded([&] {
    const auto& o = need(opts, "options");
    gmp::VocabOptions v;
    v.data = path_or_empty(o.data);
    v.labels = path_or_empty(o.labels);
    v.split = path_or_empty(o.split);
    v.k = o.k;
    v.n_features = o.n_features;
    v.max_iter = o.max_iter;
    v.seed = o.seed;
    v.image_width = o.image_width;
    v.image_height = o.image_height;
    v.patch = o.patch;
    v.out = path_or_empty(o.out);
    emit(fn, user, gmp::run_build_vocab(v).summary);
  });
}

gmpr_status gmpr_run_encode(const gmpr_encode_options* opts, gmpr_message_fn fn,
                          void* user) {
  return guarded([&] {
    const auto& o = need(opts, "options");
    gmp::EncodeOptions e;
    e.data = path_or_empty(o.data);
    e.labels = path_or_empty(o.labels);
    e.vocab = path_or_empty(o.vocab);
    e.kernel = {o.sigma, o.alpha, o.stride};
    e.image_width = o.image_width;
    e.image_height = o.image_height;
    e.patch = o.patch;
    e.out = path_or_empty(o.out);
    emit(fn, user, gmp::run_encode(e).summary);
  });
}

gmpr_status gmpr_run_train(const gmpr_train_options* opts, gmpr_message_fn fn,
                         void* user) {
  return guarded([&] {
    const auto& o = need(opts, "options");
    gmp::TrainOptions t;
    t.encoded = path_or_empty(o.encoded);
    t.split = path_or_empty(o.split);
    t.config.lambda1 = o.lambda1;
    t.config.lambda2 = o.lambda2;
    t.config.lambda3 = o.lambda3;
    t.config.mode = gmp::parse_train_mode(o.mode == nullptr ? "" : o.mode);
    t.config.max_outer = o.max_outer;
    t.config.outer_tol = o.outer_tol;
    t.config.n_samples = o.n_samples;
    t.config.pos_fraction = o.pos_fraction;
    t.config.seed = o.seed;
    t.config.svm_tol = o.svm_tol;
    t.config.svm_max_pass = o.svm_max_pass;
    t.out = path_or_empty(o.out);
    emit(fn, user, gmp::run_train(t).summary);
  });
}

gmpr_status gmpr_run_eval(const gmpr_eval_options* opts, gmpr_message_fn fn,
                        void* user) {
  return guarded([&] {
    const auto& o = need(opts, "options");
    gmp::EvalOptions e;
    e.model = path_or_empty(o.model);
    e.encoded = path_or_empty(o.encoded);
    e.split = path_or_empty(o.split);
    const std::string reduce = o.reduce == nullptr ? "sum" : o.reduce;
    if (reduce == "auto") {
      e.reduce_auto = true;
    } else {
      e.protocol.reduce = gmp::parse_reduce_op(reduce);
    }
    e.protocol.trials = o.trials;
    e.protocol.seed = o.seed;
    e.protocol.max_rank = o.max_rank;
    e.protocol.verification_groups = o.verification_groups;
    e.out = path_or_empty(o.out);
    emit(fn, user, gmp::run_eval(e).summary);
  });
}

}  // extern "C"
