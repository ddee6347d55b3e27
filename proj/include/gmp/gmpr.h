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

#ifndef GMP_GMPR_H_
#define GMP_GMPR_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(GMPR_BUILDING_LIBRARY)
#define GMPR_API __declspec(dllexport)
#else
#define GMPR_API __declspec(dllimport)
#endif
#else
#define GMPR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. Nonzero codes match the CLI exit codes. */
typedef enum gmpr_status {
  GMPR_OK = 0,
  GMPR_E_INTERNAL = 1,
  GMPR_E_USAGE = 2,
  GMPR_E_DATA = 3,
  GMPR_E_NUMERIC = 4
} gmpr_status;

/* Message of the last failed call on this thread; "" after success. */
GMPR_API const char* gmpr_last_error(void);
GMPR_API const char* gmpr_version(void);

/* Buffer size for hex SHA-256 digests, terminator included. */
#define GMPR_DIGEST_SIZE 65

typedef struct gmpr_model gmpr_model;
typedef struct gmpr_entity gmpr_entity;

GMPR_API gmpr_status gmpr_model_load(const char* path, gmpr_model** out);
GMPR_API gmpr_status gmpr_model_save(const gmpr_model* model, const char* path,
                                  char digest[GMPR_DIGEST_SIZE]);
GMPR_API void gmpr_model_free(gmpr_model* model);
GMPR_API gmpr_status gmpr_model_num_views(const gmpr_model* model,
                                       uint32_t* out);
GMPR_API gmpr_status gmpr_model_beta(const gmpr_model* model, double* out,
                                  size_t capacity, size_t* count);

GMPR_API gmpr_status gmpr_entity_load(const char* path, gmpr_entity** out);
GMPR_API gmpr_status gmpr_entity_save(const gmpr_entity* entity,
                                   const char* path);
GMPR_API void gmpr_entity_free(gmpr_entity* entity);
GMPR_API gmpr_status gmpr_entity_info(const gmpr_entity* entity, uint32_t* view,
                                   uint32_t* k, uint64_t* nnz);

/* Score of one view pair (index into the unordered pairs i<j in
   lexicographic order), without beta. */
GMPR_API gmpr_status gmpr_pair_score(const gmpr_model* model, size_t pair,
                                  const gmpr_entity* a, const gmpr_entity* b,
                                  double* out);
/* Beta-weighted group score; entities[m] is the entity seen in view m. */
GMPR_API gmpr_status gmpr_group_score(const gmpr_model* model,
                                   const gmpr_entity* const* entities,
                                   size_t count, double* out);

/* Progress and summary text from the run functions. */
typedef void (*gmpr_message_fn)(const char* text, void* user);

typedef struct gmpr_synth_options {
  uint32_t views;
  uint32_t identities;
  uint32_t images_per_entity;
  uint32_t grid_width;
  uint32_t grid_height;
  uint32_t parts;
  uint32_t k_words;
  double word_noise;
  uint32_t jitter;
  uint64_t seed;
  double train_fraction;
  uint32_t feature_dim;
  double feature_noise;
  double sigma;
  double alpha;
  uint32_t stride;
  const char* out;
} gmpr_synth_options;

typedef struct gmpr_vocab_options {
  const char* data;
  const char* labels; /* NULL: <data>/labels.csv */
  const char* split;  /* NULL: <data>/split.csv when present */
  uint64_t k;
  uint64_t n_features;
  uint64_t max_iter;
  uint64_t seed;
  int32_t image_width;
  int32_t image_height;
  int32_t patch;
  const char* out;
} gmpr_vocab_options;

typedef struct gmpr_encode_options {
  const char* data;
  const char* labels;
  const char* vocab;
  double sigma;
  double alpha;
  uint32_t stride;
  int32_t image_width;
  int32_t image_height;
  int32_t patch;
  const char* out;
} gmpr_encode_options;

typedef struct gmpr_train_options {
  const char* encoded;
  const char* split; /* NULL: all encoded entities */
  double lambda1;
  double lambda2;
  double lambda3;
  const char* mode; /* "multi-view", "double-view" or "direct" */
  uint64_t max_outer;
  double outer_tol;
  uint64_t n_samples;
  double pos_fraction;
  uint64_t seed;
  double svm_tol;
  uint64_t svm_max_pass;
  const char* out;
} gmpr_train_options;

typedef struct gmpr_eval_options {
  const char* model;
  const char* encoded;
  const char* split;
  const char* reduce; /* "sum", "max" or "auto" */
  uint64_t trials;
  uint64_t seed;
  uint64_t max_rank;
  uint64_t verification_groups;
  const char* out;
} gmpr_eval_options;

GMPR_API void gmpr_synth_options_default(gmpr_synth_options* opts);
GMPR_API void gmpr_vocab_options_default(gmpr_vocab_options* opts);
GMPR_API void gmpr_encode_options_default(gmpr_encode_options* opts);
GMPR_API void gmpr_train_options_default(gmpr_train_options* opts);
GMPR_API void gmpr_eval_options_default(gmpr_eval_options* opts);

GMPR_API gmpr_status gmpr_run_synth(const gmpr_synth_options* opts,
                                 gmpr_message_fn on_message, void* user);
GMPR_API gmpr_status gmpr_run_build_vocab(const gmpr_vocab_options* opts,
                                       gmpr_message_fn on_message, void* user);
GMPR_API gmpr_status gmpr_run_encode(const gmpr_encode_options* opts,
                                  gmpr_message_fn on_message, void* user);
GMPR_API gmpr_status gmpr_run_train(const gmpr_train_options* opts,
                                 gmpr_message_fn on_message, void* user);
GMPR_API gmpr_status gmpr_run_eval(const gmpr_eval_options* opts,
                                gmpr_message_fn on_message, void* user);

#ifdef __cplusplus
}
#endif

#endif /* GMP_GMPR_H_ */
