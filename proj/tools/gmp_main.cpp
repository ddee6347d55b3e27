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

#include <CLI11.hpp>
#include <cstdint>
#include <cstdio>
#include <string>

#include "gmp/gmpr.h"

namespace {

void print(const char* text, void*) { std::fputs(text, stdout); }

int finish(gmpr_status status) {
  if (status != GMPR_OK) {
    std::fprintf(stderr, "gmp: %s\n", gmpr_last_error());
  }
  return static_cast<int>(status);
}

const char* opt(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Group membership prediction: vocabularies, encoding, bilinear training and evaluation"};
  app.set_version_flag("--version", std::string(gmpr_version()));
  app.require_subcommand(1);

  // synth
  gmpr_synth_options synth;
  gmpr_synth_options_default(&synth);
  std::string synth_out;
  auto* s = app.add_subcommand("synth", "Write a synthetic multi-view dataset");
  s->add_option("--views", synth.views, "Number of views")->capture_default_str();
  s->add_option("--identities", synth.identities, "Number of identities")->capture_default_str();
  s->add_option("--images", synth.images_per_entity, "Images per entity")->capture_default_str();
  s->add_option("--width", synth.grid_width, "Grid width")->capture_default_str();
  s->add_option("--height", synth.grid_height, "Grid height")->capture_default_str();
  s->add_option("--parts", synth.parts, "Latent part count")->capture_default_str();
  s->add_option("--k", synth.k_words, "Words per view")->capture_default_str();
  s->add_option("--noise", synth.word_noise, "Word corruption probability")->capture_default_str();
  s->add_option("--jitter", synth.jitter, "Max part displacement in pixels")->capture_default_str();
  s->add_option("--seed", synth.seed, "RNG seed")->capture_default_str();
  s->add_option("--train-fraction", synth.train_fraction, "Share of identities in the train split")->capture_default_str();
  s->add_option("--feature-dim", synth.feature_dim, "Dimension of rendered features")->capture_default_str();
  s->add_option("--feature-noise", synth.feature_noise, "Feature noise amplitude")->capture_default_str();
  s->add_option("--sigma", synth.sigma, "Kernel sigma for the truth encodings")->capture_default_str();
  s->add_option("--alpha", synth.alpha, "Kernel cutoff for the truth encodings")->capture_default_str();
  s->add_option("--stride", synth.stride, "Location stride for the truth encodings")->capture_default_str();
  s->add_option("--out", synth_out, "Output directory")->required();

  // build-vocab
  gmpr_vocab_options vocab;
  gmpr_vocab_options_default(&vocab);
  std::string vocab_data, vocab_labels, vocab_split, vocab_out;
  auto* v = app.add_subcommand("build-vocab", "Fit one K-Means vocabulary per view");
  v->add_option("--data", vocab_data, "Dataset directory")->required();
  v->add_option("--labels", vocab_labels, "Labels CSV (default <data>/labels.csv)");
  v->add_option("--split", vocab_split, "Split CSV (default <data>/split.csv if present)");
  v->add_option("--k", vocab.k, "Words per view")->capture_default_str();
  v->add_option("--n-features", vocab.n_features, "Features sampled per view")->capture_default_str();
  v->add_option("--max-iter", vocab.max_iter, "K-Means iteration cap")->capture_default_str();
  v->add_option("--seed", vocab.seed, "RNG seed")->capture_default_str();
  v->add_option("--image-width", vocab.image_width, "Resize width for images")->capture_default_str();
  v->add_option("--image-height", vocab.image_height, "Resize height for images")->capture_default_str();
  v->add_option("--patch", vocab.patch, "Patch side for HSV features")->capture_default_str();
  v->add_option("--out", vocab_out, "Output directory")->required();

  // encode
  gmpr_encode_options enc;
  gmpr_encode_options_default(&enc);
  std::string enc_data, enc_labels, enc_vocab, enc_out;
  auto* e = app.add_subcommand("encode", "Encode entities into appearance maps");
  e->add_option("--data", enc_data, "Dataset directory")->required();
  e->add_option("--labels", enc_labels, "Labels CSV (default <data>/labels.csv)");
  e->add_option("--vocab", enc_vocab, "Vocabulary directory")->required();
  e->add_option("--sigma", enc.sigma, "Kernel sigma")->capture_default_str();
  e->add_option("--alpha", enc.alpha, "Kernel cutoff distance")->capture_default_str();
  e->add_option("--stride", enc.stride, "Location grid stride")->capture_default_str();
  e->add_option("--image-width", enc.image_width, "Resize width for images")->capture_default_str();
  e->add_option("--image-height", enc.image_height, "Resize height for images")->capture_default_str();
  e->add_option("--patch", enc.patch, "Patch side for HSV features")->capture_default_str();
  e->add_option("--out", enc_out, "Output directory")->required();

  // train
  gmpr_train_options tr;
  gmpr_train_options_default(&tr);
  std::string tr_encoded, tr_split, tr_out, tr_mode = tr.mode;
  auto* t = app.add_subcommand("train", "Train a bilinear group-membership model");
  t->add_option("--encoded", tr_encoded, "Encoded entity directory")->required();
  t->add_option("--split", tr_split, "Split CSV; train identities are used");
  t->add_option("--lambda1", tr.lambda1, "Pair weight regulariser")->capture_default_str();
  t->add_option("--lambda2", tr.lambda2, "Location weight regulariser")->capture_default_str();
  t->add_option("--lambda3", tr.lambda3, "Pair coefficient regulariser")->capture_default_str();
  t->add_option("--mode", tr_mode, "multi-view | double-view | direct")->capture_default_str();
  t->add_option("--max-outer", tr.max_outer, "Outer iteration cap")->capture_default_str();
  t->add_option("--outer-tol", tr.outer_tol, "Relative objective tolerance")->capture_default_str();
  t->add_option("--n-samples", tr.n_samples, "Training groups")->capture_default_str();
  t->add_option("--pos-fraction", tr.pos_fraction, "Positive group share")->capture_default_str();
  t->add_option("--seed", tr.seed, "RNG seed")->capture_default_str();
  t->add_option("--svm-tol", tr.svm_tol, "SVM stopping tolerance")->capture_default_str();
  t->add_option("--svm-max-pass", tr.svm_max_pass, "SVM pass cap")->capture_default_str();
  t->add_option("--out", tr_out, "Output directory")->required();

  // eval
  gmpr_eval_options ev;
  gmpr_eval_options_default(&ev);
  std::string ev_model, ev_encoded, ev_split, ev_out, ev_reduce = ev.reduce;
  auto* r = app.add_subcommand("eval", "Rank and verify with a trained model");
  r->add_option("--model", ev_model, "Model file")->required();
  r->add_option("--encoded", ev_encoded, "Encoded entity directory")->required();
  r->add_option("--split", ev_split, "Split CSV; test identities are evaluated");
  r->add_option("--reduce", ev_reduce, "sum | max | auto")
      ->check(CLI::IsMember({"sum", "max", "auto"}))
      ->capture_default_str();
  r->add_option("--trials", ev.trials, "Verification trials")->capture_default_str();
  r->add_option("--seed", ev.seed, "RNG seed")->capture_default_str();
  r->add_option("--max-rank", ev.max_rank, "CMC rank cap (0: gallery size)")->capture_default_str();
  r->add_option("--verification-groups", ev.verification_groups,
                "Groups per verification trial (0: twice the smallest view)")
      ->capture_default_str();
  r->add_option("--out", ev_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : 2;
  }

  if (s->parsed()) {
    synth.out = opt(synth_out);
    return finish(gmpr_run_synth(&synth, print, nullptr));
  }
  if (v->parsed()) {
    vocab.data = opt(vocab_data);
    vocab.labels = opt(vocab_labels);
    vocab.split = opt(vocab_split);
    vocab.out = opt(vocab_out);
    return finish(gmpr_run_build_vocab(&vocab, print, nullptr));
  }
  if (e->parsed()) {
    enc.data = opt(enc_data);
    enc.labels = opt(enc_labels);
    enc.vocab = opt(enc_vocab);
    enc.out = opt(enc_out);
    return finish(gmpr_run_encode(&enc, print, nullptr));
  }
  if (t->parsed()) {
    tr.encoded = opt(tr_encoded);
    tr.split = opt(tr_split);
    tr.mode = tr_mode.c_str();
    tr.out = opt(tr_out);
    return finish(gmpr_run_train(&tr, print, nullptr));
  }
  ev.model = opt(ev_model);
  ev.encoded = opt(ev_encoded);
  ev.split = opt(ev_split);
  ev.reduce = ev_reduce.c_str();
  ev.out = opt(ev_out);
  return finish(gmpr_run_eval(&ev, print, nullptr));
}
