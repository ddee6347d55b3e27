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

#include "gmp/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "binary_io.hpp"
#include "digest.hpp"
#include "gmp/error.hpp"
#include "gmp/imaging.hpp"
#include "gmp/persistence.hpp"
#include "gmp/vocab.hpp"

namespace gmp {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string view_dir(std::uint32_t m) { return "view" + std::to_string(m); }

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// ---- CSV tables -----------------------------------------------------------

std::vector<std::vector<std::string>> read_csv(const fs::path& path,
                                               const std::vector<std::string>& header) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (cells.size() != header.size()) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) +
                        ": expected " + std::to_string(header.size()) + " columns");
    }
    if (rows.empty() && line_no == 1 && cells == header) continue;
    rows.push_back(std::move(cells));
  }
  return rows;
}

struct LabelRow {
  std::string entity_id;
  std::uint32_t view = 0;
  std::string identity;
};

std::vector<LabelRow> read_labels(const fs::path& path) {
  std::vector<LabelRow> out;
  std::set<std::pair<std::uint32_t, std::string>> seen;
  for (auto& row : read_csv(path, {"entity_id", "view", "identity"})) {
    LabelRow r;
    r.entity_id = row[0];
    try {
      std::size_t used = 0;
      const unsigned long v = std::stoul(row[1], &used);
      if (used != row[1].size() || v > 0xffffffffUL) throw std::out_of_range("view");
      r.view = static_cast<std::uint32_t>(v);
    } catch (const std::exception&) {
      throw FormatError(path.string() + ": bad view \"" + row[1] + "\"");
    }
    r.identity = row[2];
    if (r.entity_id.empty() || r.identity.empty()) {
      throw FormatError(path.string() + ": empty entity_id or identity");
    }
    if (!seen.insert({r.view, r.entity_id}).second) {
      throw FormatError(path.string() + ": duplicate entity " + r.entity_id +
                        " in view " + row[1]);
    }
    out.push_back(std::move(r));
  }
  if (out.empty()) throw ArgumentError(path.string() + " lists no entities");
  return out;
}

// identity -> "train" | "test"
std::map<std::string, std::string> read_split(const fs::path& path) {
  std::map<std::string, std::string> out;
  for (auto& row : read_csv(path, {"identity", "split"})) {
    if (row[1] != "train" && row[1] != "test") {
      throw FormatError(path.string() + ": split must be train or test, got \"" +
                        row[1] + "\"");
    }
    out[row[0]] = row[1];
  }
  return out;
}

std::uint32_t count_views(const std::vector<LabelRow>& labels) {
  std::uint32_t views = 0;
  for (const auto& r : labels) views = std::max(views, r.view + 1);
  for (std::uint32_t m = 0; m < views; ++m) {
    if (std::none_of(labels.begin(), labels.end(),
                     [&](const LabelRow& r) { return r.view == m; })) {
      throw FormatError("labels skip view " + std::to_string(m));
    }
  }
  return views;
}

fs::path default_in(const fs::path& given, const fs::path& dir,
                    const char* name) {
  return given.empty() ? dir / name : given;
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_json(const fs::path& path, const json& j) {
  io::write_text(path, j.dump(2) + "\n");
}

// ---- feature extraction -----------------------------------------------------

struct ImageOptions {
  int width, height, patch;
};

std::vector<fs::path> entity_files(const fs::path& data, std::uint32_t view,
                                   const std::string& entity) {
  const fs::path dir = data / view_dir(view) / entity;
  if (!fs::is_directory(dir)) {
    throw FormatError("missing entity directory " + dir.string());
  }
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file()) files.push_back(e.path());
  }
  if (files.empty()) throw FormatError("no images in " + dir.string());
  std::sort(files.begin(), files.end());
  return files;
}

FeatureField features_of(const fs::path& file, const ImageOptions& img) {
  if (file.extension() == ".gmpf") return ingest_feature_field(file);
  ImageGrid grid = load_image(file, img.width, img.height);
  if (grid.channels == 3) grid = rgb_to_hsv(grid);
  return hsv_patch_features(grid, img.patch, img.patch);
}

json kernel_json(const KernelParams& k) {
  return {{"sigma", k.sigma}, {"alpha", k.alpha}, {"stride", k.stride}};
}

KernelParams kernel_from(const json& j) {
  KernelParams k;
  k.sigma = j.at("sigma").get<double>();
  k.alpha = j.at("alpha").get<double>();
  k.stride = j.at("stride").get<std::uint32_t>();
  return k;
}

// ---- encoded directories ----------------------------------------------------

struct EncodedEntity {
  std::string entity_id;
  std::uint32_t view = 0;
  std::string identity;
  fs::path file;
};

struct EncodedIndex {
  std::uint32_t views = 0;
  KernelParams kernel;
  std::string vocab;  // empty when encoded without a vocabulary
  std::vector<EncodedEntity> entities;
};

EncodedIndex read_encoded(const fs::path& dir) {
  const fs::path index = dir / "encode.json";
  if (!fs::exists(index)) {
    throw ArgumentError("no encode.json in " + dir.string());
  }
  const json j = read_json(index);
  try {
    EncodedIndex out;
    out.views = j.at("views").get<std::uint32_t>();
    out.kernel = kernel_from(j.at("kernel"));
    if (!j.at("vocab").is_null()) out.vocab = j.at("vocab").get<std::string>();
    for (const json& e : j.at("entities")) {
      EncodedEntity ent;
      ent.entity_id = e.at("entity_id").get<std::string>();
      ent.view = e.at("view").get<std::uint32_t>();
      ent.identity = e.at("identity").get<std::string>();
      ent.file = dir / e.at("file").get<std::string>();
      if (ent.view >= out.views) throw FormatError("entity view out of range");
      out.entities.push_back(std::move(ent));
    }
    return out;
  } catch (const json::exception& e) {
    throw FormatError(index.string() + ": " + e.what());
  }
}

struct EncodedEntry {
  std::string entity_id;
  std::uint32_t view;
  std::string identity;
  std::string file;
  std::string digest;
  std::size_t entries;
  std::size_t bytes;
};

json write_encoded_index(const fs::path& out, std::uint32_t views,
                         const KernelParams& kernel, const json& vocab,
                         const std::vector<EncodedEntry>& entries) {
  json list = json::array();
  for (const auto& e : entries) {
    list.push_back({{"entity_id", e.entity_id},
                    {"view", e.view},
                    {"identity", e.identity},
                    {"file", e.file},
                    {"sha256", e.digest},
                    {"entries", e.entries},
                    {"bytes", e.bytes}});
  }
  json j = {{"views", views},
            {"kernel", kernel_json(kernel)},
            {"vocab", vocab},
            {"entities", std::move(list)}};
  write_json(out / "encode.json", j);
  return j;
}

EncodedEntry store_entity(const fs::path& out, const std::string& entity_id,
                          std::uint32_t view, const std::string& identity,
                          const AppearanceMap& map) {
  const auto bytes = serialize_entity(map);
  const std::string rel = view_dir(view) + "/" + entity_id + ".gmpe";
  io::write_file(out / rel, bytes);
  return {entity_id, view,        identity,    rel,
          sha256_hex(bytes), map.nnz(), bytes.size()};
}

// Dense identity ids in sorted string order.
std::map<std::string, std::uint32_t> identity_ids(
    const std::vector<EncodedEntity>& entities) {
  std::set<std::string> names;
  for (const auto& e : entities) names.insert(e.identity);
  std::map<std::string, std::uint32_t> ids;
  for (const auto& n : names) ids.emplace(n, static_cast<std::uint32_t>(ids.size()));
  return ids;
}

// Entities whose identity falls in `wanted` ("train"/"test"); all entities
// when no split file is given.
std::vector<EncodedEntity> select(const EncodedIndex& index,
                                  const fs::path& split_path,
                                  const std::string& wanted) {
  if (split_path.empty()) return index.entities;
  const auto split = read_split(split_path);
  std::vector<EncodedEntity> out;
  for (const auto& e : index.entities) {
    auto it = split.find(e.identity);
    if (it != split.end() && it->second == wanted) out.push_back(e);
  }
  return out;
}

std::vector<ViewEntities> load_view_entities(
    std::uint32_t views, const std::vector<EncodedEntity>& entities) {
  const auto ids = identity_ids(entities);
  std::vector<ViewEntities> out(views);
  for (const auto& e : entities) {
    out[e.view].maps.push_back(load_entity(e.file));
    out[e.view].identities.push_back(ids.at(e.identity));
  }
  return out;
}

}  // namespace

// ---- synth -------------------------------------------------------------------

SynthResult run_synth(const SynthOptions& opts) {
  const SynthSpec& spec = opts.spec;
  spec.validate();
  if (!(opts.train_fraction > 0.0 && opts.train_fraction < 1.0)) {
    throw ArgumentError("train fraction must lie in (0, 1)");
  }
  if (opts.feature_dim == 0) throw ArgumentError("feature dim must be >= 1");
  if (!(opts.feature_noise >= 0.0 && opts.feature_noise <= 1.0)) {
    throw ArgumentError("feature noise must lie in [0, 1]");
  }
  opts.truth_kernel.validate();
  if (opts.out.empty()) throw ArgumentError("--out is required");

  const SynthDataset data = generate(spec);
  std::vector<std::pair<std::string, std::string>> files;  // path, digest
  auto record = [&](const std::string& rel, std::span<const std::uint8_t> bytes) {
    io::write_file(opts.out / rel, bytes);
    files.emplace_back(rel, sha256_hex(bytes));
  };
  auto record_text = [&](const std::string& rel, const std::string& text) {
    record(rel, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
  };
  auto entity_id = [](std::uint32_t id) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "id%05u", id);
    return std::string(buf);
  };

  std::string labels = "entity_id,view,identity\n";
  std::vector<EncodedEntry> truth;
  for (std::uint32_t m = 0; m < spec.n_views; ++m) {
    const auto protos = synth_prototypes(spec, m, opts.feature_dim);
    for (const SynthEntity& e : data.views[m]) {
      const std::string eid = entity_id(e.identity);
      labels += eid + "," + std::to_string(m) + "," + std::to_string(e.identity) + "\n";
      for (std::size_t n = 0; n < e.images.size(); ++n) {
        const std::uint64_t seed =
            mix(mix(mix(spec.seed ^ 0x5eedf00dULL) ^ m) ^ e.identity) ^ n;
        const auto field = render_features(e.images[n], protos, opts.feature_dim,
                                           opts.feature_noise, seed);
        record(view_dir(m) + "/" + eid + "/" + std::to_string(n) + ".gmpf",
               encode_feature_field(field));
      }
      const AppearanceMap map = encode_entity(e.images, opts.truth_kernel, m);
      EncodedEntry entry = store_entity(opts.out / "truth", eid, m,
                                        std::to_string(e.identity), map);
      files.emplace_back("truth/" + entry.file, entry.digest);
      truth.push_back(std::move(entry));
    }
  }
  record_text("labels.csv", labels);

  std::vector<std::uint32_t> order(spec.n_identities);
  std::iota(order.begin(), order.end(), 0u);
  std::mt19937_64 rng(mix(spec.seed ^ 0x5b11750ULL));
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_train = static_cast<std::size_t>(std::clamp<long long>(
      std::llround(opts.train_fraction * spec.n_identities), 1,
      static_cast<long long>(spec.n_identities) - 1));
  std::vector<std::string> split_of(spec.n_identities, "test");
  for (std::size_t i = 0; i < n_train; ++i) split_of[order[i]] = "train";
  std::string split = "identity,split\n";
  for (std::uint32_t id = 0; id < spec.n_identities; ++id) {
    split += std::to_string(id) + "," + split_of[id] + "\n";
  }
  record_text("split.csv", split);

  const json truth_index = write_encoded_index(opts.out / "truth", spec.n_views,
                                               opts.truth_kernel, nullptr, truth);
  const std::string truth_text = truth_index.dump(2) + "\n";
  files.emplace_back("truth/encode.json",
                     sha256_hex({reinterpret_cast<const std::uint8_t*>(truth_text.data()),
                                 truth_text.size()}));

  std::sort(files.begin(), files.end());
  json listing = json::array();
  for (const auto& [path, digest] : files) {
    listing.push_back({{"path", path}, {"sha256", digest}});
  }
  const json manifest = {
      {"spec",
       {{"views", spec.n_views},
        {"identities", spec.n_identities},
        {"images_per_entity", spec.images_per_entity},
        {"grid_width", spec.grid_width},
        {"grid_height", spec.grid_height},
        {"parts", spec.n_parts},
        {"k_words", spec.k_words},
        {"word_noise", spec.word_noise},
        {"jitter", spec.jitter},
        {"seed", spec.seed}}},
      {"train_fraction", opts.train_fraction},
      {"feature_dim", opts.feature_dim},
      {"feature_noise", opts.feature_noise},
      {"truth_kernel", kernel_json(opts.truth_kernel)},
      {"files", std::move(listing)}};
  const std::string text = manifest.dump(2) + "\n";
  io::write_text(opts.out / "manifest.json", text);

  SynthResult result;
  result.manifest_digest = sha256_hex(
      {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
  result.summary = "synth: " + std::to_string(spec.n_views) + " views, " +
                   std::to_string(spec.n_identities) + " identities (" +
                   std::to_string(n_train) + " train), " +
                   std::to_string(files.size()) + " files\nmanifest sha256 " +
                   result.manifest_digest + "\n";
  return result;
}

// ---- build-vocab ---------------------------------------------------------------

VocabResult run_build_vocab(const VocabOptions& opts) {
  if (opts.data.empty() || !fs::is_directory(opts.data)) {
    throw ArgumentError("data directory " + opts.data.string() + " not found");
  }
  if (opts.out.empty()) throw ArgumentError("--out is required");
  if (opts.k == 0) throw ArgumentError("--k must be >= 1");
  if (opts.n_features == 0) throw ArgumentError("feature sample size must be >= 1");
  const ImageOptions img{opts.image_width, opts.image_height, opts.patch};
  const auto labels = read_labels(default_in(opts.labels, opts.data, "labels.csv"));
  const fs::path split_path =
      !opts.split.empty() ? opts.split
      : fs::exists(opts.data / "split.csv") ? opts.data / "split.csv"
                                            : fs::path();
  std::map<std::string, std::string> split;
  if (!split_path.empty()) split = read_split(split_path);
  const std::uint32_t views = count_views(labels);

  VocabResult result;
  json index = json::array();
  std::ostringstream summary;
  for (std::uint32_t m = 0; m < views; ++m) {
    std::vector<FeatureField> fields;
    for (const auto& r : labels) {
      if (r.view != m) continue;
      if (!split.empty()) {
        auto it = split.find(r.identity);
        if (it == split.end() || it->second != "train") continue;
      }
      for (const auto& f : entity_files(opts.data, m, r.entity_id)) {
        fields.push_back(features_of(f, img));
      }
    }
    if (fields.empty()) {
      throw ArgumentError("no training images for view " + std::to_string(m));
    }
    const std::uint64_t seed = opts.seed + m;
    const SampleSet samples = sample_training_features(fields, opts.n_features, seed);
    const KMeansResult fit = kmeans_fit(samples, opts.k, seed, opts.max_iter, m);
    const std::string name = "vocab_view" + std::to_string(m);
    const std::string digest = save_vocabulary(opts.out / (name + ".gmpv"), fit.vocabulary);
    io::write_text(opts.out / (name + ".csv"), vocabulary_csv(fit.vocabulary));
    index.push_back({{"view", m},
                     {"file", name + ".gmpv"},
                     {"k", fit.vocabulary.k()},
                     {"dim", fit.vocabulary.dim},
                     {"sha256", digest}});
    result.digests.push_back(digest);
    summary << "view " << m << ": " << fields.size() << " images, "
            << samples.size() << " samples, k=" << fit.vocabulary.k()
            << ", dim=" << fit.vocabulary.dim << ", " << fit.iterations
            << " iterations, inertia "
            << (fit.inertia_trace.empty() ? 0.0 : fit.inertia_trace.back())
            << ", sha256 " << digest << "\n";
  }
  write_json(opts.out / "vocab.json",
             {{"views", views}, {"seed", opts.seed}, {"vocabularies", index}});
  result.summary = summary.str();
  return result;
}

// ---- encode --------------------------------------------------------------------

namespace {

std::vector<Vocabulary> load_vocab_dir(const fs::path& dir) {
  const fs::path index = dir / "vocab.json";
  if (!fs::exists(index)) {
    throw ArgumentError("no vocabulary found in " + dir.string());
  }
  const json j = read_json(index);
  std::vector<Vocabulary> out;
  try {
    for (const json& v : j.at("vocabularies")) {
      out.push_back(load_vocabulary(dir / v.at("file").get<std::string>()));
    }
  } catch (const json::exception& e) {
    throw FormatError(index.string() + ": " + e.what());
  }
  return out;
}

}  // namespace

EncodeResult run_encode(const EncodeOptions& opts) {
  opts.kernel.validate();
  if (opts.data.empty() || !fs::is_directory(opts.data)) {
    throw ArgumentError("data directory " + opts.data.string() + " not found");
  }
  if (opts.vocab.empty()) throw ArgumentError("--vocab is required");
  if (opts.out.empty()) throw ArgumentError("--out is required");
  const auto vocabs = load_vocab_dir(opts.vocab);
  auto labels = read_labels(default_in(opts.labels, opts.data, "labels.csv"));
  const std::uint32_t views = count_views(labels);
  if (vocabs.size() != views) {
    throw ArgumentError("vocabulary covers " + std::to_string(vocabs.size()) +
                        " views, labels list " + std::to_string(views));
  }
  std::sort(labels.begin(), labels.end(), [](const LabelRow& a, const LabelRow& b) {
    return std::tie(a.view, a.entity_id) < std::tie(b.view, b.entity_id);
  });
  const ImageOptions img{opts.image_width, opts.image_height, opts.patch};

  EncodeResult result;
  std::vector<EncodedEntry> entries;
  for (const auto& r : labels) {
    std::vector<WordGrid> stack;
    for (const auto& f : entity_files(opts.data, r.view, r.entity_id)) {
      const FeatureField field = features_of(f, img);
      if (field.dim != vocabs[r.view].dim) {
        throw FormatError(f.string() + ": feature dim " + std::to_string(field.dim) +
                          " does not match the vocabulary");
      }
      stack.push_back(quantize(field, vocabs[r.view]));
    }
    const AppearanceMap map = encode_entity(stack, opts.kernel, r.view);
    entries.push_back(store_entity(opts.out, r.entity_id, r.view, r.identity, map));
  }
  write_encoded_index(opts.out, views, opts.kernel,
                      fs::absolute(opts.vocab).lexically_normal().string(), entries);
  double total_entries = 0.0, total_bytes = 0.0;
  for (const auto& e : entries) {
    total_entries += static_cast<double>(e.entries);
    total_bytes += static_cast<double>(e.bytes);
    result.digests.push_back(e.digest);
  }
  result.entities = entries.size();
  result.mean_entries = total_entries / static_cast<double>(entries.size());
  result.mean_bytes = total_bytes / static_cast<double>(entries.size());
  result.summary = "encoded " + std::to_string(result.entities) +
                   " entities; mean entries " + fmt(result.mean_entries, 1) +
                   "; mean bytes " + fmt(result.mean_bytes, 1) + "\n";
  return result;
}

// ---- train ---------------------------------------------------------------------

TrainResult run_train(const TrainOptions& opts) {
  opts.config.validate();
  if (opts.encoded.empty()) throw ArgumentError("--encoded is required");
  if (opts.out.empty()) throw ArgumentError("--out is required");
  const EncodedIndex index = read_encoded(opts.encoded);
  const auto chosen = select(index, opts.split, "train");

  TrainingData data;
  data.maps.resize(index.views);
  std::vector<std::vector<std::uint32_t>> identities(index.views);
  const auto ids = identity_ids(chosen);
  for (const auto& e : chosen) {
    data.maps[e.view].push_back(load_entity(e.file));
    identities[e.view].push_back(ids.at(e.identity));
  }
  data.samples = sample_groups(identities, opts.config.n_samples,
                               opts.config.pos_fraction, opts.config.seed);
  TrainingRun run = train(data, opts.config);
  run.model.kernel = index.kernel;
  if (!index.vocab.empty()) run.model.vocabs = load_vocab_dir(index.vocab);

  TrainResult result;
  result.model_digest = save_model(opts.out / "model.gmpm", run.model);
  io::write_text(opts.out / "trace.csv", trace_csv(run));
  result.samples = data.samples.size();
  for (const auto& s : data.samples) result.positives += s.group_label > 0;
  result.final_objective = run.trace.empty() ? 0.0 : run.trace.back().objective;

  std::ostringstream summary;
  summary << "train: " << to_string(opts.config.mode) << ", " << result.samples
          << " groups (" << result.positives << " positive), "
          << run.outer_iterations << " outer iterations, "
          << (run.converged ? "converged" : "not converged") << "\n";
  summary << "objective " << run.trace.front().objective << " -> "
          << result.final_objective << "\nbeta";
  for (double b : run.normalized_beta()) summary << " " << fmt(b);
  summary << "\nmodel sha256 " << result.model_digest << "\n";
  result.summary = summary.str();
  return result;
}

// ---- eval ----------------------------------------------------------------------

EvalResult run_eval(const EvalOptions& opts) {
  if (opts.model.empty()) throw ArgumentError("--model is required");
  if (opts.encoded.empty()) throw ArgumentError("--encoded is required");
  if (opts.out.empty()) throw ArgumentError("--out is required");
  if (opts.protocol.trials == 0) throw ArgumentError("--trials must be >= 1");
  const BilinearModel model = load_model(opts.model);
  const EncodedIndex index = read_encoded(opts.encoded);
  if (index.views != model.num_views) {
    throw ArgumentError("model has " + std::to_string(model.num_views) +
                        " views, encodings have " + std::to_string(index.views));
  }
  if (index.kernel.sigma != model.kernel.sigma ||
      index.kernel.alpha != model.kernel.alpha ||
      index.kernel.stride != model.kernel.stride) {
    throw ArgumentError("encodings were made with a different kernel than the model");
  }

  ProtocolConfig cfg = opts.protocol;
  std::string chosen_by;
  if (opts.reduce_auto) {
    if (model.num_views > 2 && !opts.split.empty()) {
      const auto train_views =
          load_view_entities(index.views, select(index, opts.split, "train"));
      double best = -1.0;
      for (ReduceOp op : {ReduceOp::kSum, ReduceOp::kMax}) {
        ProtocolConfig c = cfg;
        c.reduce = op;
        const double auc = evaluate_protocol(model, train_views, c).mean_auc;
        chosen_by += " " + to_string(op) + "=" + fmt(auc);
        if (auc > best) {
          best = auc;
          cfg.reduce = op;
        }
      }
    } else {
      cfg.reduce = ReduceOp::kSum;
    }
  }

  const auto views = load_view_entities(index.views, select(index, opts.split, "test"));
  EvalResult result;
  result.report = evaluate_protocol(model, views, cfg);
  const ProtocolReport& report = result.report;
  io::write_text(opts.out / "cmc.csv", cmc_csv(report));
  io::write_text(opts.out / "cmc.svg", cmc_svg(report));
  io::write_text(opts.out / "auc.csv", auc_csv(report));
  io::write_text(opts.out / "verification.csv", verification_csv(report));

  json pairs = json::array();
  std::ostringstream summary;
  summary << "eval: reduce " << to_string(report.reduce);
  if (!chosen_by.empty()) summary << " (cross-validated:" << chosen_by << ")";
  summary << "\n";
  for (const auto& p : report.pairs) {
    const double rank1 = p.curve.rates.empty() ? 0.0 : p.curve.rates.front();
    pairs.push_back({{"views", {p.views.first, p.views.second}},
                     {"probe_view", p.probe_view},
                     {"gallery_view", p.gallery_view},
                     {"probes", p.probes},
                     {"gallery", p.gallery},
                     {"rank1", rank1},
                     {"auc", p.auc}});
    summary << "views (" << p.views.first << "," << p.views.second
            << "): probes " << p.probes << ", gallery " << p.gallery
            << ", rank-1 " << fmt(rank1) << ", AUC " << fmt(p.auc) << "\n";
  }
  json trials = json::array();
  for (const auto& t : report.trials) {
    trials.push_back({{"seed", t.seed}, {"verification_rate", t.verification_rate}});
  }
  write_json(opts.out / "summary.json",
             {{"reduce", to_string(report.reduce)},
              {"mean_auc", report.mean_auc},
              {"mean_verification_rate", report.mean_verification_rate},
              {"pairs", pairs},
              {"trials", trials}});
  summary << "mean AUC " << fmt(report.mean_auc) << ", verification rate "
          << fmt(report.mean_verification_rate) << " over " << report.trials.size()
          << " trial(s)\n";
  result.summary = summary.str();
  return result;
}

}  // namespace gmp
