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

#include "gmp/persistence.hpp"

#include <cmath>
#include <map>
#include <json.hpp>

#include "binary_io.hpp"
#include "digest.hpp"
#include "gmp/error.hpp"

namespace gmp {
namespace {

using nlohmann::json;
constexpr std::string_view kMagic = "GMPC";

struct Array {
  std::string name;
  std::span<const double> values;
};

std::vector<std::uint8_t> write_container(const std::string& kind, json meta,
                                          const std::vector<Array>& arrays) {
  io::ByteWriter payload;
  json list = json::array();
  std::uint64_t offset = 0;
  for (const Array& a : arrays) {
    list.push_back({{"name", a.name},
                    {"dtype", "f64"},
                    {"offset", offset},
                    {"count", a.values.size()}});
    for (double v : a.values) payload.put(v);
    offset += a.values.size() * sizeof(double);
  }
  json header = {{"kind", kind},
                 {"version", kContainerVersion},
                 {"digest", sha256_hex(payload.bytes())},
                 {"arrays", std::move(list)},
                 {"meta", std::move(meta)}};
  const std::string text = header.dump();
  io::ByteWriter out;
  out.put_bytes(kMagic);
  out.put(kContainerVersion);
  out.put(static_cast<std::uint64_t>(text.size()));
  out.put_bytes(text);
  auto bytes = out.take();
  const auto& p = payload.bytes();
  bytes.insert(bytes.end(), p.begin(), p.end());
  return bytes;
}

class Container {
 public:
  Container(std::span<const std::uint8_t> bytes, const std::string& kind)
      : reader_(bytes, kind + " file") {
    reader_.expect_magic(kMagic);
    const std::size_t version_at = reader_.offset();
    const auto version = reader_.get<std::uint32_t>("version");
    if (version == 0 || version > kContainerVersion) {
      reader_.fail(version_at, "unsupported version " + std::to_string(version));
    }
    const std::size_t len_at = reader_.offset();
    const auto len = reader_.get<std::uint64_t>("header length");
    if (len > reader_.remaining()) reader_.fail(len_at, "header length exceeds file");
    const std::size_t header_at = reader_.offset();
    auto text = reader_.get_span(static_cast<std::size_t>(len), "header");
    try {
      header_ = json::parse(text.begin(), text.end());
      if (header_.at("kind").get<std::string>() != kind) {
        reader_.fail(header_at, "container holds a " +
                                    header_.at("kind").get<std::string>());
      }
      payload_at_ = reader_.offset();
      payload_ = reader_.get_span(reader_.remaining(), "payload");
      if (sha256_hex(payload_) != header_.at("digest").get<std::string>()) {
        reader_.fail(payload_at_, "payload digest mismatch");
      }
      std::uint64_t expected = 0;
      for (const json& a : header_.at("arrays")) {
        if (a.at("dtype").get<std::string>() != "f64") {
          reader_.fail(header_at, "unsupported dtype");
        }
        const auto offset = a.at("offset").get<std::uint64_t>();
        const auto count = a.at("count").get<std::uint64_t>();
        if (offset != expected) reader_.fail(header_at, "arrays are not contiguous");
        expected += count * sizeof(double);
        arrays_[a.at("name").get<std::string>()] = {offset, count};
      }
      if (expected != payload_.size()) {
        reader_.fail(payload_at_, "payload size does not match the array table");
      }
    } catch (const json::exception& e) {
      reader_.fail(header_at, std::string("bad header: ") + e.what());
    }
  }

  const json& meta() const { return header_.at("meta"); }

  std::vector<double> array(const std::string& name) const {
    auto it = arrays_.find(name);
    if (it == arrays_.end()) reader_.fail(payload_at_, "missing array " + name);
    io::ByteReader r(payload_.subspan(it->second.first,
                                      it->second.second * sizeof(double)),
                     name);
    std::vector<double> values(it->second.second);
    for (double& v : values) {
      v = r.get<double>("value");
      if (!std::isfinite(v)) {
        reader_.fail(payload_at_ + it->second.first, "non-finite value in " + name);
      }
    }
    return values;
  }

  template <typename F>
  auto guarded(F&& f) const {
    try {
      return f();
    } catch (const json::exception& e) {
      throw FormatError(std::string("bad container metadata: ") + e.what());
    }
  }

  std::string digest() const { return header_.at("digest").get<std::string>(); }

 private:
  io::ByteReader reader_;
  json header_;
  std::span<const std::uint8_t> payload_;
  std::size_t payload_at_ = 0;
  std::map<std::string, std::pair<std::uint64_t, std::uint64_t>> arrays_;
};

json vocab_meta(const Vocabulary& v) {
  return {{"view", v.view}, {"dim", v.dim}, {"k", v.k()}, {"seed", v.seed}};
}

Vocabulary vocab_from(const json& meta, std::vector<double> centroids) {
  Vocabulary v;
  v.view = meta.at("view").get<std::uint32_t>();
  v.dim = meta.at("dim").get<std::size_t>();
  v.seed = meta.at("seed").get<std::uint64_t>();
  const auto k = meta.at("k").get<std::size_t>();
  if (v.dim == 0 || centroids.size() != k * v.dim) {
    throw FormatError("vocabulary shape does not match its centroid array");
  }
  v.centroids = std::move(centroids);
  return v;
}

}  // namespace

std::vector<std::uint8_t> encode_model(const BilinearModel& model) {
  model.validate();
  json pairs = json::array();
  std::vector<Array> arrays;
  for (std::size_t p = 0; p < model.pair_weights.size(); ++p) {
    const PairWeights& w = model.pair_weights[p];
    pairs.push_back({{"first", w.views.first},
                     {"second", w.views.second},
                     {"rows", w.rows},
                     {"cols", w.cols}});
    arrays.push_back({"pair_weights/" + std::to_string(p), w.values});
  }
  arrays.push_back({"shared", model.shared.values});
  arrays.push_back({"beta", model.coeffs.beta});
  json vocabs = json::array();
  for (std::size_t m = 0; m < model.vocabs.size(); ++m) {
    vocabs.push_back(vocab_meta(model.vocabs[m]));
    arrays.push_back({"vocab/" + std::to_string(m), model.vocabs[m].centroids});
  }
  json config;
  try {
    config = json::parse(model.config_json);
  } catch (const json::exception&) {
    throw ArgumentError("model config snapshot is not valid JSON");
  }
  json meta = {{"num_views", model.num_views},
               {"kernel", {{"sigma", model.kernel.sigma},
                           {"alpha", model.kernel.alpha},
                           {"stride", model.kernel.stride},
                           {"metric", "chessboard"}}},
               {"pairs", std::move(pairs)},
               {"vocabs", std::move(vocabs)},
               {"config", std::move(config)}};
  return write_container("model", std::move(meta), arrays);
}

BilinearModel decode_model(std::span<const std::uint8_t> bytes) {
  Container c(bytes, "model");
  BilinearModel model = c.guarded([&] {
    const json& meta = c.meta();
    BilinearModel m;
    m.num_views = meta.at("num_views").get<std::uint32_t>();
    const json& k = meta.at("kernel");
    m.kernel.sigma = k.at("sigma").get<double>();
    m.kernel.alpha = k.at("alpha").get<double>();
    m.kernel.stride = k.at("stride").get<std::uint32_t>();
    const json& pairs = meta.at("pairs");
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      PairWeights w;
      w.views = {pairs[p].at("first").get<std::uint32_t>(),
                 pairs[p].at("second").get<std::uint32_t>()};
      w.rows = pairs[p].at("rows").get<std::uint32_t>();
      w.cols = pairs[p].at("cols").get<std::uint32_t>();
      w.values = c.array("pair_weights/" + std::to_string(p));
      m.pair_weights.push_back(std::move(w));
    }
    m.shared.values = c.array("shared");
    m.coeffs.beta = c.array("beta");
    const json& vocabs = meta.at("vocabs");
    for (std::size_t v = 0; v < vocabs.size(); ++v) {
      m.vocabs.push_back(vocab_from(vocabs[v], c.array("vocab/" + std::to_string(v))));
    }
    m.config_json = meta.at("config").dump();
    return m;
  });
  try {
    model.validate();
  } catch (const ArgumentError& e) {
    throw FormatError(std::string("model file is inconsistent: ") + e.what());
  }
  return model;
}

std::vector<std::uint8_t> encode_vocabulary(const Vocabulary& vocab) {
  if (vocab.dim == 0 || vocab.k() == 0 ||
      vocab.centroids.size() != vocab.k() * vocab.dim) {
    throw ArgumentError("vocabulary is empty or ragged");
  }
  return write_container("vocabulary", vocab_meta(vocab),
                         {{"centroids", vocab.centroids}});
}

Vocabulary decode_vocabulary(std::span<const std::uint8_t> bytes) {
  Container c(bytes, "vocabulary");
  return c.guarded([&] { return vocab_from(c.meta(), c.array("centroids")); });
}

std::string container_digest(std::span<const std::uint8_t> bytes) {
  io::ByteReader r(bytes, "container");
  r.expect_magic(kMagic);
  r.get<std::uint32_t>("version");
  const auto len = r.get<std::uint64_t>("header length");
  if (len > r.remaining()) r.fail(r.offset(), "header length exceeds file");
  r.get_span(static_cast<std::size_t>(len), "header");
  return sha256_hex(r.get_span(r.remaining(), "payload"));
}

std::string save_model(const std::filesystem::path& path,
                       const BilinearModel& model) {
  const auto bytes = encode_model(model);
  io::write_file(path, bytes);
  return container_digest(bytes);
}

BilinearModel load_model(const std::filesystem::path& path) {
  return decode_model(io::read_file(path));
}

std::string save_vocabulary(const std::filesystem::path& path,
                            const Vocabulary& vocab) {
  const auto bytes = encode_vocabulary(vocab);
  io::write_file(path, bytes);
  return container_digest(bytes);
}

Vocabulary load_vocabulary(const std::filesystem::path& path) {
  return decode_vocabulary(io::read_file(path));
}

}  // namespace gmp
