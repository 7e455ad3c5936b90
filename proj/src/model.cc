// Copyright 2026 The conlid Authors.
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

#include "conlid/model.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "conlid/error.h"
#include "conlid/random.h"

namespace conlid {

namespace {

void PutU32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void PutString(std::string& out, std::string_view s) {
  if (s.size() > std::numeric_limits<uint32_t>::max()) {
    throw DataError("string too long to serialize");
  }
  PutU32(out, static_cast<uint32_t>(s.size()));
  out.append(s);
}

void PutFloats(std::string& out, std::span<const float> values) {
  for (float f : values) PutU32(out, std::bit_cast<uint32_t>(f));
}

uint32_t CheckedU32(size_t v, const char* what) {
  if (v > std::numeric_limits<uint32_t>::max()) {
    throw DataError(std::string(what) + " does not fit the model file header");
  }
  return static_cast<uint32_t>(v);
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  uint32_t U32(const char* section) {
    Need(4, section);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i]))
           << (8 * i);
    }
    pos_ += 4;
    return v;
  }

  std::string String(const char* section) {
    const uint32_t len = U32(section);
    Need(len, section);
    std::string s(bytes_.substr(pos_, len));
    pos_ += len;
    return s;
  }

  void Floats(std::span<float> out, const char* section) {
    Need(out.size() * 4, section);
    for (float& f : out) f = std::bit_cast<float>(U32(section));
  }

  bool AtEnd() const { return pos_ == bytes_.size(); }

 private:
  void Need(size_t n, const char* section) const {
    if (bytes_.size() - pos_ < n) throw FormatError(section, "truncated");
  }

  std::string_view bytes_;
  size_t pos_ = 0;
};

}  // namespace

Model Model::Initialize(const EncoderConfig& config, LabelIndex labels,
                        Vocabulary vocab, uint64_t seed) {
  config.Validate();
  if (labels.size() == 0) throw DataError("model needs at least one label");
  Model m;
  m.config = config;
  m.labels = std::move(labels);
  m.vocab = std::move(vocab);
  const size_t rows = m.vocab.size() + static_cast<size_t>(config.bucket);
  m.params.embeddings = Matrix<float>(rows, config.dim);
  Rng rng(seed);
  const double bound = 1.0 / config.dim;
  for (float& v : m.params.embeddings.data()) {
    v = static_cast<float>(rng.uniform(-bound, bound));
  }
  m.params.head_weights = Matrix<float>(m.labels.size(), config.dim, 0.0f);
  m.params.head_bias.assign(m.labels.size(), 0.0f);
  return m;
}

void Model::Validate() const {
  config.Validate();
  const size_t rows = vocab.size() + static_cast<size_t>(config.bucket);
  const auto d = static_cast<size_t>(config.dim);
  if (params.embeddings.rows() != rows || params.embeddings.cols() != d) {
    throw DataError("embedding table shape does not match config");
  }
  if (params.head_weights.rows() != labels.size() ||
      params.head_weights.cols() != d || params.head_bias.size() != labels.size()) {
    throw DataError("classifier head shape does not match label set");
  }
  auto finite = [](float v) { return std::isfinite(v); };
  if (!std::all_of(params.embeddings.data().begin(), params.embeddings.data().end(), finite) ||
      !std::all_of(params.head_weights.data().begin(), params.head_weights.data().end(), finite) ||
      !std::all_of(params.head_bias.begin(), params.head_bias.end(), finite)) {
    throw DataError("model contains non-finite parameters");
  }
}

std::vector<double> Softmax(std::span<const double> logits) {
  std::vector<double> probs(logits.size());
  if (logits.empty()) return probs;
  const double max = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (size_t c = 0; c < logits.size(); ++c) {
    probs[c] = std::exp(logits[c] - max);
    sum += probs[c];
  }
  for (double& p : probs) p /= sum;
  return probs;
}

std::vector<double> HeadLogits(const ModelParams& params,
                               std::span<const double> embedding) {
  const size_t classes = params.head_weights.rows();
  std::vector<double> logits(classes);
  for (size_t c = 0; c < classes; ++c) {
    const auto w = params.head_weights.row(c);
    double acc = params.head_bias[c];
    for (size_t k = 0; k < w.size(); ++k) acc += static_cast<double>(w[k]) * embedding[k];
    logits[c] = acc;
  }
  return logits;
}

ForwardResult Forward(const Model& model, std::string_view text) {
  const auto enc = EncodeFeatures(model.vocab, model.config, text);
  ForwardResult r;
  r.embedding = MeanEmbedding(model.params.embeddings.data(), model.dim(),
                              enc.feature_ids);
  r.logits = HeadLogits(model.params, r.embedding);
  r.probs = Softmax(r.logits);
  r.unk_ngram_ratio = enc.unk_ngram_ratio;
  return r;
}

std::string SerializeModel(const Model& model) {
  model.Validate();
  const auto seen = model.vocab.sorted_seen_ngrams();
  std::string out;
  out.append(kModelMagic, 4);
  PutU32(out, kModelVersion);
  PutU32(out, CheckedU32(model.config.dim, "dim"));
  PutU32(out, CheckedU32(model.config.bucket, "bucket"));
  PutU32(out, CheckedU32(model.config.minn, "minn"));
  PutU32(out, CheckedU32(model.config.maxn, "maxn"));
  PutU32(out, CheckedU32(model.labels.size(), "num_classes"));
  PutU32(out, CheckedU32(model.vocab.size(), "vocab_size"));
  PutU32(out, CheckedU32(seen.size(), "seen_ngram_count"));
  for (const auto& l : model.labels.labels()) PutString(out, l);
  for (const auto& w : model.vocab.words()) PutString(out, w);
  for (const auto& g : seen) PutString(out, g);
  PutFloats(out, model.params.embeddings.data());
  PutFloats(out, model.params.head_weights.data());
  PutFloats(out, model.params.head_bias);
  return out;
}

Model DeserializeModel(std::string_view bytes) {
  Reader in(bytes);
  if (bytes.size() < 4) throw FormatError("magic", "truncated");
  if (std::memcmp(bytes.data(), kModelMagic, 4) != 0) {
    throw FormatError("magic", "bad magic, expected \"CLID\"");
  }
  in.U32("magic");
  const uint32_t version = in.U32("version");
  if (version != kModelVersion) {
    throw FormatError("version", "unsupported version " + std::to_string(version) +
                                     " (expected " + std::to_string(kModelVersion) + ")");
  }
  EncoderConfig config;
  config.dim = static_cast<int>(in.U32("header"));
  config.bucket = static_cast<int>(in.U32("header"));
  config.minn = static_cast<int>(in.U32("header"));
  config.maxn = static_cast<int>(in.U32("header"));
  const uint32_t num_classes = in.U32("header");
  const uint32_t vocab_size = in.U32("header");
  const uint32_t seen_count = in.U32("header");
  // min_count only matters while building a vocabulary.
  config.min_count = 0;
  try {
    config.Validate();
  } catch (const ConfigError& e) {
    throw FormatError("header", e.what());
  }
  if (num_classes == 0) throw FormatError("header", "zero classes");

  std::vector<std::string> labels;
  labels.reserve(num_classes);
  for (uint32_t i = 0; i < num_classes; ++i) labels.push_back(in.String("labels"));
  std::vector<std::string> words;
  words.reserve(vocab_size);
  for (uint32_t i = 0; i < vocab_size; ++i) words.push_back(in.String("vocabulary"));
  std::unordered_set<std::string> seen;
  seen.reserve(seen_count);
  for (uint32_t i = 0; i < seen_count; ++i) seen.insert(in.String("seen_ngrams"));

  Model m;
  m.config = config;
  m.labels = LabelIndex(labels);
  if (m.labels.labels() != labels) {
    throw FormatError("labels", "labels must be unique and sorted");
  }
  try {
    m.vocab = Vocabulary(std::move(words), std::move(seen));
  } catch (const DataError& e) {
    throw FormatError("vocabulary", e.what());
  }
  const size_t rows = static_cast<size_t>(vocab_size) + config.bucket;
  if (rows * config.dim > bytes.size()) {
    throw FormatError("embeddings", "truncated");
  }
  m.params.embeddings = Matrix<float>(rows, config.dim);
  in.Floats(m.params.embeddings.data(), "embeddings");
  m.params.head_weights = Matrix<float>(num_classes, config.dim);
  in.Floats(m.params.head_weights.data(), "head_weights");
  m.params.head_bias.resize(num_classes);
  in.Floats(m.params.head_bias, "head_bias");
  if (!in.AtEnd()) throw FormatError("trailer", "unexpected trailing bytes");
  try {
    m.Validate();
  } catch (const DataError& e) {
    throw FormatError("parameters", e.what());
  }
  return m;
}

void SaveModel(const Model& model, const std::string& path) {
  const std::string bytes = SerializeModel(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("error while writing '" + path + "'");
}

Model LoadModel(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("error while reading '" + path + "'");
  return DeserializeModel(buf.str());
}

}  // namespace conlid
