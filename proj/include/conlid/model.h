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

#ifndef CONLID_MODEL_H_
#define CONLID_MODEL_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "conlid/corpus.h"
#include "conlid/encoder.h"
#include "conlid/matrix.h"

namespace conlid {

inline constexpr char kModelMagic[4] = {'C', 'L', 'I', 'D'};
inline constexpr uint32_t kModelVersion = 1;

struct ModelParams {
  Matrix<float> embeddings;    // (vocab_size + bucket) x dim
  Matrix<float> head_weights;  // num_classes x dim
  std::vector<float> head_bias;

  bool operator==(const ModelParams&) const = default;
};

// Hashed n-gram encoder plus a single affine softmax head.
struct Model {
  EncoderConfig config;
  LabelIndex labels;
  Vocabulary vocab;
  ModelParams params;

  // Embeddings uniform in [-1/dim, 1/dim]; head weights and bias zero.
  static Model Initialize(const EncoderConfig& config, LabelIndex labels,
                          Vocabulary vocab, uint64_t seed);

  size_t num_classes() const { return labels.size(); }
  int dim() const { return config.dim; }

  // Throws DataError when shapes disagree or a parameter is not finite.
  void Validate() const;
};

struct ForwardResult {
  std::vector<double> embedding;
  std::vector<double> logits;
  std::vector<double> probs;
  double unk_ngram_ratio = 0.0;
};

// Numerically stable softmax (max subtraction).
std::vector<double> Softmax(std::span<const double> logits);

// logits = W z + b over already-computed features.
std::vector<double> HeadLogits(const ModelParams& params,
                               std::span<const double> embedding);

ForwardResult Forward(const Model& model, std::string_view text);

// Binary model file. Layout (all integers u32 little-endian, floats f32 LE):
//   magic "CLID", version, dim, bucket, minn, maxn, num_classes, vocab_size,
//   seen_ngram_count; length-prefixed labels, vocabulary words and seen
//   n-grams (sorted); embeddings, head weights (both row-major), head bias.
std::string SerializeModel(const Model& model);
Model DeserializeModel(std::string_view bytes);

void SaveModel(const Model& model, const std::string& path);
Model LoadModel(const std::string& path);

}  // namespace conlid

#endif  // CONLID_MODEL_H_
