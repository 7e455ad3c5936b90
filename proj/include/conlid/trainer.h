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

#ifndef CONLID_TRAINER_H_
#define CONLID_TRAINER_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "conlid/corpus.h"
#include "conlid/encoder.h"
#include "conlid/matrix.h"
#include "conlid/model.h"
#include "conlid/objective.h"
#include "conlid/sampler.h"

namespace conlid {

enum class Variant { kLidCe, kLidScl, kConLidS, kConLidH };

// Accepts "ce", "scl", "conlid-s", "conlid-h" (case-insensitive, '_' == '-').
Variant ParseVariant(std::string_view name);
const char* VariantName(Variant variant);

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-6;
  double weight_decay = 0.0;
};

struct TrainConfig {
  size_t batch_size = 128;
  int epochs = 1;
  double lr0 = 1e-3;
  AdamConfig adam;
  uint64_t seed = 0;
  LossConfig loss;
  Variant variant = Variant::kConLidS;

  // Defaults for a variant: loss mode and bank size follow the variant.
  static TrainConfig ForVariant(Variant variant);

  // Rejects inconsistent variant / loss settings.
  void Validate() const;
};

// lr0 * (1 - step / total_steps).
double LrAt(long step, long total_steps, double lr0);

// Adam moments for one parameter tensor.
struct AdamState {
  AdamState() = default;
  explicit AdamState(size_t n) : m(n, 0.0f), v(n, 0.0f) {}

  std::vector<float> m;
  std::vector<float> v;
  long step = 0;
};

// One bias-corrected AdamW update of a dense tensor. Increments state.step.
// Throws TrainingError when a gradient is not finite.
void AdamStep(std::span<float> params, std::span<const double> grads,
              AdamState& state, double lr, const AdamConfig& config);

// Sparse variant: only rows listed in `rows` are updated, using the shared
// step counter for bias correction. `grads` holds one row per entry.
void AdamStepRows(Matrix<float>& table, std::span<const int64_t> rows,
                  const Matrix<double>& grads, AdamState& state, double lr,
                  const AdamConfig& config);

struct EncodedExample {
  std::vector<int64_t> features;
  int32_t class_id = 0;
  std::string script;
  std::string domain;
};

EncodedExample EncodeExample(const Model& model, const Example& example);

struct BatchGradients {
  double ce_loss = 0.0;
  double scl_loss = 0.0;
  // Touched embedding rows (ascending) and their gradients.
  std::vector<int64_t> rows;
  Matrix<double> embedding_grads;
  Matrix<double> head_weight_grads;
  std::vector<double> head_bias_grads;
  // Normalized, detached embeddings of the batch, ready for the bank.
  std::vector<ContrastiveItem> bank_items;

  double total_loss() const { return CombinedLoss(ce_loss, scl_loss); }
};

// Loss and analytic gradients of one minibatch against a fixed bank.
BatchGradients ComputeBatchGradients(const Model& model,
                                     std::span<const EncodedExample> batch,
                                     const MemoryBank& bank,
                                     const LossConfig& loss);

struct StepRecord {
  long step = 0;
  double lr = 0.0;
  double ce_loss = 0.0;
  double scl_loss = 0.0;
  double total_loss = 0.0;

  bool operator==(const StepRecord&) const = default;
};

struct TrainResult {
  Model model;
  std::vector<StepRecord> telemetry;
};

using StepCallback = std::function<void(const StepRecord&)>;

// Builds the vocabulary, initializes a model and runs minibatch Adam over
// `train` with a linearly decaying learning rate.
TrainResult Train(const Dataset& train, const TrainConfig& config,
                  const EncoderConfig& encoder, const StepCallback& on_step = {});

// Appends rows "step,lr,ce_loss,scl_loss,total_loss", writing the header when
// the file is new or empty.
void AppendTelemetryCsv(std::span<const StepRecord> records,
                        const std::string& path);

}  // namespace conlid

#endif  // CONLID_TRAINER_H_
