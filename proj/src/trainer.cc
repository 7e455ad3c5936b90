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

#include "conlid/trainer.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>

#include "conlid/error.h"
#include "conlid/random.h"

namespace conlid {

namespace {

constexpr uint64_t kInitSeedSalt = 0x9E3779B97F4A7C15ull;

void CheckFinite(std::span<const double> grads, long step) {
  for (double g : grads) {
    if (!std::isfinite(g)) throw TrainingError(step, "non-finite gradient");
  }
}

void AdamUpdate(std::span<float> params, std::span<float> m, std::span<float> v,
                std::span<const double> grads, long step, double lr,
                const AdamConfig& c) {
  const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(step));
  const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(step));
  for (size_t k = 0; k < params.size(); ++k) {
    const double g = grads[k];
    const double mk = c.beta1 * m[k] + (1.0 - c.beta1) * g;
    const double vk = c.beta2 * v[k] + (1.0 - c.beta2) * g * g;
    m[k] = static_cast<float>(mk);
    v[k] = static_cast<float>(vk);
    double p = params[k];
    if (c.weight_decay != 0.0) p -= lr * c.weight_decay * p;
    p -= lr * (mk / bc1) / (std::sqrt(vk / bc2) + c.eps);
    params[k] = static_cast<float>(p);
  }
}

}  // namespace

Variant ParseVariant(std::string_view name) {
  std::string n;
  for (char ch : name) {
    n.push_back(ch == '_' ? '-' : static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  }
  if (n == "ce" || n == "lid-ce") return Variant::kLidCe;
  if (n == "scl" || n == "lid-scl") return Variant::kLidScl;
  if (n == "conlid-s") return Variant::kConLidS;
  if (n == "conlid-h") return Variant::kConLidH;
  throw ConfigError("unknown variant '" + std::string(name) + "'");
}

const char* VariantName(Variant variant) {
  switch (variant) {
    case Variant::kLidCe:
      return "LID_CE";
    case Variant::kLidScl:
      return "LID_SCL";
    case Variant::kConLidS:
      return "ConLID_S";
    case Variant::kConLidH:
      return "ConLID_H";
  }
  return "?";
}

TrainConfig TrainConfig::ForVariant(Variant variant) {
  TrainConfig c;
  c.variant = variant;
  switch (variant) {
    case Variant::kLidCe:
      c.loss.mode = LossMode::kCeOnly;
      c.loss.bank_size = 0;
      break;
    case Variant::kLidScl:
      c.loss.mode = LossMode::kSclSoft;
      c.loss.bank_size = 0;
      break;
    case Variant::kConLidS:
      c.loss.mode = LossMode::kSclSoft;
      break;
    case Variant::kConLidH:
      c.loss.mode = LossMode::kSclHard;
      break;
  }
  return c;
}

void TrainConfig::Validate() const {
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (!(lr0 > 0.0)) throw ConfigError("learning rate must be > 0");
  if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0) ||
      !(adam.beta2 >= 0.0 && adam.beta2 < 1.0) || !(adam.eps > 0.0) ||
      adam.weight_decay < 0.0) {
    throw ConfigError("invalid Adam hyper-parameters");
  }
  loss.Validate(batch_size);
  const auto want = [&](LossMode mode) {
    if (loss.mode != mode) {
      throw ConfigError(std::string("variant ") + VariantName(variant) +
                        " requires loss mode " + LossModeName(mode));
    }
  };
  switch (variant) {
    case Variant::kLidCe:
      want(LossMode::kCeOnly);
      break;
    case Variant::kLidScl:
      want(LossMode::kSclSoft);
      if (loss.bank_size != 0) {
        throw ConfigError("variant LID_SCL trains without a memory bank (bank_size 0)");
      }
      break;
    case Variant::kConLidS:
      want(LossMode::kSclSoft);
      break;
    case Variant::kConLidH:
      want(LossMode::kSclHard);
      break;
  }
}

double LrAt(long step, long total_steps, double lr0) {
  if (total_steps < 1 || step < 0 || step > total_steps) {
    throw ConfigError("learning-rate step out of range");
  }
  return lr0 * (1.0 - static_cast<double>(step) / static_cast<double>(total_steps));
}

void AdamStep(std::span<float> params, std::span<const double> grads,
              AdamState& state, double lr, const AdamConfig& config) {
  if (params.size() != grads.size() || state.m.size() != params.size()) {
    throw std::invalid_argument("Adam tensor shapes do not match");
  }
  ++state.step;
  CheckFinite(grads, state.step);
  AdamUpdate(params, state.m, state.v, grads, state.step, lr, config);
}

void AdamStepRows(Matrix<float>& table, std::span<const int64_t> rows,
                  const Matrix<double>& grads, AdamState& state, double lr,
                  const AdamConfig& config) {
  if (grads.rows() != rows.size() || grads.cols() != table.cols() ||
      state.m.size() != table.size()) {
    throw std::invalid_argument("Adam tensor shapes do not match");
  }
  ++state.step;
  CheckFinite(grads.data(), state.step);
  const size_t dim = table.cols();
  std::span<float> m(state.m), v(state.v);
  for (size_t r = 0; r < rows.size(); ++r) {
    const auto offset = static_cast<size_t>(rows[r]) * dim;
    AdamUpdate(table.row(rows[r]), m.subspan(offset, dim), v.subspan(offset, dim),
               grads.row(r), state.step, lr, config);
  }
}

EncodedExample EncodeExample(const Model& model, const Example& example) {
  EncodedExample e;
  e.features = EncodeFeatures(model.vocab, model.config, example.text).feature_ids;
  e.class_id = model.labels.id(example.label);
  if (e.class_id < 0) throw DataError("label '" + example.label + "' not in model");
  e.script = example.script;
  e.domain = example.domain;
  return e;
}

BatchGradients ComputeBatchGradients(const Model& model,
                                     std::span<const EncodedExample> batch,
                                     const MemoryBank& bank,
                                     const LossConfig& loss) {
  const size_t n = batch.size();
  const size_t dim = static_cast<size_t>(model.dim());
  const size_t classes = model.num_classes();
  const auto& params = model.params;

  std::vector<std::vector<double>> z(n);
  Matrix<double> probs(n, classes);
  std::vector<int32_t> class_ids(n);
  for (size_t b = 0; b < n; ++b) {
    z[b] = MeanEmbedding(params.embeddings.data(), model.dim(), batch[b].features);
    const auto p = Softmax(HeadLogits(params, z[b]));
    std::copy(p.begin(), p.end(), probs.row(b).begin());
    class_ids[b] = batch[b].class_id;
  }

  BatchGradients out;
  auto ce = CrossEntropyLoss(probs, class_ids);
  out.ce_loss = ce.loss;

  out.head_weight_grads = Matrix<double>(classes, dim);
  out.head_bias_grads.assign(classes, 0.0);
  Matrix<double> grad_z(n, dim);
  for (size_t b = 0; b < n; ++b) {
    auto gz = grad_z.row(b);
    for (size_t c = 0; c < classes; ++c) {
      const double g = ce.grad_logits(b, c);
      if (g == 0.0) continue;
      out.head_bias_grads[c] += g;
      auto gw = out.head_weight_grads.row(c);
      const auto w = params.head_weights.row(c);
      for (size_t k = 0; k < dim; ++k) {
        gw[k] += g * z[b][k];
        gz[k] += g * static_cast<double>(w[k]);
      }
    }
  }

  if (loss.mode != LossMode::kCeOnly) {
    // Zero-feature sentences have no direction and stay out of the pool.
    std::vector<size_t> anchor_of;
    std::vector<ContrastiveItem> anchors;
    for (size_t b = 0; b < n; ++b) {
      auto u = Normalized(z[b]);
      if (std::all_of(u.begin(), u.end(), [](double x) { return x == 0.0; })) continue;
      anchor_of.push_back(b);
      anchors.push_back({std::move(u), batch[b].class_id, batch[b].script,
                         batch[b].domain, false});
    }
    const auto pool = BuildPool(anchors, bank);
    const auto pairs = SelectPairs(anchors.size(), pool, loss);
    auto scl = SupConLoss(anchors, pool, pairs, loss.tau);
    out.scl_loss = scl.loss;
    for (size_t a = 0; a < anchors.size(); ++a) {
      const size_t b = anchor_of[a];
      const auto g = NormalizationBackward(z[b], scl.grad_anchors.row(a));
      auto gz = grad_z.row(b);
      for (size_t k = 0; k < dim; ++k) gz[k] += g[k];
    }
    out.bank_items = std::move(anchors);
  }

  std::map<int64_t, size_t> slot;
  for (const auto& ex : batch) {
    for (int64_t row : ex.features) slot.emplace(row, 0);
  }
  out.rows.reserve(slot.size());
  for (auto& [row, s] : slot) {
    s = out.rows.size();
    out.rows.push_back(row);
  }
  out.embedding_grads = Matrix<double>(out.rows.size(), dim);
  for (size_t b = 0; b < n; ++b) {
    const auto& feats = batch[b].features;
    if (feats.empty()) continue;
    const double inv = 1.0 / static_cast<double>(feats.size());
    const auto gz = grad_z.row(b);
    for (int64_t row : feats) {
      auto g = out.embedding_grads.row(slot[row]);
      for (size_t k = 0; k < dim; ++k) g[k] += gz[k] * inv;
    }
  }
  return out;
}

TrainResult Train(const Dataset& train, const TrainConfig& config,
                  const EncoderConfig& encoder, const StepCallback& on_step) {
  config.Validate();
  encoder.Validate();
  if (train.empty()) throw DataError("training set is empty");

  TrainResult result;
  result.model = Model::Initialize(encoder, train.label_index(),
                                   BuildVocab(train, encoder),
                                   config.seed ^ kInitSeedSalt);
  Model& model = result.model;

  std::vector<size_t> order(train.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(config.seed);
  rng.shuffle(order);

  const size_t per_epoch = (train.size() + config.batch_size - 1) / config.batch_size;
  const long total_steps = static_cast<long>(per_epoch) * config.epochs;
  result.telemetry.reserve(static_cast<size_t>(total_steps));

  AdamState emb_state(model.params.embeddings.size());
  AdamState head_state(model.params.head_weights.size());
  AdamState bias_state(model.params.head_bias.size());
  MemoryBank bank(config.loss.mode == LossMode::kCeOnly ? 0 : config.loss.bank_size);

  long step = 0;
  std::vector<EncodedExample> batch;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (size_t start = 0; start < order.size(); start += config.batch_size) {
      const size_t end = std::min(order.size(), start + config.batch_size);
      batch.clear();
      for (size_t i = start; i < end; ++i) {
        batch.push_back(EncodeExample(model, train[order[i]]));
      }
      auto grads = ComputeBatchGradients(model, batch, bank, config.loss);
      const double lr = LrAt(step, total_steps, config.lr0);
      try {
        AdamStepRows(model.params.embeddings, grads.rows, grads.embedding_grads,
                     emb_state, lr, config.adam);
        AdamStep(model.params.head_weights.data(), grads.head_weight_grads.data(),
                 head_state, lr, config.adam);
        AdamStep(model.params.head_bias, grads.head_bias_grads, bias_state, lr,
                 config.adam);
      } catch (const TrainingError&) {
        throw TrainingError(step, "non-finite gradient");
      }
      bank.Push(grads.bank_items);

      StepRecord rec{step, lr, grads.ce_loss, grads.scl_loss, grads.total_loss()};
      result.telemetry.push_back(rec);
      if (on_step) on_step(rec);
      ++step;
    }
  }
  return result;
}

void AppendTelemetryCsv(std::span<const StepRecord> records,
                        const std::string& path) {
  const bool fresh = !std::filesystem::exists(path) ||
                     std::filesystem::file_size(path) == 0;
  std::ofstream out(path, std::ios::app);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  if (fresh) out << "step,lr,ce_loss,scl_loss,total_loss\n";
  char buf[160];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof(buf), "%ld,%.17g,%.17g,%.17g,%.17g\n", r.step, r.lr,
                  r.ce_loss, r.scl_loss, r.total_loss);
    out << buf;
  }
  if (!out) throw IoError("error while writing '" + path + "'");
}

}  // namespace conlid
