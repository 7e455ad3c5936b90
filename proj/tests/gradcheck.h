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


#ifndef CONLID_TESTS_GRADCHECK_H_
#define CONLID_TESTS_GRADCHECK_H_

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "conlid/model.h"
#include "conlid/sampler.h"
#include "conlid/trainer.h"
#include "test_support.h"
#include "toy_corpus.h"

namespace conlid::testing {

struct MicroProblem {
  Model model;
  std::vector<EncodedExample> batch;
  MemoryBank bank{8};
  LossConfig loss;
};

// dim 8, 3 classes, bucket 50, batch 4, bank 8, all parameters randomized.
inline MicroProblem MakeMicroProblem(uint64_t seed, LossMode mode = LossMode::kSclSoft) {
  std::mt19937_64 rng(seed);
  const auto langs = MakeToyLanguages(3, 8, 12, seed);
  Dataset data(MakeToySentences(langs, 1, 4, seed + 1));
  EncoderConfig cfg;
  cfg.dim = 8;
  cfg.bucket = 50;
  cfg.minn = 2;
  cfg.maxn = 4;
  cfg.min_count = 2;
  MicroProblem p;
  p.model = Model::Initialize(cfg, data.label_index(), BuildVocab(data, cfg), seed);
  std::uniform_real_distribution<float> u(-0.5f, 0.5f);
  for (float& v : p.model.params.embeddings.data()) v = u(rng);
  for (float& v : p.model.params.head_weights.data()) v = u(rng);
  for (float& v : p.model.params.head_bias) v = u(rng);

  for (size_t i = 0; i < 4; ++i) {
    p.batch.push_back(EncodeExample(p.model, data[rng() % data.size()]));
  }
  std::vector<ContrastiveItem> stale;
  for (int j = 0; j < 8; ++j) {
    ContrastiveItem it;
    it.embedding = RandomUnit(rng, 8);
    it.class_id = static_cast<int32_t>(rng() % 3);
    it.script = "Latn";
    it.domain = j % 2 ? "DomainOne" : "DomainTwo";
    stale.push_back(std::move(it));
  }
  p.bank.Push(stale);
  p.loss.mode = mode;
  p.loss.tau = 0.05;
  p.loss.bank_size = 8;
  p.loss.min_negatives = 3;
  return p;
}

struct GradCheckSummary {
  double max_rel_error = 0.0;
  size_t checked = 0;
};

// Compares every analytic parameter gradient against central differences.
// Perturbations are applied to float parameters; the difference quotient
// divides by the exactly representable step that was actually taken.
inline GradCheckSummary CheckGradients(
    MicroProblem& p, const std::function<double(const BatchGradients&)>& objective,
    const BatchGradients& analytic, double h = 1e-4, double floor = 1e-6) {
  GradCheckSummary s;
  auto eval = [&] {
    return objective(ComputeBatchGradients(p.model, p.batch, p.bank, p.loss));
  };
  auto probe = [&](float& param, double grad) {
    const float orig = param;
    const float up = static_cast<float>(orig + h);
    const float down = static_cast<float>(orig - h);
    param = up;
    const double lu = eval();
    param = down;
    const double ld = eval();
    param = orig;
    const double fd = (lu - ld) / (static_cast<double>(up) - static_cast<double>(down));
    s.max_rel_error = std::max(s.max_rel_error, RelativeError(grad, fd, floor));
    ++s.checked;
  };

  auto& params = p.model.params;
  const size_t dim = params.embeddings.cols();
  for (size_t r = 0; r < params.embeddings.rows(); ++r) {
    const auto it = std::lower_bound(analytic.rows.begin(), analytic.rows.end(),
                                     static_cast<int64_t>(r));
    const bool touched = it != analytic.rows.end() && *it == static_cast<int64_t>(r);
    for (size_t k = 0; k < dim; ++k) {
      const double g =
          touched ? analytic.embedding_grads(it - analytic.rows.begin(), k) : 0.0;
      probe(params.embeddings(r, k), g);
    }
  }
  for (size_t i = 0; i < params.head_weights.size(); ++i) {
    probe(params.head_weights.data()[i], analytic.head_weight_grads.data()[i]);
  }
  for (size_t c = 0; c < params.head_bias.size(); ++c) {
    probe(params.head_bias[c], analytic.head_bias_grads[c]);
  }
  return s;
}

inline GradCheckSummary CheckCombinedGradients(MicroProblem& p) {
  const auto analytic = ComputeBatchGradients(p.model, p.batch, p.bank, p.loss);
  return CheckGradients(p, [](const BatchGradients& g) { return g.total_loss(); },
                        analytic);
}

}  // namespace conlid::testing

#endif  // CONLID_TESTS_GRADCHECK_H_
