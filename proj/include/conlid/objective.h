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

#ifndef CONLID_OBJECTIVE_H_
#define CONLID_OBJECTIVE_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "conlid/matrix.h"

namespace conlid {

enum class LossMode { kCeOnly, kSclSoft, kSclHard };

const char* LossModeName(LossMode mode);

struct LossConfig {
  double tau = 0.05;
  LossMode mode = LossMode::kSclSoft;
  size_t bank_size = 2048;
  size_t min_negatives = 1024;

  // tau > 0; K >= 1 and K <= bank_size + batch_size for hard selection.
  void Validate(size_t batch_size) const;
};

// One entry of the contrastive pool. The embedding is unit-norm.
struct ContrastiveItem {
  std::vector<double> embedding;
  int32_t class_id = 0;
  std::string script;
  std::string domain;
  bool from_bank = false;
};

// Index sets into the pool for one anchor.
struct PairSelection {
  std::vector<size_t> positives;
  std::vector<size_t> negatives;
  // Which hard-selection condition produced `negatives` (1..4). Soft
  // selection always reports 4.
  int relaxation_level = 4;
};

struct CeResult {
  double loss = 0.0;
  Matrix<double> grad_logits;  // B x C
};

// Mean negative log-likelihood of the gold classes. Throws std::out_of_range
// for a class id outside [0, C).
CeResult CrossEntropyLoss(const Matrix<double>& probs,
                          std::span<const int32_t> class_ids);

struct SclResult {
  double loss = 0.0;
  Matrix<double> grad_anchors;  // B x dim, w.r.t. the unit-norm anchors
};

// Supervised contrastive loss over a batch-first pool.
//
// loss = -(1/B) sum_i [ lse_{p in P(i)} s_ip - lse_{j in P(i) u N(i)} s_ij ]
// with s_ij = z_i . z_j / tau. Anchors with an empty P(i) contribute nothing.
//
// Pool entries at index j < B that are not from the bank are the anchors
// themselves, so their gradient is routed back to anchor j. Bank entries are
// constants.
SclResult SupConLoss(std::span<const ContrastiveItem> anchors,
                     std::span<const ContrastiveItem> pool,
                     std::span<const PairSelection> pairs, double tau);

inline double CombinedLoss(double ce, double scl) { return ce + scl; }

// Returns v / ||v||, or the zero vector when ||v|| == 0.
std::vector<double> Normalized(std::span<const double> v);

// Chain rule through v -> v / ||v||: maps d/du to d/dv.
std::vector<double> NormalizationBackward(std::span<const double> v,
                                          std::span<const double> grad_unit);

}  // namespace conlid

#endif  // CONLID_OBJECTIVE_H_
