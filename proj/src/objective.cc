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

#include "conlid/objective.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "conlid/error.h"

namespace conlid {

namespace {

double Dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (size_t k = 0; k < a.size(); ++k) acc += a[k] * b[k];
  return acc;
}

// log(sum exp(x)) over the given scores, plus the softmax weights.
double LogSumExp(std::span<const double> x, std::vector<double>& weights) {
  const double max = *std::max_element(x.begin(), x.end());
  weights.resize(x.size());
  double sum = 0.0;
  for (size_t k = 0; k < x.size(); ++k) {
    weights[k] = std::exp(x[k] - max);
    sum += weights[k];
  }
  for (double& w : weights) w /= sum;
  return max + std::log(sum);
}

}  // namespace

const char* LossModeName(LossMode mode) {
  switch (mode) {
    case LossMode::kCeOnly:
      return "ce_only";
    case LossMode::kSclSoft:
      return "scl_soft";
    case LossMode::kSclHard:
      return "scl_hard";
  }
  return "?";
}

void LossConfig::Validate(size_t batch_size) const {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ConfigError("tau must be > 0");
  if (mode == LossMode::kSclHard) {
    if (min_negatives < 1) throw ConfigError("min_negatives must be >= 1");
    if (min_negatives > bank_size + batch_size) {
      throw ConfigError("min_negatives exceeds bank_size + batch_size");
    }
  }
}

CeResult CrossEntropyLoss(const Matrix<double>& probs,
                          std::span<const int32_t> class_ids) {
  const size_t batch = probs.rows();
  const size_t classes = probs.cols();
  if (class_ids.size() != batch) {
    throw std::invalid_argument("class_ids size does not match batch");
  }
  CeResult r;
  r.grad_logits = Matrix<double>(batch, classes);
  if (batch == 0) return r;
  const double inv_b = 1.0 / static_cast<double>(batch);
  double sum = 0.0;
  for (size_t i = 0; i < batch; ++i) {
    const int32_t y = class_ids[i];
    if (y < 0 || static_cast<size_t>(y) >= classes) {
      throw std::out_of_range("class id " + std::to_string(y) + " out of range");
    }
    sum -= std::log(probs(i, y));
    for (size_t c = 0; c < classes; ++c) r.grad_logits(i, c) = probs(i, c) * inv_b;
    r.grad_logits(i, y) -= inv_b;
  }
  r.loss = sum * inv_b;
  return r;
}

SclResult SupConLoss(std::span<const ContrastiveItem> anchors,
                     std::span<const ContrastiveItem> pool,
                     std::span<const PairSelection> pairs, double tau) {
  if (!(tau > 0.0)) throw ConfigError("tau must be > 0");
  const size_t batch = anchors.size();
  if (pairs.size() != batch) {
    throw std::invalid_argument("one pair selection per anchor required");
  }
  const size_t dim = batch ? anchors[0].embedding.size() : 0;
  SclResult r;
  r.grad_anchors = Matrix<double>(batch, dim);
  if (batch == 0) return r;
  const double inv_b = 1.0 / static_cast<double>(batch);
  const double inv_tau = 1.0 / tau;

  std::vector<double> pos_scores, all_scores, pos_w, all_w;
  double total = 0.0;
  for (size_t i = 0; i < batch; ++i) {
    const auto& sel = pairs[i];
    if (sel.positives.empty()) continue;
    const auto& zi = anchors[i].embedding;
    pos_scores.clear();
    all_scores.clear();
    for (size_t p : sel.positives) {
      pos_scores.push_back(Dot(zi, pool[p].embedding) * inv_tau);
    }
    all_scores = pos_scores;
    for (size_t n : sel.negatives) {
      all_scores.push_back(Dot(zi, pool[n].embedding) * inv_tau);
    }
    const double lse_pos = LogSumExp(pos_scores, pos_w);
    const double lse_all = LogSumExp(all_scores, all_w);
    total += -(lse_pos - lse_all);

    // d loss_i / d s_ij = -(pos_w_j - all_w_j); s_ij = z_i.z_j / tau.
    auto grad_i = r.grad_anchors.row(i);
    auto accumulate = [&](size_t j, double coeff) {
      const auto& zj = pool[j].embedding;
      const double c = coeff * inv_tau * inv_b;
      for (size_t k = 0; k < dim; ++k) grad_i[k] += c * zj[k];
      if (j < batch && !pool[j].from_bank) {
        auto grad_j = r.grad_anchors.row(j);
        for (size_t k = 0; k < dim; ++k) grad_j[k] += c * zi[k];
      }
    };
    for (size_t k = 0; k < sel.positives.size(); ++k) {
      accumulate(sel.positives[k], -(pos_w[k] - all_w[k]));
    }
    for (size_t k = 0; k < sel.negatives.size(); ++k) {
      accumulate(sel.negatives[k], all_w[sel.positives.size() + k]);
    }
  }
  r.loss = total * inv_b;
  return r;
}

std::vector<double> Normalized(std::span<const double> v) {
  const double norm = std::sqrt(Dot(v, v));
  std::vector<double> out(v.begin(), v.end());
  if (norm == 0.0) {
    std::fill(out.begin(), out.end(), 0.0);
    return out;
  }
  for (double& x : out) x /= norm;
  return out;
}

std::vector<double> NormalizationBackward(std::span<const double> v,
                                          std::span<const double> grad_unit) {
  const double norm = std::sqrt(Dot(v, v));
  std::vector<double> out(v.size(), 0.0);
  if (norm == 0.0) return out;
  const auto u = Normalized(v);
  const double gu = Dot(grad_unit, u);
  for (size_t k = 0; k < v.size(); ++k) out[k] = (grad_unit[k] - gu * u[k]) / norm;
  return out;
}

}  // namespace conlid
