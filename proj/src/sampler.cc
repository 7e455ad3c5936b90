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

#include "conlid/sampler.h"

#include "conlid/corpus.h"
#include "conlid/error.h"

namespace conlid {

void MemoryBank::Push(std::span<const ContrastiveItem> items) {
  if (capacity_ == 0) return;
  const size_t skip = items.size() > capacity_ ? items.size() - capacity_ : 0;
  for (size_t i = skip; i < items.size(); ++i) {
    ContrastiveItem copy = items[i];
    copy.embedding = Normalized(copy.embedding);
    copy.from_bank = true;
    entries_.push_back(std::move(copy));
  }
  while (entries_.size() > capacity_) entries_.pop_front();
}

std::vector<ContrastiveItem> BuildPool(std::span<const ContrastiveItem> batch,
                                       const MemoryBank& bank) {
  std::vector<ContrastiveItem> pool;
  pool.reserve(batch.size() + bank.size());
  pool.insert(pool.end(), batch.begin(), batch.end());
  pool.insert(pool.end(), bank.entries().begin(), bank.entries().end());
  return pool;
}

std::vector<size_t> Positives(size_t anchor, std::span<const ContrastiveItem> pool) {
  std::vector<size_t> out;
  const int32_t y = pool[anchor].class_id;
  for (size_t j = 0; j < pool.size(); ++j) {
    if (j != anchor && pool[j].class_id == y) out.push_back(j);
  }
  return out;
}

PairSelection SoftNegatives(size_t anchor, std::span<const ContrastiveItem> pool) {
  PairSelection sel;
  sel.positives = Positives(anchor, pool);
  const int32_t y = pool[anchor].class_id;
  for (size_t j = 0; j < pool.size(); ++j) {
    if (pool[j].class_id != y) sel.negatives.push_back(j);
  }
  sel.relaxation_level = 4;
  return sel;
}

PairSelection HardNegatives(size_t anchor, std::span<const ContrastiveItem> pool,
                            size_t min_negatives) {
  if (min_negatives < 1) throw ConfigError("min_negatives must be >= 1");
  const auto& a = pool[anchor];
  PairSelection sel;
  sel.positives = Positives(anchor, pool);
  for (int level = 1; level <= 4; ++level) {
    const bool need_script = level == 1 || level == 2;
    const bool need_domain = level == 1 || level == 3;
    sel.negatives.clear();
    for (size_t j = 0; j < pool.size(); ++j) {
      const auto& c = pool[j];
      if (c.class_id == a.class_id) continue;
      if (need_script && !SameTag(c.script, a.script)) continue;
      if (need_domain && !SameTag(c.domain, a.domain)) continue;
      sel.negatives.push_back(j);
    }
    sel.relaxation_level = level;
    if (sel.negatives.size() >= min_negatives) break;
  }
  return sel;
}

std::vector<PairSelection> SelectPairs(size_t num_anchors,
                                       std::span<const ContrastiveItem> pool,
                                       const LossConfig& config) {
  std::vector<PairSelection> out;
  out.reserve(num_anchors);
  for (size_t i = 0; i < num_anchors; ++i) {
    out.push_back(config.mode == LossMode::kSclHard
                      ? HardNegatives(i, pool, config.min_negatives)
                      : SoftNegatives(i, pool));
  }
  return out;
}

}  // namespace conlid
