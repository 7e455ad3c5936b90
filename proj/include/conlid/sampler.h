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

#ifndef CONLID_SAMPLER_H_
#define CONLID_SAMPLER_H_

#include <deque>
#include <span>
#include <vector>

#include "conlid/objective.h"

namespace conlid {

// FIFO store of the most recent `capacity` detached, unit-norm embeddings.
class MemoryBank {
 public:
  explicit MemoryBank(size_t capacity) : capacity_(capacity) {}

  size_t capacity() const { return capacity_; }
  size_t size() const { return entries_.size(); }
  const std::deque<ContrastiveItem>& entries() const { return entries_; }

  // Appends copies of `items` (normalized, marked from_bank) and evicts the
  // oldest entries beyond capacity.
  void Push(std::span<const ContrastiveItem> items);

 private:
  size_t capacity_;
  std::deque<ContrastiveItem> entries_;
};

// Batch items first, then bank entries in insertion order.
std::vector<ContrastiveItem> BuildPool(std::span<const ContrastiveItem> batch,
                                       const MemoryBank& bank);

// Every pool index other than the anchor with the anchor's class.
std::vector<size_t> Positives(size_t anchor, std::span<const ContrastiveItem> pool);

// Negatives are every different-class pool item (relaxation level 4).
PairSelection SoftNegatives(size_t anchor, std::span<const ContrastiveItem> pool);

// Negatives under progressively relaxed constraints, stopping at the first
// condition that yields at least `min_negatives` items:
//   1. different class, same script, same domain
//   2. different class, same script
//   3. different class, same domain
//   4. different class
// Throws ConfigError when min_negatives < 1.
PairSelection HardNegatives(size_t anchor, std::span<const ContrastiveItem> pool,
                            size_t min_negatives);

// Pair selection for every batch anchor (indices 0..num_anchors-1 of `pool`).
std::vector<PairSelection> SelectPairs(size_t num_anchors,
                                       std::span<const ContrastiveItem> pool,
                                       const LossConfig& config);

}  // namespace conlid

#endif  // CONLID_SAMPLER_H_
