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

#ifndef CONLID_ENCODER_H_
#define CONLID_ENCODER_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "conlid/corpus.h"

namespace conlid {

struct EncoderConfig {
  int dim = 256;
  int minn = 2;
  int maxn = 5;
  int bucket = 1000000;
  int min_count = 1000;
  int word_ngrams = 1;

  // Throws ConfigError on violated invariants.
  void Validate() const;

  bool operator==(const EncoderConfig&) const = default;
};

// Words are maximal runs of non-whitespace (ASCII whitespace).
std::vector<std::string_view> Tokenize(std::string_view text);

// Character n-grams of "<" + word + ">", with lengths counted in Unicode
// scalar values. Ordered by start position, shortest first per position.
std::vector<std::string> CharNgrams(std::string_view word, int minn, int maxn);

// 32-bit FNV-1a over the UTF-8 bytes.
uint32_t Fnv1a32(std::string_view bytes);

// Embedding row of an n-gram: vocab_size + Fnv1a32(ngram) % bucket.
int64_t HashNgram(std::string_view ngram, int bucket, int64_t vocab_size);

class Vocabulary {
 public:
  Vocabulary() = default;
  // `words` in id order.
  Vocabulary(std::vector<std::string> words,
             std::unordered_set<std::string> seen_ngrams);

  size_t size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }
  // -1 when the word is out of vocabulary.
  int32_t word_id(std::string_view word) const;

  const std::unordered_set<std::string>& seen_ngrams() const {
    return seen_ngrams_;
  }
  bool seen(const std::string& ngram) const {
    return seen_ngrams_.contains(ngram);
  }
  // seen n-grams in byte-lexicographic order.
  std::vector<std::string> sorted_seen_ngrams() const;

  bool operator==(const Vocabulary& o) const {
    return words_ == o.words_ && seen_ngrams_ == o.seen_ngrams_;
  }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, int32_t> word_ids_;
  std::unordered_set<std::string> seen_ngrams_;
};

// Keeps words with frequency >= min_count (ids by descending frequency, then
// bytewise order) and records every n-gram of every training token.
Vocabulary BuildVocab(const Dataset& train, const EncoderConfig& config);

struct SentenceEncoding {
  // Embedding rows: per token, the word id (if in vocabulary) followed by its
  // hashed n-gram rows.
  std::vector<int64_t> feature_ids;
  double unk_ngram_ratio = 1.0;
};

// Feature rows plus the unseen-n-gram ratio. A text without n-grams has ratio
// 0, unless it has no features at all, in which case it is 1.
SentenceEncoding EncodeFeatures(const Vocabulary& vocab,
                                const EncoderConfig& config,
                                std::string_view text);

// Mean of the given rows of a row-major float table with `dim` columns,
// accumulated in double. Empty feature lists give the zero vector.
std::vector<double> MeanEmbedding(std::span<const float> table, int dim,
                                  std::span<const int64_t> feature_ids);

}  // namespace conlid

#endif  // CONLID_ENCODER_H_
