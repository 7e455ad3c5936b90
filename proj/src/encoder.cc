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

#include "conlid/encoder.h"

#include <algorithm>

#include "conlid/error.h"
#include "utf8.h"

namespace conlid {

namespace {

bool IsSpace(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\v' || c == '\f' ||
         c == '\r';
}

}  // namespace

void EncoderConfig::Validate() const {
  if (dim < 1) throw ConfigError("dim must be >= 1");
  if (minn < 1 || minn > maxn) throw ConfigError("need 1 <= minn <= maxn");
  if (bucket < 1) throw ConfigError("bucket must be >= 1");
  if (min_count < 0) throw ConfigError("min_count must be >= 0");
  if (word_ngrams != 1) throw ConfigError("only word_ngrams = 1 is supported");
}

std::vector<std::string_view> Tokenize(std::string_view text) {
  std::vector<std::string_view> words;
  size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && IsSpace(text[i])) ++i;
    const size_t start = i;
    while (i < text.size() && !IsSpace(text[i])) ++i;
    if (i > start) words.push_back(text.substr(start, i - start));
  }
  return words;
}

std::vector<std::string> CharNgrams(std::string_view word, int minn, int maxn) {
  std::string wrapped;
  wrapped.reserve(word.size() + 2);
  wrapped.push_back('<');
  wrapped.append(word);
  wrapped.push_back('>');
  const auto offsets = internal::CodePointOffsets(wrapped);
  const size_t len = offsets.size() - 1;
  std::vector<std::string> out;
  for (size_t start = 0; start < len; ++start) {
    for (size_t n = static_cast<size_t>(minn);
         n <= static_cast<size_t>(maxn) && start + n <= len; ++n) {
      out.emplace_back(wrapped.substr(offsets[start],
                                      offsets[start + n] - offsets[start]));
    }
  }
  return out;
}

uint32_t Fnv1a32(std::string_view bytes) {
  uint32_t h = 2166136261u;
  for (char c : bytes) {
    h ^= static_cast<uint32_t>(static_cast<unsigned char>(c));
    h *= 16777619u;
  }
  return h;
}

int64_t HashNgram(std::string_view ngram, int bucket, int64_t vocab_size) {
  if (bucket < 1) throw ConfigError("bucket must be >= 1");
  return vocab_size + static_cast<int64_t>(Fnv1a32(ngram) %
                                           static_cast<uint32_t>(bucket));
}

Vocabulary::Vocabulary(std::vector<std::string> words,
                       std::unordered_set<std::string> seen_ngrams)
    : words_(std::move(words)), seen_ngrams_(std::move(seen_ngrams)) {
  word_ids_.reserve(words_.size());
  for (size_t i = 0; i < words_.size(); ++i) {
    if (!word_ids_.emplace(words_[i], static_cast<int32_t>(i)).second) {
      throw DataError("duplicate vocabulary word '" + words_[i] + "'");
    }
  }
}

int32_t Vocabulary::word_id(std::string_view word) const {
  auto it = word_ids_.find(std::string(word));
  return it == word_ids_.end() ? -1 : it->second;
}

std::vector<std::string> Vocabulary::sorted_seen_ngrams() const {
  std::vector<std::string> out(seen_ngrams_.begin(), seen_ngrams_.end());
  std::sort(out.begin(), out.end());
  return out;
}

Vocabulary BuildVocab(const Dataset& train, const EncoderConfig& config) {
  config.Validate();
  std::unordered_map<std::string, int64_t> counts;
  for (const auto& ex : train.examples()) {
    for (auto word : Tokenize(ex.text)) ++counts[std::string(word)];
  }
  std::unordered_set<std::string> seen;
  std::vector<std::pair<std::string, int64_t>> kept;
  for (const auto& [word, count] : counts) {
    for (auto& g : CharNgrams(word, config.minn, config.maxn)) {
      seen.insert(std::move(g));
    }
    if (count >= config.min_count) kept.emplace_back(word, count);
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  std::vector<std::string> words;
  words.reserve(kept.size());
  for (auto& [word, count] : kept) words.push_back(std::move(word));
  return Vocabulary(std::move(words), std::move(seen));
}

SentenceEncoding EncodeFeatures(const Vocabulary& vocab,
                                const EncoderConfig& config,
                                std::string_view text) {
  SentenceEncoding enc;
  size_t ngram_tokens = 0;
  size_t unseen = 0;
  const auto vocab_size = static_cast<int64_t>(vocab.size());
  for (auto word : Tokenize(text)) {
    if (int32_t id = vocab.word_id(word); id >= 0) enc.feature_ids.push_back(id);
    for (const auto& g : CharNgrams(word, config.minn, config.maxn)) {
      ++ngram_tokens;
      if (!vocab.seen(g)) ++unseen;
      enc.feature_ids.push_back(HashNgram(g, config.bucket, vocab_size));
    }
  }
  if (enc.feature_ids.empty()) {
    enc.unk_ngram_ratio = 1.0;
  } else if (ngram_tokens == 0) {
    enc.unk_ngram_ratio = 0.0;
  } else {
    enc.unk_ngram_ratio =
        static_cast<double>(unseen) / static_cast<double>(ngram_tokens);
  }
  return enc;
}

std::vector<double> MeanEmbedding(std::span<const float> table, int dim,
                                  std::span<const int64_t> feature_ids) {
  std::vector<double> out(dim, 0.0);
  if (feature_ids.empty()) return out;
  for (int64_t row : feature_ids) {
    const float* r = table.data() + row * dim;
    for (int k = 0; k < dim; ++k) out[k] += r[k];
  }
  const double inv = 1.0 / static_cast<double>(feature_ids.size());
  for (double& v : out) v *= inv;
  return out;
}

}  // namespace conlid
