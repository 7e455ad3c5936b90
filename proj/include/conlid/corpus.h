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

#ifndef CONLID_CORPUS_H_
#define CONLID_CORPUS_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace conlid {

// Script/domain value that compares unequal to everything, itself included.
inline constexpr std::string_view kUnknownTag = "UNKNOWN";

// True when both tags are known and equal.
bool SameTag(std::string_view a, std::string_view b);

// Script code embedded in a language label: the suffix after the last
// underscore ("eng_Latn" -> "Latn"). Labels without one yield kUnknownTag.
std::string ScriptOfLabel(std::string_view label);

// Strips leading and trailing ASCII whitespace.
std::string_view Trim(std::string_view s);

struct Example {
  std::string text;
  std::string label;
  std::string script;
  std::string domain;

  bool operator==(const Example&) const = default;
};

// Builds an Example, trimming text and filling script/domain defaults.
// Returns nullopt when text is empty after trimming or label is empty.
std::optional<Example> MakeExample(std::string_view text, std::string_view label,
                                   std::optional<std::string_view> script = {},
                                   std::optional<std::string_view> domain = {});

// Bidirectional label <-> dense class id map. Ids follow sorted label order.
class LabelIndex {
 public:
  LabelIndex() = default;
  explicit LabelIndex(std::vector<std::string> labels);

  size_t size() const { return labels_.size(); }
  const std::string& label(int32_t id) const { return labels_.at(id); }
  const std::vector<std::string>& labels() const { return labels_; }

  // -1 when absent.
  int32_t id(std::string_view label) const;
  bool contains(std::string_view label) const { return id(label) >= 0; }

  bool operator==(const LabelIndex& o) const { return labels_ == o.labels_; }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, int32_t> ids_;
};

// Immutable ordered collection of examples plus its label index.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(std::vector<Example> examples);

  const std::vector<Example>& examples() const { return examples_; }
  const LabelIndex& label_index() const { return label_index_; }
  size_t size() const { return examples_.size(); }
  bool empty() const { return examples_.empty(); }
  const Example& operator[](size_t i) const { return examples_[i]; }

  int32_t class_id(size_t i) const { return class_ids_[i]; }

  // Example indices per class id, in dataset order.
  std::vector<std::vector<size_t>> indices_by_class() const;

  // Examples per label.
  std::map<std::string, size_t> label_counts() const;

 private:
  std::vector<Example> examples_;
  LabelIndex label_index_;
  std::vector<int32_t> class_ids_;
};

enum class DatasetFormat { kJsonl, kLabeledLines };

// "jsonl" / "labeled-lines"; anything else is a ConfigError.
DatasetFormat ParseDatasetFormat(std::string_view name);
// .jsonl files are jsonl, everything else labeled-lines.
DatasetFormat GuessDatasetFormat(std::string_view path);

struct LoadResult {
  Dataset dataset;
  size_t skipped = 0;
};

// Reads a dataset file. Records that fail to parse or violate the Example
// invariants are skipped and counted; blank lines are ignored.
// Throws IoError if the file cannot be read and DataError if no valid record
// remains.
LoadResult LoadDataset(const std::string& path, DatasetFormat format);

// Writes examples in the given format. labeled-lines drops script/domain.
void SaveDataset(const Dataset& dataset, const std::string& path,
                 DatasetFormat format);

struct SplitSpec {
  double train_fraction = 0.85;
  uint64_t seed = 0;
};

// Per-language stratified split. A language with n >= 2 examples sends
// round(fraction * n), clamped to [1, n - 1], to train; singletons go to
// train. Both outputs keep the input's relative order.
std::pair<Dataset, Dataset> Split(const Dataset& dataset, const SplitSpec& spec);

// Keeps min(count, cap) examples of every language, chosen uniformly without
// replacement, preserving relative order.
Dataset Downsample(const Dataset& dataset, size_t cap, uint64_t seed);

enum class ResourceLevel { kLow, kHigh };

const char* ResourceLevelName(ResourceLevel level);

// Low iff the language has fewer than `threshold` examples.
std::map<std::string, ResourceLevel> ResourceLevels(const Dataset& dataset,
                                                    size_t threshold);

}  // namespace conlid

#endif  // CONLID_CORPUS_H_
