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

#include "conlid/corpus.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "conlid/error.h"
#include "conlid/random.h"
#include "json.hpp"

namespace conlid {

namespace {

bool IsSpace(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\v' || c == '\f' ||
         c == '\r';
}

constexpr std::string_view kLabelPrefix = "__label__";

std::optional<Example> ParseJsonl(std::string_view line) {
  auto json = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (!json.is_object()) return std::nullopt;
  auto text = json.find("text");
  auto label = json.find("label");
  if (text == json.end() || label == json.end() || !text->is_string() ||
      !label->is_string()) {
    return std::nullopt;
  }
  std::optional<std::string> script, domain;
  if (auto it = json.find("script"); it != json.end()) {
    if (!it->is_string()) return std::nullopt;
    script = it->get<std::string>();
  }
  if (auto it = json.find("domain"); it != json.end()) {
    if (!it->is_string()) return std::nullopt;
    domain = it->get<std::string>();
  }
  const auto& t = text->get_ref<const std::string&>();
  const auto& l = label->get_ref<const std::string&>();
  std::optional<std::string_view> s, d;
  if (script) s = *script;
  if (domain) d = *domain;
  return MakeExample(t, l, s, d);
}

std::optional<Example> ParseLabeledLine(std::string_view line) {
  if (!line.starts_with(kLabelPrefix)) return std::nullopt;
  line.remove_prefix(kLabelPrefix.size());
  const size_t space = line.find(' ');
  if (space == std::string_view::npos) return std::nullopt;
  return MakeExample(line.substr(space + 1), line.substr(0, space));
}

}  // namespace

bool SameTag(std::string_view a, std::string_view b) {
  return a == b && a != kUnknownTag;
}

std::string ScriptOfLabel(std::string_view label) {
  const size_t pos = label.rfind('_');
  if (pos == std::string_view::npos || pos + 1 == label.size()) {
    return std::string(kUnknownTag);
  }
  return std::string(label.substr(pos + 1));
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && IsSpace(s.front())) s.remove_prefix(1);
  while (!s.empty() && IsSpace(s.back())) s.remove_suffix(1);
  return s;
}

std::optional<Example> MakeExample(std::string_view text, std::string_view label,
                                   std::optional<std::string_view> script,
                                   std::optional<std::string_view> domain) {
  text = Trim(text);
  label = Trim(label);
  if (text.empty() || label.empty()) return std::nullopt;
  Example ex;
  ex.text = std::string(text);
  ex.label = std::string(label);
  ex.script = script && !Trim(*script).empty() ? std::string(Trim(*script))
                                               : ScriptOfLabel(label);
  ex.domain = domain && !Trim(*domain).empty() ? std::string(Trim(*domain))
                                               : std::string(kUnknownTag);
  return ex;
}

LabelIndex::LabelIndex(std::vector<std::string> labels) {
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  labels_ = std::move(labels);
  for (size_t i = 0; i < labels_.size(); ++i) {
    ids_.emplace(labels_[i], static_cast<int32_t>(i));
  }
}

int32_t LabelIndex::id(std::string_view label) const {
  auto it = ids_.find(std::string(label));
  return it == ids_.end() ? -1 : it->second;
}

Dataset::Dataset(std::vector<Example> examples) : examples_(std::move(examples)) {
  std::vector<std::string> labels;
  labels.reserve(examples_.size());
  for (const auto& ex : examples_) labels.push_back(ex.label);
  label_index_ = LabelIndex(std::move(labels));
  class_ids_.reserve(examples_.size());
  for (const auto& ex : examples_) class_ids_.push_back(label_index_.id(ex.label));
}

std::vector<std::vector<size_t>> Dataset::indices_by_class() const {
  std::vector<std::vector<size_t>> out(label_index_.size());
  for (size_t i = 0; i < examples_.size(); ++i) out[class_ids_[i]].push_back(i);
  return out;
}

std::map<std::string, size_t> Dataset::label_counts() const {
  std::map<std::string, size_t> counts;
  for (const auto& ex : examples_) ++counts[ex.label];
  return counts;
}

DatasetFormat ParseDatasetFormat(std::string_view name) {
  if (name == "jsonl") return DatasetFormat::kJsonl;
  if (name == "labeled-lines") return DatasetFormat::kLabeledLines;
  throw ConfigError("unknown dataset format '" + std::string(name) + "'");
}

DatasetFormat GuessDatasetFormat(std::string_view path) {
  return path.ends_with(".jsonl") ? DatasetFormat::kJsonl
                                  : DatasetFormat::kLabeledLines;
}

LoadResult LoadDataset(const std::string& path, DatasetFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::vector<Example> examples;
  size_t skipped = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (Trim(line).empty()) continue;
    auto ex = format == DatasetFormat::kJsonl ? ParseJsonl(line)
                                              : ParseLabeledLine(line);
    if (ex) {
      examples.push_back(std::move(*ex));
    } else {
      ++skipped;
    }
  }
  if (in.bad()) throw IoError("error while reading '" + path + "'");
  if (examples.empty()) {
    throw DataError("no valid records in '" + path + "' (" +
                    std::to_string(skipped) + " skipped)");
  }
  return {Dataset(std::move(examples)), skipped};
}

void SaveDataset(const Dataset& dataset, const std::string& path,
                 DatasetFormat format) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  for (const auto& ex : dataset.examples()) {
    if (format == DatasetFormat::kJsonl) {
      nlohmann::ordered_json j;
      j["text"] = ex.text;
      j["label"] = ex.label;
      j["script"] = ex.script;
      if (ex.domain != kUnknownTag) j["domain"] = ex.domain;
      out << j.dump() << '\n';
    } else {
      out << kLabelPrefix << ex.label << ' ' << ex.text << '\n';
    }
  }
  if (!out) throw IoError("error while writing '" + path + "'");
}

std::pair<Dataset, Dataset> Split(const Dataset& dataset, const SplitSpec& spec) {
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
    throw ConfigError("train_fraction must lie in (0, 1)");
  }
  Rng rng(spec.seed);
  std::vector<bool> to_train(dataset.size(), false);
  for (auto indices : dataset.indices_by_class()) {
    const size_t n = indices.size();
    size_t n_train = n;
    if (n >= 2) {
      n_train = static_cast<size_t>(std::llround(spec.train_fraction * n));
      n_train = std::clamp<size_t>(n_train, 1, n - 1);
    }
    rng.shuffle(indices);
    for (size_t k = 0; k < n_train; ++k) to_train[indices[k]] = true;
  }
  std::vector<Example> train, test;
  for (size_t i = 0; i < dataset.size(); ++i) {
    (to_train[i] ? train : test).push_back(dataset[i]);
  }
  return {Dataset(std::move(train)), Dataset(std::move(test))};
}

Dataset Downsample(const Dataset& dataset, size_t cap, uint64_t seed) {
  if (cap < 1) throw ConfigError("down-sampling cap must be >= 1");
  Rng rng(seed);
  std::vector<bool> keep(dataset.size(), false);
  for (auto indices : dataset.indices_by_class()) {
    if (indices.size() <= cap) {
      for (size_t i : indices) keep[i] = true;
      continue;
    }
    // Partial Fisher-Yates: the first `cap` slots become the sample.
    for (size_t k = 0; k < cap; ++k) {
      const size_t j = k + rng.below(indices.size() - k);
      std::swap(indices[k], indices[j]);
      keep[indices[k]] = true;
    }
  }
  std::vector<Example> out;
  for (size_t i = 0; i < dataset.size(); ++i) {
    if (keep[i]) out.push_back(dataset[i]);
  }
  return Dataset(std::move(out));
}

const char* ResourceLevelName(ResourceLevel level) {
  return level == ResourceLevel::kLow ? "low" : "high";
}

std::map<std::string, ResourceLevel> ResourceLevels(const Dataset& dataset,
                                                    size_t threshold) {
  if (threshold < 1) throw ConfigError("resource threshold must be >= 1");
  std::map<std::string, ResourceLevel> levels;
  for (const auto& [label, count] : dataset.label_counts()) {
    levels[label] = count < threshold ? ResourceLevel::kLow : ResourceLevel::kHigh;
  }
  return levels;
}

}  // namespace conlid
