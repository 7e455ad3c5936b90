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

#include "conlid/inference.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <unordered_map>

#include "conlid/corpus.h"
#include "conlid/error.h"
#include "utf8.h"

namespace conlid {

namespace {

uint32_t DecodeCodePoint(std::string_view s) {
  const auto b0 = static_cast<unsigned char>(s[0]);
  if (s.size() == 1) return b0;
  uint32_t cp = s.size() == 2 ? (b0 & 0x1F) : s.size() == 3 ? (b0 & 0x0F) : (b0 & 0x07);
  for (size_t i = 1; i < s.size(); ++i) {
    cp = (cp << 6) | (static_cast<unsigned char>(s[i]) & 0x3F);
  }
  return cp;
}

// Letters are approximated as code points outside the ASCII non-letters and
// the common punctuation/symbol blocks.
bool IsLetter(uint32_t cp) {
  if (cp < 0x80) return (cp >= 'A' && cp <= 'Z') || (cp >= 'a' && cp <= 'z');
  if (cp < 0xC0) return cp == 0xAA || cp == 0xB5 || cp == 0xBA;
  if (cp == 0xD7 || cp == 0xF7) return false;
  if (cp >= 0x2000 && cp <= 0x2BFF) return false;  // punctuation, symbols
  if (cp >= 0x3000 && cp <= 0x303F) return false;  // CJK punctuation
  if (cp >= 0xFE30 && cp <= 0xFE6F) return false;
  if (cp >= 0xFF00 && cp <= 0xFF20) return false;
  return true;
}

bool IsSingleLetter(std::string_view token) {
  const auto offsets = internal::CodePointOffsets(token);
  return offsets.size() == 2 && IsLetter(DecodeCodePoint(token));
}

void CheckDistribution(const Distribution& d, std::unordered_map<std::string, size_t>& index) {
  if (d.labels.size() != d.probs.size()) {
    throw DataError("distribution labels and probabilities differ in length");
  }
  index.clear();
  for (size_t i = 0; i < d.labels.size(); ++i) {
    if (!index.emplace(d.labels[i], i).second) {
      throw DataError("duplicate label '" + d.labels[i] + "' in distribution");
    }
  }
}

Prediction TopOf(const Distribution& d) {
  if (d.labels.empty()) throw DataError("empty distribution");
  size_t best = 0;
  for (size_t i = 1; i < d.probs.size(); ++i) {
    if (d.probs[i] > d.probs[best]) best = i;
  }
  return {d.labels[best], d.probs[best], 0.0};
}

std::string FormatDouble(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

Distribution PredictDistribution(const Model& model, std::string_view text) {
  auto fwd = Forward(model, text);
  return {model.labels.labels(), std::move(fwd.probs)};
}

std::vector<Prediction> PredictTopK(const Model& model, std::string_view text,
                                    size_t k) {
  if (k < 1) throw ConfigError("k must be >= 1");
  const auto fwd = Forward(model, text);
  std::vector<size_t> ids(fwd.probs.size());
  std::iota(ids.begin(), ids.end(), 0);
  k = std::min(k, ids.size());
  std::partial_sort(ids.begin(), ids.begin() + static_cast<long>(k), ids.end(),
                    [&](size_t a, size_t b) {
                      return fwd.probs[a] != fwd.probs[b] ? fwd.probs[a] > fwd.probs[b]
                                                          : a < b;
                    });
  std::vector<Prediction> out;
  out.reserve(k);
  for (size_t i = 0; i < k; ++i) {
    out.push_back({model.labels.label(static_cast<int32_t>(ids[i])), fwd.probs[ids[i]],
                   fwd.unk_ngram_ratio});
  }
  return out;
}

Prediction Predict(const Model& model, std::string_view text) {
  return PredictTopK(model, text, 1).front();
}

Prediction EnsembleMax(const Prediction& a, const Prediction& b) {
  return b.prob > a.prob ? b : a;
}

Prediction EnsembleMax(const Distribution& a, const Distribution& b) {
  std::unordered_map<std::string, size_t> ia, ib;
  CheckDistribution(a, ia);
  CheckDistribution(b, ib);
  const bool shared = std::any_of(a.labels.begin(), a.labels.end(),
                                  [&](const std::string& l) { return ib.contains(l); });
  if (!shared) throw DataError("ensemble members share no label");
  return EnsembleMax(TopOf(a), TopOf(b));
}

Distribution AverageDistributions(const Distribution& a, const Distribution& b) {
  std::unordered_map<std::string, size_t> ia, ib;
  CheckDistribution(a, ia);
  CheckDistribution(b, ib);
  Distribution out;
  out.labels = a.labels;
  for (const auto& l : b.labels) {
    if (!ia.contains(l)) out.labels.push_back(l);
  }
  out.probs.reserve(out.labels.size());
  for (const auto& l : out.labels) {
    auto pa = ia.find(l);
    auto pb = ib.find(l);
    const double va = pa == ia.end() ? 0.0 : a.probs[pa->second];
    const double vb = pb == ib.end() ? 0.0 : b.probs[pb->second];
    out.probs.push_back((va + vb) / 2.0);
  }
  return out;
}

Prediction EnsembleAvg(const Distribution& a, const Distribution& b) {
  return TopOf(AverageDistributions(a, b));
}

bool HasSpacedLetterRun(std::string_view text) {
  size_t run = 0;
  for (auto token : Tokenize(text)) {
    run = IsSingleLetter(token) ? run + 1 : 0;
    if (run >= kLetterRunLength) return true;
  }
  return false;
}

RecoveryVerdict EvaluateRecovery(const Prediction& prediction,
                                 std::string_view text,
                                 std::string_view declared_script) {
  RecoveryVerdict v;
  if (!SameTag(ScriptOfLabel(prediction.label), declared_script)) v.failed_steps.push_back(1);
  if (!(prediction.prob > kRecoveryMinProb)) v.failed_steps.push_back(2);
  if (!(prediction.unk_ngram_ratio < kRecoveryMaxUnkRatio)) v.failed_steps.push_back(3);
  if (HasSpacedLetterRun(text)) v.failed_steps.push_back(4);
  if (Tokenize(text).size() <= 1) v.failed_steps.push_back(5);
  v.accepted = v.failed_steps.empty();
  return v;
}

RecoveryVerdict RecoverUnd(const Model& model, std::string_view text,
                           std::string_view declared_script) {
  return EvaluateRecovery(Predict(model, text), text, declared_script);
}

std::string DeclaredScriptOf(std::string_view und_label) {
  return ScriptOfLabel(und_label);
}

std::string FormatPredictionRow(const PredictionRow& row) {
  return row.doc_id + '\t' + row.label + '\t' + FormatDouble(row.prob);
}

std::vector<PredictionRow> ReadPredictionTsv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::vector<PredictionRow> rows;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const size_t t1 = line.find('\t');
    const size_t t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos || line.find('\t', t2 + 1) != std::string::npos) {
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": expected doc_id<TAB>label<TAB>prob");
    }
    PredictionRow row{line.substr(0, t1), line.substr(t1 + 1, t2 - t1 - 1), 0.0};
    const char* first = line.data() + t2 + 1;
    const char* last = line.data() + line.size();
    auto res = std::from_chars(first, last, row.prob);
    if (res.ec != std::errc() || res.ptr != last || row.prob < 0.0 || row.prob > 1.0) {
      throw DataError(path + ":" + std::to_string(line_no) + ": bad probability");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void WritePredictionTsv(const std::vector<PredictionRow>& rows,
                        const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  for (const auto& r : rows) out << FormatPredictionRow(r) << '\n';
  if (!out) throw IoError("error while writing '" + path + "'");
}

}  // namespace conlid
