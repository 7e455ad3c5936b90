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

#ifndef CONLID_INFERENCE_H_
#define CONLID_INFERENCE_H_

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "conlid/model.h"

namespace conlid {

struct Prediction {
  std::string label;
  double prob = 0.0;
  double unk_ngram_ratio = 0.0;

  bool operator==(const Prediction&) const = default;
};

// A probability distribution keyed by label code.
struct Distribution {
  std::vector<std::string> labels;
  std::vector<double> probs;
};

// Argmax of the model's distribution; ties go to the lowest class id.
Prediction Predict(const Model& model, std::string_view text);

// Top-k labels by probability (ties by ascending class id). k is clamped to
// the number of classes; k < 1 is a ConfigError.
std::vector<Prediction> PredictTopK(const Model& model, std::string_view text,
                                    size_t k);

// Full distribution in class-id order.
Distribution PredictDistribution(const Model& model, std::string_view text);

// Of two top-1 predictions, the more confident one; an exact tie keeps `a`.
Prediction EnsembleMax(const Prediction& a, const Prediction& b);

// EnsembleMax over two full distributions. Throws DataError when the label
// sets share no label or a distribution is malformed.
Prediction EnsembleMax(const Distribution& a, const Distribution& b);

// Element-wise mean over the union of labels, zero-filling labels missing
// from one side. Labels keep a's order followed by b's new labels.
Distribution AverageDistributions(const Distribution& a, const Distribution& b);

// Argmax of AverageDistributions(a, b); ties go to the earlier label.
Prediction EnsembleAvg(const Distribution& a, const Distribution& b);

// Number of filter steps applied to UND documents.
inline constexpr int kRecoverySteps = 5;
inline constexpr double kRecoveryMinProb = 0.95;
inline constexpr double kRecoveryMaxUnkRatio = 0.05;
// Consecutive single-letter tokens that mark a spelled-out letter sequence.
inline constexpr size_t kLetterRunLength = 3;

struct RecoveryVerdict {
  bool accepted = false;
  // Failed steps in ascending order, from {1, 2, 3, 4, 5}.
  std::vector<int> failed_steps;
};

// True when `text` holds kLetterRunLength or more consecutive whitespace-
// separated tokens that are a single letter each.
bool HasSpacedLetterRun(std::string_view text);

// Runs all five checks without short-circuiting:
//   1. script of the predicted label == declared_script
//   2. prob > 0.95
//   3. unseen n-gram ratio < 0.05
//   4. no run of spaced single letters
//   5. more than one word
RecoveryVerdict EvaluateRecovery(const Prediction& prediction,
                                 std::string_view text,
                                 std::string_view declared_script);

RecoveryVerdict RecoverUnd(const Model& model, std::string_view text,
                           std::string_view declared_script);

// Script code of an "und_Xxxx"-style label ("UND_Cyrl" -> "Cyrl").
std::string DeclaredScriptOf(std::string_view und_label);

// Prediction file: "doc_id<TAB>label<TAB>prob" per line. A document may
// have several rows (top-k), most probable first.
struct PredictionRow {
  std::string doc_id;
  std::string label;
  double prob = 0.0;
};

std::vector<PredictionRow> ReadPredictionTsv(const std::string& path);
void WritePredictionTsv(const std::vector<PredictionRow>& rows,
                        const std::string& path);
std::string FormatPredictionRow(const PredictionRow& row);

}  // namespace conlid

#endif  // CONLID_INFERENCE_H_
