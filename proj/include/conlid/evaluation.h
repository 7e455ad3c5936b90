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

#ifndef CONLID_EVALUATION_H_
#define CONLID_EVALUATION_H_

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "conlid/inference.h"

namespace conlid {

// Counts keyed by (gold label, predicted label).
class ConfusionMatrix {
 public:
  void Add(const std::string& gold, const std::string& pred, uint64_t n = 1);

  uint64_t count(const std::string& gold, const std::string& pred) const;
  uint64_t total() const { return total_; }
  bool empty() const { return total_ == 0; }

  const std::map<std::pair<std::string, std::string>, uint64_t>& counts() const {
    return counts_;
  }
  // Labels that occur as gold.
  const std::set<std::string>& gold_labels() const { return gold_labels_; }
  // Gold and predicted labels together.
  const std::set<std::string>& labels() const { return labels_; }

 private:
  std::map<std::pair<std::string, std::string>, uint64_t> counts_;
  std::set<std::string> gold_labels_;
  std::set<std::string> labels_;
  uint64_t total_ = 0;
};

// Throws DataError on a length mismatch.
ConfusionMatrix Confusion(const std::vector<std::string>& golds,
                          const std::vector<std::string>& preds);

struct LanguageMetrics {
  uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double fpr = 0.0;
};

struct MetricReport {
  // Gold languages only.
  std::map<std::string, LanguageMetrics> per_language;
  double macro_f1 = 0.0;
  double macro_fpr = 0.0;
};

// One-vs-rest metrics per gold language; zero denominators give 0. Throws
// DataError for an empty matrix.
MetricReport Metrics(const ConfusionMatrix& cm);

struct Agreement {
  double macro = 0.0;
  double micro = 0.0;
};

// micro = matching predictions / documents; macro = unweighted mean over
// document-language groups of their match ratios.
Agreement ComputeAgreement(const std::vector<std::string>& preds_a,
                           const std::vector<std::string>& preds_b,
                           const std::vector<std::string>& langs_of_docs);

inline constexpr const char* kUngrouped = "UNGROUPED";

struct GroupDelta {
  std::string group;
  size_t languages = 0;
  double base_f1 = 0.0;
  double delta_f1 = 0.0;
};

// Mean base F1 and mean (other - base) F1 per group, groups in name order.
// Languages without a group fall under kUngrouped. Throws DataError when the
// reports cover different languages.
std::vector<GroupDelta> StratifiedDelta(const MetricReport& base,
                                        const MetricReport& other,
                                        const std::map<std::string, std::string>& grouping);

// Mean F1 per group of a single report.
std::vector<GroupDelta> GroupMeans(const MetricReport& report,
                                   const std::map<std::string, std::string>& grouping);

struct MisclassificationEntry {
  std::string label;
  double f1 = 0.0;
  uint64_t errors = 0;
  size_t unique_misclassified_as = 0;
  std::string top_target;
  double top_ratio = 0.0;
  double same_script_ratio = 0.0;
};

// For every gold language with F1 < f1_threshold and at least one error.
// The top target is the most frequent wrong label (smallest label on ties).
std::vector<MisclassificationEntry> MisclassificationReport(const ConfusionMatrix& cm,
                                                            double f1_threshold);

// --- file formats ---

// "doc_id<TAB>label" per line.
std::vector<std::pair<std::string, std::string>> ReadGoldTsv(const std::string& path);
void WriteGoldTsv(const std::vector<std::pair<std::string, std::string>>& rows,
                  const std::string& path);

// "label<TAB>group" per line.
std::map<std::string, std::string> ReadGroupingTsv(const std::string& path);

// Pairs gold labels with each document's top prediction. Throws DataError
// when the two files do not cover the same doc_id set or a doc_id repeats in
// the gold file.
struct AlignedLabels {
  std::vector<std::string> doc_ids;
  std::vector<std::string> golds;
  std::vector<std::string> preds;
};
AlignedLabels AlignByDocId(const std::vector<std::pair<std::string, std::string>>& gold,
                           const std::vector<PredictionRow>& preds);

// Top prediction per doc_id, in first-seen doc order.
std::vector<PredictionRow> TopPredictionPerDoc(const std::vector<PredictionRow>& rows);

std::string MetricReportTsv(const MetricReport& report);
std::string MetricReportJson(const MetricReport& report,
                             const std::vector<GroupDelta>& groups = {},
                             const std::vector<MisclassificationEntry>& misclassified = {});
std::string GroupDeltaTsv(const std::vector<GroupDelta>& rows);
std::string MisclassificationTsv(const std::vector<MisclassificationEntry>& rows);

}  // namespace conlid

#endif  // CONLID_EVALUATION_H_
