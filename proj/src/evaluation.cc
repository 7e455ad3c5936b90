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

#include "conlid/evaluation.h"

#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "conlid/corpus.h"
#include "conlid/error.h"
#include "json.hpp"

namespace conlid {

namespace {

double Ratio(uint64_t num, uint64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

std::string Num(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// Splits "a<TAB>b" into exactly two fields.
std::vector<std::pair<std::string, std::string>> ReadTwoColumnTsv(
    const std::string& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::vector<std::pair<std::string, std::string>> rows;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const size_t tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
      throw DataError(path + ":" + std::to_string(line_no) + ": expected " + what);
    }
    rows.emplace_back(line.substr(0, tab), line.substr(tab + 1));
  }
  return rows;
}

}  // namespace

void ConfusionMatrix::Add(const std::string& gold, const std::string& pred,
                          uint64_t n) {
  counts_[{gold, pred}] += n;
  gold_labels_.insert(gold);
  labels_.insert(gold);
  labels_.insert(pred);
  total_ += n;
}

uint64_t ConfusionMatrix::count(const std::string& gold,
                                const std::string& pred) const {
  auto it = counts_.find({gold, pred});
  return it == counts_.end() ? 0 : it->second;
}

ConfusionMatrix Confusion(const std::vector<std::string>& golds,
                          const std::vector<std::string>& preds) {
  if (golds.size() != preds.size()) {
    throw DataError("gold and prediction lists differ in length (" +
                    std::to_string(golds.size()) + " vs " +
                    std::to_string(preds.size()) + ")");
  }
  ConfusionMatrix cm;
  for (size_t i = 0; i < golds.size(); ++i) cm.Add(golds[i], preds[i]);
  return cm;
}

MetricReport Metrics(const ConfusionMatrix& cm) {
  if (cm.empty()) throw DataError("cannot score an empty confusion matrix");
  std::map<std::string, uint64_t> row_sum, col_sum;
  for (const auto& [key, n] : cm.counts()) {
    row_sum[key.first] += n;
    col_sum[key.second] += n;
  }
  MetricReport report;
  for (const auto& label : cm.gold_labels()) {
    LanguageMetrics m;
    m.tp = cm.count(label, label);
    m.fn = row_sum[label] - m.tp;
    m.fp = col_sum[label] - m.tp;
    m.tn = cm.total() - m.tp - m.fp - m.fn;
    m.precision = Ratio(m.tp, m.tp + m.fp);
    m.recall = Ratio(m.tp, m.tp + m.fn);
    m.f1 = m.precision + m.recall == 0.0
               ? 0.0
               : 2.0 * m.precision * m.recall / (m.precision + m.recall);
    m.fpr = Ratio(m.fp, m.fp + m.tn);
    report.macro_f1 += m.f1;
    report.macro_fpr += m.fpr;
    report.per_language.emplace(label, m);
  }
  const auto n = static_cast<double>(report.per_language.size());
  report.macro_f1 /= n;
  report.macro_fpr /= n;
  return report;
}

Agreement ComputeAgreement(const std::vector<std::string>& preds_a,
                           const std::vector<std::string>& preds_b,
                           const std::vector<std::string>& langs_of_docs) {
  if (preds_a.size() != preds_b.size() || preds_a.size() != langs_of_docs.size()) {
    throw DataError("agreement inputs differ in length");
  }
  if (preds_a.empty()) throw DataError("agreement needs at least one document");
  std::map<std::string, std::pair<uint64_t, uint64_t>> groups;  // match, total
  uint64_t matches = 0;
  for (size_t i = 0; i < preds_a.size(); ++i) {
    const bool same = preds_a[i] == preds_b[i];
    auto& g = groups[langs_of_docs[i]];
    g.first += same;
    g.second += 1;
    matches += same;
  }
  Agreement a;
  a.micro = Ratio(matches, preds_a.size());
  for (const auto& [lang, g] : groups) a.macro += Ratio(g.first, g.second);
  a.macro /= static_cast<double>(groups.size());
  return a;
}

std::vector<GroupDelta> StratifiedDelta(const MetricReport& base,
                                        const MetricReport& other,
                                        const std::map<std::string, std::string>& grouping) {
  if (base.per_language.size() != other.per_language.size()) {
    throw DataError("reports cover different gold languages");
  }
  std::map<std::string, GroupDelta> acc;
  for (const auto& [label, m] : base.per_language) {
    auto it = other.per_language.find(label);
    if (it == other.per_language.end()) {
      throw DataError("language '" + label + "' missing from compared report");
    }
    auto g = grouping.find(label);
    const std::string group = g == grouping.end() ? kUngrouped : g->second;
    auto& row = acc[group];
    row.group = group;
    row.languages += 1;
    row.base_f1 += m.f1;
    row.delta_f1 += it->second.f1 - m.f1;
  }
  std::vector<GroupDelta> out;
  for (auto& [name, row] : acc) {
    row.base_f1 /= static_cast<double>(row.languages);
    row.delta_f1 /= static_cast<double>(row.languages);
    out.push_back(row);
  }
  return out;
}

std::vector<GroupDelta> GroupMeans(const MetricReport& report,
                                   const std::map<std::string, std::string>& grouping) {
  return StratifiedDelta(report, report, grouping);
}

std::vector<MisclassificationEntry> MisclassificationReport(const ConfusionMatrix& cm,
                                                            double f1_threshold) {
  const auto report = Metrics(cm);
  std::map<std::string, std::map<std::string, uint64_t>> wrong;
  for (const auto& [key, n] : cm.counts()) {
    if (key.first != key.second) wrong[key.first][key.second] += n;
  }
  std::vector<MisclassificationEntry> out;
  for (const auto& [label, targets] : wrong) {
    const auto& m = report.per_language.at(label);
    if (!(m.f1 < f1_threshold)) continue;
    MisclassificationEntry e;
    e.label = label;
    e.f1 = m.f1;
    e.unique_misclassified_as = targets.size();
    const std::string script = ScriptOfLabel(label);
    uint64_t top = 0, same_script = 0;
    for (const auto& [target, n] : targets) {
      e.errors += n;
      if (n > top) {
        top = n;
        e.top_target = target;
      }
      if (SameTag(ScriptOfLabel(target), script)) same_script += n;
    }
    e.top_ratio = Ratio(top, e.errors);
    e.same_script_ratio = Ratio(same_script, e.errors);
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> ReadGoldTsv(const std::string& path) {
  return ReadTwoColumnTsv(path, "doc_id<TAB>label");
}

void WriteGoldTsv(const std::vector<std::pair<std::string, std::string>>& rows,
                  const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  for (const auto& [doc, label] : rows) out << doc << '\t' << label << '\n';
  if (!out) throw IoError("error while writing '" + path + "'");
}

std::map<std::string, std::string> ReadGroupingTsv(const std::string& path) {
  std::map<std::string, std::string> out;
  for (auto& [label, group] : ReadTwoColumnTsv(path, "label<TAB>group")) {
    out[label] = group;
  }
  return out;
}

std::vector<PredictionRow> TopPredictionPerDoc(const std::vector<PredictionRow>& rows) {
  std::vector<PredictionRow> out;
  std::unordered_map<std::string, size_t> slot;
  for (const auto& r : rows) {
    auto [it, inserted] = slot.emplace(r.doc_id, out.size());
    if (inserted) {
      out.push_back(r);
    } else if (r.prob > out[it->second].prob) {
      out[it->second] = r;
    }
  }
  return out;
}

AlignedLabels AlignByDocId(const std::vector<std::pair<std::string, std::string>>& gold,
                           const std::vector<PredictionRow>& preds) {
  const auto top = TopPredictionPerDoc(preds);
  std::unordered_map<std::string, const std::string*> pred_of;
  for (const auto& r : top) pred_of.emplace(r.doc_id, &r.label);
  std::unordered_set<std::string> seen;
  AlignedLabels out;
  for (const auto& [doc, label] : gold) {
    if (!seen.insert(doc).second) throw DataError("duplicate gold doc_id '" + doc + "'");
    auto it = pred_of.find(doc);
    if (it == pred_of.end()) throw DataError("no prediction for doc_id '" + doc + "'");
    out.doc_ids.push_back(doc);
    out.golds.push_back(label);
    out.preds.push_back(*it->second);
  }
  if (pred_of.size() != seen.size()) {
    throw DataError("prediction file has doc_ids absent from the gold file");
  }
  return out;
}

std::string MetricReportTsv(const MetricReport& report) {
  std::ostringstream out;
  out << "label\tprecision\trecall\tf1\tfpr\ttp\tfp\tfn\ttn\n";
  for (const auto& [label, m] : report.per_language) {
    out << label << '\t' << Num(m.precision) << '\t' << Num(m.recall) << '\t'
        << Num(m.f1) << '\t' << Num(m.fpr) << '\t' << m.tp << '\t' << m.fp << '\t'
        << m.fn << '\t' << m.tn << '\n';
  }
  out << "MACRO\t\t\t" << Num(report.macro_f1) << '\t' << Num(report.macro_fpr)
      << "\t\t\t\t\n";
  return out.str();
}

std::string MetricReportJson(const MetricReport& report,
                             const std::vector<GroupDelta>& groups,
                             const std::vector<MisclassificationEntry>& misclassified) {
  nlohmann::ordered_json j;
  j["macro_f1"] = report.macro_f1;
  j["macro_fpr"] = report.macro_fpr;
  j["languages"] = report.per_language.size();
  auto& per = j["per_language"] = nlohmann::ordered_json::object();
  for (const auto& [label, m] : report.per_language) {
    per[label] = {{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1},
                  {"fpr", m.fpr},             {"tp", m.tp},         {"fp", m.fp},
                  {"fn", m.fn},               {"tn", m.tn}};
  }
  if (!groups.empty()) {
    auto& g = j["groups"] = nlohmann::ordered_json::array();
    for (const auto& row : groups) {
      g.push_back({{"group", row.group}, {"languages", row.languages},
                   {"base_f1", row.base_f1}, {"delta_f1", row.delta_f1}});
    }
  }
  if (!misclassified.empty()) {
    auto& mc = j["misclassification"] = nlohmann::ordered_json::array();
    for (const auto& e : misclassified) {
      mc.push_back({{"label", e.label}, {"f1", e.f1}, {"errors", e.errors},
                    {"unique_misclassified_as", e.unique_misclassified_as},
                    {"top_target", e.top_target}, {"top_ratio", e.top_ratio},
                    {"same_script_ratio", e.same_script_ratio}});
    }
  }
  return j.dump(2) + "\n";
}

std::string GroupDeltaTsv(const std::vector<GroupDelta>& rows) {
  std::ostringstream out;
  out << "group\tlanguages\tbase_f1\tdelta_f1\n";
  for (const auto& r : rows) {
    out << r.group << '\t' << r.languages << '\t' << Num(r.base_f1) << '\t'
        << Num(r.delta_f1) << '\n';
  }
  return out.str();
}

std::string MisclassificationTsv(const std::vector<MisclassificationEntry>& rows) {
  std::ostringstream out;
  out << "label\tf1\terrors\tunique_misclassified_as\ttop_target\ttop_ratio\t"
         "same_script_ratio\n";
  for (const auto& e : rows) {
    out << e.label << '\t' << Num(e.f1) << '\t' << e.errors << '\t'
        << e.unique_misclassified_as << '\t' << e.top_target << '\t'
        << Num(e.top_ratio) << '\t' << Num(e.same_script_ratio) << '\n';
  }
  return out.str();
}

}  // namespace conlid
