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

#include "conlid/cli.h"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "conlid/corpus.h"
#include "conlid/error.h"
#include "conlid/evaluation.h"
#include "conlid/inference.h"
#include "conlid/model.h"
#include "conlid/trainer.h"

namespace conlid {

namespace {

struct Document {
  std::string id;
  std::string text;
  std::string label;  // gold label when read from a dataset file
};

// Reads documents: "text" = one per line (id = 1-based line number),
// "tsv" = doc_id<TAB>text, "jsonl"/"labeled-lines" = dataset records (id =
// 1-based record number).
std::vector<Document> ReadDocuments(const std::string& path, const std::string& format) {
  std::vector<Document> docs;
  if (format == "jsonl" || format == "labeled-lines") {
    const auto loaded = LoadDataset(path, ParseDatasetFormat(format));
    for (size_t i = 0; i < loaded.dataset.size(); ++i) {
      const auto& ex = loaded.dataset[i];
      docs.push_back({std::to_string(i + 1), ex.text, ex.label});
    }
    return docs;
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (format == "tsv") {
      if (line.empty()) continue;
      const size_t tab = line.find('\t');
      if (tab == std::string::npos) {
        throw DataError(path + ":" + std::to_string(line_no) + ": expected doc_id<TAB>text");
      }
      docs.push_back({line.substr(0, tab), line.substr(tab + 1), {}});
    } else {
      docs.push_back({std::to_string(line_no), line, {}});
    }
  }
  return docs;
}

// Evaluates fn(i) for i in [0, n) on the worker pool; results keep index
// order.
template <typename T>
std::vector<T> ParallelMap(size_t n, const std::function<T(size_t)>& fn) {
  std::vector<T> out(n);
  const size_t threads = std::min<size_t>(WorkerThreads(), std::max<size_t>(n, 1));
  if (threads <= 1) {
    for (size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (size_t i = t; i < n; i += threads) out[i] = fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

class OutputFile {
 public:
  OutputFile(const std::string& path, std::ostream& fallback) {
    if (path.empty()) {
      stream_ = &fallback;
    } else {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
      if (!*file_) throw IoError("cannot open '" + path + "' for writing");
      stream_ = file_.get();
    }
  }
  std::ostream& get() { return *stream_; }
  void Close(const std::string& path) {
    if (file_) {
      file_->close();
      if (!*file_) throw IoError("error while writing '" + path + "'");
    }
  }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_ = nullptr;
};

void WriteText(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw IoError("error while writing '" + path + "'");
}

DatasetFormat ResolveFormat(const std::string& format, const std::string& path) {
  return format == "auto" ? GuessDatasetFormat(path) : ParseDatasetFormat(format);
}

// Per-document distribution from a prediction file's rows.
std::map<std::string, Distribution> DistributionsByDoc(const std::vector<PredictionRow>& rows,
                                                       std::vector<std::string>& order) {
  std::map<std::string, Distribution> out;
  for (const auto& r : rows) {
    auto [it, inserted] = out.try_emplace(r.doc_id);
    if (inserted) order.push_back(r.doc_id);
    it->second.labels.push_back(r.label);
    it->second.probs.push_back(r.prob);
  }
  return out;
}

// Top row of one document's (possibly truncated) distribution; the first
// row wins ties.
Prediction TopRow(const Distribution& d) {
  size_t best = 0;
  for (size_t i = 1; i < d.probs.size(); ++i) {
    if (d.probs[i] > d.probs[best]) best = i;
  }
  return {d.labels[best], d.probs[best], 0.0};
}

std::string FormatNum(double v) {
  std::ostringstream s;
  s.precision(6);
  s << std::fixed << v;
  return s.str();
}

// Expands a key=value config file into "--key=value" arguments.
std::vector<std::string> ConfigArgs(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::vector<std::string> args;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto view = Trim(line);
    if (view.empty() || view.front() == '#') continue;
    const size_t eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": expected key=value");
    }
    auto key = Trim(view.substr(0, eq));
    auto value = Trim(view.substr(eq + 1));
    args.push_back("--" + std::string(key) + "=" + std::string(value));
  }
  return args;
}

struct Options {
  // split / downsample
  std::string input, out_train, out_test, output, format = "auto";
  double fraction = 0.85;
  uint64_t seed = 0;
  size_t cap = 100000;
  // train
  std::string variant = "conlid-s", model_out, telemetry;
  size_t batch = 128, bank = 2048, min_negatives = 1024;
  double lr = 1e-3, tau = 0.05;
  int epochs = 1, dim = 256, bucket = 1000000, minn = 2, maxn = 5, min_count = 1000;
  // predict / recover-und / ensemble
  std::string model, model_a, model_b, input_format = "text", out, gold_out;
  int topk = 1;
  std::string declared_script;
  std::string mode = "max", pred_a, pred_b;
  // evaluate / agree
  std::string gold, pred, baseline, groups, json, misclass_out, langs;
  double misclass_threshold = 0.8;
};

int CmdSplit(const Options& o, std::ostream& out, std::ostream& err) {
  const auto fmt = ResolveFormat(o.format, o.input);
  const auto loaded = LoadDataset(o.input, fmt);
  if (loaded.skipped) err << "skipped " << loaded.skipped << " invalid records\n";
  auto [train, test] = Split(loaded.dataset, {o.fraction, o.seed});
  SaveDataset(train, o.out_train, fmt);
  SaveDataset(test, o.out_test, fmt);
  out << "train\t" << train.size() << "\ntest\t" << test.size() << "\n";
  return kExitOk;
}

int CmdDownsample(const Options& o, std::ostream& out, std::ostream& err) {
  const auto fmt = ResolveFormat(o.format, o.input);
  const auto loaded = LoadDataset(o.input, fmt);
  if (loaded.skipped) err << "skipped " << loaded.skipped << " invalid records\n";
  const auto down = Downsample(loaded.dataset, o.cap, o.seed);
  SaveDataset(down, o.output, fmt);
  out << "kept\t" << down.size() << "\ndropped\t" << loaded.dataset.size() - down.size()
      << "\n";
  return kExitOk;
}

int CmdTrain(const Options& o, bool bank_given, std::ostream& out, std::ostream& err) {
  const auto loaded = LoadDataset(o.input, ResolveFormat(o.format, o.input));
  if (loaded.skipped) err << "skipped " << loaded.skipped << " invalid records\n";
  auto config = TrainConfig::ForVariant(ParseVariant(o.variant));
  config.batch_size = o.batch;
  config.epochs = o.epochs;
  config.lr0 = o.lr;
  config.seed = o.seed;
  config.loss.tau = o.tau;
  config.loss.min_negatives = o.min_negatives;
  if (bank_given || config.variant == Variant::kConLidS ||
      config.variant == Variant::kConLidH) {
    config.loss.bank_size = o.bank;
  }
  EncoderConfig enc;
  enc.dim = o.dim;
  enc.bucket = o.bucket;
  enc.minn = o.minn;
  enc.maxn = o.maxn;
  enc.min_count = o.min_count;
  config.Validate();
  enc.Validate();

  std::vector<StepRecord> pending;
  auto result = Train(loaded.dataset, config, enc, [&](const StepRecord& r) {
    if (!o.telemetry.empty()) pending.push_back(r);
  });
  if (!o.telemetry.empty()) AppendTelemetryCsv(pending, o.telemetry);
  SaveModel(result.model, o.model_out);
  const auto& last = result.telemetry.back();
  out << "variant\t" << VariantName(config.variant) << "\nsteps\t"
      << result.telemetry.size() << "\nclasses\t" << result.model.num_classes()
      << "\nfinal_ce_loss\t" << FormatNum(last.ce_loss) << "\nfinal_scl_loss\t"
      << FormatNum(last.scl_loss) << "\n";
  return kExitOk;
}

int CmdPredict(const Options& o, std::ostream& out) {
  if (o.topk < 1) throw ConfigError("--topk must be >= 1");
  const auto model = LoadModel(o.model);
  const auto docs = ReadDocuments(o.input, o.input_format);
  const auto k = static_cast<size_t>(o.topk);
  const auto preds = ParallelMap<std::vector<Prediction>>(
      docs.size(), [&](size_t i) { return PredictTopK(model, docs[i].text, k); });
  OutputFile file(o.out, out);
  for (size_t i = 0; i < docs.size(); ++i) {
    for (const auto& p : preds[i]) {
      file.get() << FormatPredictionRow({docs[i].id, p.label, p.prob}) << '\n';
    }
  }
  file.Close(o.out);
  if (!o.gold_out.empty()) {
    std::vector<std::pair<std::string, std::string>> gold;
    for (const auto& d : docs) {
      if (d.label.empty()) throw ConfigError("--gold-out needs a labeled dataset input");
      gold.emplace_back(d.id, d.label);
    }
    WriteGoldTsv(gold, o.gold_out);
  }
  return kExitOk;
}

int CmdEvaluate(const Options& o, std::ostream& out) {
  const auto gold = ReadGoldTsv(o.gold);
  const auto aligned = AlignByDocId(gold, ReadPredictionTsv(o.pred));
  const auto cm = Confusion(aligned.golds, aligned.preds);
  const auto report = Metrics(cm);

  std::vector<GroupDelta> groups;
  if (!o.groups.empty() || !o.baseline.empty()) {
    const auto grouping = o.groups.empty() ? std::map<std::string, std::string>{}
                                           : ReadGroupingTsv(o.groups);
    if (o.baseline.empty()) {
      groups = GroupMeans(report, grouping);
    } else {
      const auto base_aligned = AlignByDocId(gold, ReadPredictionTsv(o.baseline));
      const auto base = Metrics(Confusion(base_aligned.golds, base_aligned.preds));
      groups = StratifiedDelta(base, report, grouping);
    }
  }
  std::vector<MisclassificationEntry> misclassified;
  if (!o.misclass_out.empty()) {
    misclassified = MisclassificationReport(cm, o.misclass_threshold);
    WriteText(o.misclass_out, MisclassificationTsv(misclassified));
  }
  if (!o.out.empty()) WriteText(o.out, MetricReportTsv(report));
  if (!o.json.empty()) WriteText(o.json, MetricReportJson(report, groups, misclassified));

  out << "documents\t" << cm.total() << "\nlanguages\t" << report.per_language.size()
      << "\nmacro_f1\t" << FormatNum(report.macro_f1) << "\nmacro_fpr\t"
      << FormatNum(report.macro_fpr) << "\n";
  if (!groups.empty()) out << GroupDeltaTsv(groups);
  return kExitOk;
}

int CmdEnsemble(const Options& o, std::ostream& out) {
  if (o.mode != "max" && o.mode != "avg") throw ConfigError("--mode must be max or avg");
  const bool use_files = !o.pred_a.empty() || !o.pred_b.empty();
  const bool use_models = !o.model_a.empty() || !o.model_b.empty();
  if (use_files == use_models) {
    throw ConfigError("give either --pred-a/--pred-b or --model-a/--model-b with --input");
  }
  std::vector<PredictionRow> rows;
  if (use_files) {
    if (o.pred_a.empty() || o.pred_b.empty()) throw ConfigError("need both --pred-a and --pred-b");
    std::vector<std::string> order_a, order_b;
    const auto a = DistributionsByDoc(ReadPredictionTsv(o.pred_a), order_a);
    const auto b = DistributionsByDoc(ReadPredictionTsv(o.pred_b), order_b);
    if (a.size() != b.size() ||
        !std::equal(a.begin(), a.end(), b.begin(),
                    [](const auto& x, const auto& y) { return x.first == y.first; })) {
      throw DataError("prediction files cover different doc_id sets");
    }
    // Files usually hold top-k rows only, so label sets are compared per file.
    std::set<std::string> labels_a;
    for (const auto& [doc, d] : a) labels_a.insert(d.labels.begin(), d.labels.end());
    const bool shared = std::any_of(b.begin(), b.end(), [&](const auto& entry) {
      return std::any_of(entry.second.labels.begin(), entry.second.labels.end(),
                         [&](const std::string& l) { return labels_a.contains(l); });
    });
    if (!shared) throw DataError("prediction files share no label");
    for (const auto& doc : order_a) {
      const auto& da = a.at(doc);
      const auto& db = b.at(doc);
      const auto p =
          o.mode == "max" ? EnsembleMax(TopRow(da), TopRow(db)) : EnsembleAvg(da, db);
      rows.push_back({doc, p.label, p.prob});
    }
  } else {
    if (o.model_a.empty() || o.model_b.empty() || o.input.empty()) {
      throw ConfigError("need --model-a, --model-b and --input");
    }
    const auto ma = LoadModel(o.model_a);
    const auto mb = LoadModel(o.model_b);
    const auto docs = ReadDocuments(o.input, o.input_format);
    const auto preds = ParallelMap<Prediction>(docs.size(), [&](size_t i) {
      const auto da = PredictDistribution(ma, docs[i].text);
      const auto db = PredictDistribution(mb, docs[i].text);
      return o.mode == "max" ? EnsembleMax(da, db) : EnsembleAvg(da, db);
    });
    for (size_t i = 0; i < docs.size(); ++i) {
      rows.push_back({docs[i].id, preds[i].label, preds[i].prob});
    }
  }
  OutputFile file(o.out, out);
  for (const auto& r : rows) file.get() << FormatPredictionRow(r) << '\n';
  file.Close(o.out);
  return kExitOk;
}

int CmdAgree(const Options& o, std::ostream& out) {
  const auto langs = ReadGoldTsv(o.langs);
  const auto a = AlignByDocId(langs, ReadPredictionTsv(o.pred_a));
  const auto b = AlignByDocId(langs, ReadPredictionTsv(o.pred_b));
  const auto agreement = ComputeAgreement(a.preds, b.preds, a.golds);
  std::ostringstream text;
  text << "documents\t" << a.doc_ids.size() << "\nmacro_agreement\t"
       << FormatNum(agreement.macro) << "\nmicro_agreement\t" << FormatNum(agreement.micro)
       << "\n";
  out << text.str();
  if (!o.out.empty()) WriteText(o.out, text.str());
  return kExitOk;
}

int CmdRecoverUnd(const Options& o, std::ostream& out) {
  const std::string script = o.declared_script.find('_') == std::string::npos
                                 ? o.declared_script
                                 : DeclaredScriptOf(o.declared_script);
  if (script.empty() || script == kUnknownTag) {
    throw ConfigError("--declared-script must name a script (e.g. Cyrl or und_Cyrl)");
  }
  const auto model = LoadModel(o.model);
  const auto docs = ReadDocuments(o.input, o.input_format);
  struct Row {
    Prediction pred;
    RecoveryVerdict verdict;
  };
  const auto rows = ParallelMap<Row>(docs.size(), [&](size_t i) {
    Row r;
    r.pred = Predict(model, docs[i].text);
    r.verdict = EvaluateRecovery(r.pred, docs[i].text, script);
    return r;
  });
  OutputFile file(o.out, out);
  file.get() << "doc_id\taccepted\tfailed_steps\tlabel\tprob\tunk_ngram_ratio\n";
  std::array<size_t, kRecoverySteps + 1> failures{};
  size_t accepted = 0;
  for (size_t i = 0; i < docs.size(); ++i) {
    const auto& r = rows[i];
    std::string steps;
    for (int s : r.verdict.failed_steps) {
      if (!steps.empty()) steps += ',';
      steps += std::to_string(s);
      ++failures[s];
    }
    accepted += r.verdict.accepted;
    file.get() << docs[i].id << '\t' << (r.verdict.accepted ? 1 : 0) << '\t'
               << (steps.empty() ? "-" : steps) << '\t' << r.pred.label << '\t'
               << FormatNum(r.pred.prob) << '\t' << FormatNum(r.pred.unk_ngram_ratio)
               << '\n';
  }
  file.Close(o.out);
  if (!o.out.empty()) {
    out << "documents\t" << docs.size() << "\naccepted\t" << accepted << "\n";
    for (int s = 1; s <= kRecoverySteps; ++s) {
      out << "failed_step_" << s << '\t' << failures[s] << '\n';
    }
  }
  return kExitOk;
}

std::string OneLine(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

}  // namespace

unsigned WorkerThreads() {
  if (const char* env = std::getenv("CONLID_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Language identification with contrastive training", "conlid"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  Options o;
  std::string config_file;
  auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", config_file, "key=value file with option overrides");
  };

  auto* split = app.add_subcommand("split", "Stratified train/test split");
  split->add_option("input", o.input)->required();
  split->add_option("out-train", o.out_train)->required();
  split->add_option("out-test", o.out_test)->required();
  split->add_option("--fraction", o.fraction, "Train fraction in (0, 1)")->capture_default_str();
  split->add_option("--seed", o.seed)->capture_default_str();
  split->add_option("--format", o.format, "auto, jsonl or labeled-lines")->capture_default_str();
  add_config(split);

  auto* down = app.add_subcommand("downsample", "Cap examples per language");
  down->add_option("input", o.input)->required();
  down->add_option("output", o.output)->required();
  down->add_option("--cap", o.cap)->capture_default_str();
  down->add_option("--seed", o.seed)->capture_default_str();
  down->add_option("--format", o.format)->capture_default_str();
  add_config(down);

  auto* train = app.add_subcommand("train", "Train a model");
  train->add_option("--input", o.input, "Training dataset")->required();
  train->add_option("--format", o.format)->capture_default_str();
  train->add_option("--variant", o.variant, "ce, scl, conlid-s or conlid-h")
      ->capture_default_str();
  train->add_option("--batch", o.batch)->capture_default_str();
  train->add_option("--epochs", o.epochs)->capture_default_str();
  train->add_option("--lr", o.lr)->capture_default_str();
  train->add_option("--tau", o.tau)->capture_default_str();
  auto* bank_opt = train->add_option("--bank", o.bank, "Memory bank size")->capture_default_str();
  train->add_option("--min-negatives", o.min_negatives)->capture_default_str();
  train->add_option("--dim", o.dim)->capture_default_str();
  train->add_option("--bucket", o.bucket)->capture_default_str();
  train->add_option("--minn", o.minn)->capture_default_str();
  train->add_option("--maxn", o.maxn)->capture_default_str();
  train->add_option("--min-count", o.min_count)->capture_default_str();
  train->add_option("--seed", o.seed)->capture_default_str();
  train->add_option("--out", o.model_out, "Model file")->required();
  train->add_option("--telemetry", o.telemetry, "Per-step loss CSV (appended)");
  add_config(train);

  auto* predict = app.add_subcommand("predict", "Label documents");
  predict->add_option("--model", o.model)->required();
  predict->add_option("--input", o.input)->required();
  predict->add_option("--input-format", o.input_format, "text, tsv, jsonl or labeled-lines")
      ->capture_default_str();
  predict->add_option("--topk", o.topk)->capture_default_str();
  predict->add_option("--out", o.out, "Prediction TSV (default stdout)");
  predict->add_option("--gold-out", o.gold_out, "Gold TSV for labeled inputs");
  add_config(predict);

  auto* evaluate = app.add_subcommand("evaluate", "Score predictions against gold labels");
  evaluate->add_option("--gold", o.gold)->required();
  evaluate->add_option("--pred", o.pred)->required();
  evaluate->add_option("--baseline", o.baseline, "Baseline predictions for F1 deltas");
  evaluate->add_option("--groups", o.groups, "label<TAB>group TSV");
  evaluate->add_option("--out", o.out, "Per-language TSV report");
  evaluate->add_option("--json", o.json, "JSON report");
  evaluate->add_option("--misclass-threshold", o.misclass_threshold)->capture_default_str();
  evaluate->add_option("--misclass-out", o.misclass_out, "Misclassification TSV");
  add_config(evaluate);

  auto* ensemble = app.add_subcommand("ensemble", "Combine two models' predictions");
  ensemble->add_option("--mode", o.mode, "max or avg")->capture_default_str();
  ensemble->add_option("--pred-a", o.pred_a);
  ensemble->add_option("--pred-b", o.pred_b);
  ensemble->add_option("--model-a", o.model_a);
  ensemble->add_option("--model-b", o.model_b);
  ensemble->add_option("--input", o.input);
  ensemble->add_option("--input-format", o.input_format)->capture_default_str();
  ensemble->add_option("--out", o.out);
  add_config(ensemble);

  auto* agree = app.add_subcommand("agree", "Agreement between two prediction files");
  agree->add_option("--pred-a", o.pred_a)->required();
  agree->add_option("--pred-b", o.pred_b)->required();
  agree->add_option("--langs", o.langs, "doc_id<TAB>language TSV")->required();
  agree->add_option("--out", o.out);
  add_config(agree);

  auto* recover = app.add_subcommand("recover-und", "Filter UND documents for clean text");
  recover->add_option("--model", o.model)->required();
  recover->add_option("--input", o.input)->required();
  recover->add_option("--input-format", o.input_format)->capture_default_str();
  recover->add_option("--declared-script", o.declared_script)->required();
  recover->add_option("--out", o.out, "Verdict TSV (default stdout)");
  add_config(recover);

  try {
    std::vector<std::string> argv(args.begin() + (args.empty() ? 0 : 1), args.end());
    // A config file's values go before the command line so flags win.
    for (size_t i = 0; i + 1 < argv.size(); ++i) {
      std::string path;
      if (argv[i] == "--config") {
        path = argv[i + 1];
      } else if (argv[i].starts_with("--config=")) {
        path = argv[i].substr(9);
      }
      if (!path.empty()) {
        auto extra = ConfigArgs(path);
        argv.insert(argv.begin() + 1, extra.begin(), extra.end());
        break;
      }
    }
    std::reverse(argv.begin(), argv.end());
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: usage: " << OneLine(e.what()) << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: usage: " << OneLine(e.what()) << "\n";
    return kExitUsage;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    std::istringstream resolved(sub->config_to_str(true, false));
    for (std::string line; std::getline(resolved, line);) {
      if (!line.empty()) err << "# " << sub->get_name() << ' ' << line << '\n';
    }
    if (sub == split) return CmdSplit(o, out, err);
    if (sub == down) return CmdDownsample(o, out, err);
    if (sub == train) return CmdTrain(o, bank_opt->count() > 0, out, err);
    if (sub == predict) return CmdPredict(o, out);
    if (sub == evaluate) return CmdEvaluate(o, out);
    if (sub == ensemble) return CmdEnsemble(o, out);
    if (sub == agree) return CmdAgree(o, out);
    if (sub == recover) return CmdRecoverUnd(o, out);
    err << "error: internal: unhandled subcommand\n";
    return kExitInternal;
  } catch (const ConfigError& e) {
    err << "error: usage: " << OneLine(e.what()) << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    err << "error: io: " << OneLine(e.what()) << "\n";
    return kExitData;
  } catch (const FormatError& e) {
    err << "error: model: " << OneLine(e.what()) << "\n";
    return kExitData;
  } catch (const DataError& e) {
    err << "error: data: " << OneLine(e.what()) << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: internal: " << OneLine(e.what()) << "\n";
    return kExitInternal;
  }
}

}  // namespace conlid
