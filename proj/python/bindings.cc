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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "conlid/corpus.h"
#include "conlid/encoder.h"
#include "conlid/error.h"
#include "conlid/evaluation.h"
#include "conlid/inference.h"
#include "conlid/model.h"
#include "conlid/sampler.h"
#include "conlid/trainer.h"

namespace py = pybind11;

namespace conlid {
namespace {

Dataset ToDataset(const std::vector<std::string>& texts,
                  const std::vector<std::string>& labels,
                  const std::optional<std::vector<std::string>>& domains) {
  if (texts.size() != labels.size() || (domains && domains->size() != texts.size())) {
    throw DataError("texts, labels and domains must have equal lengths");
  }
  std::vector<Example> examples;
  for (size_t i = 0; i < texts.size(); ++i) {
    std::optional<std::string_view> domain;
    if (domains) domain = (*domains)[i];
    if (auto ex = MakeExample(texts[i], labels[i], std::nullopt, domain)) {
      examples.push_back(std::move(*ex));
    }
  }
  return Dataset(std::move(examples));
}

py::dict ReportToDict(const MetricReport& r) {
  py::dict per;
  for (const auto& [label, m] : r.per_language) {
    py::dict d;
    d["precision"] = m.precision;
    d["recall"] = m.recall;
    d["f1"] = m.f1;
    d["fpr"] = m.fpr;
    d["tp"] = m.tp;
    d["fp"] = m.fp;
    d["fn"] = m.fn;
    d["tn"] = m.tn;
    per[py::str(label)] = d;
  }
  py::dict out;
  out["macro_f1"] = r.macro_f1;
  out["macro_fpr"] = r.macro_fpr;
  out["per_language"] = per;
  return out;
}

Distribution ToDistribution(const std::map<std::string, double>& d) {
  Distribution out;
  for (const auto& [label, p] : d) {
    out.labels.push_back(label);
    out.probs.push_back(p);
  }
  return out;
}

}  // namespace
}  // namespace conlid

PYBIND11_MODULE(_conlid, m) {
  using namespace conlid;
  m.doc() = "Native core of the conlid language identifier.";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<IoError>(m, "IoError", base.ptr());
  py::register_exception<DataError>(m, "DataError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<FormatError>(m, "FormatError", base.ptr());
  py::register_exception<TrainingError>(m, "TrainingError", base.ptr());

  m.def("tokenize", [](const std::string& text) {
    std::vector<std::string> out;
    for (auto t : Tokenize(text)) out.emplace_back(t);
    return out;
  });
  m.def("char_ngrams", &CharNgrams, py::arg("word"), py::arg("minn") = 2,
        py::arg("maxn") = 5);
  m.def("fnv1a32", [](const std::string& s) { return Fnv1a32(s); });
  m.def("hash_ngram", [](const std::string& g, int bucket, int64_t vocab_size) {
    return HashNgram(g, bucket, vocab_size);
  }, py::arg("ngram"), py::arg("bucket"), py::arg("vocab_size") = 0);

  py::class_<Prediction>(m, "Prediction")
      .def_readonly("label", &Prediction::label)
      .def_readonly("prob", &Prediction::prob)
      .def_readonly("unk_ngram_ratio", &Prediction::unk_ngram_ratio)
      .def("__repr__", [](const Prediction& p) {
        return "Prediction(label='" + p.label + "', prob=" + std::to_string(p.prob) + ")";
      });

  py::class_<StepRecord>(m, "StepRecord")
      .def_readonly("step", &StepRecord::step)
      .def_readonly("lr", &StepRecord::lr)
      .def_readonly("ce_loss", &StepRecord::ce_loss)
      .def_readonly("scl_loss", &StepRecord::scl_loss)
      .def_readonly("total_loss", &StepRecord::total_loss);

  py::class_<Model>(m, "Model")
      .def_static("load", &LoadModel, py::arg("path"))
      .def_static("from_bytes", [](const py::bytes& b) { return DeserializeModel(std::string(b)); })
      .def("save", [](const Model& self, const std::string& path) { SaveModel(self, path); })
      .def("to_bytes", [](const Model& self) { return py::bytes(SerializeModel(self)); })
      .def_property_readonly("labels", [](const Model& self) { return self.labels.labels(); })
      .def_property_readonly("dim", &Model::dim)
      .def("predict", [](const Model& self, const std::string& text) {
        return Predict(self, text);
      })
      .def("predict_topk", [](const Model& self, const std::string& text, size_t k) {
        return PredictTopK(self, text, k);
      }, py::arg("text"), py::arg("k") = 1)
      .def("predict_many", [](const Model& self, const std::vector<std::string>& texts) {
        py::gil_scoped_release release;
        std::vector<Prediction> out;
        out.reserve(texts.size());
        for (const auto& t : texts) out.push_back(Predict(self, t));
        return out;
      })
      .def("distribution", [](const Model& self, const std::string& text) {
        const auto d = PredictDistribution(self, text);
        std::map<std::string, double> out;
        for (size_t i = 0; i < d.labels.size(); ++i) out[d.labels[i]] = d.probs[i];
        return out;
      })
      .def("embedding", [](const Model& self, const std::string& text) {
        return Forward(self, text).embedding;
      })
      .def("recover_und", [](const Model& self, const std::string& text,
                             const std::string& declared_script) {
        const auto v = RecoverUnd(self, text, declared_script);
        return py::make_tuple(v.accepted, v.failed_steps);
      }, py::arg("text"), py::arg("declared_script"));

  m.def("train",
        [](const std::vector<std::string>& texts, const std::vector<std::string>& labels,
           const std::string& variant, size_t batch_size, int epochs, double lr,
           double tau, std::optional<size_t> bank_size, size_t min_negatives, int dim,
           int bucket, int minn, int maxn, int min_count, uint64_t seed,
           const std::optional<std::vector<std::string>>& domains) {
          const Dataset data = ToDataset(texts, labels, domains);
          auto cfg = TrainConfig::ForVariant(ParseVariant(variant));
          cfg.batch_size = batch_size;
          cfg.epochs = epochs;
          cfg.lr0 = lr;
          cfg.seed = seed;
          cfg.loss.tau = tau;
          cfg.loss.min_negatives = min_negatives;
          if (bank_size) cfg.loss.bank_size = *bank_size;
          EncoderConfig enc;
          enc.dim = dim;
          enc.bucket = bucket;
          enc.minn = minn;
          enc.maxn = maxn;
          enc.min_count = min_count;
          TrainResult result;
          {
            py::gil_scoped_release release;
            result = Train(data, cfg, enc);
          }
          return py::make_tuple(std::move(result.model), std::move(result.telemetry));
        },
        py::arg("texts"), py::arg("labels"), py::arg("variant") = "conlid-s",
        py::arg("batch_size") = 128, py::arg("epochs") = 1, py::arg("lr") = 1e-3,
        py::arg("tau") = 0.05, py::arg("bank_size") = py::none(),
        py::arg("min_negatives") = 1024, py::arg("dim") = 256, py::arg("bucket") = 1000000,
        py::arg("minn") = 2, py::arg("maxn") = 5, py::arg("min_count") = 1000,
        py::arg("seed") = 0, py::arg("domains") = py::none(),
        "Trains a model; returns (model, per-step telemetry).");

  m.def("split", [](const std::vector<std::string>& texts,
                    const std::vector<std::string>& labels, double fraction, uint64_t seed) {
    const auto [train, test] = Split(ToDataset(texts, labels, std::nullopt), {fraction, seed});
    auto unpack = [](const Dataset& d) {
      std::vector<std::string> t, l;
      for (const auto& ex : d.examples()) {
        t.push_back(ex.text);
        l.push_back(ex.label);
      }
      return py::make_tuple(t, l);
    };
    return py::make_tuple(unpack(train), unpack(test));
  }, py::arg("texts"), py::arg("labels"), py::arg("train_fraction") = 0.85,
     py::arg("seed") = 0);

  m.def("metrics", [](const std::vector<std::string>& golds,
                      const std::vector<std::string>& preds) {
    return ReportToDict(Metrics(Confusion(golds, preds)));
  }, py::arg("golds"), py::arg("preds"));

  m.def("agreement", [](const std::vector<std::string>& a, const std::vector<std::string>& b,
                        const std::vector<std::string>& langs) {
    const auto r = ComputeAgreement(a, b, langs);
    return py::make_tuple(r.macro, r.micro);
  }, py::arg("preds_a"), py::arg("preds_b"), py::arg("langs"), "Returns (macro, micro).");

  m.def("ensemble_max", [](const std::map<std::string, double>& a,
                           const std::map<std::string, double>& b) {
    return EnsembleMax(ToDistribution(a), ToDistribution(b));
  });
  m.def("ensemble_avg", [](const std::map<std::string, double>& a,
                           const std::map<std::string, double>& b) {
    return EnsembleAvg(ToDistribution(a), ToDistribution(b));
  });

  m.def("evaluate_recovery", [](const std::string& label, double prob, double unk_ratio,
                                const std::string& text, const std::string& script) {
    const auto v = EvaluateRecovery({label, prob, unk_ratio}, text, script);
    return py::make_tuple(v.accepted, v.failed_steps);
  }, py::arg("label"), py::arg("prob"), py::arg("unk_ngram_ratio"), py::arg("text"),
     py::arg("declared_script"));

  m.def("hard_negatives",
        [](const std::vector<int32_t>& classes, const std::vector<std::string>& scripts,
           const std::vector<std::string>& domains, size_t anchor, size_t k) {
          if (classes.size() != scripts.size() || classes.size() != domains.size()) {
            throw DataError("classes, scripts and domains must have equal lengths");
          }
          if (anchor >= classes.size()) throw ConfigError("anchor out of range");
          std::vector<ContrastiveItem> pool(classes.size());
          for (size_t i = 0; i < pool.size(); ++i) {
            pool[i].class_id = classes[i];
            pool[i].script = scripts[i];
            pool[i].domain = domains[i];
          }
          const auto sel = HardNegatives(anchor, pool, k);
          return py::make_tuple(sel.negatives, sel.relaxation_level);
        },
        py::arg("classes"), py::arg("scripts"), py::arg("domains"), py::arg("anchor"),
        py::arg("min_negatives"), "Returns (negative indices, relaxation level).");
}
