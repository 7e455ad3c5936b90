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

#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "conlid/error.h"
#include "test_support.h"

namespace conlid {
namespace {

Model ZeroHeadModel() {
  EncoderConfig cfg;
  cfg.dim = 4;
  cfg.bucket = 64;
  cfg.min_count = 1;
  Dataset d({*MakeExample("один два", "rus_Cyrl"), *MakeExample("one two", "eng_Latn"),
             *MakeExample("un deux", "fra_Latn")});
  return Model::Initialize(cfg, d.label_index(), BuildVocab(d, cfg), 1);
}

TEST(PredictTest, ZeroHeadTiesGoToFirstClass) {
  const Model m = ZeroHeadModel();
  const auto p = Predict(m, "anything at all");
  EXPECT_EQ(p.label, "eng_Latn");
  EXPECT_DOUBLE_EQ(p.prob, 1.0 / 3.0);
  EXPECT_EQ(p.unk_ngram_ratio, 1.0);
  EXPECT_EQ(Predict(m, "one").unk_ngram_ratio, 0.0);
}

TEST(PredictTest, TopKOrderingAndClamping) {
  Model m = ZeroHeadModel();
  m.params.head_bias = {0.0f, 2.0f, 1.0f};
  const auto top = PredictTopK(m, "one", 3);
  ASSERT_EQ(top.size(), 3u);
  EXPECT_EQ(top[0].label, "fra_Latn");
  EXPECT_EQ(top[1].label, "rus_Cyrl");
  EXPECT_EQ(top[2].label, "eng_Latn");
  EXPECT_NEAR(top[0].prob + top[1].prob + top[2].prob, 1.0, 1e-12);
  EXPECT_EQ(PredictTopK(m, "one", 10).size(), 3u);
  EXPECT_THROW(PredictTopK(m, "one", 0), ConfigError);
}

TEST(PredictTest, DistributionMatchesForward) {
  Model m = ZeroHeadModel();
  m.params.head_bias = {0.3f, -0.2f, 0.1f};
  const auto d = PredictDistribution(m, "two");
  EXPECT_EQ(d.labels, m.labels.labels());
  EXPECT_EQ(d.probs, Forward(m, "two").probs);
}

TEST(EnsembleMaxTest, Examples) {
  EXPECT_EQ(EnsembleMax(Prediction{"eng", 0.9}, Prediction{"fra", 0.8}).label, "eng");
  const auto tie = EnsembleMax(Prediction{"x", 0.5, 0.1}, Prediction{"x", 0.5, 0.2});
  EXPECT_EQ(tie.unk_ngram_ratio, 0.1);
  const auto b = EnsembleMax(Prediction{"x", 0.3}, Prediction{"y", 0.31});
  EXPECT_EQ(b.label, "y");
  EXPECT_EQ(b.prob, 0.31);
}

TEST(EnsembleMaxTest, DisjointLabelSetsFail) {
  Distribution a{{"a"}, {1.0}}, b{{"b"}, {1.0}};
  EXPECT_THROW(EnsembleMax(a, b), DataError);
}

Distribution RandomDist(std::mt19937_64& rng, const std::vector<std::string>& labels) {
  std::exponential_distribution<double> e(1.0);
  Distribution d{labels, {}};
  for (size_t i = 0; i < labels.size(); ++i) d.probs.push_back(e(rng));
  const double s = std::accumulate(d.probs.begin(), d.probs.end(), 0.0);
  for (double& p : d.probs) p /= s;
  return d;
}

TEST(EnsembleMaxTest, EqualsMaxOfTopOnes) {
  std::mt19937_64 rng(31);
  const std::vector<std::string> labels = {"a", "b", "c", "d", "e"};
  for (int trial = 0; trial < 1000; ++trial) {
    const auto a = RandomDist(rng, labels);
    const auto b = RandomDist(rng, labels);
    const auto ia = std::max_element(a.probs.begin(), a.probs.end()) - a.probs.begin();
    const auto ib = std::max_element(b.probs.begin(), b.probs.end()) - b.probs.begin();
    const auto got = EnsembleMax(a, b);
    if (a.probs[ia] >= b.probs[ib]) {
      EXPECT_EQ(got.label, labels[ia]);
      EXPECT_EQ(got.prob, a.probs[ia]);
    } else {
      EXPECT_EQ(got.label, labels[ib]);
      EXPECT_EQ(got.prob, b.probs[ib]);
    }
  }
}

TEST(EnsembleAvgTest, Examples) {
  Distribution u{{"p", "q"}, {0.5, 0.5}}, one{{"p", "q"}, {1.0, 0.0}};
  auto r = EnsembleAvg(u, one);
  EXPECT_EQ(r.label, "p");
  EXPECT_DOUBLE_EQ(r.prob, 0.75);
  r = EnsembleAvg(one, one);
  EXPECT_EQ(r.label, "p");
  EXPECT_EQ(r.prob, 1.0);

  Distribution a{{"p", "only_a"}, {0.6, 0.4}}, b{{"p"}, {1.0}};
  const auto avg = AverageDistributions(a, b);
  EXPECT_EQ(avg.labels, (std::vector<std::string>{"p", "only_a"}));
  EXPECT_DOUBLE_EQ(avg.probs[1], 0.2);
}

TEST(EnsembleAvgTest, ZeroFillSumsToOne) {
  std::mt19937_64 rng(32);
  const std::vector<std::string> pool = {"a", "b", "c", "d", "e", "f"};
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<std::string> la, lb;
    for (const auto& l : pool) {
      if (rng() % 3) la.push_back(l);
      if (rng() % 3) lb.push_back(l);
    }
    if (la.empty()) la.push_back("a");
    if (lb.empty()) lb.push_back("f");
    const auto avg = AverageDistributions(RandomDist(rng, la), RandomDist(rng, lb));
    EXPECT_NEAR(std::accumulate(avg.probs.begin(), avg.probs.end(), 0.0), 1.0, 1e-6);
  }
}

Prediction Good() { return {"rus_Cyrl", 0.99, 0.0}; }

TEST(RecoveryTest, AcceptsCleanCyrillicSentence) {
  const auto v = EvaluateRecovery(Good(), "ну и я ушла", "Cyrl");
  EXPECT_TRUE(v.accepted);
  EXPECT_TRUE(v.failed_steps.empty());
}

TEST(RecoveryTest, EachStepFailsIndependently) {
  const std::string text = "ну и я ушла";
  EXPECT_EQ(EvaluateRecovery(Good(), text, "Latn").failed_steps, std::vector<int>{1});
  EXPECT_EQ(EvaluateRecovery({"rus_Cyrl", 0.95, 0.0}, text, "Cyrl").failed_steps,
            std::vector<int>{2});
  EXPECT_EQ(EvaluateRecovery({"rus_Cyrl", 0.99, 0.05}, text, "Cyrl").failed_steps,
            std::vector<int>{3});
  EXPECT_EQ(EvaluateRecovery({"eng_Latn", 0.99, 0.0}, "A B C D E", "Latn").failed_steps,
            std::vector<int>{4});
  EXPECT_EQ(EvaluateRecovery({"eng_Latn", 0.99, 0.0}, "hello", "Latn").failed_steps,
            std::vector<int>{5});
}

TEST(RecoveryTest, AllFailuresReported) {
  const auto v = EvaluateRecovery({"eng_Latn", 0.5, 0.5}, "x", "Cyrl");
  EXPECT_FALSE(v.accepted);
  EXPECT_EQ(v.failed_steps, (std::vector<int>{1, 2, 3, 5}));
}

TEST(RecoveryTest, SpacedLetterRuns) {
  EXPECT_TRUE(HasSpacedLetterRun("A B C D E"));
  EXPECT_TRUE(HasSpacedLetterRun("see a b c now"));
  EXPECT_TRUE(HasSpacedLetterRun("ж и з"));
  EXPECT_FALSE(HasSpacedLetterRun("ну и я ушла"));
  EXPECT_FALSE(HasSpacedLetterRun("1 2 3 4"));
  EXPECT_FALSE(HasSpacedLetterRun("a bb c dd e"));
}

TEST(RecoveryTest, ModelBasedVerdict) {
  const Model m = ZeroHeadModel();
  // Uniform probabilities never clear the confidence bar.
  const auto v = RecoverUnd(m, "один два", DeclaredScriptOf("und_Cyrl"));
  EXPECT_FALSE(v.accepted);
  EXPECT_EQ(v.failed_steps, (std::vector<int>{1, 2}));
  EXPECT_EQ(DeclaredScriptOf("und_Cyrl"), "Cyrl");
}

TEST(PredictionTsvTest, RoundTrip) {
  testing::TempDir dir;
  const std::vector<PredictionRow> rows = {{"1", "eng_Latn", 0.1}, {"doc b", "fra_Latn", 1.0 / 3.0}};
  WritePredictionTsv(rows, dir.file("p.tsv"));
  const auto back = ReadPredictionTsv(dir.file("p.tsv"));
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].doc_id, "doc b");
  EXPECT_EQ(back[1].prob, 1.0 / 3.0);
  EXPECT_EQ(FormatPredictionRow(rows[0]), "1\teng_Latn\t0.1");
}

TEST(PredictionTsvTest, MalformedRowsAreDataErrors) {
  testing::TempDir dir;
  testing::WriteFile(dir.file("a.tsv"), "1\teng_Latn\n");
  EXPECT_THROW(ReadPredictionTsv(dir.file("a.tsv")), DataError);
  testing::WriteFile(dir.file("b.tsv"), "1\teng_Latn\tmaybe\n");
  EXPECT_THROW(ReadPredictionTsv(dir.file("b.tsv")), DataError);
  EXPECT_THROW(ReadPredictionTsv(dir.file("missing.tsv")), IoError);
}

}  // namespace
}  // namespace conlid
