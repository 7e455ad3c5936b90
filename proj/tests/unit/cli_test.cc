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

#include <gtest/gtest.h>

#include <sstream>

#include "conlid/corpus.h"
#include "test_support.h"
#include "toy_corpus.h"

namespace conlid {
namespace {

using testing::ReadFile;
using testing::TempDir;
using testing::WriteFile;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run Cli(std::vector<std::string> args) {
  args.insert(args.begin(), "conlid");
  std::ostringstream out, err;
  const int code = RunCli(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto langs = testing::MakeToyLanguages(3, 8, 20, 4);
    SaveDataset(Dataset(testing::MakeToySentences(langs, 1, 40, 5)), dir_.file("all.jsonl"),
                DatasetFormat::kJsonl);
  }

  std::vector<std::string> SmallTrain(const std::string& input, const std::string& out) {
    return {"train",  "--input", input, "--variant", "ce",   "--batch", "8",
            "--lr",   "0.05",    "--dim", "16",      "--bucket", "500", "--min-count",
            "1",      "--out",   out};
  }

  TempDir dir_;
};

TEST_F(CliTest, TrainPredictEvaluateHappyPath) {
  auto r = Cli({"split", dir_.file("all.jsonl"), dir_.file("train.jsonl"),
                dir_.file("test.jsonl"), "--seed", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  r = Cli(SmallTrain(dir_.file("train.jsonl"), dir_.file("m.bin")));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("variant=\"ce\""), std::string::npos) << r.err;
  r = Cli({"predict", "--model", dir_.file("m.bin"), "--input", dir_.file("test.jsonl"),
           "--input-format", "jsonl", "--out", dir_.file("pred.tsv"), "--gold-out",
           dir_.file("gold.tsv")});
  ASSERT_EQ(r.code, 0) << r.err;
  r = Cli({"evaluate", "--gold", dir_.file("gold.tsv"), "--pred", dir_.file("pred.tsv"),
           "--json", dir_.file("report.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("macro_f1"), std::string::npos);
  EXPECT_NE(ReadFile(dir_.file("report.json")).find("per_language"), std::string::npos);
}

TEST_F(CliTest, TopKZeroIsUsageError) {
  ASSERT_EQ(Cli(SmallTrain(dir_.file("all.jsonl"), dir_.file("m.bin"))).code, 0);
  WriteFile(dir_.file("docs.txt"), "abc def\n");
  const auto r = Cli({"predict", "--model", dir_.file("m.bin"), "--input",
                      dir_.file("docs.txt"), "--topk", "0"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("error: usage:"), std::string::npos);
}

TEST_F(CliTest, MismatchedDocIdsIsDataError) {
  WriteFile(dir_.file("gold.tsv"), "1\ta\n2\tb\n");
  WriteFile(dir_.file("pred.tsv"), "1\ta\t0.9\n3\tb\t0.8\n");
  const auto r = Cli({"evaluate", "--gold", dir_.file("gold.tsv"), "--pred",
                      dir_.file("pred.tsv")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("error: data:"), std::string::npos) << r.err;
}

TEST_F(CliTest, UnknownFlagAndMissingFile) {
  EXPECT_EQ(Cli({"train", "--bogus"}).code, 1);
  EXPECT_EQ(Cli({}).code, 1);
  EXPECT_EQ(Cli(SmallTrain(dir_.file("nope.jsonl"), dir_.file("m.bin"))).code, 2);
  WriteFile(dir_.file("m.bin"), "not a model");
  const auto r = Cli({"predict", "--model", dir_.file("m.bin"), "--input",
                      dir_.file("all.jsonl")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("magic"), std::string::npos);
}

TEST_F(CliTest, ConfigFileOverridesDefaultsButNotFlags) {
  WriteFile(dir_.file("train.cfg"), "# small run\nbatch = 4\nepochs=2\n");
  auto args = SmallTrain(dir_.file("all.jsonl"), dir_.file("m.bin"));
  args.push_back("--config");
  args.push_back(dir_.file("train.cfg"));
  const auto r = Cli(args);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("epochs=2"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("batch=8"), std::string::npos) << r.err;
}

TEST_F(CliTest, SeededCommandsAreReproducible) {
  for (const char* name : {"a", "b"}) {
    const std::string n(name);
    ASSERT_EQ(Cli({"downsample", dir_.file("all.jsonl"), dir_.file("down_" + n + ".jsonl"),
                   "--cap", "10", "--seed", "3"})
                  .code,
              0);
    ASSERT_EQ(Cli(SmallTrain(dir_.file("all.jsonl"), dir_.file("m_" + n + ".bin"))).code, 0);
  }
  EXPECT_EQ(ReadFile(dir_.file("down_a.jsonl")), ReadFile(dir_.file("down_b.jsonl")));
  EXPECT_EQ(ReadFile(dir_.file("m_a.bin")), ReadFile(dir_.file("m_b.bin")));
  const auto input_before = ReadFile(dir_.file("all.jsonl"));
  EXPECT_EQ(LoadDataset(dir_.file("down_a.jsonl"), DatasetFormat::kJsonl).dataset.size(), 30u);
  EXPECT_EQ(ReadFile(dir_.file("all.jsonl")), input_before);
}

TEST_F(CliTest, EnsembleAgreeAndRecover) {
  WriteFile(dir_.file("a.tsv"), "1\tx\t0.9\n2\ty\t0.4\n");
  WriteFile(dir_.file("b.tsv"), "1\ty\t0.8\n2\tx\t0.7\n");
  auto r = Cli({"ensemble", "--mode", "max", "--pred-a", dir_.file("a.tsv"), "--pred-b",
                dir_.file("b.tsv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "1\tx\t0.9\n2\tx\t0.7\n");

  WriteFile(dir_.file("langs.tsv"), "1\tx\n2\ty\n");
  r = Cli({"agree", "--pred-a", dir_.file("a.tsv"), "--pred-b", dir_.file("b.tsv"),
           "--langs", dir_.file("langs.tsv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("micro"), std::string::npos);

  ASSERT_EQ(Cli(SmallTrain(dir_.file("all.jsonl"), dir_.file("m.bin"))).code, 0);
  WriteFile(dir_.file("und.txt"), "A B C D E\nsingle\n");
  r = Cli({"recover-und", "--model", dir_.file("m.bin"), "--input", dir_.file("und.txt"),
           "--declared-script", "und_Latn"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream lines(r.out);
  std::string header, first, second;
  std::getline(lines, header);
  std::getline(lines, first);
  std::getline(lines, second);
  EXPECT_EQ(header.rfind("doc_id\taccepted\tfailed_steps", 0), 0u) << header;
  EXPECT_NE(first.find("4"), std::string::npos);
  EXPECT_NE(second.find("5"), std::string::npos);
}

}  // namespace
}  // namespace conlid
