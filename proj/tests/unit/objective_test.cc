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

#include "conlid/objective.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "conlid/error.h"
#include "conlid/model.h"
#include "conlid/sampler.h"
#include "test_support.h"

namespace conlid {
namespace {

using testing::RandomUnit;
using testing::RelativeError;

ContrastiveItem Item(std::vector<double> e, int32_t cls) {
  ContrastiveItem it;
  it.embedding = std::move(e);
  it.class_id = cls;
  it.script = "Latn";
  it.domain = "web";
  return it;
}

Matrix<double> RowSoftmax(const Matrix<double>& logits) {
  Matrix<double> p(logits.rows(), logits.cols());
  for (size_t i = 0; i < logits.rows(); ++i) {
    const auto row = Softmax(logits.row(i));
    std::copy(row.begin(), row.end(), p.row(i).begin());
  }
  return p;
}

TEST(CrossEntropyTest, UniformIsLogC) {
  Matrix<double> p(2, 4, 0.25);
  const std::vector<int32_t> y = {0, 3};
  EXPECT_NEAR(CrossEntropyLoss(p, y).loss, 1.3862943611198906, 1e-12);
}

TEST(CrossEntropyTest, CertainPredictionsGiveZero) {
  Matrix<double> p(3, 2);
  p(0, 1) = p(1, 0) = p(2, 1) = 1.0;
  const std::vector<int32_t> y = {1, 0, 1};
  EXPECT_EQ(CrossEntropyLoss(p, y).loss, 0.0);
}

TEST(CrossEntropyTest, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n(0, 1);
  Matrix<double> logits(5, 3);
  for (double& v : logits.data()) v = n(rng);
  const std::vector<int32_t> y = {0, 2, 1, 1, 0};
  const auto r = CrossEntropyLoss(RowSoftmax(logits), y);
  const double h = 1e-5;
  for (size_t i = 0; i < 5; ++i) {
    for (size_t c = 0; c < 3; ++c) {
      Matrix<double> up = logits, down = logits;
      up(i, c) += h;
      down(i, c) -= h;
      const double fd = (CrossEntropyLoss(RowSoftmax(up), y).loss -
                         CrossEntropyLoss(RowSoftmax(down), y).loss) /
                        (2 * h);
      EXPECT_LT(RelativeError(r.grad_logits(i, c), fd), 1e-5) << i << "," << c;
    }
  }
}

TEST(CrossEntropyTest, OutOfRangeClass) {
  Matrix<double> p(1, 2, 0.5);
  const std::vector<int32_t> y = {2};
  EXPECT_THROW(CrossEntropyLoss(p, y), std::out_of_range);
}

TEST(SupConTest, EmptyNegativesGiveZero) {
  const std::vector<ContrastiveItem> pool = {Item({1, 0}, 0), Item({0.6, 0.8}, 0)};
  const std::vector<ContrastiveItem> anchors = {pool[0]};
  PairSelection sel;
  sel.positives = {1};
  const auto r = SupConLoss(anchors, pool, std::span(&sel, 1), 0.05);
  EXPECT_EQ(r.loss, 0.0);
}

TEST(SupConTest, ClosedFormOnePositiveOneNegative) {
  const std::vector<ContrastiveItem> pool = {Item({1, 0}, 0), Item({1, 0}, 0),
                                             Item({0, 1}, 1)};
  const std::vector<ContrastiveItem> anchors = {pool[0]};
  PairSelection sel;
  sel.positives = {1};
  sel.negatives = {2};
  const auto r = SupConLoss(anchors, pool, std::span(&sel, 1), 1.0);
  EXPECT_NEAR(r.loss, 0.31326168751822286, 1e-12);
}

TEST(SupConTest, EmptyPositivesContributeNothing) {
  const std::vector<ContrastiveItem> pool = {Item({1, 0}, 0), Item({0, 1}, 1)};
  const std::vector<ContrastiveItem> anchors = {pool[0], pool[1]};
  const std::vector<PairSelection> sel = {SoftNegatives(0, pool), SoftNegatives(1, pool)};
  const auto r = SupConLoss(anchors, pool, sel, 0.05);
  EXPECT_EQ(r.loss, 0.0);
  for (double g : r.grad_anchors.data()) EXPECT_EQ(g, 0.0);
}

TEST(SupConTest, NonPositiveTauIsConfigError) {
  const std::vector<ContrastiveItem> pool = {Item({1, 0}, 0)};
  PairSelection sel;
  EXPECT_THROW(SupConLoss(pool, pool, std::span(&sel, 1), 0.0), ConfigError);
  EXPECT_THROW(SupConLoss(pool, pool, std::span(&sel, 1), -1.0), ConfigError);
}

TEST(SupConTest, AllEqualSameClassIsZero) {
  const std::vector<double> e = {0.6, 0.8};
  std::vector<ContrastiveItem> pool(5, Item(e, 3));
  std::vector<PairSelection> sel;
  for (size_t i = 0; i < 3; ++i) sel.push_back(SoftNegatives(i, pool));
  for (double tau : {0.05, 1.0, 7.0}) {
    EXPECT_NEAR(SupConLoss(std::span(pool).first(3), pool, sel, tau).loss, 0.0, 1e-15);
  }
}

// Loss as a function of the raw batch vectors; batch entries appear both as
// anchors and in the pool, bank entries are fixed.
double SclOf(const std::vector<std::vector<double>>& raw,
             const std::vector<ContrastiveItem>& bank_part,
             const std::vector<int32_t>& classes, double tau) {
  std::vector<ContrastiveItem> pool;
  for (size_t i = 0; i < raw.size(); ++i) pool.push_back(Item(Normalized(raw[i]), classes[i]));
  pool.insert(pool.end(), bank_part.begin(), bank_part.end());
  std::vector<PairSelection> sel;
  for (size_t i = 0; i < raw.size(); ++i) sel.push_back(SoftNegatives(i, pool));
  return SupConLoss(std::span(pool).first(raw.size()), pool, sel, tau).loss;
}

TEST(SupConTest, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(21);
  const size_t batch = 4, pool_size = 12, dim = 8;
  const double tau = 0.5;
  std::vector<std::vector<double>> raw;
  std::normal_distribution<double> n(0, 1);
  for (size_t i = 0; i < batch; ++i) {
    std::vector<double> v(dim);
    for (double& x : v) x = n(rng);
    raw.push_back(v);
  }
  const std::vector<int32_t> classes = {0, 1, 0, 1};
  std::vector<ContrastiveItem> bank_part;
  for (size_t j = batch; j < pool_size; ++j) {
    auto it = Item(RandomUnit(rng, dim), static_cast<int32_t>(j % 3));
    it.from_bank = true;
    bank_part.push_back(it);
  }

  std::vector<ContrastiveItem> pool;
  for (size_t i = 0; i < batch; ++i) pool.push_back(Item(Normalized(raw[i]), classes[i]));
  pool.insert(pool.end(), bank_part.begin(), bank_part.end());
  std::vector<PairSelection> sel;
  for (size_t i = 0; i < batch; ++i) sel.push_back(SoftNegatives(i, pool));
  const auto r = SupConLoss(std::span(pool).first(batch), pool, sel, tau);
  EXPECT_GT(r.loss, 0.0);

  const double h = 1e-6;
  for (size_t i = 0; i < batch; ++i) {
    const auto grad_raw = NormalizationBackward(raw[i], r.grad_anchors.row(i));
    for (size_t k = 0; k < dim; ++k) {
      auto up = raw, down = raw;
      up[i][k] += h;
      down[i][k] -= h;
      const double fd = (SclOf(up, bank_part, classes, tau) -
                         SclOf(down, bank_part, classes, tau)) /
                        (2 * h);
      EXPECT_LT(RelativeError(grad_raw[k], fd, 1e-6), 1e-4) << i << "," << k;
    }
  }
}

TEST(SupConTest, PermutationInvariance) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<ContrastiveItem> pool;
    for (int j = 0; j < 10; ++j) pool.push_back(Item(RandomUnit(rng, 5), j % 3));
    PairSelection sel = SoftNegatives(0, pool);
    const double base = SupConLoss(std::span(pool).first(1), pool, std::span(&sel, 1), 0.1).loss;
    std::shuffle(sel.positives.begin(), sel.positives.end(), rng);
    std::shuffle(sel.negatives.begin(), sel.negatives.end(), rng);
    const double perm = SupConLoss(std::span(pool).first(1), pool, std::span(&sel, 1), 0.1).loss;
    EXPECT_NEAR(base, perm, 1e-12);
  }
}

TEST(SupConTest, Monotonicity) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<ContrastiveItem> pool;
    for (int j = 0; j < 8; ++j) pool.push_back(Item(RandomUnit(rng, 4), j % 2));
    const auto anchor = std::span(pool).first(1);
    // Negatives: adding one strictly increases the loss.
    PairSelection sel = SoftNegatives(0, pool);
    PairSelection fewer = sel;
    fewer.negatives.pop_back();
    EXPECT_GT(SupConLoss(anchor, pool, std::span(&sel, 1), 0.2).loss,
              SupConLoss(anchor, pool, std::span(&fewer, 1), 0.2).loss);

    // Positives: a positive at least as similar as the best one never hurts.
    auto best = pool[0];
    best.embedding = pool[0].embedding;  // similarity 1
    pool.push_back(best);
    PairSelection more = SoftNegatives(0, pool);
    PairSelection without = more;
    without.positives.pop_back();
    EXPECT_LE(SupConLoss(std::span(pool).first(1), pool, std::span(&more, 1), 0.2).loss,
              SupConLoss(std::span(pool).first(1), pool, std::span(&without, 1), 0.2).loss);
  }
}

TEST(CombinedLossTest, Sum) {
  EXPECT_EQ(CombinedLoss(1.0, 0.5), 1.5);
  EXPECT_EQ(CombinedLoss(0.7, 0.0), 0.7);
  EXPECT_EQ(CombinedLoss(0.3, 0.9), CombinedLoss(0.9, 0.3));
}

TEST(LossConfigTest, Validation) {
  LossConfig c;
  EXPECT_NO_THROW(c.Validate(128));
  c.tau = 0;
  EXPECT_THROW(c.Validate(128), ConfigError);
  c = {};
  c.mode = LossMode::kSclHard;
  c.bank_size = 10;
  c.min_negatives = 20;
  EXPECT_THROW(c.Validate(8), ConfigError);
  EXPECT_NO_THROW(c.Validate(10));
  c.min_negatives = 0;
  EXPECT_THROW(c.Validate(10), ConfigError);
}

TEST(NormalizationTest, BackwardIsOrthogonalToInput) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 20; ++t) {
    auto v = RandomUnit(rng, 6);
    for (double& x : v) x *= 3.0;
    const auto g = RandomUnit(rng, 6);
    const auto back = NormalizationBackward(v, g);
    double dot = 0;
    for (size_t k = 0; k < 6; ++k) dot += back[k] * v[k];
    EXPECT_NEAR(dot, 0.0, 1e-12);
  }
  EXPECT_EQ(Normalized(std::vector<double>{0, 0}), (std::vector<double>{0, 0}));
}

}  // namespace
}  // namespace conlid
