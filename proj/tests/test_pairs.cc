// tests/test_pairs.cc

// Copyright 2026  The mtml Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <map>

#include "doctest.h"
#include "mtml/common.h"
#include "mtml/losses.h"
#include "mtml/pairs.h"
#include "mtml/similarity.h"
#include "testutil.h"

using namespace mtml;
using mtml_test::RandomMatrix;

namespace {

SimilarityMatrix WrapSimilarity(const Matrix &s, bool normalized = true) {
  SimilarityMatrix sim;
  sim.s = s;
  sim.normalized = normalized;
  return sim;
}

SimilarityMatrix RandomSimilarity(int batch, int dim, RngStream *rng) {
  return ComputeSimilarity(RandomMatrix(batch, dim, rng), true);
}

}  // namespace

TEST_CASE("worked 4-sample example selects one positive and one negative") {
  Matrix s(4, 4);
  const double rows[4][4] = {{1.0, 0.8, 0.75, 0.2},
                             {0.8, 1.0, 0.5, 0.3},
                             {0.75, 0.5, 1.0, 0.9},
                             {0.2, 0.3, 0.9, 1.0}};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) s(i, j) = rows[i][j];
  std::vector<int32_t> labels = {0, 0, 1, 1};

  MiningConfig config;
  config.margin = 0.1;
  PairSelection selection = MinePairs(WrapSimilarity(s), labels, config);
  CHECK(selection.positives[0] == std::vector<int32_t>{1});
  CHECK(selection.negatives[0] == std::vector<int32_t>{2});
  CHECK(selection.positives[1].empty());
  CHECK(selection.negatives[1].empty());
  CHECK(selection.positives[2].empty());
  CHECK(selection.negatives[2].empty());
  CHECK(selection.positives[3].empty());
  CHECK(selection.negatives[3].empty());
}

TEST_CASE("a huge margin selects every pair") {
  RngStream rng(3, 0);
  SimilarityMatrix sim = RandomSimilarity(8, 4, &rng);
  std::vector<int32_t> labels = mtml_test::RandomLabels(8, 3, &rng);
  MiningConfig config;
  config.margin = 10.0;  // vacuous on cosine similarities
  PairSelection selection = MinePairs(sim, labels, config);
  for (int i = 0; i < 8; ++i) {
    int same = 0, diff = 0;
    for (int j = 0; j < 8; ++j) {
      if (j == i) continue;
      (labels[j] == labels[i] ? same : diff) += 1;
    }
    if (same == 0 || diff == 0) continue;
    CHECK(static_cast<int>(selection.positives[i].size()) == same);
    CHECK(static_cast<int>(selection.negatives[i].size()) == diff);
  }
}

TEST_CASE("well-separated clusters yield no informative pairs") {
  // Two tight clusters on orthogonal axes: within-class similarity ~1,
  // cross-class ~0, margins far beyond epsilon.
  Matrix e(4, 2);
  e(0, 0) = 1.0;
  e(1, 0) = 1.0;
  e(2, 1) = 1.0;
  e(3, 1) = 1.0;
  SimilarityMatrix sim = ComputeSimilarity(e, true);
  std::vector<int32_t> labels = {0, 0, 1, 1};
  MiningConfig config;
  config.margin = 0.1;

  PairSelection hard = MinePairs(sim, labels, config);
  CHECK(hard.NumPositives() == 0);
  CHECK(hard.NumNegatives() == 0);

  // The literal printed direction keeps exactly these easy positives.
  config.positive_rule = PositiveRule::kLiteralEq3;
  PairSelection literal = MinePairs(sim, labels, config);
  CHECK(literal.NumPositives() == 4);
  CHECK(literal.NumNegatives() == 0);
}

TEST_CASE("mining equals the brute-force reference on random batches") {
  RngStream rng(5, 0);
  for (int trial = 0; trial < 25; ++trial) {
    int batch = 4 + static_cast<int>(rng.UniformInt(9));
    SimilarityMatrix sim = RandomSimilarity(batch, 3, &rng);
    std::vector<int32_t> labels = mtml_test::RandomLabels(batch, 3, &rng);
    double epsilon = rng.NextDouble() * 0.4;
    for (bool hard : {true, false}) {
      MiningConfig config;
      config.margin = epsilon;
      config.positive_rule =
          hard ? PositiveRule::kHardPositive : PositiveRule::kLiteralEq3;
      PairSelection selection = MinePairs(sim, labels, config);
      mtml_test::MinedSets oracle =
          mtml_test::BruteForceMinePairs(sim.s, labels, epsilon, hard);
      CHECK(selection.positives == oracle.positives);
      CHECK(selection.negatives == oracle.negatives);
    }
  }
}

TEST_CASE("relabeling speakers bijectively leaves selections unchanged") {
  RngStream rng(6, 0);
  SimilarityMatrix sim = RandomSimilarity(10, 4, &rng);
  std::vector<int32_t> labels = mtml_test::RandomLabels(10, 4, &rng);
  MiningConfig config;
  PairSelection base = MinePairs(sim, labels, config);
  std::vector<int32_t> relabeled(labels.size());
  const int32_t permutation[4] = {2, 0, 3, 1};
  for (size_t i = 0; i < labels.size(); ++i)
    relabeled[i] = permutation[labels[i]];
  PairSelection mapped = MinePairs(sim, relabeled, config);
  CHECK(base.positives == mapped.positives);
  CHECK(base.negatives == mapped.negatives);
}

TEST_CASE("label length mismatches are rejected") {
  RngStream rng(7, 0);
  SimilarityMatrix sim = RandomSimilarity(4, 3, &rng);
  std::vector<int32_t> labels = {0, 0, 1};
  CHECK_THROWS_AS(MinePairs(sim, labels, MiningConfig{}), ConfigError);
}

TEST_CASE("single-pair weights with all exponents zero are one half") {
  Matrix s(2, 2);
  s(0, 0) = s(1, 1) = 1.0;
  s(0, 1) = s(1, 0) = 1.0;  // S_ij = lambda = 1
  SimilarityMatrix sim = WrapSimilarity(s);

  PairSelection selection;
  selection.positives = {{1}, {}};
  selection.negatives = {{}, {0}};
  selection.positive_weights.resize(2);
  selection.negative_weights.resize(2);
  WeightConfig config;  // alpha=2, beta=50, lambda=1
  WeighPairs(sim, config, &selection);
  CHECK(selection.positive_weights[0][0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(selection.negative_weights[1][0] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("single positive at similarity 0.8 weighs 1/(e^-0.4 + 1)") {
  Matrix s(2, 2);
  s(0, 0) = s(1, 1) = 1.0;
  s(0, 1) = s(1, 0) = 0.8;
  SimilarityMatrix sim = WrapSimilarity(s);
  PairSelection selection;
  selection.positives = {{1}, {}};
  selection.negatives = {{}, {}};
  selection.positive_weights.resize(2);
  selection.negative_weights.resize(2);
  WeighPairs(sim, WeightConfig{}, &selection);
  const double expected = 1.0 / (std::exp(-0.4) + 1.0);  // ~0.59869
  CHECK(selection.positive_weights[0][0] ==
        doctest::Approx(expected).epsilon(1e-15));
  CHECK(selection.positive_weights[0][0] ==
        doctest::Approx(0.59869).epsilon(1e-4));
}

TEST_CASE("weights are positive and harder pairs weigh more") {
  RngStream rng(8, 0);
  SimilarityMatrix sim = RandomSimilarity(10, 4, &rng);
  std::vector<int32_t> labels = mtml_test::RandomLabels(10, 3, &rng);
  MiningConfig mining;
  mining.margin = 10.0;  // select everything so sets are non-trivial
  PairSelection selection = MinePairs(sim, labels, mining);
  WeighPairs(sim, WeightConfig{}, &selection);
  for (int i = 0; i < 10; ++i) {
    for (double w : selection.positive_weights[i]) CHECK(w > 0.0);
    for (double w : selection.negative_weights[i]) CHECK(w > 0.0);
  }

  // Monotonicity: lower S_ij (holding neighbors fixed) raises the positive
  // weight; higher S_ij raises the negative weight.
  for (int i = 0; i < 10; ++i) {
    if (selection.positives[i].empty() || selection.negatives[i].empty())
      continue;
    int32_t j = selection.positives[i][0];
    SimilarityMatrix nudged = sim;
    nudged.s(i, j) -= 0.05;
    PairSelection renudged = selection;
    WeighPairs(nudged, WeightConfig{}, &renudged);
    CHECK(renudged.positive_weights[i][0] > selection.positive_weights[i][0]);

    int32_t k = selection.negatives[i][0];
    SimilarityMatrix pushed = sim;
    pushed.s(i, k) += 0.05;
    PairSelection repushed = selection;
    WeighPairs(pushed, WeightConfig{}, &repushed);
    CHECK(repushed.negative_weights[i][0] > selection.negative_weights[i][0]);
    break;
  }
}

TEST_CASE("weights equal D times the loss gradient magnitude") {
  RngStream rng(9, 0);
  for (int trial = 0; trial < 20; ++trial) {
    int batch = 4 + static_cast<int>(rng.UniformInt(7));
    SimilarityMatrix sim = RandomSimilarity(batch, 4, &rng);
    std::vector<int32_t> labels = mtml_test::RandomLabels(batch, 3, &rng);
    MiningConfig mining;
    mining.margin = 0.2 + rng.NextDouble() * 0.4;
    PairSelection selection = MinePairs(sim, labels, mining);
    WeightConfig weighting;
    WeighPairs(sim, weighting, &selection);
    LossValue loss = MlLoss(sim, selection, weighting, batch);

    for (int i = 0; i < batch; ++i) {
      for (size_t a = 0; a < selection.positives[i].size(); ++a) {
        double grad = loss.grad_similarity(i, selection.positives[i][a]);
        CHECK(std::abs(batch * std::abs(grad) -
                       selection.positive_weights[i][a]) < 1e-10);
      }
      for (size_t a = 0; a < selection.negatives[i].size(); ++a) {
        double grad = loss.grad_similarity(i, selection.negatives[i][a]);
        CHECK(std::abs(batch * std::abs(grad) -
                       selection.negative_weights[i][a]) < 1e-10);
      }
    }
  }
}
