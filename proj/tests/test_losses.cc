// tests/test_losses.cc

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

#include "doctest.h"
#include "mtml/common.h"
#include "mtml/losses.h"
#include "mtml/similarity.h"
#include "testutil.h"

using namespace mtml;
using mtml_test::RandomMatrix;

namespace {

struct MinedBatch {
  SimilarityMatrix sim;
  std::vector<int32_t> labels;
  PairSelection selection;
};

MinedBatch RandomMinedBatch(int batch, RngStream *rng,
                            double margin = 0.5) {
  MinedBatch out;
  out.sim = ComputeSimilarity(RandomMatrix(batch, 4, rng), true);
  out.labels = mtml_test::RandomLabels(batch, 3, rng);
  MiningConfig mining;
  mining.margin = margin;
  out.selection = MinePairs(out.sim, out.labels, mining);
  return out;
}

Matrix SoftmaxRows(const Matrix &logits) {
  Matrix p(logits.NumRows(), logits.NumCols());
  for (int i = 0; i < logits.NumRows(); ++i) {
    double max_logit = logits(i, 0);
    for (int c = 1; c < logits.NumCols(); ++c)
      max_logit = std::max(max_logit, logits(i, c));
    double denom = 0.0;
    for (int c = 0; c < logits.NumCols(); ++c) {
      p(i, c) = std::exp(logits(i, c) - max_logit);
      denom += p(i, c);
    }
    for (int c = 0; c < logits.NumCols(); ++c) p(i, c) /= denom;
  }
  return p;
}

}  // namespace

TEST_CASE("empty selection gives zero loss and zero gradient") {
  RngStream rng(1, 0);
  SimilarityMatrix sim = ComputeSimilarity(RandomMatrix(4, 3, &rng), true);
  PairSelection selection;
  selection.positives.resize(4);
  selection.negatives.resize(4);
  LossValue loss = MlLoss(sim, selection, WeightConfig{}, 4);
  CHECK(loss.value == 0.0);
  for (double g : loss.grad_similarity.Data()) CHECK(g == 0.0);
}

TEST_CASE("single positive anchor evaluates the scalar formula") {
  // One anchor with one positive at S = 0.8, alpha = 2, lambda = 1 and no
  // negatives: (1/1) * (1/2) * log(1 + e^{-2(0.8-1)}).
  Matrix s(2, 2);
  s(0, 0) = s(1, 1) = 1.0;
  s(0, 1) = s(1, 0) = 0.8;
  SimilarityMatrix sim;
  sim.s = s;
  PairSelection selection;
  selection.positives = {{1}, {}};
  selection.negatives = {{}, {}};

  LossValue loss = MlLoss(sim, selection, WeightConfig{}, 1);
  const double expected = 0.5 * std::log1p(std::exp(0.4));
  CHECK(loss.value == doctest::Approx(expected).epsilon(1e-15));
  CHECK(loss.value == doctest::Approx(0.45651).epsilon(1e-4));
}

TEST_CASE("ml loss gradient matches finite differences on mined batches") {
  RngStream rng(2, 0);
  for (int trial = 0; trial < 10; ++trial) {
    int batch = 4 + static_cast<int>(rng.UniformInt(5));
    MinedBatch mined = RandomMinedBatch(batch, &rng);
    WeightConfig weighting;
    LossValue loss = MlLoss(mined.sim, mined.selection, weighting, batch);
    std::vector<double> analytic = loss.grad_similarity.Data();
    auto value = [&]() {
      return MlLoss(mined.sim, mined.selection, weighting, batch).value;
    };
    auto result =
        mtml_test::CheckGradient(&mined.sim.s.Data(), analytic, value, 1e-5,
                                 1e-6);
    CHECK(result.ok);
    CHECK(result.max_rel_error < 1e-6);
  }
}

TEST_CASE("ml loss gradient sign structure") {
  RngStream rng(3, 0);
  MinedBatch mined = RandomMinedBatch(8, &rng);
  LossValue loss = MlLoss(mined.sim, mined.selection, WeightConfig{}, 8);
  for (int i = 0; i < 8; ++i) {
    for (int32_t j : mined.selection.positives[i])
      CHECK(loss.grad_similarity(i, j) < 0.0);
    for (int32_t j : mined.selection.negatives[i])
      CHECK(loss.grad_similarity(i, j) > 0.0);
  }
}

TEST_CASE("ml loss is invariant under consistent batch reordering") {
  RngStream rng(4, 0);
  Matrix e = RandomMatrix(6, 4, &rng);
  std::vector<int32_t> labels = mtml_test::RandomLabels(6, 2, &rng);
  MiningConfig mining;
  SimilarityMatrix sim = ComputeSimilarity(e, true);
  LossValue base =
      MlLoss(sim, MinePairs(sim, labels, mining), WeightConfig{}, 6);

  std::vector<int> perm = {3, 1, 5, 0, 4, 2};
  Matrix permuted(6, 4);
  std::vector<int32_t> permuted_labels(6);
  for (int i = 0; i < 6; ++i) {
    permuted_labels[i] = labels[perm[i]];
    for (int d = 0; d < 4; ++d) permuted(i, d) = e(perm[i], d);
  }
  SimilarityMatrix sim2 = ComputeSimilarity(permuted, true);
  LossValue shuffled =
      MlLoss(sim2, MinePairs(sim2, permuted_labels, mining), WeightConfig{}, 6);
  CHECK(shuffled.value == doctest::Approx(base.value).epsilon(1e-12));
}

TEST_CASE("ml loss rejects a zero batch size") {
  SimilarityMatrix sim;
  sim.s = Matrix(0, 0);
  PairSelection selection;
  CHECK_THROWS_AS(MlLoss(sim, selection, WeightConfig{}, 0), ConfigError);
}

TEST_CASE("ce loss on exact one-hot probabilities is zero") {
  Matrix p(2, 3);
  p(0, 1) = 1.0;
  p(1, 2) = 1.0;
  LossValue loss = CeLoss(p, {1, 2});
  CHECK(loss.value == 0.0);
}

TEST_CASE("ce loss on uniform probabilities is ln C") {
  const int n_classes = 5;
  Matrix p(3, n_classes, 1.0 / n_classes);
  LossValue loss = CeLoss(p, {0, 3, 4});
  CHECK(loss.value == doctest::Approx(std::log(n_classes)).epsilon(1e-12));
}

TEST_CASE("ce loss scalar example -ln 0.7") {
  Matrix p(1, 3);
  p(0, 0) = 0.7;
  p(0, 1) = 0.2;
  p(0, 2) = 0.1;
  LossValue loss = CeLoss(p, {0});
  CHECK(loss.value == doctest::Approx(-std::log(0.7)).epsilon(1e-15));
  CHECK(loss.value == doctest::Approx(0.356675).epsilon(1e-6));
}

TEST_CASE("ce loss error paths") {
  Matrix p(1, 2);
  p(0, 0) = 0.0;
  p(0, 1) = 1.0;
  CHECK_THROWS_AS(CeLoss(p, {0}), NumericError);  // zero true-class probability
  Matrix q(1, 2);
  q(0, 0) = 0.9;
  q(0, 1) = 0.3;  // does not sum to one
  CHECK_THROWS_AS(CeLoss(q, {0}), NumericError);
  Matrix r(1, 2, 0.5);
  CHECK_THROWS_AS(CeLoss(r, {5}), ConfigError);
}

TEST_CASE("ce gradient is the fused softmax gradient") {
  RngStream rng(5, 0);
  Matrix logits = RandomMatrix(3, 4, &rng);
  std::vector<int32_t> labels = {2, 0, 3};
  Matrix p = SoftmaxRows(logits);
  LossValue loss = CeLoss(p, labels);

  // Against finite differences through an independent softmax.
  std::vector<double> analytic = loss.grad_logits.Data();
  auto value = [&]() { return CeLoss(SoftmaxRows(logits), labels).value; };
  auto result = mtml_test::CheckGradient(&logits.Data(), analytic, value);
  CHECK(result.ok);
  CHECK(result.max_rel_error < 1e-5);

  // And the closed form (p - y) / D.
  for (int i = 0; i < 3; ++i)
    for (int c = 0; c < 4; ++c) {
      double y = c == labels[i] ? 1.0 : 0.0;
      CHECK(loss.grad_logits(i, c) ==
            doctest::Approx((p(i, c) - y) / 3.0).epsilon(1e-15));
    }
}

TEST_CASE("ce loss is nonnegative on random inputs") {
  RngStream rng(6, 0);
  for (int trial = 0; trial < 50; ++trial) {
    Matrix p = SoftmaxRows(RandomMatrix(4, 5, &rng, 2.0));
    std::vector<int32_t> labels(4);
    for (auto &l : labels) l = static_cast<int32_t>(rng.UniformInt(5));
    CHECK(CeLoss(p, labels).value >= 0.0);
  }
}

TEST_CASE("blend endpoints are exact") {
  LossValue ml;
  ml.value = 1.0;
  ml.grad_similarity = Matrix(2, 2, 0.25);
  LossValue ce;
  ce.value = 2.0;
  ce.grad_logits = Matrix(2, 3, -0.5);

  LossValue at_zero = CombinedLoss(ml, ce, 0.0);
  CHECK(at_zero.value == 2.0);
  for (double g : at_zero.grad_similarity.Data()) CHECK(g == 0.0);
  for (double g : at_zero.grad_logits.Data()) CHECK(g == -0.5);

  LossValue at_one = CombinedLoss(ml, ce, 1.0);
  CHECK(at_one.value == 1.0);
  for (double g : at_one.grad_similarity.Data()) CHECK(g == 0.25);
  for (double g : at_one.grad_logits.Data()) CHECK(g == 0.0);

  LossValue mid = CombinedLoss(ml, ce, 0.3);
  CHECK(mid.value == doctest::Approx(1.7).epsilon(1e-15));

  CHECK_THROWS_AS(CombinedLoss(ml, ce, 1.5), ConfigError);
  CHECK_THROWS_AS(CombinedLoss(ml, ce, -0.1), ConfigError);
}

TEST_CASE("triplet loss hinge") {
  CHECK(TripletLoss(0.5, 0.9, 0.3) == 0.0);
  CHECK(TripletLoss(0.8, 0.7, 0.2) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(TripletLoss(0.4, 0.4, 0.0) == 0.0);
}

TEST_CASE("contrastive loss branches") {
  CHECK(ContrastiveLoss(0.9, 1, 0.5) == doctest::Approx(-0.9).epsilon(1e-15));
  CHECK(ContrastiveLoss(0.3, 0, 0.5) == 0.0);
  CHECK(ContrastiveLoss(0.8, 0, 0.5) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK_THROWS_AS(ContrastiveLoss(0.1, 2, 0.5), ConfigError);
}
