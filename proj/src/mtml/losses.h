// mtml/losses.h

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

#ifndef MTML_LOSSES_H_
#define MTML_LOSSES_H_

#include <cstdint>
#include <vector>

#include "mtml/pairs.h"

namespace mtml {

// A loss value with whichever gradients the loss defines: grad_similarity is
// D x D (zero outside selected ordered pairs), grad_logits is D x n_classes.
// Either may be empty when the loss has no such path.
struct LossValue {
  double value = 0.0;
  Matrix grad_similarity;
  Matrix grad_logits;
};

// Metric-learning loss over mined pairs:
//   (1/D) sum_i { (1/alpha) log[1 + sum_{k in P_i} exp(-alpha (S_ik - lambda))]
//               + (1/beta)  log[1 + sum_{k in N_i} exp( beta  (S_ik - lambda))] }
// Anchors with empty sets contribute log(1) = 0.  Evaluation is
// log1p/max-shifted for stability; gradients are exact.
LossValue MlLoss(const SimilarityMatrix &sim, const PairSelection &selection,
                 const WeightConfig &config, int batch_size);

// Mean negative log-likelihood of the true class.  grad_logits is the fused
// softmax gradient (p - y) / D.
LossValue CeLoss(const Matrix &probabilities,
                 const std::vector<int32_t> &labels);

// Blend eta * ml + (1 - eta) * ce, with gradients scaled on both paths.
LossValue CombinedLoss(const LossValue &ml, const LossValue &ce, double eta);

// Hinge on a (negative, positive) similarity gap over margin nu.
double TripletLoss(double s_anchor_negative, double s_anchor_positive,
                   double nu);

// (1 - sigma) [S - mu]_+ - sigma S, where sigma = 1 marks a positive pair.
double ContrastiveLoss(double s, int sigma, double mu);

}  // namespace mtml

#endif  // MTML_LOSSES_H_
