// mtml/pairs.h

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

#ifndef MTML_PAIRS_H_
#define MTML_PAIRS_H_

#include <cstdint>
#include <vector>

#include "mtml/similarity.h"

namespace mtml {

// Which inequality selects positive pairs.  kHardPositive keeps positives
// whose similarity falls below the anchor's hardest negative plus the margin
// (informative positives); kLiteralEq3 keeps the opposite direction, which
// selects easy positives and exists for comparison experiments.
enum class PositiveRule { kHardPositive, kLiteralEq3 };

struct MiningConfig {
  double margin = 0.1;  // epsilon
  PositiveRule positive_rule = PositiveRule::kHardPositive;
};

struct WeightConfig {
  double alpha = 2.0;   // positive-branch scale
  double beta = 50.0;   // negative-branch scale
  double lambda = 1.0;  // similarity anchor
};

void Validate(const MiningConfig &config);
void Validate(const WeightConfig &config);

// Per-anchor mined pairs.  positives[i] / negatives[i] hold the selected
// partner indices for anchor i, ascending; the weight vectors run parallel
// to them and are filled by WeighPairs.
struct PairSelection {
  std::vector<std::vector<int32_t>> positives, negatives;
  std::vector<std::vector<double>> positive_weights, negative_weights;

  int64_t NumPositives() const;
  int64_t NumNegatives() const;
};

// Margin-based mining over a similarity matrix.  For anchor i with margin
// epsilon, a same-class j is kept when S_ij is within epsilon of the
// anchor's hardest negative, and a different-class j when S_ij is within
// epsilon of the anchor's easiest positive.  Inequalities are strict, self
// pairs are excluded, and anchors lacking a same-class or different-class
// partner contribute empty sets.
PairSelection MinePairs(const SimilarityMatrix &sim,
                        const std::vector<int32_t> &labels,
                        const MiningConfig &config);

// Soft weights from self- and relative similarity.  The neighbor sums run
// over the selected sets and include the pair itself, which makes each
// weight exactly D times the magnitude of the corresponding loss gradient.
// Exponents are clamped to +-500 before exponentiation.
void WeighPairs(const SimilarityMatrix &sim, const WeightConfig &config,
                PairSelection *selection);

}  // namespace mtml

#endif  // MTML_PAIRS_H_
