// mtml/pairs.cc

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

#include "mtml/pairs.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mtml/common.h"

namespace mtml {

void Validate(const MiningConfig &config) {
  if (!(config.margin >= 0.0))
    throw ConfigError("mining.margin must be >= 0");
}

void Validate(const WeightConfig &config) {
  if (!(config.alpha > 0.0)) throw ConfigError("weighting.alpha must be > 0");
  if (!(config.beta > 0.0)) throw ConfigError("weighting.beta must be > 0");
}

int64_t PairSelection::NumPositives() const {
  int64_t n = 0;
  for (const auto &p : positives) n += static_cast<int64_t>(p.size());
  return n;
}

int64_t PairSelection::NumNegatives() const {
  int64_t n = 0;
  for (const auto &p : negatives) n += static_cast<int64_t>(p.size());
  return n;
}

PairSelection MinePairs(const SimilarityMatrix &sim,
                        const std::vector<int32_t> &labels,
                        const MiningConfig &config) {
  Validate(config);
  const Matrix &s = sim.s;
  const int batch = s.NumRows();
  if (batch < 2) throw ConfigError("mining: need at least 2 samples");
  if (static_cast<int>(labels.size()) != batch)
    throw ConfigError("mining: labels length " +
                      std::to_string(labels.size()) + " != batch size " +
                      std::to_string(batch));

  PairSelection selection;
  selection.positives.resize(batch);
  selection.negatives.resize(batch);
  selection.positive_weights.resize(batch);
  selection.negative_weights.resize(batch);

  const double eps = config.margin;
  for (int i = 0; i < batch; ++i) {
    double hardest_negative = -std::numeric_limits<double>::infinity();
    double easiest_positive = std::numeric_limits<double>::infinity();
    bool has_negative = false, has_positive = false;
    for (int k = 0; k < batch; ++k) {
      if (k == i) continue;
      if (labels[k] == labels[i]) {
        has_positive = true;
        easiest_positive = std::min(easiest_positive, s(i, k));
      } else {
        has_negative = true;
        hardest_negative = std::max(hardest_negative, s(i, k));
      }
    }
    if (!has_positive || !has_negative) continue;

    for (int j = 0; j < batch; ++j) {
      if (j == i) continue;
      if (labels[j] == labels[i]) {
        bool keep = config.positive_rule == PositiveRule::kHardPositive
                        ? s(i, j) < hardest_negative + eps
                        : s(i, j) > hardest_negative + eps;
        if (keep) selection.positives[i].push_back(j);
      } else {
        if (s(i, j) > easiest_positive - eps)
          selection.negatives[i].push_back(j);
      }
    }
  }
  return selection;
}

namespace {

inline double ClampedExp(double x) {
  return std::exp(std::clamp(x, -500.0, 500.0));
}

}  // namespace

void WeighPairs(const SimilarityMatrix &sim, const WeightConfig &config,
                PairSelection *selection) {
  Validate(config);
  const Matrix &s = sim.s;
  const int batch = s.NumRows();
  if (static_cast<int>(selection->positives.size()) != batch ||
      static_cast<int>(selection->negatives.size()) != batch)
    throw ConfigError("weighting: selection does not match similarity matrix");

  const double alpha = config.alpha, beta = config.beta, lambda = config.lambda;
  for (int i = 0; i < batch; ++i) {
    const auto &pos = selection->positives[i];
    auto &pos_w = selection->positive_weights[i];
    pos_w.assign(pos.size(), 0.0);
    for (size_t a = 0; a < pos.size(); ++a) {
      double s_ij = s(i, pos[a]);
      double denom = ClampedExp(-alpha * (lambda - s_ij));
      for (int32_t k : pos) denom += ClampedExp(-alpha * (s(i, k) - s_ij));
      pos_w[a] = 1.0 / denom;
    }
    const auto &neg = selection->negatives[i];
    auto &neg_w = selection->negative_weights[i];
    neg_w.assign(neg.size(), 0.0);
    for (size_t a = 0; a < neg.size(); ++a) {
      double s_ij = s(i, neg[a]);
      double denom = ClampedExp(beta * (lambda - s_ij));
      for (int32_t k : neg) denom += ClampedExp(beta * (s(i, k) - s_ij));
      neg_w[a] = 1.0 / denom;
    }
  }
}

}  // namespace mtml
