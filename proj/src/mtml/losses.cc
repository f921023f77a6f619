// mtml/losses.cc

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

#include "mtml/losses.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "mtml/common.h"

namespace mtml {

namespace {

// Adds one branch (1/scale) * log(1 + sum_k exp(x_k)) for an anchor and
// accumulates d/dS_ik into grad row i.  xs[k] = sign * scale * (S_ik - lambda);
// branch_sign is -1 for positives, +1 for negatives.
double AnchorBranch(const Matrix &s, int anchor,
                    const std::vector<int32_t> &partners, double scale,
                    double lambda, double branch_sign, double inv_batch,
                    Matrix *grad) {
  if (partners.empty()) return 0.0;
  std::vector<double> xs(partners.size());
  double max_x = 0.0;  // the implicit "1 +" term has exponent 0
  for (size_t a = 0; a < partners.size(); ++a) {
    xs[a] = branch_sign * scale * (s(anchor, partners[a]) - lambda);
    max_x = std::max(max_x, xs[a]);
  }
  double sum_shifted = 0.0;
  for (double x : xs) sum_shifted += std::exp(x - max_x);
  double log_term;
  double denom;
  if (max_x == 0.0) {
    log_term = std::log1p(sum_shifted);
    denom = 1.0 + sum_shifted;
  } else {
    denom = std::exp(-max_x) + sum_shifted;
    log_term = max_x + std::log(denom);
  }
  for (size_t a = 0; a < partners.size(); ++a) {
    double weight = std::exp(xs[a] - max_x) / denom;
    (*grad)(anchor, partners[a]) += branch_sign * inv_batch * weight;
  }
  return log_term / scale;
}

}  // namespace

LossValue MlLoss(const SimilarityMatrix &sim, const PairSelection &selection,
                 const WeightConfig &config, int batch_size) {
  Validate(config);
  if (batch_size < 1) throw ConfigError("ml loss: batch size must be >= 1");
  const Matrix &s = sim.s;
  if (s.NumRows() != s.NumCols())
    throw ConfigError("ml loss: similarity matrix is not square");
  const int n = s.NumRows();
  if (static_cast<int>(selection.positives.size()) != n ||
      static_cast<int>(selection.negatives.size()) != n)
    throw ConfigError("ml loss: selection does not match similarity matrix");

  LossValue loss;
  loss.grad_similarity = Matrix(n, n);
  const double inv_batch = 1.0 / batch_size;
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    total += AnchorBranch(s, i, selection.positives[i], config.alpha,
                          config.lambda, -1.0, inv_batch,
                          &loss.grad_similarity);
    total += AnchorBranch(s, i, selection.negatives[i], config.beta,
                          config.lambda, +1.0, inv_batch,
                          &loss.grad_similarity);
  }
  loss.value = total * inv_batch;
  if (!std::isfinite(loss.value) || !AllFinite(loss.grad_similarity))
    throw NumericError("ml loss: non-finite result");
  return loss;
}

LossValue CeLoss(const Matrix &probabilities,
                 const std::vector<int32_t> &labels) {
  const int batch = probabilities.NumRows();
  const int n_classes = probabilities.NumCols();
  if (batch < 1) throw ConfigError("ce loss: empty batch");
  if (static_cast<int>(labels.size()) != batch)
    throw ConfigError("ce loss: labels length mismatch");

  LossValue loss;
  loss.grad_logits = Matrix(batch, n_classes);
  const double inv_batch = 1.0 / batch;
  double total = 0.0;
  for (int i = 0; i < batch; ++i) {
    int32_t label = labels[i];
    if (label < 0 || label >= n_classes)
      throw ConfigError("ce loss: label " + std::to_string(label) +
                        " outside [0, " + std::to_string(n_classes) + ")");
    const double *row = probabilities.RowData(i);
    double row_sum = 0.0;
    for (int c = 0; c < n_classes; ++c) row_sum += row[c];
    if (std::abs(row_sum - 1.0) > 1e-6)
      throw NumericError("ce loss: probability row " + std::to_string(i) +
                         " sums to " + FormatDouble(row_sum));
    double p_true = row[label];
    if (!(p_true > 0.0))
      throw NumericError("ce loss: zero probability for true class of sample " +
                         std::to_string(i));
    total -= std::log(p_true);
    for (int c = 0; c < n_classes; ++c) {
      double y = c == label ? 1.0 : 0.0;
      loss.grad_logits(i, c) = inv_batch * (row[c] - y);
    }
  }
  loss.value = total * inv_batch;
  return loss;
}

LossValue CombinedLoss(const LossValue &ml, const LossValue &ce, double eta) {
  if (!(eta >= 0.0 && eta <= 1.0))
    throw ConfigError("multitask.eta must lie in [0, 1]");
  if (!std::isfinite(ml.value) || !std::isfinite(ce.value))
    throw NumericError("combined loss: non-finite inputs");
  LossValue loss;
  loss.value = eta * ml.value + (1.0 - eta) * ce.value;
  if (!ml.grad_similarity.Empty()) {
    loss.grad_similarity = ml.grad_similarity;
    for (double &g : loss.grad_similarity.Data()) g *= eta;
  }
  if (!ce.grad_logits.Empty()) {
    loss.grad_logits = ce.grad_logits;
    for (double &g : loss.grad_logits.Data()) g *= 1.0 - eta;
  }
  return loss;
}

double TripletLoss(double s_anchor_negative, double s_anchor_positive,
                   double nu) {
  if (!(nu >= 0.0)) throw ConfigError("triplet margin must be >= 0");
  return std::max(s_anchor_negative - s_anchor_positive + nu, 0.0);
}

double ContrastiveLoss(double s, int sigma, double mu) {
  if (sigma != 0 && sigma != 1)
    throw ConfigError("contrastive loss: sigma must be 0 or 1");
  return (1 - sigma) * std::max(s - mu, 0.0) - sigma * s;
}

}  // namespace mtml
