// mtml/eval.h

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

#ifndef MTML_EVAL_H_
#define MTML_EVAL_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mtml/datagen.h"
#include "mtml/matrix.h"

namespace mtml {

struct BackendConfig {
  bool use_lda = false;
  // 0 means auto: min(embed_dim - 1, 100).
  int lda_dim = 0;
  bool length_norm = true;
};

// Scoring-side transform: optional LDA projection fitted on labeled training
// embeddings (centering with the training mean, whitening the within-class
// scatter, then a symmetric eigenproblem on the between-class scatter),
// followed by optional length normalization.  Scores are dot products of the
// transformed vectors, i.e. cosine when length_norm is on.
class Backend {
 public:
  static Backend Fit(const Matrix &train_embeddings,
                     const std::vector<int32_t> &labels,
                     const BackendConfig &config);
  // No projection; only the length_norm flag applies.
  static Backend PassThrough(const BackendConfig &config);

  std::vector<double> Apply(const double *embedding, int dim) const;
  double Score(const std::vector<double> &enroll,
               const std::vector<double> &test) const;

 private:
  bool use_lda_ = false;
  bool length_norm_ = true;
  std::vector<double> center_;
  Matrix projection_;  // embed_dim x lda_dim
};

// Cosine (or raw dot) scores for each trial; throws ConfigError naming the
// utterance when an embedding is missing.
std::vector<double> ScoreTrials(
    const std::map<int32_t, std::vector<double>> &embeddings_by_utt,
    const TrialSet &trials, const Backend &backend);

// Equal error rate by sweeping every distinct score threshold and linearly
// interpolating where the false-accept and false-reject rates cross.
double ComputeEer(const std::vector<double> &scores,
                  const std::vector<uint8_t> &is_target);

// min over thresholds of
//   (p_tar * FRR + (1 - p_tar) * FAR) / min(p_tar, 1 - p_tar),
// the normalized detection cost with unit miss/false-alarm costs.
double ComputeMinDcf(const std::vector<double> &scores,
                     const std::vector<uint8_t> &is_target, double p_tar);

struct DetPoint {
  double threshold = 0.0;
  double far = 0.0;
  double frr = 0.0;
  double probit_far = 0.0;
  double probit_frr = 0.0;
};

// All operating points sorted by threshold, with standard-normal-deviate
// coordinates for DET plotting.  n distinct scores yield n + 1 points.
std::vector<DetPoint> DetPoints(const std::vector<double> &scores,
                                const std::vector<uint8_t> &is_target);

// Inverse standard normal CDF (probit); -inf/+inf at 0/1.
double InverseNormalCdf(double p);

struct ScoreReport {
  std::vector<double> scores;
  double eer = 0.0;
  double dcf2 = 0.0;  // p_tar = 0.01
  double dcf3 = 0.0;  // p_tar = 0.001
  std::vector<DetPoint> det;
};

ScoreReport EvaluateTrials(
    const std::map<int32_t, std::vector<double>> &embeddings_by_utt,
    const TrialSet &trials, const Backend &backend);

// Scores TSV: enroll<TAB>test<TAB>score<TAB>{target|nontarget}; doubles are
// printed so that read-back is bit-exact.
void WriteScores(const TrialSet &trials, const std::vector<double> &scores,
                 const std::string &header_comment, const std::string &path);
struct ScoredTrial {
  Trial trial;
  double score = 0.0;

  bool operator==(const ScoredTrial &) const = default;
};
std::vector<ScoredTrial> ReadScores(const std::string &path);

// DET TSV: threshold, far, frr, probit_far, probit_frr.
void WriteDetPoints(const std::vector<DetPoint> &points,
                    const std::string &header_comment, const std::string &path);

}  // namespace mtml

#endif  // MTML_EVAL_H_
