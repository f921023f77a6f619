// mtml/eval.cc

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

#include "mtml/eval.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "mtml/common.h"

namespace mtml {

// ---------------------------------------------------------------------------
// Backend
// ---------------------------------------------------------------------------

Backend Backend::PassThrough(const BackendConfig &config) {
  Backend backend;
  backend.use_lda_ = false;
  backend.length_norm_ = config.length_norm;
  return backend;
}

Backend Backend::Fit(const Matrix &train_embeddings,
                     const std::vector<int32_t> &labels,
                     const BackendConfig &config) {
  if (!config.use_lda) return PassThrough(config);
  const int n = train_embeddings.NumRows();
  const int dim = train_embeddings.NumCols();
  if (static_cast<int>(labels.size()) != n)
    throw ConfigError("backend: labels length mismatch");
  int lda_dim = config.lda_dim > 0 ? config.lda_dim : std::min(dim - 1, 100);
  if (lda_dim < 1 || lda_dim >= dim)
    throw ConfigError("backend.lda_dim must lie in [1, embed_dim)");

  // Class and global means.
  std::map<int32_t, std::pair<std::vector<double>, int>> class_stats;
  std::vector<double> global_mean(dim, 0.0);
  for (int i = 0; i < n; ++i) {
    auto &[sum, count] = class_stats[labels[i]];
    if (sum.empty()) sum.assign(dim, 0.0);
    const double *row = train_embeddings.RowData(i);
    for (int d = 0; d < dim; ++d) {
      sum[d] += row[d];
      global_mean[d] += row[d];
    }
    ++count;
  }
  if (class_stats.size() < 2)
    throw ConfigError("backend: LDA needs >= 2 classes");
  for (int d = 0; d < dim; ++d) global_mean[d] /= n;

  Matrix within(dim, dim), between(dim, dim);
  for (int i = 0; i < n; ++i) {
    const auto &[sum, count] = class_stats[labels[i]];
    const double *row = train_embeddings.RowData(i);
    std::vector<double> diff(dim);
    for (int d = 0; d < dim; ++d) diff[d] = row[d] - sum[d] / count;
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < dim; ++b) within(a, b) += diff[a] * diff[b];
  }
  for (const auto &[label, stats] : class_stats) {
    const auto &[sum, count] = stats;
    std::vector<double> diff(dim);
    for (int d = 0; d < dim; ++d) diff[d] = sum[d] / count - global_mean[d];
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < dim; ++b)
        between(a, b) += count * diff[a] * diff[b];
  }
  for (double &x : within.Data()) x /= n;
  for (double &x : between.Data()) x /= n;

  // Whiten the within-class scatter, regularizing if it is singular.
  std::vector<double> w_eigenvalues;
  Matrix w_eigenvectors;
  SymEig(within, &w_eigenvalues, &w_eigenvectors);
  double w_max = std::max(w_eigenvalues.front(), 0.0);
  if (w_eigenvalues.back() <= 1e-12 * std::max(1.0, w_max)) {
    std::cerr << "warning[numeric]: within-class scatter is singular, "
                 "regularizing with 1e-6*I\n";
    for (int d = 0; d < dim; ++d) within(d, d) += 1e-6;
    SymEig(within, &w_eigenvalues, &w_eigenvectors);
  }
  Matrix whitener(dim, dim);
  for (int col = 0; col < dim; ++col) {
    if (!(w_eigenvalues[col] > 0.0))
      throw NumericError("backend: within-class scatter not positive definite");
    double inv_sqrt = 1.0 / std::sqrt(w_eigenvalues[col]);
    for (int row = 0; row < dim; ++row)
      whitener(row, col) = w_eigenvectors(row, col) * inv_sqrt;
  }

  // Between-class scatter in the whitened space, then its top directions.
  Matrix projected = MatMul(MatMul(Transpose(whitener), between), whitener);
  // Symmetrize the tiny asymmetry from the two matmuls.
  for (int a = 0; a < dim; ++a)
    for (int b = a + 1; b < dim; ++b) {
      double s = 0.5 * (projected(a, b) + projected(b, a));
      projected(a, b) = projected(b, a) = s;
    }
  std::vector<double> b_eigenvalues;
  Matrix b_eigenvectors;
  SymEig(projected, &b_eigenvalues, &b_eigenvectors);

  Backend backend;
  backend.use_lda_ = true;
  backend.length_norm_ = config.length_norm;
  backend.center_ = std::move(global_mean);
  backend.projection_ = Matrix(dim, lda_dim);
  for (int col = 0; col < lda_dim; ++col)
    for (int row = 0; row < dim; ++row) {
      double sum = 0.0;
      for (int k = 0; k < dim; ++k)
        sum += whitener(row, k) * b_eigenvectors(k, col);
      backend.projection_(row, col) = sum;
    }
  return backend;
}

std::vector<double> Backend::Apply(const double *embedding, int dim) const {
  std::vector<double> vec(embedding, embedding + dim);
  if (use_lda_) {
    if (dim != projection_.NumRows())
      throw ConfigError("backend: embedding dim does not match LDA");
    std::vector<double> centered(dim);
    for (int d = 0; d < dim; ++d) centered[d] = vec[d] - center_[d];
    std::vector<double> out(projection_.NumCols(), 0.0);
    for (int d = 0; d < dim; ++d) {
      double c = centered[d];
      for (int k = 0; k < projection_.NumCols(); ++k)
        out[k] += c * projection_(d, k);
    }
    vec = std::move(out);
  }
  if (length_norm_) {
    double norm = Norm2(vec);
    if (norm == 0.0)
      throw NumericError("backend: zero-norm vector under length_norm");
    for (double &x : vec) x /= norm;
  }
  return vec;
}

double Backend::Score(const std::vector<double> &enroll,
                      const std::vector<double> &test) const {
  return Dot(enroll, test);
}

std::vector<double> ScoreTrials(
    const std::map<int32_t, std::vector<double>> &embeddings_by_utt,
    const TrialSet &trials, const Backend &backend) {
  if (trials.empty()) throw ConfigError("scoring: empty trial set");
  std::map<int32_t, std::vector<double>> transformed;
  auto lookup = [&](int32_t utt) -> const std::vector<double> & {
    auto cached = transformed.find(utt);
    if (cached != transformed.end()) return cached->second;
    auto raw = embeddings_by_utt.find(utt);
    if (raw == embeddings_by_utt.end())
      throw ConfigError("scoring: no embedding for utterance " +
                        std::to_string(utt));
    auto [inserted, unused] = transformed.emplace(
        utt, backend.Apply(raw->second.data(),
                           static_cast<int>(raw->second.size())));
    return inserted->second;
  };
  std::vector<double> scores;
  scores.reserve(trials.size());
  for (const Trial &t : trials)
    scores.push_back(backend.Score(lookup(t.enroll_utt), lookup(t.test_utt)));
  return scores;
}

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

namespace {

struct OperatingPoint {
  double threshold;
  double far;
  double frr;
};

// All operating points of the "accept iff score >= threshold" rule, sorted
// by threshold: one per distinct score plus a reject-all sentinel.
std::vector<OperatingPoint> SweepThresholds(const std::vector<double> &scores,
                                            const std::vector<uint8_t> &is_target) {
  if (scores.size() != is_target.size())
    throw ConfigError("metrics: scores/labels length mismatch");
  int64_t n_target = 0, n_nontarget = 0;
  for (uint8_t t : is_target) (t ? n_target : n_nontarget) += 1;
  if (n_target == 0 || n_nontarget == 0)
    throw ConfigError("metrics: need at least one target and one nontarget");
  for (double s : scores)
    if (!std::isfinite(s)) throw NumericError("metrics: non-finite score");

  std::vector<std::pair<double, uint8_t>> sorted(scores.size());
  for (size_t i = 0; i < scores.size(); ++i)
    sorted[i] = {scores[i], is_target[i]};
  std::sort(sorted.begin(), sorted.end(),
            [](const auto &a, const auto &b) { return a.first < b.first; });

  std::vector<OperatingPoint> points;
  int64_t targets_below = 0, nontargets_below = 0;
  size_t i = 0;
  while (i < sorted.size()) {
    double threshold = sorted[i].first;
    points.push_back({threshold,
                      static_cast<double>(n_nontarget - nontargets_below) /
                          static_cast<double>(n_nontarget),
                      static_cast<double>(targets_below) /
                          static_cast<double>(n_target)});
    while (i < sorted.size() && sorted[i].first == threshold) {
      (sorted[i].second ? targets_below : nontargets_below) += 1;
      ++i;
    }
  }
  points.push_back({std::numeric_limits<double>::infinity(), 0.0, 1.0});
  return points;
}

}  // namespace

double ComputeEer(const std::vector<double> &scores,
                  const std::vector<uint8_t> &is_target) {
  std::vector<OperatingPoint> points = SweepThresholds(scores, is_target);
  // far - frr falls monotonically from 1 to -1; find the sign change.
  for (size_t k = 0; k < points.size(); ++k) {
    double diff = points[k].far - points[k].frr;
    if (diff > 0.0) continue;
    if (diff == 0.0) return points[k].far;
    const OperatingPoint &lo = points[k - 1];
    const OperatingPoint &hi = points[k];
    double d0 = lo.far - lo.frr;
    double d1 = hi.far - hi.frr;
    double t = d0 / (d0 - d1);
    return lo.far + t * (hi.far - lo.far);
  }
  throw NumericError("eer: no crossing found");
}

double ComputeMinDcf(const std::vector<double> &scores,
                     const std::vector<uint8_t> &is_target, double p_tar) {
  if (!(p_tar > 0.0 && p_tar < 1.0))
    throw ConfigError("min dcf: p_tar must lie in (0, 1)");
  std::vector<OperatingPoint> points = SweepThresholds(scores, is_target);
  double normalizer = std::min(p_tar, 1.0 - p_tar);
  double best = std::numeric_limits<double>::infinity();
  for (const OperatingPoint &p : points) {
    double cost = (p_tar * p.frr + (1.0 - p_tar) * p.far) / normalizer;
    best = std::min(best, cost);
  }
  return best;
}

double InverseNormalCdf(double p) {
  if (p <= 0.0) return -std::numeric_limits<double>::infinity();
  if (p >= 1.0) return std::numeric_limits<double>::infinity();
  // Acklam's rational approximation, then one Halley refinement against the
  // erfc-based CDF; accurate to a few ulps over (0, 1).
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;
  double x;
  if (p < p_low) {
    double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    double q = p - 0.5, r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  double err = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  double u = err * std::sqrt(2.0 * M_PI) * std::exp(x * x / 2.0);
  return x - u / (1.0 + x * u / 2.0);
}

std::vector<DetPoint> DetPoints(const std::vector<double> &scores,
                                const std::vector<uint8_t> &is_target) {
  std::vector<OperatingPoint> points = SweepThresholds(scores, is_target);
  std::vector<DetPoint> det;
  det.reserve(points.size());
  for (const OperatingPoint &p : points)
    det.push_back({p.threshold, p.far, p.frr, InverseNormalCdf(p.far),
                   InverseNormalCdf(p.frr)});
  return det;
}

ScoreReport EvaluateTrials(
    const std::map<int32_t, std::vector<double>> &embeddings_by_utt,
    const TrialSet &trials, const Backend &backend) {
  ScoreReport report;
  report.scores = ScoreTrials(embeddings_by_utt, trials, backend);
  std::vector<uint8_t> is_target(trials.size());
  for (size_t i = 0; i < trials.size(); ++i) is_target[i] = trials[i].is_target;
  report.eer = ComputeEer(report.scores, is_target);
  report.dcf2 = ComputeMinDcf(report.scores, is_target, 0.01);
  report.dcf3 = ComputeMinDcf(report.scores, is_target, 0.001);
  report.det = DetPoints(report.scores, is_target);
  return report;
}

// ---------------------------------------------------------------------------
// Score and DET files
// ---------------------------------------------------------------------------

void WriteScores(const TrialSet &trials, const std::vector<double> &scores,
                 const std::string &header_comment, const std::string &path) {
  if (trials.size() != scores.size())
    throw ConfigError("scores: trial/score length mismatch");
  std::ostringstream out;
  if (!header_comment.empty()) out << "# " << header_comment << '\n';
  for (size_t i = 0; i < trials.size(); ++i) {
    out << trials[i].enroll_utt << '\t' << trials[i].test_utt << '\t'
        << FormatDouble(scores[i]) << '\t'
        << (trials[i].is_target ? "target" : "nontarget") << '\n';
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot open " + path + " for writing");
  const std::string bytes = out.str();
  file.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  file.flush();
  if (!file) throw IoError("write failure on " + path);
}

std::vector<ScoredTrial> ReadScores(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path + " for reading");
  std::vector<ScoredTrial> rows;
  std::string line;
  uint64_t offset = 0;
  while (std::getline(in, line)) {
    uint64_t line_offset = offset;
    offset += line.size() + 1;
    if (!line.empty() && line[0] == '#') continue;
    std::istringstream s(line);
    ScoredTrial row;
    std::string score_text, label;
    s >> row.trial.enroll_utt >> row.trial.test_utt >> score_text >> label;
    if (!s || (label != "target" && label != "nontarget"))
      throw ParseError(path + ": malformed score line '" + line + "'",
                       line_offset);
    char *end = nullptr;
    row.score = std::strtod(score_text.c_str(), &end);
    if (end == nullptr || *end != '\0')
      throw ParseError(path + ": malformed score value '" + score_text + "'",
                       line_offset);
    row.trial.is_target = label == "target";
    rows.push_back(row);
  }
  if (rows.empty()) throw ParseError(path + ": no score rows", 0);
  return rows;
}

void WriteDetPoints(const std::vector<DetPoint> &points,
                    const std::string &header_comment, const std::string &path) {
  std::ostringstream out;
  if (!header_comment.empty()) out << "# " << header_comment << '\n';
  out << "threshold\tfar\tfrr\tprobit_far\tprobit_frr\n";
  for (const DetPoint &p : points) {
    out << FormatDouble(p.threshold) << '\t' << FormatDouble(p.far) << '\t'
        << FormatDouble(p.frr) << '\t' << FormatDouble(p.probit_far) << '\t'
        << FormatDouble(p.probit_frr) << '\n';
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot open " + path + " for writing");
  const std::string bytes = out.str();
  file.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  file.flush();
  if (!file) throw IoError("write failure on " + path);
}

}  // namespace mtml
