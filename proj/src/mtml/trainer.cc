// mtml/trainer.cc

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

#include "mtml/trainer.h"

#include <cmath>
#include <fstream>
#include <sstream>

#include "mtml/common.h"
#include "mtml/similarity.h"

namespace mtml {

void Validate(const TrainConfig &config) {
  if (config.steps < 1) throw ConfigError("train.steps must be >= 1");
  if (!(config.lr_end > 0.0)) throw ConfigError("train.lr_end must be > 0");
  if (!(config.lr_start >= config.lr_end))
    throw ConfigError("train.lr_start must be >= train.lr_end");
  if (!(config.adam_beta1 >= 0.0 && config.adam_beta1 < 1.0))
    throw ConfigError("train.adam_beta1 must lie in [0, 1)");
  if (!(config.adam_beta2 >= 0.0 && config.adam_beta2 < 1.0))
    throw ConfigError("train.adam_beta2 must lie in [0, 1)");
  if (!(config.adam_eps > 0.0)) throw ConfigError("train.adam_eps must be > 0");
  if (!(config.weight_decay >= 0.0))
    throw ConfigError("train.weight_decay must be >= 0");
}

void AdamStep(std::vector<double> *params, const std::vector<double> &grads,
              AdamState *state, double lr, const TrainConfig &config) {
  const size_t n = params->size();
  if (grads.size() != n)
    throw ConfigError("adam: gradient size mismatch");
  if (state->m.empty()) state->m.assign(n, 0.0);
  if (state->v.empty()) state->v.assign(n, 0.0);
  if (state->m.size() != n || state->v.size() != n)
    throw ConfigError("adam: state size mismatch");
  if (!AllFinite(grads))
    throw NumericError("adam: non-finite gradient at step " +
                       std::to_string(state->t));

  if (config.weight_decay > 0.0) {
    double shrink = 1.0 - lr * config.weight_decay;
    for (double &p : *params) p *= shrink;
  }

  state->t += 1;
  const double b1 = config.adam_beta1, b2 = config.adam_beta2;
  const double bias1 = 1.0 - std::pow(b1, static_cast<double>(state->t));
  const double bias2 = 1.0 - std::pow(b2, static_cast<double>(state->t));
  for (size_t i = 0; i < n; ++i) {
    double g = grads[i];
    state->m[i] = b1 * state->m[i] + (1.0 - b1) * g;
    state->v[i] = b2 * state->v[i] + (1.0 - b2) * g * g;
    double m_hat = state->m[i] / bias1;
    double v_hat = state->v[i] / bias2;
    (*params)[i] -= lr * m_hat / (std::sqrt(v_hat) + config.adam_eps);
  }
}

double LrAt(int64_t step, const TrainConfig &config) {
  if (step < 0 || step >= config.steps)
    throw ConfigError("lr: step " + std::to_string(step) + " outside [0, " +
                      std::to_string(config.steps) + ")");
  if (config.steps == 1) return config.lr_start;
  double fraction = static_cast<double>(step) /
                    static_cast<double>(config.steps - 1);
  return config.lr_start *
         std::pow(config.lr_end / config.lr_start, fraction);
}

namespace {

TrainResult RunLoop(const Corpus &corpus, ModelParams params, AdamState adam,
                    int64_t start_step, int64_t stop_step,
                    const BatchSpec &batch_spec,
                    const MultiTaskConfig &multitask,
                    const TrainConfig &config) {
  Validate(config);
  Validate(batch_spec);
  Validate(multitask.mining);
  Validate(multitask.weighting);
  if (!(multitask.eta >= 0.0 && multitask.eta <= 1.0))
    throw ConfigError("multitask.eta must lie in [0, 1]");
  if (start_step < 0 || start_step > config.steps)
    throw ConfigError("train: start step outside the configured budget");
  if (stop_step < 0) stop_step = config.steps;
  if (stop_step < start_step || stop_step > config.steps)
    throw ConfigError("train: stop step outside [start_step, steps]");

  TrainResult result;
  result.params = std::move(params);
  result.adam = std::move(adam);
  result.log.reserve(static_cast<size_t>(stop_step - start_step));

  EpochIterator batches(corpus, batch_spec, config.seed, start_step);
  const int batch_size = batch_spec.BatchSize();

  for (int64_t step = start_step; step < stop_step; ++step) {
    double lr = LrAt(step, config);
    Batch batch = batches.Next();

    ForwardTrace trace = Forward(result.params, batch);
    SimilarityMatrix sim =
        ComputeSimilarity(trace.embeddings, multitask.normalize_similarity);
    PairSelection selection = MinePairs(sim, batch.labels, multitask.mining);
    LossValue ml = MlLoss(sim, selection, multitask.weighting, batch_size);
    LossValue ce = CeLoss(trace.probabilities, batch.labels);
    LossValue blended = CombinedLoss(ml, ce, multitask.eta);

    if (!std::isfinite(blended.value) || blended.value > 1e6)
      throw NumericError("training diverged at step " + std::to_string(step) +
                         " (blended loss " + FormatDouble(blended.value) + ")");

    Matrix grad_embeddings =
        SimilarityBackward(trace.embeddings, blended.grad_similarity,
                           multitask.normalize_similarity);
    std::vector<double> grads =
        Backward(result.params, trace, grad_embeddings, blended.grad_logits);
    if (!AllFinite(grads))
      throw NumericError("non-finite parameter gradient at step " +
                         std::to_string(step));
    AdamStep(&result.params.flat, grads, &result.adam, lr, config);

    result.log.push_back({step, lr, ml.value, ce.value, blended.value,
                          selection.NumPositives(), selection.NumNegatives()});
  }
  return result;
}

}  // namespace

TrainResult Train(const Corpus &corpus, EmbedderConfig embedder_config,
                  const BatchSpec &batch_spec, const MultiTaskConfig &multitask,
                  const TrainConfig &config, int64_t stop_step) {
  if (embedder_config.input_dim == 0)
    embedder_config.input_dim = corpus.spec.feat_dim;
  if (embedder_config.n_classes == 0)
    embedder_config.n_classes = corpus.spec.n_speakers;
  if (embedder_config.input_dim != corpus.spec.feat_dim)
    throw ConfigError("embedder.input_dim disagrees with corpus feat_dim");
  ModelParams params = InitParams(embedder_config, config.seed);
  return RunLoop(corpus, std::move(params), AdamState{}, 0, stop_step,
                 batch_spec, multitask, config);
}

TrainResult TrainFrom(const Corpus &corpus, const ModelParams &params,
                      const AdamState &adam, int64_t start_step,
                      const BatchSpec &batch_spec,
                      const MultiTaskConfig &multitask,
                      const TrainConfig &config, int64_t stop_step) {
  if (params.config.input_dim != corpus.spec.feat_dim)
    throw ConfigError("checkpoint input_dim disagrees with corpus feat_dim");
  return RunLoop(corpus, params, adam, start_step, stop_step, batch_spec,
                 multitask, config);
}

void WriteTrainLog(const std::vector<TrainStepRecord> &log,
                   const std::string &header_comment, const std::string &path) {
  std::ostringstream out;
  if (!header_comment.empty()) out << "# " << header_comment << '\n';
  out << "step\tlr\tml_loss\tce_loss\tblended_loss\tnum_positive\tnum_negative\n";
  for (const TrainStepRecord &r : log) {
    out << r.step << '\t' << FormatDouble(r.lr) << '\t'
        << FormatDouble(r.ml_loss) << '\t' << FormatDouble(r.ce_loss) << '\t'
        << FormatDouble(r.blended_loss) << '\t' << r.num_positive << '\t'
        << r.num_negative << '\n';
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot open " + path + " for writing");
  const std::string bytes = out.str();
  file.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  file.flush();
  if (!file) throw IoError("write failure on " + path);
}

}  // namespace mtml
