// mtml/trainer.h

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

#ifndef MTML_TRAINER_H_
#define MTML_TRAINER_H_

#include <cstdint>
#include <string>
#include <vector>

#include "mtml/embedder.h"
#include "mtml/losses.h"

namespace mtml {

struct TrainConfig {
  int64_t steps = 200;
  double lr_start = 1e-3;
  double lr_end = 1e-4;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  double weight_decay = 1e-4;
  uint64_t seed = 0;
};

void Validate(const TrainConfig &config);

// Blend weight and the pair pipeline configuration used at every step.
struct MultiTaskConfig {
  double eta = 0.3;
  MiningConfig mining;
  WeightConfig weighting;
  bool normalize_similarity = true;
};

struct AdamState {
  std::vector<double> m, v;
  int64_t t = 0;
};

// One optimizer step.  Decoupled L2 decay shrinks the parameters before the
// Adam update so the moment estimates stay decay-free.
void AdamStep(std::vector<double> *params, const std::vector<double> &grads,
              AdamState *state, double lr, const TrainConfig &config);

// Exponential interpolation from lr_start to lr_end, hitting both endpoints.
double LrAt(int64_t step, const TrainConfig &config);

struct TrainStepRecord {
  int64_t step = 0;
  double lr = 0.0;
  double ml_loss = 0.0;
  double ce_loss = 0.0;
  double blended_loss = 0.0;
  int64_t num_positive = 0;
  int64_t num_negative = 0;
};

struct TrainResult {
  ModelParams params;
  AdamState adam;
  std::vector<TrainStepRecord> log;
};

// Full training loop: sample batch, forward, similarity, mine, weigh, blend
// losses, backward through both heads, Adam.  Deterministic in
// config.seed; each step's batch is derived from (seed, step) so a resumed
// run replays the identical sequence.  Aborts with NumericError when the
// blended loss exceeds 1e6 or turns non-finite.
//
// config.steps is the total budget and pins the learning-rate schedule;
// stop_step (when >= 0) interrupts the run early so it can be checkpointed
// and later resumed to bit-identical results.
TrainResult Train(const Corpus &corpus, EmbedderConfig embedder_config,
                  const BatchSpec &batch_spec, const MultiTaskConfig &multitask,
                  const TrainConfig &config, int64_t stop_step = -1);

// Continues from a checkpointed parameter/optimizer state at start_step.
TrainResult TrainFrom(const Corpus &corpus, const ModelParams &params,
                      const AdamState &adam, int64_t start_step,
                      const BatchSpec &batch_spec,
                      const MultiTaskConfig &multitask,
                      const TrainConfig &config, int64_t stop_step = -1);

// TSV with one row per step; header_comment lines are emitted first,
// prefixed with '#'.
void WriteTrainLog(const std::vector<TrainStepRecord> &log,
                   const std::string &header_comment, const std::string &path);

}  // namespace mtml

#endif  // MTML_TRAINER_H_
