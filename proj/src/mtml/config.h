// mtml/config.h

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

#ifndef MTML_CONFIG_H_
#define MTML_CONFIG_H_

#include <cstdint>
#include <string>

#include "mtml/datagen.h"
#include "mtml/embedder.h"
#include "mtml/eval.h"
#include "mtml/trainer.h"

namespace mtml {

// One JSON document that pins an entire experiment.  Parsing is strict:
// unknown keys are rejected, and validation errors name the offending field.
// The canonical echo of the effective config is embedded in every output
// artifact so results stay self-describing.
struct ExperimentConfig {
  // corpus
  int feat_dim = 30;
  int frames_min = 20;
  int frames_max = 40;
  double between_speaker_std = 1.0;
  double within_speaker_std = 0.5;
  int train_speakers = 0;       // required
  int train_utts_per_speaker = 0;  // required
  int eval_speakers = 0;        // required for eval artifacts
  int eval_utts_per_speaker = 0;

  BatchSpec batch;
  EmbedderConfig embedder;  // input_dim/n_classes resolved from corpus
  MultiTaskConfig multitask;
  TrainConfig train;        // seed resolved from seeds.train
  BackendConfig backend;

  int n_target_trials = 0;
  int n_nontarget_trials = 0;

  uint64_t seed_corpus_train = 1;
  uint64_t seed_corpus_eval = 2;
  uint64_t seed_train = 3;
  uint64_t seed_trials = 4;

  CorpusSpec TrainCorpusSpec() const;
  CorpusSpec EvalCorpusSpec() const;

  // Canonical single-line JSON echo of the effective config (keys sorted).
  std::string CanonicalJson() const;
};

ExperimentConfig ParseExperimentConfig(const std::string &json_text);
ExperimentConfig LoadExperimentConfig(const std::string &path);

}  // namespace mtml

#endif  // MTML_CONFIG_H_
