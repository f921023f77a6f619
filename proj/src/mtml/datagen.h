// mtml/datagen.h

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

#ifndef MTML_DATAGEN_H_
#define MTML_DATAGEN_H_

#include <cstdint>
#include <string>
#include <vector>

#include "mtml/matrix.h"

namespace mtml {

// Parameters of a synthetic speaker corpus: Gaussian speaker clusters pushed
// through a fixed nonlinearity so the task has no linear shortcut.  The
// between/within standard deviations are the task-difficulty knob.
struct CorpusSpec {
  int n_speakers = 0;
  int utts_per_speaker = 0;
  int feat_dim = 30;
  int frames_min = 20;
  int frames_max = 40;
  double between_speaker_std = 1.0;
  double within_speaker_std = 0.5;
  uint64_t seed = 0;

  bool operator==(const CorpusSpec &) const = default;
};

// Throws ConfigError naming the violated field.
void Validate(const CorpusSpec &spec);

enum class Split { kTrain, kEval };

struct Utterance {
  int32_t speaker_id = 0;
  int32_t utt_id = 0;
  Matrix frames;  // T x feat_dim

  bool operator==(const Utterance &) const = default;
};

struct Corpus {
  CorpusSpec spec;
  Split split = Split::kTrain;
  std::vector<Utterance> utterances;

  bool operator==(const Corpus &) const = default;
};

// Fully deterministic in spec.seed.  Per speaker a mean is drawn from
// N(0, sigma_b^2 I); frames are N(mean, sigma_w^2 I) passed through tanh and
// a per-corpus random orthogonal mixing matrix.  Frame values are quantized
// to 32-bit float precision, matching the on-disk format exactly.
Corpus GenerateCorpus(const CorpusSpec &spec, Split split = Split::kTrain);

// SVC1 container: text header lines (magic+version, spec echo, utterance
// count) followed by binary per-utterance records (little-endian u32 ids and
// frame count, little-endian f32 frame values) and a trailing CRC32.
void WriteCorpus(const Corpus &corpus, const std::string &path);
Corpus ReadCorpus(const std::string &path);

struct Trial {
  int32_t enroll_utt = 0;
  int32_t test_utt = 0;
  bool is_target = false;

  bool operator==(const Trial &) const = default;
};

using TrialSet = std::vector<Trial>;

// Samples distinct same-speaker and cross-speaker utterance pairs without
// replacement.  Throws ConfigError when a requested count exceeds the number
// of available pairs.
TrialSet MakeTrials(const Corpus &corpus, int n_target, int n_nontarget,
                    uint64_t seed);

// Text format: enroll_utt_id<TAB>test_utt_id<TAB>{target|nontarget}.
void WriteTrials(const TrialSet &trials, const std::string &path);
TrialSet ReadTrials(const std::string &path);

}  // namespace mtml

#endif  // MTML_DATAGEN_H_
