// mtml/sampler.h

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

#ifndef MTML_SAMPLER_H_
#define MTML_SAMPLER_H_

#include <cstdint>
#include <vector>

#include "mtml/datagen.h"

namespace mtml {

// Batch geometry: M speakers x N utterances each.  Keeping the composition
// exact (rather than "N on average") makes the positive-pair count per batch
// deterministic: M*N*(N-1) ordered pairs.
struct BatchSpec {
  int speakers_per_batch = 32;  // M
  int utts_per_speaker = 4;     // N

  int BatchSize() const { return speakers_per_batch * utts_per_speaker; }
};

void Validate(const BatchSpec &spec);

struct Batch {
  std::vector<Utterance> utterances;  // cropped to a common frame count
  std::vector<int32_t> labels;        // speaker id per utterance
  int num_frames = 0;
};

// Draws M speakers without replacement, then N utterances per speaker
// (without replacement when the speaker has >= N, with replacement
// otherwise).  All members are cropped to one frame count drawn per batch,
// so the batch stacks into a rectangular array.
Batch SampleBatch(const Corpus &corpus, const BatchSpec &spec, RngStream *rng);

// Deterministic epoch-structured batch sequence: every epoch reshuffles the
// speaker list from the seed and walks it in groups of M, so each speaker
// appears at least once per epoch.  All draws for step k are derived from
// (seed, k), which makes the iterator random-access: constructing with
// start_step k reproduces the continuation of another iterator at step k.
class EpochIterator {
 public:
  EpochIterator(const Corpus &corpus, const BatchSpec &spec, uint64_t seed,
                int64_t start_step = 0);

  Batch Next();

  int64_t BatchesPerEpoch() const { return batches_per_epoch_; }
  int64_t Step() const { return step_; }

 private:
  const Corpus *corpus_;
  BatchSpec spec_;
  uint64_t seed_;
  int64_t step_;
  int64_t batches_per_epoch_;
  std::vector<std::vector<int>> utt_index_by_speaker_;
  std::vector<int32_t> speaker_ids_;
};

}  // namespace mtml

#endif  // MTML_SAMPLER_H_
