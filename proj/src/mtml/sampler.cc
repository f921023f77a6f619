// mtml/sampler.cc

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

#include "mtml/sampler.h"

#include <algorithm>
#include <map>
#include <numeric>

#include "mtml/common.h"

namespace mtml {

void Validate(const BatchSpec &spec) {
  if (spec.speakers_per_batch < 2)
    throw ConfigError("batch.speakers_per_batch must be >= 2");
  if (spec.utts_per_speaker < 2)
    throw ConfigError("batch.utts_per_speaker must be >= 2");
}

namespace {

std::vector<std::vector<int>> IndexBySpeaker(const Corpus &corpus,
                                             std::vector<int32_t> *speaker_ids) {
  std::map<int32_t, std::vector<int>> by_speaker;
  for (size_t i = 0; i < corpus.utterances.size(); ++i)
    by_speaker[corpus.utterances[i].speaker_id].push_back(static_cast<int>(i));
  std::vector<std::vector<int>> index;
  speaker_ids->clear();
  for (auto &[spk, utts] : by_speaker) {
    speaker_ids->push_back(spk);
    index.push_back(std::move(utts));
  }
  return index;
}

// Assembles a batch for an already-chosen speaker group.  Draw order is
// fixed: per-speaker utterances, then the common frame count, then one crop
// offset per member.
Batch BatchFromSpeakers(const Corpus &corpus,
                        const std::vector<std::vector<int>> &utt_index,
                        const std::vector<int> &chosen_groups,
                        const BatchSpec &spec, RngStream *rng) {
  const int n = spec.utts_per_speaker;
  std::vector<int> member_utts;  // indexes into corpus.utterances
  member_utts.reserve(chosen_groups.size() * static_cast<size_t>(n));
  for (int group : chosen_groups) {
    const std::vector<int> &pool = utt_index[group];
    if (static_cast<int>(pool.size()) >= n) {
      std::vector<int> local(pool);
      for (int k = 0; k < n; ++k) {
        size_t j = k + static_cast<size_t>(rng->UniformInt(local.size() - k));
        std::swap(local[k], local[j]);
        member_utts.push_back(local[k]);
      }
    } else {
      for (int k = 0; k < n; ++k)
        member_utts.push_back(pool[rng->UniformInt(pool.size())]);
    }
  }

  int min_len = corpus.spec.frames_max;
  for (int idx : member_utts)
    min_len = std::min(min_len, corpus.utterances[idx].frames.NumRows());
  int span = min_len - corpus.spec.frames_min + 1;
  int num_frames = corpus.spec.frames_min +
                   static_cast<int>(rng->UniformInt(static_cast<uint64_t>(span)));

  Batch batch;
  batch.num_frames = num_frames;
  batch.utterances.reserve(member_utts.size());
  batch.labels.reserve(member_utts.size());
  for (int idx : member_utts) {
    const Utterance &src = corpus.utterances[idx];
    int slack = src.frames.NumRows() - num_frames;
    int offset =
        slack > 0 ? static_cast<int>(rng->UniformInt(static_cast<uint64_t>(slack) + 1))
                  : 0;
    Utterance cropped;
    cropped.speaker_id = src.speaker_id;
    cropped.utt_id = src.utt_id;
    cropped.frames = Matrix(num_frames, src.frames.NumCols());
    for (int t = 0; t < num_frames; ++t)
      for (int d = 0; d < src.frames.NumCols(); ++d)
        cropped.frames(t, d) = src.frames(offset + t, d);
    batch.utterances.push_back(std::move(cropped));
    batch.labels.push_back(src.speaker_id);
  }
  return batch;
}

}  // namespace

Batch SampleBatch(const Corpus &corpus, const BatchSpec &spec, RngStream *rng) {
  Validate(spec);
  std::vector<int32_t> speaker_ids;
  std::vector<std::vector<int>> utt_index = IndexBySpeaker(corpus, &speaker_ids);
  const int n_speakers = static_cast<int>(utt_index.size());
  if (n_speakers < spec.speakers_per_batch)
    throw ConfigError("corpus has " + std::to_string(n_speakers) +
                      " speakers, batch needs " +
                      std::to_string(spec.speakers_per_batch));

  std::vector<int> groups(n_speakers);
  std::iota(groups.begin(), groups.end(), 0);
  std::vector<int> chosen;
  for (int k = 0; k < spec.speakers_per_batch; ++k) {
    size_t j = k + static_cast<size_t>(rng->UniformInt(groups.size() - k));
    std::swap(groups[k], groups[j]);
    chosen.push_back(groups[k]);
  }
  return BatchFromSpeakers(corpus, utt_index, chosen, spec, rng);
}

EpochIterator::EpochIterator(const Corpus &corpus, const BatchSpec &spec,
                             uint64_t seed, int64_t start_step)
    : corpus_(&corpus), spec_(spec), seed_(seed), step_(start_step) {
  Validate(spec);
  utt_index_by_speaker_ = IndexBySpeaker(corpus, &speaker_ids_);
  const int n_speakers = static_cast<int>(utt_index_by_speaker_.size());
  if (n_speakers < spec.speakers_per_batch)
    throw ConfigError("corpus has " + std::to_string(n_speakers) +
                      " speakers, batch needs " +
                      std::to_string(spec.speakers_per_batch));
  batches_per_epoch_ =
      (n_speakers + spec.speakers_per_batch - 1) / spec.speakers_per_batch;
}

Batch EpochIterator::Next() {
  const int n_speakers = static_cast<int>(utt_index_by_speaker_.size());
  const int m = spec_.speakers_per_batch;
  int64_t epoch = step_ / batches_per_epoch_;
  int64_t index_in_epoch = step_ % batches_per_epoch_;

  std::vector<int> order(n_speakers);
  std::iota(order.begin(), order.end(), 0);
  RngStream shuffle_rng(seed_, SubStream(kStreamEpochShuffle,
                                         static_cast<uint64_t>(epoch)));
  shuffle_rng.Shuffle(&order);

  std::vector<int> chosen;
  int64_t begin = index_in_epoch * m;
  int64_t end = std::min<int64_t>(begin + m, n_speakers);
  for (int64_t i = begin; i < end; ++i) chosen.push_back(order[i]);
  // Last group of an epoch may be short; top it up with the first speakers
  // of the shuffled order that are not already in the group.
  for (int64_t i = 0; static_cast<int>(chosen.size()) < m; ++i) {
    int candidate = order[i % n_speakers];
    if (std::find(chosen.begin(), chosen.end(), candidate) == chosen.end())
      chosen.push_back(candidate);
  }

  RngStream batch_rng(seed_, SubStream(kStreamBatchDraw,
                                       static_cast<uint64_t>(step_)));
  Batch batch = BatchFromSpeakers(*corpus_, utt_index_by_speaker_, chosen,
                                  spec_, &batch_rng);
  ++step_;
  return batch;
}

}  // namespace mtml
