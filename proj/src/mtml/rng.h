// mtml/rng.h

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

#ifndef MTML_RNG_H_
#define MTML_RNG_H_

#include <cstdint>
#include <vector>

namespace mtml {

// Purpose tags for deriving independent substreams from one user seed.
// Distinct (purpose, index) pairs give statistically independent streams, so
// consumers can re-derive any stream from (seed, purpose, index) alone; that
// is what makes mid-run resume and parallel sampling reproducible.
enum StreamPurpose : uint64_t {
  kStreamCorpusMixing = 1,
  kStreamCorpusMeans = 2,
  kStreamCorpusFrames = 3,
  kStreamTrialTargets = 4,
  kStreamTrialNontargets = 5,
  kStreamEpochShuffle = 6,
  kStreamBatchDraw = 7,
  kStreamParamInit = 8,
};

uint64_t SubStream(uint64_t purpose, uint64_t index);

// Deterministic, platform-independent random stream (xoshiro256++ seeded via
// splitmix64).  All distributions are implemented on top of the raw 64-bit
// output, so identical (seed, stream) pairs produce identical draws on every
// platform, unlike the std:: distributions.
class RngStream {
 public:
  explicit RngStream(uint64_t seed, uint64_t stream = 0);

  uint64_t NextUint64();

  // Uniform in [0, 1), 53 random mantissa bits.
  double NextDouble();

  // Standard normal via Box-Muller; the spare value is cached.
  double NextGaussian();

  // Uniform integer in [0, n), unbiased.  n must be positive.
  uint64_t UniformInt(uint64_t n);

  template <typename T>
  void Shuffle(std::vector<T> *values) {
    for (size_t i = values->size(); i > 1; --i) {
      size_t j = static_cast<size_t>(UniformInt(i));
      std::swap((*values)[i - 1], (*values)[j]);
    }
  }

 private:
  uint64_t state_[4];
  double spare_gaussian_ = 0.0;
  bool has_spare_gaussian_ = false;
};

}  // namespace mtml

#endif  // MTML_RNG_H_
