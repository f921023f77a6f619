// mtml/similarity.h

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

#ifndef MTML_SIMILARITY_H_
#define MTML_SIMILARITY_H_

#include "mtml/matrix.h"

namespace mtml {

// D x D matrix of pairwise embedding similarities S_ij = <e_i, e_j>.  With
// normalize set (the default), embeddings are L2-normalized first, which
// bounds entries to [-1, 1] and makes the weighting anchor lambda=1
// scale-meaningful; the raw dot product stays available behind the flag.
struct SimilarityMatrix {
  Matrix s;
  bool normalized = true;
};

SimilarityMatrix ComputeSimilarity(const Matrix &embeddings,
                                   bool normalize = true);

// Exact gradient of sum_ij grad_s(i,j) * S_ij with respect to the raw
// embeddings, including the normalization Jacobian when enabled.  grad_s is
// treated as a full matrix over ordered (i,j) entries.
Matrix SimilarityBackward(const Matrix &embeddings, const Matrix &grad_s,
                          bool normalize = true);

}  // namespace mtml

#endif  // MTML_SIMILARITY_H_
