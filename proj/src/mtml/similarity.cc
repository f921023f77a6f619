// mtml/similarity.cc

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

#include "mtml/similarity.h"

#include <cmath>
#include <string>

#include "mtml/common.h"

namespace mtml {

namespace {

// Row-normalized copy; throws on a zero-norm row.  Returns the norms.
Matrix NormalizeRows(const Matrix &embeddings, std::vector<double> *norms) {
  Matrix unit = embeddings;
  norms->resize(embeddings.NumRows());
  for (int i = 0; i < embeddings.NumRows(); ++i) {
    double sq = 0.0;
    const double *row = embeddings.RowData(i);
    for (int d = 0; d < embeddings.NumCols(); ++d) sq += row[d] * row[d];
    double norm = std::sqrt(sq);
    if (norm == 0.0)
      throw NumericError("embedding row " + std::to_string(i) +
                         " has zero norm, cannot normalize");
    (*norms)[i] = norm;
    double *urow = unit.RowData(i);
    for (int d = 0; d < embeddings.NumCols(); ++d) urow[d] = row[d] / norm;
  }
  return unit;
}

}  // namespace

SimilarityMatrix ComputeSimilarity(const Matrix &embeddings, bool normalize) {
  const int batch = embeddings.NumRows();
  if (batch < 2) throw ConfigError("similarity: need at least 2 embeddings");
  CheckFinite(embeddings, "similarity input");

  Matrix normalized_storage;
  const Matrix *source = &embeddings;
  if (normalize) {
    std::vector<double> norms;
    normalized_storage = NormalizeRows(embeddings, &norms);
    source = &normalized_storage;
  }
  const Matrix &src = *source;

  SimilarityMatrix sim;
  sim.normalized = normalize;
  sim.s = Matrix(batch, batch);
  for (int i = 0; i < batch; ++i) {
    const double *ri = src.RowData(i);
    for (int j = i; j < batch; ++j) {
      const double *rj = src.RowData(j);
      double dot = 0.0;
      for (int d = 0; d < src.NumCols(); ++d) dot += ri[d] * rj[d];
      sim.s(i, j) = dot;
      sim.s(j, i) = dot;
    }
  }
  CheckFinite(sim.s, "similarity matrix");
  return sim;
}

Matrix SimilarityBackward(const Matrix &embeddings, const Matrix &grad_s,
                          bool normalize) {
  const int batch = embeddings.NumRows();
  const int dim = embeddings.NumCols();
  if (grad_s.NumRows() != batch || grad_s.NumCols() != batch)
    throw ConfigError("similarity backward: grad shape mismatch");
  if (!AllFinite(grad_s))
    throw NumericError("similarity backward: non-finite upstream gradient");

  Matrix grad(batch, dim);
  if (!normalize) {
    for (int i = 0; i < batch; ++i) {
      double *grow = grad.RowData(i);
      for (int j = 0; j < batch; ++j) {
        double coeff = grad_s(i, j) + grad_s(j, i);
        if (coeff == 0.0) continue;
        const double *ej = embeddings.RowData(j);
        for (int d = 0; d < dim; ++d) grow[d] += coeff * ej[d];
      }
    }
    return grad;
  }

  std::vector<double> norms;
  Matrix unit = NormalizeRows(embeddings, &norms);
  std::vector<double> upstream(dim);
  for (int i = 0; i < batch; ++i) {
    std::fill(upstream.begin(), upstream.end(), 0.0);
    for (int j = 0; j < batch; ++j) {
      double coeff = grad_s(i, j) + grad_s(j, i);
      if (coeff == 0.0) continue;
      const double *uj = unit.RowData(j);
      for (int d = 0; d < dim; ++d) upstream[d] += coeff * uj[d];
    }
    // Project out the radial component: d(e/|e|) is (I - u u^T) / |e|.
    const double *ui = unit.RowData(i);
    double radial = 0.0;
    for (int d = 0; d < dim; ++d) radial += upstream[d] * ui[d];
    double *grow = grad.RowData(i);
    for (int d = 0; d < dim; ++d)
      grow[d] = (upstream[d] - radial * ui[d]) / norms[i];
  }
  return grad;
}

}  // namespace mtml
