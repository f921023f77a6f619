// mtml/matrix.h

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

#ifndef MTML_MATRIX_H_
#define MTML_MATRIX_H_

#include <cstddef>
#include <vector>

#include "mtml/rng.h"

namespace mtml {

// Dense row-major matrix of 64-bit reals.  Deliberately minimal: everything
// downstream needs exact, reproducible arithmetic more than speed, so all
// reductions run in a fixed left-to-right order.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols, double value = 0.0);

  int NumRows() const { return rows_; }
  int NumCols() const { return cols_; }
  bool Empty() const { return rows_ == 0 || cols_ == 0; }

  double &At(int r, int c) { return data_[static_cast<size_t>(r) * cols_ + c]; }
  double At(int r, int c) const {
    return data_[static_cast<size_t>(r) * cols_ + c];
  }
  double &operator()(int r, int c) { return At(r, c); }
  double operator()(int r, int c) const { return At(r, c); }

  double *RowData(int r) { return data_.data() + static_cast<size_t>(r) * cols_; }
  const double *RowData(int r) const {
    return data_.data() + static_cast<size_t>(r) * cols_;
  }

  std::vector<double> &Data() { return data_; }
  const std::vector<double> &Data() const { return data_; }

  bool operator==(const Matrix &other) const = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

Matrix Identity(int n);
Matrix MatMul(const Matrix &a, const Matrix &b);
Matrix Transpose(const Matrix &a);
std::vector<double> MatVec(const Matrix &a, const std::vector<double> &x);
// A^T x without forming the transpose.
std::vector<double> MatTVec(const Matrix &a, const std::vector<double> &x);

void Axpy(double alpha, const std::vector<double> &x, std::vector<double> *y);
double Dot(const std::vector<double> &x, const std::vector<double> &y);
double Norm2(const std::vector<double> &x);

bool AllFinite(const Matrix &m);
bool AllFinite(const std::vector<double> &v);
// Throws NumericError mentioning `what` when a non-finite entry is present.
void CheckFinite(const Matrix &m, const char *what);

// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
// Eigenvalues come out in descending order; eigenvectors are the matching
// columns of *eigenvectors, so a == V diag(w) V^T.  Input must be symmetric
// to 1e-10 (relative to its largest entry) or a NumericError is thrown.
void SymEig(const Matrix &a, std::vector<double> *eigenvalues,
            Matrix *eigenvectors);

// Orthogonal matrix drawn by Gram-Schmidt on a random Gaussian matrix.
Matrix RandomOrthogonal(int n, RngStream *rng);

}  // namespace mtml

#endif  // MTML_MATRIX_H_
