// mtml/matrix.cc

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

#include "mtml/matrix.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mtml/common.h"

namespace mtml {

Matrix::Matrix(int rows, int cols, double value)
    : rows_(rows), cols_(cols),
      data_(static_cast<size_t>(rows) * cols, value) {
  if (rows < 0 || cols < 0)
    throw ConfigError("Matrix: negative dimensions");
}

Matrix Identity(int n) {
  Matrix m(n, n, 0.0);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix MatMul(const Matrix &a, const Matrix &b) {
  if (a.NumCols() != b.NumRows())
    throw ConfigError("MatMul: inner dimensions disagree (" +
                      std::to_string(a.NumCols()) + " vs " +
                      std::to_string(b.NumRows()) + ")");
  Matrix c(a.NumRows(), b.NumCols(), 0.0);
  for (int i = 0; i < a.NumRows(); ++i) {
    const double *arow = a.RowData(i);
    double *crow = c.RowData(i);
    for (int k = 0; k < a.NumCols(); ++k) {
      double aik = arow[k];
      const double *brow = b.RowData(k);
      for (int j = 0; j < b.NumCols(); ++j) crow[j] += aik * brow[j];
    }
  }
  return c;
}

Matrix Transpose(const Matrix &a) {
  Matrix t(a.NumCols(), a.NumRows());
  for (int i = 0; i < a.NumRows(); ++i)
    for (int j = 0; j < a.NumCols(); ++j) t(j, i) = a(i, j);
  return t;
}

std::vector<double> MatVec(const Matrix &a, const std::vector<double> &x) {
  if (static_cast<size_t>(a.NumCols()) != x.size())
    throw ConfigError("MatVec: dimension mismatch");
  std::vector<double> y(a.NumRows(), 0.0);
  for (int i = 0; i < a.NumRows(); ++i) {
    const double *row = a.RowData(i);
    double sum = 0.0;
    for (int j = 0; j < a.NumCols(); ++j) sum += row[j] * x[j];
    y[i] = sum;
  }
  return y;
}

std::vector<double> MatTVec(const Matrix &a, const std::vector<double> &x) {
  if (static_cast<size_t>(a.NumRows()) != x.size())
    throw ConfigError("MatTVec: dimension mismatch");
  std::vector<double> y(a.NumCols(), 0.0);
  for (int i = 0; i < a.NumRows(); ++i) {
    const double *row = a.RowData(i);
    double xi = x[i];
    for (int j = 0; j < a.NumCols(); ++j) y[j] += xi * row[j];
  }
  return y;
}

void Axpy(double alpha, const std::vector<double> &x, std::vector<double> *y) {
  if (x.size() != y->size()) throw ConfigError("Axpy: dimension mismatch");
  for (size_t i = 0; i < x.size(); ++i) (*y)[i] += alpha * x[i];
}

double Dot(const std::vector<double> &x, const std::vector<double> &y) {
  if (x.size() != y.size()) throw ConfigError("Dot: dimension mismatch");
  double sum = 0.0;
  for (size_t i = 0; i < x.size(); ++i) sum += x[i] * y[i];
  return sum;
}

double Norm2(const std::vector<double> &x) {
  return std::sqrt(Dot(x, x));
}

bool AllFinite(const Matrix &m) { return AllFinite(m.Data()); }

bool AllFinite(const std::vector<double> &v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

void CheckFinite(const Matrix &m, const char *what) {
  if (!AllFinite(m))
    throw NumericError(std::string(what) + " produced non-finite values");
}

void SymEig(const Matrix &a, std::vector<double> *eigenvalues,
            Matrix *eigenvectors) {
  const int n = a.NumRows();
  if (n != a.NumCols()) throw ConfigError("SymEig: matrix not square");
  double max_abs = 0.0;
  for (double x : a.Data()) max_abs = std::max(max_abs, std::abs(x));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(a(i, j) - a(j, i)) > 1e-10 * std::max(1.0, max_abs))
        throw NumericError("SymEig: input not symmetric at (" +
                           std::to_string(i) + "," + std::to_string(j) + ")");

  Matrix w = a;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double s = 0.5 * (w(i, j) + w(j, i));
      w(i, j) = w(j, i) = s;
    }
  Matrix v = Identity(n);

  double frob = 0.0;
  for (double x : w.Data()) frob += x * x;
  frob = std::sqrt(frob);
  const double tol = 1e-12 * std::max(1.0, frob);

  const int kMaxSweeps = 128;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += 2.0 * w(i, j) * w(i, j);
    off = std::sqrt(off);
    if (off <= tol) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        double apq = w(p, q);
        if (apq == 0.0) continue;
        double theta = (w(q, q) - w(p, p)) / (2.0 * apq);
        double t = std::copysign(1.0, theta) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        for (int r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          double arp = w(r, p), arq = w(r, q);
          w(r, p) = w(p, r) = c * arp - s * arq;
          w(r, q) = w(q, r) = s * arp + c * arq;
        }
        double app = w(p, p), aqq = w(q, q);
        w(p, p) = c * c * app - 2.0 * s * c * apq + s * s * aqq;
        w(q, q) = s * s * app + 2.0 * s * c * apq + c * c * aqq;
        w(p, q) = w(q, p) = 0.0;
        for (int r = 0; r < n; ++r) {
          double vrp = v(r, p), vrq = v(r, q);
          v(r, p) = c * vrp - s * vrq;
          v(r, q) = s * vrp + c * vrq;
        }
      }
    }
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&w](int i, int j) { return w(i, i) > w(j, j); });

  eigenvalues->resize(n);
  *eigenvectors = Matrix(n, n);
  for (int k = 0; k < n; ++k) {
    (*eigenvalues)[k] = w(order[k], order[k]);
    for (int r = 0; r < n; ++r) (*eigenvectors)(r, k) = v(r, order[k]);
  }
}

Matrix RandomOrthogonal(int n, RngStream *rng) {
  Matrix q(n, n);
  // Columns: draw Gaussian, then modified Gram-Schmidt.  Redraw a column in
  // the measure-zero case that it lands in the span of the previous ones.
  for (int col = 0; col < n; ++col) {
    for (int attempt = 0;; ++attempt) {
      std::vector<double> v(n);
      for (int r = 0; r < n; ++r) v[r] = rng->NextGaussian();
      for (int prev = 0; prev < col; ++prev) {
        double proj = 0.0;
        for (int r = 0; r < n; ++r) proj += v[r] * q(r, prev);
        for (int r = 0; r < n; ++r) v[r] -= proj * q(r, prev);
      }
      double norm = Norm2(v);
      if (norm > 1e-8) {
        for (int r = 0; r < n; ++r) q(r, col) = v[r] / norm;
        break;
      }
      if (attempt > 64)
        throw NumericError("RandomOrthogonal: degenerate draw");
    }
  }
  return q;
}

}  // namespace mtml
