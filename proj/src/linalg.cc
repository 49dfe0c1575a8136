// Copyright 2026 The CDNMF Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cdnmf/linalg.h"

#include <algorithm>
#include <cmath>

#include "cdnmf/errors.h"

namespace cdnmf {
namespace {

void require(bool ok, const std::string& op, const std::string& lhs,
             Index ar, Index ac, const std::string& rhs, Index br, Index bc) {
  if (!ok) {
    throw ShapeError(op + ": " + lhs + " is " + shape_string(ar, ac) + " but " +
                     rhs + " is " + shape_string(br, bc));
  }
}

}  // namespace

std::string shape_string(Index rows, Index cols) {
  return std::to_string(rows) + "x" + std::to_string(cols);
}

DenseMatrix::DenseMatrix(Index rows, Index cols, double fill)
    : m_(Storage::Constant(rows, cols, fill)) {
  if (rows < 0 || cols < 0) throw ShapeError("negative matrix dimension");
}

DenseMatrix::DenseMatrix(std::initializer_list<std::initializer_list<double>> rows) {
  const Index r = static_cast<Index>(rows.size());
  const Index c = r == 0 ? 0 : static_cast<Index>(rows.begin()->size());
  m_.resize(r, c);
  Index i = 0;
  for (const auto& row : rows) {
    if (static_cast<Index>(row.size()) != c) {
      throw ShapeError("ragged initializer list");
    }
    Index j = 0;
    for (double v : row) m_(i, j++) = v;
    ++i;
  }
}

DenseMatrix DenseMatrix::identity(Index n) {
  return DenseMatrix(Storage::Identity(n, n));
}

DenseMatrix DenseMatrix::column(std::span<const double> values) {
  DenseMatrix m(static_cast<Index>(values.size()), 1);
  std::copy(values.begin(), values.end(), m.data().begin());
  return m;
}

SparseMatrix::SparseMatrix(Index rows, Index cols) : rows_(rows), cols_(cols) {
  if (rows < 0 || cols < 0) throw ShapeError("negative matrix dimension");
  row_ptr_.assign(static_cast<std::size_t>(rows) + 1, 0);
}

SparseMatrix SparseMatrix::from_triplets(Index rows, Index cols,
                                         std::vector<Triplet> triplets,
                                         Duplicates policy) {
  SparseMatrix s(rows, cols);
  for (const Triplet& t : triplets) {
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols) {
      throw ShapeError("triplet (" + std::to_string(t.row) + ", " +
                       std::to_string(t.col) + ") outside " +
                       shape_string(rows, cols));
    }
  }
  std::stable_sort(triplets.begin(), triplets.end(),
                   [](const Triplet& a, const Triplet& b) {
                     return a.row != b.row ? a.row < b.row : a.col < b.col;
                   });
  std::vector<Triplet> out;
  out.reserve(triplets.size());
  for (const Triplet& t : triplets) {
    if (!out.empty() && out.back().row == t.row && out.back().col == t.col) {
      if (policy == Duplicates::kReject) {
        throw DomainError("duplicate sparse entry (" + std::to_string(t.row) +
                          ", " + std::to_string(t.col) + ")");
      }
      out.back().value += t.value;
      continue;
    }
    out.push_back(t);
  }
  std::erase_if(out, [](const Triplet& t) { return t.value == 0.0; });
  s.entries_ = std::move(out);
  s.build_row_ptr();
  return s;
}

SparseMatrix SparseMatrix::identity(Index n) {
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) t.push_back({i, i, 1.0});
  return from_triplets(n, n, std::move(t));
}

SparseMatrix SparseMatrix::from_dense(const DenseMatrix& m) {
  std::vector<Triplet> t;
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (m(i, j) != 0.0) t.push_back({i, j, m(i, j)});
    }
  }
  return from_triplets(m.rows(), m.cols(), std::move(t));
}

void SparseMatrix::build_row_ptr() {
  row_ptr_.assign(static_cast<std::size_t>(rows_) + 1, 0);
  for (const Triplet& t : entries_) ++row_ptr_[static_cast<std::size_t>(t.row) + 1];
  for (std::size_t i = 1; i < row_ptr_.size(); ++i) row_ptr_[i] += row_ptr_[i - 1];
}

double SparseMatrix::coeff(Index i, Index j) const {
  auto first = entries_.begin() + row_begin(i);
  auto last = entries_.begin() + row_begin(i + 1);
  auto it = std::lower_bound(first, last, j, [](const Triplet& t, Index c) {
    return t.col < c;
  });
  return (it != last && it->col == j) ? it->value : 0.0;
}

bool SparseMatrix::is_symmetric(double tol) const {
  if (rows_ != cols_) return false;
  for (const Triplet& t : entries_) {
    if (std::abs(coeff(t.col, t.row) - t.value) > tol) return false;
  }
  return true;
}

std::vector<double> SparseMatrix::row_sums() const {
  std::vector<double> s(static_cast<std::size_t>(rows_), 0.0);
  for (const Triplet& t : entries_) s[static_cast<std::size_t>(t.row)] += t.value;
  return s;
}

SparseMatrix SparseMatrix::transpose() const {
  std::vector<Triplet> t;
  t.reserve(entries_.size());
  for (const Triplet& e : entries_) t.push_back({e.col, e.row, e.value});
  return from_triplets(cols_, rows_, std::move(t));
}

bool operator==(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_ || a.nnz() != b.nnz()) return false;
  for (std::size_t k = 0; k < a.entries_.size(); ++k) {
    const Triplet& x = a.entries_[k];
    const Triplet& y = b.entries_[k];
    if (x.row != y.row || x.col != y.col || x.value != y.value) return false;
  }
  return true;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  require(a.cols() == b.rows(), "matmul", "lhs", a.rows(), a.cols(), "rhs",
          b.rows(), b.cols());
  DenseMatrix::Storage out = a.eigen() * b.eigen();
  return DenseMatrix(std::move(out));
}

DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b) {
  require(a.rows() == b.rows(), "matmul_tn", "lhs", a.rows(), a.cols(), "rhs",
          b.rows(), b.cols());
  DenseMatrix::Storage out = a.eigen().transpose() * b.eigen();
  return DenseMatrix(std::move(out));
}

DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b) {
  require(a.cols() == b.cols(), "matmul_nt", "lhs", a.rows(), a.cols(), "rhs",
          b.rows(), b.cols());
  DenseMatrix::Storage out = a.eigen() * b.eigen().transpose();
  return DenseMatrix(std::move(out));
}

DenseMatrix transpose(const DenseMatrix& a) {
  DenseMatrix::Storage out = a.eigen().transpose();
  return DenseMatrix(std::move(out));
}

DenseMatrix spmm(const SparseMatrix& a, const DenseMatrix& b) {
  require(a.cols() == b.rows(), "spmm", "sparse lhs", a.rows(), a.cols(),
          "dense rhs", b.rows(), b.cols());
  DenseMatrix out(a.rows(), b.cols());
  auto& o = out.eigen();
  const auto& m = b.eigen();
  for (const Triplet& t : a.entries()) {
    o.row(t.row).noalias() += t.value * m.row(t.col);
  }
  return out;
}

DenseMatrix spmm_tn(const SparseMatrix& a, const DenseMatrix& b) {
  require(a.rows() == b.rows(), "spmm_tn", "sparse lhs", a.rows(), a.cols(),
          "dense rhs", b.rows(), b.cols());
  DenseMatrix out(a.cols(), b.cols());
  auto& o = out.eigen();
  const auto& m = b.eigen();
  for (const Triplet& t : a.entries()) {
    o.row(t.col).noalias() += t.value * m.row(t.row);
  }
  return out;
}

DenseMatrix densify(const SparseMatrix& a) {
  DenseMatrix out(a.rows(), a.cols());
  for (const Triplet& t : a.entries()) out(t.row, t.col) = t.value;
  return out;
}

double frobenius_sq(const DenseMatrix& m) { return m.eigen().squaredNorm(); }

double frobenius_sq(const SparseMatrix& m) {
  double s = 0.0;
  for (const Triplet& t : m.entries()) s += t.value * t.value;
  return s;
}

double dot(const DenseMatrix& a, const DenseMatrix& b) {
  require(a.same_shape(b), "dot", "lhs", a.rows(), a.cols(), "rhs", b.rows(),
          b.cols());
  return a.eigen().cwiseProduct(b.eigen()).sum();
}

double trace_quadratic(const DenseMatrix& v, const SparseMatrix& l) {
  require(l.rows() == l.cols() && v.cols() == l.rows(), "trace_quadratic",
          "V", v.rows(), v.cols(), "L", l.rows(), l.cols());
  // Columns of V as contiguous rows.
  const DenseMatrix::Storage vt = v.eigen().transpose();
  double s = 0.0;
  for (const Triplet& t : l.entries()) {
    s += t.value * vt.row(t.row).dot(vt.row(t.col));
  }
  return s;
}

Index rows(const DataMatrix& m) {
  return std::visit([](const auto& x) { return x.rows(); }, m);
}

Index cols(const DataMatrix& m) {
  return std::visit([](const auto& x) { return x.cols(); }, m);
}

DenseMatrix multiply(const DataMatrix& m, const DenseMatrix& b) {
  if (const auto* s = std::get_if<SparseMatrix>(&m)) return spmm(*s, b);
  return matmul(std::get<DenseMatrix>(m), b);
}

DenseMatrix multiply_tn(const DataMatrix& m, const DenseMatrix& b) {
  if (const auto* s = std::get_if<SparseMatrix>(&m)) return spmm_tn(*s, b);
  return matmul_tn(std::get<DenseMatrix>(m), b);
}

double frobenius_sq(const DataMatrix& m) {
  return std::visit([](const auto& x) { return frobenius_sq(x); }, m);
}

DenseMatrix densify(const DataMatrix& m) {
  if (const auto* s = std::get_if<SparseMatrix>(&m)) return densify(*s);
  return std::get<DenseMatrix>(m);
}

bool is_nonnegative(const DataMatrix& m) {
  if (const auto* s = std::get_if<SparseMatrix>(&m)) {
    return std::all_of(s->entries().begin(), s->entries().end(),
                       [](const Triplet& t) { return t.value >= 0.0; });
  }
  return (std::get<DenseMatrix>(m).eigen().array() >= 0.0).all();
}

double mean(const DataMatrix& m) {
  const double count = static_cast<double>(rows(m)) * static_cast<double>(cols(m));
  if (count == 0.0) return 0.0;
  if (const auto* s = std::get_if<SparseMatrix>(&m)) {
    double sum = 0.0;
    for (const Triplet& t : s->entries()) sum += t.value;
    return sum / count;
  }
  return std::get<DenseMatrix>(m).eigen().sum() / count;
}

bool all_finite(const DataMatrix& m) {
  if (const auto* s = std::get_if<SparseMatrix>(&m)) {
    return std::all_of(s->entries().begin(), s->entries().end(),
                       [](const Triplet& t) { return std::isfinite(t.value); });
  }
  return std::get<DenseMatrix>(m).all_finite();
}

double density(const DataMatrix& m) {
  const double count = static_cast<double>(rows(m)) * static_cast<double>(cols(m));
  if (count == 0.0) return 0.0;
  if (const auto* s = std::get_if<SparseMatrix>(&m)) {
    return static_cast<double>(s->nnz()) / count;
  }
  const auto& d = std::get<DenseMatrix>(m).eigen();
  return static_cast<double>((d.array() != 0.0).count()) / count;
}

}  // namespace cdnmf
