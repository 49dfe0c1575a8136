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

#ifndef CDNMF_LINALG_H_
#define CDNMF_LINALG_H_

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace cdnmf {

using Index = std::ptrdiff_t;

// Dense row-major matrix of doubles. Thin value wrapper over Eigen storage;
// kernels reach the Eigen object through eigen().
class DenseMatrix {
 public:
  using Storage =
      Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  DenseMatrix() = default;
  DenseMatrix(Index rows, Index cols, double fill = 0.0);
  DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);
  explicit DenseMatrix(Storage m) : m_(std::move(m)) {}

  static DenseMatrix identity(Index n);
  static DenseMatrix column(std::span<const double> values);

  Index rows() const { return m_.rows(); }
  Index cols() const { return m_.cols(); }
  Index size() const { return m_.size(); }
  bool empty() const { return m_.size() == 0; }

  double& operator()(Index i, Index j) { return m_(i, j); }
  double operator()(Index i, Index j) const { return m_(i, j); }

  std::span<double> data() { return {m_.data(), static_cast<std::size_t>(m_.size())}; }
  std::span<const double> data() const {
    return {m_.data(), static_cast<std::size_t>(m_.size())};
  }
  std::span<const double> row(Index i) const {
    return {m_.data() + i * m_.cols(), static_cast<std::size_t>(m_.cols())};
  }

  Storage& eigen() { return m_; }
  const Storage& eigen() const { return m_; }

  bool all_finite() const { return m_.allFinite(); }
  bool same_shape(const DenseMatrix& o) const {
    return rows() == o.rows() && cols() == o.cols();
  }

  friend bool operator==(const DenseMatrix& a, const DenseMatrix& b) {
    return a.same_shape(b) && a.m_ == b.m_;
  }

 private:
  Storage m_;
};

struct Triplet {
  Index row;
  Index col;
  double value;
};

// Coordinate-list sparse matrix kept in canonical (row, col) order with no
// duplicates and no explicit zeros. Row offsets are cached so row scans are
// CSR-fast.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(Index rows, Index cols);

  enum class Duplicates { kReject, kSum };

  // Sorts the triplets into canonical order. Zero values are dropped.
  // Throws ShapeError on out-of-range indices and DomainError on duplicates
  // under kReject.
  static SparseMatrix from_triplets(Index rows, Index cols,
                                    std::vector<Triplet> triplets,
                                    Duplicates policy = Duplicates::kReject);
  static SparseMatrix identity(Index n);
  static SparseMatrix from_dense(const DenseMatrix& m);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index nnz() const { return static_cast<Index>(entries_.size()); }

  const std::vector<Triplet>& entries() const { return entries_; }
  // Entries of row i are entries()[row_begin(i) .. row_begin(i + 1)).
  Index row_begin(Index i) const { return row_ptr_[static_cast<std::size_t>(i)]; }

  double coeff(Index i, Index j) const;
  bool is_symmetric(double tol = 0.0) const;
  std::vector<double> row_sums() const;
  SparseMatrix transpose() const;

  friend bool operator==(const SparseMatrix& a, const SparseMatrix& b);

 private:
  void build_row_ptr();

  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<Triplet> entries_;
  std::vector<Index> row_ptr_ = {0};
};

// Input matrices (adjacency, attributes) may be stored either way.
using DataMatrix = std::variant<DenseMatrix, SparseMatrix>;

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
// aᵀ·b and a·bᵀ without forming the transpose.
DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix transpose(const DenseMatrix& a);

DenseMatrix spmm(const SparseMatrix& a, const DenseMatrix& b);
// aᵀ·b for sparse a.
DenseMatrix spmm_tn(const SparseMatrix& a, const DenseMatrix& b);
DenseMatrix densify(const SparseMatrix& a);

double frobenius_sq(const DenseMatrix& m);
double frobenius_sq(const SparseMatrix& m);
// Sum of elementwise products; a and b must have the same shape.
double dot(const DenseMatrix& a, const DenseMatrix& b);

// tr(V L Vᵀ) for V r×n and L n×n, computed from the nonzeros of L without
// any n×n intermediate.
double trace_quadratic(const DenseMatrix& v, const SparseMatrix& l);

// DataMatrix helpers.
Index rows(const DataMatrix& m);
Index cols(const DataMatrix& m);
// m·b
DenseMatrix multiply(const DataMatrix& m, const DenseMatrix& b);
// mᵀ·b
DenseMatrix multiply_tn(const DataMatrix& m, const DenseMatrix& b);
double frobenius_sq(const DataMatrix& m);
DenseMatrix densify(const DataMatrix& m);
bool is_nonnegative(const DataMatrix& m);
double mean(const DataMatrix& m);
bool all_finite(const DataMatrix& m);
double density(const DataMatrix& m);

std::string shape_string(Index rows, Index cols);

}  // namespace cdnmf

#endif  // CDNMF_LINALG_H_
