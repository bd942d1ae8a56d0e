#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace phasefield {

struct Triplet {
  int row = 0;
  int col = 0;
  double value = 0.0;
};

/// Coordinate-format accumulator. Duplicates are summed on conversion.
class Triplets {
 public:
  Triplets(int rows, int cols) : rows_(rows), cols_(cols) {}

  void add(int row, int col, double value) { entries_.push_back({row, col, value}); }
  void reserve(std::size_t n) { entries_.reserve(n); }
  void clear() { entries_.clear(); }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  const std::vector<Triplet>& entries() const { return entries_; }

 private:
  int rows_;
  int cols_;
  std::vector<Triplet> entries_;
};

/// Compressed sparse row matrix. Column indices are strictly increasing
/// within each row; explicit zeros from assembly are kept so that the
/// pattern does not depend on the values.
class SparseMatrix {
 public:
  SparseMatrix() = default;

  /// Throws AssemblyError on an out-of-range index.
  static SparseMatrix from_triplets(const Triplets& triplets);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t nnz() const { return values_.size(); }
  const std::vector<int>& row_offsets() const { return offsets_; }
  const std::vector<int>& col_indices() const { return cols_idx_; }
  const std::vector<double>& values() const { return values_; }

  /// Entry (row, col), zero if not stored.
  double coeff(int row, int col) const;

  /// Throws DimensionError on a length mismatch.
  std::vector<double> matvec(std::span<const double> x) const;

  bool same_pattern(const SparseMatrix& other) const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<int> offsets_{0};
  std::vector<int> cols_idx_;
  std::vector<double> values_;
};

/// Sparse LU (UMFPACK). The symbolic analysis is computed on the first
/// factorization and reused as long as the sparsity pattern stays the same.
class DirectSolver {
 public:
  DirectSolver();
  ~DirectSolver();
  DirectSolver(DirectSolver&&) noexcept;
  DirectSolver& operator=(DirectSolver&&) noexcept;

  /// Throws SingularMatrixError if the factorization breaks down.
  void factorize(const SparseMatrix& a);
  std::vector<double> solve(std::span<const double> b) const;

  /// Number of symbolic analyses performed so far.
  int analyses() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// One-shot factorize-and-solve. The result satisfies
/// ||Ax - b||_inf <= 1e-10 (1 + ||b||_inf) or a SingularMatrixError is thrown.
std::vector<double> direct_solve(const SparseMatrix& a, std::span<const double> b);

double norm_inf(std::span<const double> x);

}  // namespace phasefield
