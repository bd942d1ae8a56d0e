#include "phasefield/la.hpp"

#include <umfpack.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>

#include "phasefield/error.hpp"

namespace phasefield {

SparseMatrix SparseMatrix::from_triplets(const Triplets& triplets) {
  SparseMatrix m;
  m.rows_ = triplets.rows();
  m.cols_ = triplets.cols();
  const auto& entries = triplets.entries();
  for (const Triplet& t : entries) {
    if (t.row < 0 || t.row >= m.rows_ || t.col < 0 || t.col >= m.cols_) {
      throw AssemblyError("triplet (" + std::to_string(t.row) + ", " + std::to_string(t.col) +
                          ") outside " + std::to_string(m.rows_) + "x" + std::to_string(m.cols_));
    }
  }

  // Bucket by row (stable, so duplicate summation order is deterministic),
  // then sort each row by column and merge duplicates.
  std::vector<int> count(m.rows_ + 1, 0);
  for (const Triplet& t : entries) ++count[t.row + 1];
  std::partial_sum(count.begin(), count.end(), count.begin());
  std::vector<std::pair<int, double>> bucket(entries.size());
  {
    std::vector<int> next(count.begin(), count.end() - 1);
    for (const Triplet& t : entries) bucket[next[t.row]++] = {t.col, t.value};
  }

  m.offsets_.assign(m.rows_ + 1, 0);
  m.cols_idx_.reserve(entries.size());
  m.values_.reserve(entries.size());
  for (int r = 0; r < m.rows_; ++r) {
    auto first = bucket.begin() + count[r];
    auto last = bucket.begin() + count[r + 1];
    std::stable_sort(first, last, [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto it = first; it != last; ++it) {
      if (!m.cols_idx_.empty() && static_cast<int>(m.cols_idx_.size()) > m.offsets_[r] &&
          m.cols_idx_.back() == it->first) {
        m.values_.back() += it->second;
      } else {
        m.cols_idx_.push_back(it->first);
        m.values_.push_back(it->second);
      }
    }
    m.offsets_[r + 1] = static_cast<int>(m.cols_idx_.size());
  }
  return m;
}

double SparseMatrix::coeff(int row, int col) const {
  const auto first = cols_idx_.begin() + offsets_[row];
  const auto last = cols_idx_.begin() + offsets_[row + 1];
  const auto it = std::lower_bound(first, last, col);
  if (it == last || *it != col) return 0.0;
  return values_[it - cols_idx_.begin()];
}

std::vector<double> SparseMatrix::matvec(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != cols_) {
    throw DimensionError("matvec: vector of length " + std::to_string(x.size()) + " for " +
                         std::to_string(rows_) + "x" + std::to_string(cols_) + " matrix");
  }
  std::vector<double> y(rows_, 0.0);
  for (int r = 0; r < rows_; ++r) {
    double sum = 0.0;
    for (int k = offsets_[r]; k < offsets_[r + 1]; ++k) sum += values_[k] * x[cols_idx_[k]];
    y[r] = sum;
  }
  return y;
}

bool SparseMatrix::same_pattern(const SparseMatrix& other) const {
  return rows_ == other.rows_ && cols_ == other.cols_ && offsets_ == other.offsets_ &&
         cols_idx_ == other.cols_idx_;
}

double norm_inf(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

struct DirectSolver::Impl {
  SparseMatrix a;
  void* symbolic = nullptr;
  void* numeric = nullptr;
  int analyses = 0;
  std::array<double, UMFPACK_CONTROL> control{};

  Impl() {
    umfpack_di_defaults(control.data());
    control[UMFPACK_STRATEGY] = UMFPACK_STRATEGY_SYMMETRIC;
    control[UMFPACK_ORDERING] = UMFPACK_ORDERING_BEST;
  }
  ~Impl() { release(); }
  void release_numeric() {
    if (numeric) umfpack_di_free_numeric(&numeric);
    numeric = nullptr;
  }
  void release() {
    release_numeric();
    if (symbolic) umfpack_di_free_symbolic(&symbolic);
    symbolic = nullptr;
  }
};

DirectSolver::DirectSolver() : impl_(std::make_unique<Impl>()) {}
DirectSolver::~DirectSolver() = default;
DirectSolver::DirectSolver(DirectSolver&&) noexcept = default;
DirectSolver& DirectSolver::operator=(DirectSolver&&) noexcept = default;

namespace {

// Original column of the first zero on the diagonal of U, or -1.
long zero_pivot(void* numeric, int n) {
  int lnz = 0, unz = 0, rows = 0, cols = 0, nz_udiag = 0;
  if (umfpack_di_get_lunz(&lnz, &unz, &rows, &cols, &nz_udiag, numeric) != UMFPACK_OK) return -1;
  std::vector<double> udiag(n);
  std::vector<int> q(n);
  if (umfpack_di_get_numeric(nullptr, nullptr, nullptr, nullptr, nullptr, nullptr, nullptr,
                             q.data(), udiag.data(), nullptr, nullptr, numeric) != UMFPACK_OK) {
    return -1;
  }
  for (int k = 0; k < n; ++k) {
    if (udiag[k] == 0.0 || !std::isfinite(udiag[k])) return q[k];
  }
  return -1;
}

}  // namespace

void DirectSolver::factorize(const SparseMatrix& a) {
  if (a.rows() != a.cols()) {
    throw DimensionError("direct solve needs a square matrix, got " + std::to_string(a.rows()) +
                         "x" + std::to_string(a.cols()));
  }
  Impl& s = *impl_;
  const int n = a.rows();
  // The CSR arrays of A are the CSC arrays of A^T; solves use UMFPACK_At.
  if (!s.symbolic || !s.a.same_pattern(a)) {
    s.release();
    const int status =
        umfpack_di_symbolic(n, n, a.row_offsets().data(), a.col_indices().data(),
                            a.values().data(), &s.symbolic, s.control.data(), nullptr);
    if (status != UMFPACK_OK) {
      s.symbolic = nullptr;
      throw SingularMatrixError("symbolic analysis failed (umfpack status " +
                                    std::to_string(status) + ")",
                                -1);
    }
    ++s.analyses;
  }
  s.a = a;
  s.release_numeric();
  const int status = umfpack_di_numeric(a.row_offsets().data(), a.col_indices().data(),
                                        a.values().data(), s.symbolic, &s.numeric,
                                        s.control.data(), nullptr);
  if (status == UMFPACK_WARNING_singular_matrix) {
    const long pivot = n == 0 ? -1 : zero_pivot(s.numeric, n);
    s.release_numeric();
    throw SingularMatrixError("singular matrix: zero pivot at column " + std::to_string(pivot),
                              pivot);
  }
  if (status != UMFPACK_OK) {
    s.numeric = nullptr;
    throw SingularMatrixError("numeric factorization failed (umfpack status " +
                                  std::to_string(status) + ")",
                              -1);
  }
}

std::vector<double> DirectSolver::solve(std::span<const double> b) const {
  const Impl& s = *impl_;
  if (!s.numeric) throw std::logic_error("DirectSolver::solve before factorize");
  if (static_cast<int>(b.size()) != s.a.rows()) {
    throw DimensionError("solve: right-hand side of length " + std::to_string(b.size()));
  }
  std::vector<double> x(b.size(), 0.0);
  if (b.empty()) return x;
  const int status = umfpack_di_solve(UMFPACK_At, s.a.row_offsets().data(),
                                      s.a.col_indices().data(), s.a.values().data(), x.data(),
                                      b.data(), s.numeric, s.control.data(), nullptr);
  if (status != UMFPACK_OK) {
    throw SingularMatrixError("solve failed (umfpack status " + std::to_string(status) + ")", -1);
  }
  return x;
}

int DirectSolver::analyses() const { return impl_->analyses; }

std::vector<double> direct_solve(const SparseMatrix& a, std::span<const double> b) {
  DirectSolver solver;
  solver.factorize(a);
  std::vector<double> x = solver.solve(b);
  std::vector<double> r = a.matvec(x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
  const double res = norm_inf(r);
  if (!(res <= 1e-10 * (1.0 + norm_inf(b)))) {
    throw SingularMatrixError("direct solve residual " + std::to_string(res) +
                                  " exceeds tolerance (numerically singular matrix)",
                              -1);
  }
  return x;
}

}  // namespace phasefield
