#pragma once

// Compressed sparse row storage, vector kernels and linear solves. Solves go
// through Eigen's sparse LU; BiCGSTAB with an incomplete-LU preconditioner
// is the fallback when factorization fails or its residual misses the
// tolerance.

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "alesupg/core.hpp"

namespace alesupg {

/// Square CSR matrix. Column indices strictly increase within a row and no
/// explicit zeros are stored.
class CsMatrix {
 public:
  CsMatrix() = default;
  explicit CsMatrix(Index n) : n_(n), offsets_(n + 1, 0) {}

  Index size() const { return n_; }
  Index nonzeros() const { return values_.size(); }
  std::span<const Index> offsets() const { return offsets_; }
  std::span<const Index> columns() const { return columns_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  /// Stored value at (i, j), zero when absent.
  double operator()(Index i, Index j) const {
    const auto b = columns_.begin() + static_cast<std::ptrdiff_t>(offsets_[i]);
    const auto e = columns_.begin() + static_cast<std::ptrdiff_t>(offsets_[i + 1]);
    auto it = std::lower_bound(b, e, j);
    return (it != e && *it == j) ? values_[static_cast<Index>(it - columns_.begin())] : 0.0;
  }

  /// Pointer to the stored value at (i, j) or nullptr.
  double* find(Index i, Index j) {
    const auto b = columns_.begin() + static_cast<std::ptrdiff_t>(offsets_[i]);
    const auto e = columns_.begin() + static_cast<std::ptrdiff_t>(offsets_[i + 1]);
    auto it = std::lower_bound(b, e, j);
    return (it != e && *it == j) ? &values_[static_cast<Index>(it - columns_.begin())] : nullptr;
  }

  /// Sums duplicate (row, col, value) triplets in a fixed order and drops
  /// entries that end up exactly zero.
  static CsMatrix from_triplets(Index n, std::vector<std::tuple<Index, Index, double>> t) {
    std::stable_sort(t.begin(), t.end(), [](const auto& a, const auto& b) {
      return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b));
    });
    CsMatrix m(n);
    for (std::size_t k = 0; k < t.size();) {
      const auto [r, c, v0] = t[k];
      if (r >= n || c >= n) throw Error("triplet index out of range");
      double v = v0;
      std::size_t l = k + 1;
      while (l < t.size() && std::get<0>(t[l]) == r && std::get<1>(t[l]) == c) v += std::get<2>(t[l++]);
      if (v != 0.0) {
        m.columns_.push_back(c);
        m.values_.push_back(v);
        ++m.offsets_[r + 1];
      }
      k = l;
    }
    for (Index i = 0; i < n; ++i) m.offsets_[i + 1] += m.offsets_[i];
    return m;
  }

  static CsMatrix identity(Index n) {
    std::vector<std::tuple<Index, Index, double>> t;
    for (Index i = 0; i < n; ++i) t.emplace_back(i, i, 1.0);
    return from_triplets(n, std::move(t));
  }

  /// Removes stored zeros (after constraint application).
  void prune() {
    Index w = 0;
    std::vector<Index> off(n_ + 1, 0);
    for (Index i = 0; i < n_; ++i) {
      for (Index k = offsets_[i]; k < offsets_[i + 1]; ++k)
        if (values_[k] != 0.0) {
          columns_[w] = columns_[k];
          values_[w] = values_[k];
          ++w;
        }
      off[i + 1] = w;
    }
    columns_.resize(w);
    values_.resize(w);
    offsets_ = std::move(off);
  }

  friend class CsBuilder;

 private:
  Index n_ = 0;
  std::vector<Index> offsets_;
  std::vector<Index> columns_;
  std::vector<double> values_;
};

/// Triplet accumulator for cellwise assembly.
class CsBuilder {
 public:
  explicit CsBuilder(Index n) : n_(n) {}
  void add(Index i, Index j, double v) { t_.emplace_back(i, j, v); }
  void reserve(std::size_t n) { t_.reserve(n); }
  CsMatrix build() && { return CsMatrix::from_triplets(n_, std::move(t_)); }

 private:
  Index n_;
  std::vector<std::tuple<Index, Index, double>> t_;
};

/// a*A + b*B on the union pattern.
inline CsMatrix combine(double a, const CsMatrix& A, double b, const CsMatrix& B) {
  if (A.size() != B.size()) throw Error("combine: dimension mismatch");
  std::vector<std::tuple<Index, Index, double>> t;
  t.reserve(A.nonzeros() + B.nonzeros());
  for (const auto& [s, M] : {std::pair{a, &A}, std::pair{b, &B}})
    for (Index i = 0; i < M->size(); ++i)
      for (Index k = M->offsets()[i]; k < M->offsets()[i + 1]; ++k) t.emplace_back(i, M->columns()[k], s * M->values()[k]);
  return CsMatrix::from_triplets(A.size(), std::move(t));
}

inline std::vector<double> matvec(const CsMatrix& A, std::span<const double> x) {
  if (x.size() != A.size()) throw Error("matvec: dimension mismatch");
  std::vector<double> y(A.size(), 0.0);
  const auto off = A.offsets();
  const auto col = A.columns();
  const auto val = A.values();
  for (Index i = 0; i < A.size(); ++i) {
    double s = 0.0;
    for (Index k = off[i]; k < off[i + 1]; ++k) s += val[k] * x[col[k]];
    y[i] = s;
  }
  return y;
}

inline double dot(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error("dot: dimension mismatch");
  double s = 0.0;
  for (Index i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

/// alpha * x + y.
inline std::vector<double> axpy(double alpha, std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error("axpy: dimension mismatch");
  std::vector<double> r(y.begin(), y.end());
  for (Index i = 0; i < x.size(); ++i) r[i] += alpha * x[i];
  return r;
}

inline double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

inline double norm_inf(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

struct SolveOptions {
  double relative_tolerance = 1e-10;
  int max_iterations = 5000;
};

namespace detail {

inline Eigen::SparseMatrix<double> to_eigen(const CsMatrix& A) {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(A.nonzeros());
  for (Index i = 0; i < A.size(); ++i)
    for (Index k = A.offsets()[i]; k < A.offsets()[i + 1]; ++k)
      t.emplace_back(static_cast<int>(i), static_cast<int>(A.columns()[k]), A.values()[k]);
  Eigen::SparseMatrix<double> M(static_cast<int>(A.size()), static_cast<int>(A.size()));
  M.setFromTriplets(t.begin(), t.end());
  M.makeCompressed();
  return M;
}

inline double relative_residual(const CsMatrix& A, std::span<const double> x, std::span<const double> b) {
  const auto r = axpy(-1.0, matvec(A, x), b);
  const double nb = norm2(b);
  return nb > 0.0 ? norm2(r) / nb : norm2(r);
}

}  // namespace detail

/// Solves A x = rhs to ||A x - rhs|| / ||rhs|| <= tolerance. Throws
/// SolverError for singular matrices or when neither path converges.
inline std::vector<double> solve(const CsMatrix& A, std::span<const double> rhs, const SolveOptions& opt = {}) {
  if (rhs.size() != A.size()) throw Error("solve: dimension mismatch");
  const Index n = A.size();
  if (n == 0) return {};
  if (norm_inf(rhs) == 0.0) return std::vector<double>(n, 0.0);

  const auto M = detail::to_eigen(A);
  Eigen::Map<const Eigen::VectorXd> b(rhs.data(), static_cast<Eigen::Index>(n));
  std::vector<double> x(n, 0.0);
  Eigen::Map<Eigen::VectorXd> xm(x.data(), static_cast<Eigen::Index>(n));

  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(M);
  lu.factorize(M);
  double res = -1.0;
  if (lu.info() == Eigen::Success) {
    xm = lu.solve(b);
    res = detail::relative_residual(A, x, rhs);
    if (res <= opt.relative_tolerance) return x;
    // one step of iterative refinement
    const auto r = axpy(-1.0, matvec(A, x), rhs);
    Eigen::Map<const Eigen::VectorXd> rm(r.data(), static_cast<Eigen::Index>(n));
    const Eigen::VectorXd dx = lu.solve(rm);
    xm += dx;
    res = detail::relative_residual(A, x, rhs);
    if (res <= opt.relative_tolerance) return x;
  } else if (lu.info() == Eigen::NumericalIssue) {
    // structurally or numerically singular; the iterative path cannot help
    throw SolverError("sparse LU: singular matrix (" + lu.lastErrorMessage() + ")");
  }

  Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>> it;
  it.setTolerance(opt.relative_tolerance * 0.1);
  it.setMaxIterations(opt.max_iterations);
  it.compute(M);
  if (it.info() == Eigen::Success) {
    xm = it.solve(b);
    const double r2 = detail::relative_residual(A, x, rhs);
    if (r2 <= opt.relative_tolerance) return x;
    res = (res < 0.0) ? r2 : std::min(res, r2);
  }
  throw SolverError("linear solve did not reach tolerance; final relative residual " + std::to_string(res), res);
}

}  // namespace alesupg
