#pragma once

// Minimal dense row-major matrix plus the two small solvers the library needs.

#include <cassert>
#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "gaitxai/error.hpp"

namespace gaitxai {

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(std::size_t r, std::size_t c) {
    assert(r < rows_ && c < cols_);
    return data_[r * cols_ + c];
  }
  double operator()(std::size_t r, std::size_t c) const {
    assert(r < rows_ && c < cols_);
    return data_[r * cols_ + c];
  }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// y = A x
inline std::vector<double> matvec(const Matrix& a, std::span<const double> x) {
  if (x.size() != a.cols()) throw Error(Errc::shape_mismatch, "matvec");
  std::vector<double> y(a.rows(), 0.0);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    double acc = 0.0;
    const auto row = a.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) acc += row[c] * x[c];
    y[r] = acc;
  }
  return y;
}

/// Solves A x = b for symmetric positive definite A via Cholesky.
/// Returns false (leaving x untouched) if A is not numerically SPD.
inline bool cholesky_solve(Matrix a, std::span<const double> b, std::vector<double>& x) {
  const std::size_t n = a.rows();
  if (a.cols() != n || b.size() != n) throw Error(Errc::shape_mismatch, "cholesky_solve");
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= a(j, k) * a(j, k);
    if (!(d > 0.0)) return false;
    const double l = std::sqrt(d);
    a(j, j) = l;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= a(i, k) * a(j, k);
      a(i, j) = s / l;
    }
  }
  std::vector<double> y(b.begin(), b.end());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < i; ++k) y[i] -= a(i, k) * y[k];
    y[i] /= a(i, i);
  }
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t k = i + 1; k < n; ++k) y[i] -= a(k, i) * y[k];
    y[i] /= a(i, i);
  }
  x = std::move(y);
  return true;
}

/// Gaussian elimination with partial pivoting. Returns false when singular.
inline bool lu_solve(Matrix a, std::vector<double> b, std::vector<double>& x) {
  const std::size_t n = a.rows();
  if (a.cols() != n || b.size() != n) throw Error(Errc::shape_mismatch, "lu_solve");
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
    }
    if (a(pivot, col) == 0.0) return false;
    if (pivot != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a(pivot, c), a(col, c));
      std::swap(b[pivot], b[col]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a(r, col) / a(col, col);
      for (std::size_t c = col; c < n; ++c) a(r, c) -= f * a(col, c);
      b[r] -= f * b[col];
    }
  }
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t k = i + 1; k < n; ++k) b[i] -= a(i, k) * b[k];
    b[i] /= a(i, i);
  }
  x = std::move(b);
  return true;
}

}  // namespace gaitxai
