#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "driftlab/rational.hpp"

namespace driftlab {

/// Row-major dense matrix.
template <typename T>
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, T(0)) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

/// Solves A X = B for square A.
///
/// Rational: exact elimination, any nonzero pivot. Float: partial pivoting
/// followed by one pass of iterative refinement; the relative residual must
/// end below 1e-10. Throws AnalysisError if A is singular (or, in float mode,
/// numerically so).
DenseMatrix<Rational> solve(DenseMatrix<Rational> a, DenseMatrix<Rational> b);
DenseMatrix<double> solve(DenseMatrix<double> a, DenseMatrix<double> b);

}  // namespace driftlab
