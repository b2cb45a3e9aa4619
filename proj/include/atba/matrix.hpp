#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "atba/error.hpp"

namespace atba {

// Dense row-major matrix of doubles. Indices are 0-based at this layer; the
// domain types on top expose the 1-based frame/class indexing used by every
// public interface.
class Matrix {
 public:
  Matrix() = default;

  Matrix(int rows, int cols, double fill = 0.0) : rows_(rows), cols_(cols) {
    if (rows < 0 || cols < 0)
      fail(ErrorKind::Validation, "matrix dimensions must be non-negative");
    data_.assign(static_cast<std::size_t>(rows_) * static_cast<std::size_t>(cols_), fill);
  }

  static Matrix from_rows(const std::vector<std::vector<double>>& rows) {
    Matrix m(static_cast<int>(rows.size()), rows.empty() ? 0 : static_cast<int>(rows.front().size()));
    for (int r = 0; r < m.rows(); ++r) {
      if (static_cast<int>(rows[r].size()) != m.cols())
        fail(ErrorKind::Validation, "ragged rows in matrix literal");
      for (int c = 0; c < m.cols(); ++c) m(r, c) = rows[r][c];
    }
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(int r, int c) { return data_[index(r, c)]; }
  double operator()(int r, int c) const { return data_[index(r, c)]; }

  std::span<double> row(int r) {
    return {data_.data() + index(r, 0), static_cast<std::size_t>(cols_)};
  }
  std::span<const double> row(int r) const {
    return {data_.data() + index(r, 0), static_cast<std::size_t>(cols_)};
  }

  std::vector<double>& values() { return data_; }
  const std::vector<double>& values() const { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t index(int r, int c) const {
    return static_cast<std::size_t>(r) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(c);
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

}  // namespace atba
