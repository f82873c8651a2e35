#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cohortmn/errors.hpp"

namespace cohortmn {

/// Dense row-major matrix. Deliberately minimal: the state spaces this
/// library works with are small, so there is no need for a full linear
/// algebra dependency.
template <typename T>
class BasicMatrix {
 public:
  BasicMatrix() = default;
  BasicMatrix(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static BasicMatrix identity(std::size_t n) {
    BasicMatrix m(n, n, T{0});
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T{1};
    return m;
  }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }
  bool square() const { return rows_ == cols_; }

  std::span<const T> row(std::size_t r) const {
    return std::span<const T>(data_.data() + r * cols_, cols_);
  }
  std::span<T> row(std::size_t r) {
    return std::span<T>(data_.data() + r * cols_, cols_);
  }

  const std::vector<T>& data() const { return data_; }

  friend bool operator==(const BasicMatrix&, const BasicMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using Matrix = BasicMatrix<double>;
using CountMatrix = BasicMatrix<std::int64_t>;

/// Row vector times matrix: (1×n) · (n×m) -> (1×m).
template <typename T>
std::vector<T> left_multiply(std::span<const T> v, const BasicMatrix<T>& m) {
  if (v.size() != m.rows()) {
    throw BadDimension("left_multiply: vector length " +
                       std::to_string(v.size()) + " vs matrix rows " +
                       std::to_string(m.rows()));
  }
  std::vector<T> out(m.cols(), T{0});
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const T vi = v[i];
    if (vi == T{0}) continue;
    const auto r = m.row(i);
    for (std::size_t j = 0; j < m.cols(); ++j) out[j] += vi * r[j];
  }
  return out;
}

template <typename T>
std::vector<T> left_multiply(const std::vector<T>& v, const BasicMatrix<T>& m) {
  return left_multiply(std::span<const T>(v), m);
}

}  // namespace cohortmn
