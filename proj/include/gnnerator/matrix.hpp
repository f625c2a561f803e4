#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace gnnerator {

/// Dense row-major matrix of 32-bit floats.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, float fill = 0.0f);
  Matrix(std::size_t rows, std::size_t cols, std::vector<float> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return values_.size(); }

  float& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
  float operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }

  std::span<float> row(std::size_t r) { return {values_.data() + r * cols_, cols_}; }
  std::span<const float> row(std::size_t r) const { return {values_.data() + r * cols_, cols_}; }

  std::span<float> values() { return values_; }
  std::span<const float> values() const { return values_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<float> values_;
};

/// Node feature matrix: one row per node, `cols()` is the feature dimension.
using FeatureMatrix = Matrix;

/// max|a - b| / max|b|, the normwise relative error used for all functional
/// comparisons. Shapes must match.
double max_relative_error(const Matrix& actual, const Matrix& reference);

/// FNV-1a over the raw float bytes; stable fingerprint of functional output.
std::uint64_t content_hash(const Matrix& m);

}  // namespace gnnerator
