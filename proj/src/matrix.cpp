#include "gnnerator/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "gnnerator/errors.hpp"

namespace gnnerator {

Matrix::Matrix(std::size_t rows, std::size_t cols, float fill)
    : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<float> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows * cols) {
    throw ShapeError("matrix of " + std::to_string(rows) + "x" + std::to_string(cols) +
                     " given " + std::to_string(values_.size()) + " values");
  }
}

double max_relative_error(const Matrix& actual, const Matrix& reference) {
  if (actual.rows() != reference.rows() || actual.cols() != reference.cols()) {
    throw ShapeError("max_relative_error: shape mismatch");
  }
  double max_diff = 0.0;
  double max_ref = 0.0;
  auto a = actual.values();
  auto b = reference.values();
  for (std::size_t i = 0; i < a.size(); ++i) {
    max_diff = std::max(max_diff, std::abs(static_cast<double>(a[i]) - b[i]));
    max_ref = std::max(max_ref, std::abs(static_cast<double>(b[i])));
  }
  if (max_ref == 0.0) return max_diff;
  return max_diff / max_ref;
}

std::uint64_t content_hash(const Matrix& m) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  auto mix = [&hash](const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      hash ^= p[i];
      hash *= 0x100000001b3ULL;
    }
  };
  const std::uint64_t dims[2] = {m.rows(), m.cols()};
  mix(dims, sizeof(dims));
  for (float v : m.values()) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    mix(&bits, sizeof(bits));
  }
  return hash;
}

}  // namespace gnnerator
