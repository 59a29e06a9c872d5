#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sgsum/error.hpp"

namespace sgsum {

// Dense row-major array of doubles. Rank-1 tensors behave as a single row
// wherever a matrix is expected.
class Tensor {
 public:
  Tensor() = default;

  explicit Tensor(std::vector<std::size_t> shape, double fill = 0.0)
      : shape_(std::move(shape)), data_(element_count(shape_), fill) {}

  Tensor(std::vector<std::size_t> shape, std::vector<double> data)
      : shape_(std::move(shape)), data_(std::move(data)) {
    SGSUM_CHECK(data_.size() == element_count(shape_), "Tensor: data length ", data_.size(),
                " does not match shape ", shape_string(shape_));
  }

  static Tensor matrix(std::size_t rows, std::size_t cols, double fill = 0.0) {
    return Tensor({rows, cols}, fill);
  }

  static Tensor row(std::vector<double> values) {
    const std::size_t n = values.size();
    return Tensor({1, n}, std::move(values));
  }

  static Tensor scalar(double value) { return Tensor({1, 1}, std::vector<double>{value}); }

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return data_.size(); }

  std::size_t rows() const {
    if (shape_.size() <= 1) return 1;
    std::size_t r = 1;
    for (std::size_t i = 0; i + 1 < shape_.size(); ++i) r *= shape_[i];
    return r;
  }
  std::size_t cols() const { return shape_.empty() ? 1 : shape_.back(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols() + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols() + c]; }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  std::vector<double>& storage() { return data_; }
  const std::vector<double>& storage() const { return data_; }

  double item() const {
    SGSUM_CHECK(data_.size() == 1, "item: tensor of shape ", shape_string(shape_), " is not a scalar");
    return data_[0];
  }

  bool all_finite() const {
    for (double v : data_) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }

  bool operator==(const Tensor& o) const { return shape_ == o.shape_ && data_ == o.data_; }

  std::string shape_str() const { return shape_string(shape_); }

  static std::size_t element_count(const std::vector<std::size_t>& shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
  }

  static std::string shape_string(const std::vector<std::size_t>& shape) {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "," : "") << shape[i];
    os << ']';
    return os.str();
  }

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> data_;
};

inline Tensor transpose(const Tensor& m) {
  Tensor out = Tensor::matrix(m.cols(), m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) out(c, r) = m(r, c);
  }
  return out;
}

// Principal submatrix on the given row/column indices.
inline Tensor submatrix(const Tensor& m, std::span<const std::size_t> idx) {
  Tensor out = Tensor::matrix(idx.size(), idx.size());
  for (std::size_t a = 0; a < idx.size(); ++a) {
    for (std::size_t b = 0; b < idx.size(); ++b) out(a, b) = m(idx[a], idx[b]);
  }
  return out;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  SGSUM_CHECK(a.size() == b.size(), "dot: length mismatch ", a.size(), " vs ", b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Plain cosine over dense vectors; zero vectors are a checked failure.
inline double cosine_dense(std::span<const double> a, std::span<const double> b) {
  const double na = dot(a, a);
  const double nb = dot(b, b);
  SGSUM_CHECK(na > 0.0 && nb > 0.0, "cosine of a zero vector");
  return dot(a, b) / std::sqrt(na * nb);
}

}  // namespace sgsum
