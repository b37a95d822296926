// Copyright 2026 The rpkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "rpkit/error.hpp"

namespace rpkit {

using Vector = std::vector<double>;

namespace detail {

inline std::string shape_str(std::size_t rows, std::size_t cols) {
  return std::to_string(rows) + "x" + std::to_string(cols);
}

}  // namespace detail

// Dense row-major matrix of finite doubles. Shapes are fixed at
// construction and must be positive; entries handed in by callers are
// checked finite. operator() is unchecked, so routines that can push
// values out of the finite range call ensure_finite before handing the
// matrix on.
class Matrix {
 public:
  // 0x0 placeholder. Only assignment is meaningful on it.
  Matrix() = default;

  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {
    if (rows == 0 || cols == 0) {
      throw std::invalid_argument("matrix dimensions must be positive, got " +
                                  detail::shape_str(rows, cols));
    }
  }

  // Takes entries in row-major order.
  Matrix(std::size_t rows, std::size_t cols, Vector entries)
      : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (rows == 0 || cols == 0) {
      throw std::invalid_argument("matrix dimensions must be positive, got " +
                                  detail::shape_str(rows, cols));
    }
    if (data_.size() != rows * cols) {
      throw std::invalid_argument(
          "matrix " + detail::shape_str(rows, cols) + " needs " +
          std::to_string(rows * cols) + " entries, got " +
          std::to_string(data_.size()));
    }
    for (std::size_t i = 0; i < data_.size(); ++i) {
      if (!std::isfinite(data_[i])) {
        throw std::invalid_argument(
            "matrix entry at row " + std::to_string(i / cols) + ", col " +
            std::to_string(i % cols) + " is not finite");
      }
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double operator()(std::size_t i, std::size_t j) const {
    assert(i < rows_ && j < cols_);
    return data_[i * cols_ + j];
  }
  double& operator()(std::size_t i, std::size_t j) {
    assert(i < rows_ && j < cols_);
    return data_[i * cols_ + j];
  }

  const Vector& data() const { return data_; }
  Vector& data() { return data_; }

  Vector row(std::size_t i) const {
    assert(i < rows_);
    return Vector(data_.begin() + i * cols_, data_.begin() + (i + 1) * cols_);
  }

  Vector col(std::size_t j) const {
    assert(j < cols_);
    Vector out(rows_);
    for (std::size_t i = 0; i < rows_; ++i) out[i] = data_[i * cols_ + j];
    return out;
  }

  // Exact elementwise comparison, used by determinism checks.
  bool operator==(const Matrix&) const = default;

  void ensure_finite(const char* context) const {
    for (double v : data_) {
      if (!std::isfinite(v)) {
        throw numerical_error(std::string(context) +
                              ": produced a non-finite value");
      }
    }
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Vector data_;
};

inline void ensure_finite(const Vector& v, const char* what) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) {
      throw std::invalid_argument(std::string(what) + ": entry " +
                                  std::to_string(i) + " is not finite");
    }
  }
}

inline Matrix transpose(const Matrix& a) {
  Matrix out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  }
  return out;
}

inline Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw std::invalid_argument("matmul: inner dimensions disagree, " +
                                detail::shape_str(a.rows(), a.cols()) + " * " +
                                detail::shape_str(b.rows(), b.cols()));
  }
  Matrix out(a.rows(), b.cols());
  // i-k-j order keeps the inner loop contiguous in b and out. Skipping
  // zero pivots pays off on sparse ternary projection matrices.
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) {
        out(i, j) += aik * b(k, j);
      }
    }
  }
  out.ensure_finite("matmul");
  return out;
}

inline Vector matvec(const Matrix& a, const Vector& x) {
  if (x.size() != a.cols()) {
    throw std::invalid_argument("matvec: matrix is " +
                                detail::shape_str(a.rows(), a.cols()) +
                                " but vector has length " +
                                std::to_string(x.size()));
  }
  Vector out(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) acc += a(i, j) * x[j];
    out[i] = acc;
  }
  for (double v : out) {
    if (!std::isfinite(v)) throw numerical_error("matvec: produced a non-finite value");
  }
  return out;
}

inline double dot(const Vector& x, const Vector& y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("dot: lengths disagree, " +
                                std::to_string(x.size()) + " vs " +
                                std::to_string(y.size()));
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
  return acc;
}

inline double norm(const Vector& x) {
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return std::sqrt(acc);
}

inline double distance(const Vector& x, const Vector& y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("distance: lengths disagree, " +
                                std::to_string(x.size()) + " vs " +
                                std::to_string(y.size()));
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

}  // namespace rpkit
