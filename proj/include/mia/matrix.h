// Copyright 2026 The MIA Toolkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MIA_MATRIX_H_
#define MIA_MATRIX_H_

#include <cstddef>
#include <span>
#include <vector>

namespace mia {

using Vector = std::vector<double>;

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(size_t rows, size_t cols, double fill = 0.0);
  // Takes ownership of `values`; throws std::invalid_argument unless
  // values.size() == rows * cols.
  Matrix(size_t rows, size_t cols, std::vector<double> values);

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }
  size_t size() const { return values_.size(); }

  double& operator()(size_t r, size_t c) { return values_[r * cols_ + c]; }
  double operator()(size_t r, size_t c) const {
    return values_[r * cols_ + c];
  }

  std::span<double> row(size_t r) {
    return {values_.data() + r * cols_, cols_};
  }
  std::span<const double> row(size_t r) const {
    return {values_.data() + r * cols_, cols_};
  }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  bool AllFinite() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  size_t rows_ = 0;
  size_t cols_ = 0;
  std::vector<double> values_;
};

double Dot(std::span<const double> a, std::span<const double> b);
double Norm2(std::span<const double> v);

// Cosine similarity; returns 0 when either vector has zero norm.
double CosineSimilarity(std::span<const double> a, std::span<const double> b);

size_t ArgMax(std::span<const double> v);

}  // namespace mia

#endif  // MIA_MATRIX_H_
