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

#include "mia/matrix.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mia {

Matrix::Matrix(size_t rows, size_t cols, double fill)
    : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

Matrix::Matrix(size_t rows, size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows * cols) {
    throw std::invalid_argument("Matrix: expected " +
                                std::to_string(rows * cols) + " values, got " +
                                std::to_string(values_.size()));
  }
}

bool Matrix::AllFinite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return std::isfinite(v); });
}

double Dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("Dot: length mismatch");
  }
  double sum = 0.0;
  for (size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

double Norm2(std::span<const double> v) { return std::sqrt(Dot(v, v)); }

double CosineSimilarity(std::span<const double> a, std::span<const double> b) {
  const double denom = Norm2(a) * Norm2(b);
  if (denom == 0.0) return 0.0;
  return std::clamp(Dot(a, b) / denom, -1.0, 1.0);
}

size_t ArgMax(std::span<const double> v) {
  return static_cast<size_t>(std::max_element(v.begin(), v.end()) -
                             v.begin());
}

}  // namespace mia
