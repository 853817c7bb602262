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


#ifndef MIA_DATA_H_
#define MIA_DATA_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "mia/matrix.h"

namespace mia {

struct Dataset {
  Matrix features;  // n x d
  std::vector<size_t> labels;
  size_t num_classes = 0;
  std::string name;
  // Sorted indices whose label was deliberately corrupted (planted outliers).
  std::vector<size_t> noisy_indices;

  size_t size() const { return labels.size(); }
  size_t feature_dim() const { return features.cols(); }
};

// Throws std::invalid_argument on shape mismatch, label >= num_classes or
// non-finite features.
void ValidateDataset(const Dataset& dataset);

struct DataSplit {
  std::vector<size_t> member_indices;
  std::vector<size_t> nonmember_indices;
  uint64_t seed = 0;
};

// Binary prototype data in the style of shopping-basket records.
struct SyntheticSpec {
  size_t num_classes = 20;
  size_t feature_dim = 200;
  size_t samples_per_class = 100;
  double prototype_flip_rate = 0.1;
  double label_noise_fraction = 0.0;
  uint64_t seed = 0;
};

// One Bernoulli(1/2) prototype per class; each sample flips every prototype
// bit independently with prototype_flip_rate. Exactly
// floor(label_noise_fraction * n) samples then receive a uniformly random
// wrong label; they are recorded in noisy_indices.
Dataset GenerateSynthetic(const SyntheticSpec& spec);

class CsvError : public std::runtime_error {
 public:
  CsvError(size_t line, const std::string& message);
  size_t line() const { return line_; }

 private:
  size_t line_;
};

// Header `f0,...,f{d-1},label`, one sample per row. num_classes is
// max label + 1. Errors carry the 1-based line number.
Dataset ParseCsv(std::istream& in, std::string name = "csv");
Dataset LoadCsv(const std::filesystem::path& path);

// Emits the format ParseCsv reads, with shortest round-trip decimals.
void WriteCsv(const Dataset& dataset, std::ostream& out);
void SaveCsv(const Dataset& dataset, const std::filesystem::path& path);

// Class-stratified sampling without replacement. Per-class member counts
// follow largest-remainder proportional allocation. Throws
// std::invalid_argument if n_member + n_nonmember > n.
DataSplit Split(const Dataset& dataset, size_t n_member, size_t n_nonmember,
                uint64_t seed);

struct LabelNoiseResult {
  Dataset dataset;
  std::vector<size_t> modified_indices;  // sorted
};

// Reassigns floor(fraction * n) labels, chosen without replacement, to a
// uniformly random different class. The modified indices are also merged into
// the returned dataset's noisy_indices.
LabelNoiseResult InjectLabelNoise(const Dataset& dataset, double fraction,
                                  uint64_t seed);

}  // namespace mia

#endif  // MIA_DATA_H_
