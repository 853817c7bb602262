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


#include "mia/data.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <string_view>

namespace mia {
namespace {

std::vector<std::string_view> SplitFields(std::string_view line) {
  std::vector<std::string_view> fields;
  size_t start = 0;
  while (true) {
    const size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

void AppendDouble(std::string& out, double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, end);
}

// Largest-remainder apportionment of `total` over `weights`, never exceeding
// `capacity[c]`.
std::vector<size_t> Apportion(size_t total, const std::vector<size_t>& weights,
                              const std::vector<size_t>& capacity) {
  const size_t weight_sum =
      std::accumulate(weights.begin(), weights.end(), size_t{0});
  std::vector<size_t> quota(weights.size(), 0);
  if (weight_sum == 0 || total == 0) return quota;
  std::vector<std::pair<double, size_t>> remainders;
  size_t assigned = 0;
  for (size_t c = 0; c < weights.size(); ++c) {
    const double exact = static_cast<double>(total) *
                         static_cast<double>(weights[c]) /
                         static_cast<double>(weight_sum);
    quota[c] = std::min(static_cast<size_t>(std::floor(exact)), capacity[c]);
    assigned += quota[c];
    remainders.push_back({exact - static_cast<double>(quota[c]), c});
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  while (assigned < total) {
    bool progressed = false;
    for (const auto& [rem, c] : remainders) {
      if (assigned == total) break;
      if (quota[c] < capacity[c]) {
        ++quota[c];
        ++assigned;
        progressed = true;
      }
    }
    if (!progressed) break;
  }
  return quota;
}

}  // namespace

void ValidateDataset(const Dataset& dataset) {
  if (dataset.features.rows() != dataset.labels.size()) {
    throw std::invalid_argument("dataset has " +
                                std::to_string(dataset.features.rows()) +
                                " feature rows but " +
                                std::to_string(dataset.labels.size()) +
                                " labels");
  }
  for (size_t i = 0; i < dataset.labels.size(); ++i) {
    if (dataset.labels[i] >= dataset.num_classes) {
      throw std::invalid_argument("label of sample " + std::to_string(i) +
                                  " exceeds class count");
    }
  }
  if (!dataset.features.AllFinite()) {
    throw std::invalid_argument("dataset features must be finite");
  }
}

Dataset GenerateSynthetic(const SyntheticSpec& spec) {
  if (spec.num_classes < 2 || spec.feature_dim == 0 ||
      spec.samples_per_class == 0) {
    throw std::invalid_argument(
        "synthetic spec needs >= 2 classes and positive sizes");
  }
  if (!(spec.prototype_flip_rate >= 0.0 && spec.prototype_flip_rate < 0.5)) {
    throw std::invalid_argument("prototype flip rate must be in [0, 0.5)");
  }

  std::mt19937_64 rng(spec.seed);
  std::bernoulli_distribution coin(0.5);
  std::bernoulli_distribution flip(spec.prototype_flip_rate);

  Matrix prototypes(spec.num_classes, spec.feature_dim);
  for (double& v : prototypes.values()) v = coin(rng) ? 1.0 : 0.0;

  const size_t n = spec.num_classes * spec.samples_per_class;
  Dataset dataset;
  dataset.features = Matrix(n, spec.feature_dim);
  dataset.labels.resize(n);
  dataset.num_classes = spec.num_classes;
  dataset.name = "synthetic";
  for (size_t c = 0; c < spec.num_classes; ++c) {
    for (size_t s = 0; s < spec.samples_per_class; ++s) {
      const size_t i = c * spec.samples_per_class + s;
      dataset.labels[i] = c;
      auto row = dataset.features.row(i);
      auto proto = prototypes.row(c);
      for (size_t j = 0; j < spec.feature_dim; ++j) {
        row[j] = flip(rng) ? 1.0 - proto[j] : proto[j];
      }
    }
  }
  if (spec.label_noise_fraction > 0.0) {
    // Distinct stream so the clean samples do not depend on the noise level.
    return InjectLabelNoise(dataset, spec.label_noise_fraction,
                            spec.seed ^ 0x9e3779b97f4a7c15ULL)
        .dataset;
  }
  return dataset;
}

CsvError::CsvError(size_t line, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ": " + message),
      line_(line) {}

Dataset ParseCsv(std::istream& in, std::string name) {
  std::string line;
  size_t line_no = 0;
  if (!std::getline(in, line)) throw CsvError(1, "missing header row");
  ++line_no;
  const auto header = SplitFields(Trim(line));
  if (header.size() < 2 || Trim(header.back()) != "label") {
    throw CsvError(line_no, "header must be f0,...,f{d-1},label");
  }
  const size_t dim = header.size() - 1;
  for (size_t j = 0; j < dim; ++j) {
    if (Trim(header[j]) != "f" + std::to_string(j)) {
      throw CsvError(line_no, "expected column name f" + std::to_string(j));
    }
  }

  std::vector<double> values;
  std::vector<size_t> labels;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view trimmed = Trim(line);
    if (trimmed.empty()) continue;
    const auto fields = SplitFields(trimmed);
    if (fields.size() != dim + 1) {
      throw CsvError(line_no, "expected " + std::to_string(dim + 1) +
                                  " cells, found " +
                                  std::to_string(fields.size()));
    }
    for (size_t j = 0; j < dim; ++j) {
      const std::string_view cell = Trim(fields[j]);
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size() ||
          !std::isfinite(v)) {
        throw CsvError(line_no, "non-numeric cell in column f" +
                                    std::to_string(j) + ": '" +
                                    std::string(cell) + "'");
      }
      values.push_back(v);
    }
    const std::string_view cell = Trim(fields[dim]);
    if (!cell.empty() && cell.front() == '-') {
      throw CsvError(line_no, "negative label '" + std::string(cell) + "'");
    }
    size_t label = 0;
    auto [ptr, ec] =
        std::from_chars(cell.data(), cell.data() + cell.size(), label);
    if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size()) {
      throw CsvError(line_no, "label must be a nonnegative integer, got '" +
                                  std::string(cell) + "'");
    }
    labels.push_back(label);
  }
  if (labels.empty()) throw CsvError(line_no, "no data rows");

  Dataset dataset;
  dataset.features = Matrix(labels.size(), dim, std::move(values));
  dataset.num_classes = *std::max_element(labels.begin(), labels.end()) + 1;
  dataset.labels = std::move(labels);
  dataset.name = std::move(name);
  return dataset;
}

Dataset LoadCsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return ParseCsv(in, path.stem().string());
}

void WriteCsv(const Dataset& dataset, std::ostream& out) {
  std::string line;
  for (size_t j = 0; j < dataset.feature_dim(); ++j) {
    line += "f" + std::to_string(j) + ",";
  }
  line += "label\n";
  out << line;
  for (size_t i = 0; i < dataset.size(); ++i) {
    line.clear();
    for (double v : dataset.features.row(i)) {
      AppendDouble(line, v);
      line += ',';
    }
    line += std::to_string(dataset.labels[i]);
    line += '\n';
    out << line;
  }
}

void SaveCsv(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  WriteCsv(dataset, out);
}

DataSplit Split(const Dataset& dataset, size_t n_member, size_t n_nonmember,
                uint64_t seed) {
  const size_t n = dataset.size();
  if (n_member + n_nonmember > n) {
    throw std::invalid_argument("split requests " +
                                std::to_string(n_member + n_nonmember) +
                                " samples but dataset has " +
                                std::to_string(n));
  }
  std::mt19937_64 rng(seed);
  std::vector<std::vector<size_t>> by_class(dataset.num_classes);
  for (size_t i = 0; i < n; ++i) by_class[dataset.labels[i]].push_back(i);
  for (auto& ids : by_class) std::shuffle(ids.begin(), ids.end(), rng);

  std::vector<size_t> class_sizes(by_class.size());
  for (size_t c = 0; c < by_class.size(); ++c) {
    class_sizes[c] = by_class[c].size();
  }
  const auto member_quota = Apportion(n_member, class_sizes, class_sizes);
  std::vector<size_t> remaining(by_class.size());
  for (size_t c = 0; c < by_class.size(); ++c) {
    remaining[c] = class_sizes[c] - member_quota[c];
  }
  const auto nonmember_quota = Apportion(n_nonmember, class_sizes, remaining);

  DataSplit split;
  split.seed = seed;
  for (size_t c = 0; c < by_class.size(); ++c) {
    const auto& ids = by_class[c];
    split.member_indices.insert(split.member_indices.end(), ids.begin(),
                                ids.begin() + member_quota[c]);
    split.nonmember_indices.insert(
        split.nonmember_indices.end(), ids.begin() + member_quota[c],
        ids.begin() + member_quota[c] + nonmember_quota[c]);
  }
  std::sort(split.member_indices.begin(), split.member_indices.end());
  std::sort(split.nonmember_indices.begin(), split.nonmember_indices.end());
  return split;
}

LabelNoiseResult InjectLabelNoise(const Dataset& dataset, double fraction,
                                  uint64_t seed) {
  if (!(fraction >= 0.0 && fraction < 1.0)) {
    throw std::invalid_argument("label noise fraction must be in [0, 1)");
  }
  LabelNoiseResult result{dataset, {}};
  const size_t n = dataset.size();
  const auto count =
      static_cast<size_t>(std::floor(fraction * static_cast<double>(n)));
  if (count == 0) return result;
  if (dataset.num_classes < 2) {
    throw std::invalid_argument("label noise needs at least two classes");
  }

  std::mt19937_64 rng(seed);
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  order.resize(count);
  std::sort(order.begin(), order.end());

  std::uniform_int_distribution<size_t> offset(1, dataset.num_classes - 1);
  for (size_t i : order) {
    const size_t old_label = dataset.labels[i];
    result.dataset.labels[i] = (old_label + offset(rng)) % dataset.num_classes;
  }
  result.modified_indices = order;

  auto& noisy = result.dataset.noisy_indices;
  std::vector<size_t> merged;
  std::set_union(noisy.begin(), noisy.end(), order.begin(), order.end(),
                 std::back_inserter(merged));
  noisy = std::move(merged);
  return result;
}

}  // namespace mia
