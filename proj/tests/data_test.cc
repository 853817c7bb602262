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

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace mia {
namespace {

SyntheticSpec SmallSpec() {
  SyntheticSpec spec;
  spec.num_classes = 10;
  spec.feature_dim = 200;
  spec.samples_per_class = 100;
  spec.seed = 17;
  return spec;
}

size_t TrueClass(size_t i, const SyntheticSpec& spec) {
  return i / spec.samples_per_class;
}

TEST(SyntheticTest, ZeroFlipRateCopiesThePrototype) {
  SyntheticSpec spec = SmallSpec();
  spec.prototype_flip_rate = 0.0;
  Dataset d = GenerateSynthetic(spec);
  ASSERT_EQ(d.size(), 1000u);
  for (size_t i = 0; i < d.size(); ++i) {
    const size_t first = TrueClass(i, spec) * spec.samples_per_class;
    EXPECT_TRUE(std::equal(d.features.row(i).begin(), d.features.row(i).end(),
                           d.features.row(first).begin()));
    EXPECT_EQ(d.labels[i], TrueClass(i, spec));
  }
  EXPECT_TRUE(d.noisy_indices.empty());
}

TEST(SyntheticTest, NoiseFractionIsExact) {
  SyntheticSpec spec = SmallSpec();
  spec.label_noise_fraction = 0.1;
  Dataset d = GenerateSynthetic(spec);
  size_t wrong = 0;
  for (size_t i = 0; i < d.size(); ++i) {
    wrong += d.labels[i] != TrueClass(i, spec) ? 1 : 0;
  }
  EXPECT_EQ(wrong, 100u);
  ASSERT_EQ(d.noisy_indices.size(), 100u);
  for (size_t i : d.noisy_indices) EXPECT_NE(d.labels[i], TrueClass(i, spec));
  EXPECT_TRUE(std::is_sorted(d.noisy_indices.begin(), d.noisy_indices.end()));
}

TEST(SyntheticTest, NearestPrototypeClassifiesAlmostEverything) {
  SyntheticSpec spec = SmallSpec();
  Dataset d = GenerateSynthetic(spec);
  // Recover each prototype by a per-bit majority vote over its class.
  std::vector<std::vector<double>> proto(spec.num_classes,
                                         std::vector<double>(200, 0.0));
  for (size_t i = 0; i < d.size(); ++i) {
    for (size_t j = 0; j < 200; ++j) proto[d.labels[i]][j] += d.features(i, j);
  }
  for (auto& p : proto) {
    for (double& v : p) v = v > spec.samples_per_class / 2.0 ? 1.0 : 0.0;
  }
  size_t correct = 0;
  for (size_t i = 0; i < d.size(); ++i) {
    size_t best = 0;
    double best_distance = 1e300;
    for (size_t c = 0; c < spec.num_classes; ++c) {
      double distance = 0.0;
      for (size_t j = 0; j < 200; ++j) {
        distance += std::abs(d.features(i, j) - proto[c][j]);
      }
      if (distance < best_distance) {
        best_distance = distance;
        best = c;
      }
    }
    correct += best == d.labels[i] ? 1 : 0;
  }
  EXPECT_GE(static_cast<double>(correct) / d.size(), 0.99);
}

TEST(SyntheticTest, IsAPureFunctionOfTheSpec) {
  SyntheticSpec spec = SmallSpec();
  spec.label_noise_fraction = 0.05;
  Dataset a = GenerateSynthetic(spec);
  Dataset b = GenerateSynthetic(spec);
  EXPECT_EQ(a.features, b.features);
  EXPECT_EQ(a.labels, b.labels);
  EXPECT_EQ(a.noisy_indices, b.noisy_indices);
  spec.seed += 1;
  EXPECT_NE(GenerateSynthetic(spec).features, a.features);
}

TEST(SyntheticTest, RejectsBadSpecs) {
  SyntheticSpec spec = SmallSpec();
  spec.num_classes = 1;
  EXPECT_THROW(GenerateSynthetic(spec), std::invalid_argument);
  spec = SmallSpec();
  spec.prototype_flip_rate = 0.5;
  EXPECT_THROW(GenerateSynthetic(spec), std::invalid_argument);
}

TEST(CsvTest, RoundTripIsBitExact) {
  Dataset d;
  d.features = Matrix(3, 2, {0.1, 1e-300, -3.141592653589793, 2.0 / 3.0,
                             1e17, -0.0});
  d.labels = {0, 2, 1};
  d.num_classes = 3;
  std::stringstream buffer;
  WriteCsv(d, buffer);
  Dataset back = ParseCsv(buffer);
  EXPECT_EQ(back.features, d.features);
  EXPECT_EQ(back.labels, d.labels);
  EXPECT_EQ(back.num_classes, 3u);
}

TEST(CsvTest, ThousandRowsInferClassCount) {
  std::stringstream text;
  text << "f0,f1,label\n";
  for (int i = 0; i < 1000; ++i) text << i << "," << -i << "," << i % 7 << "\n";
  Dataset d = ParseCsv(text);
  EXPECT_EQ(d.size(), 1000u);
  EXPECT_EQ(d.feature_dim(), 2u);
  EXPECT_EQ(d.num_classes, 7u);
}

size_t ErrorLine(const std::string& text) {
  std::stringstream in(text);
  try {
    ParseCsv(in);
  } catch (const CsvError& e) {
    return e.line();
  }
  return 0;
}

TEST(CsvTest, ErrorsNameTheLine) {
  std::string rows = "f0,f1,label\n";
  for (int i = 0; i < 5; ++i) rows += "1,2,0\n";
  EXPECT_EQ(ErrorLine(rows + "1,,0\n"), 7u);
  EXPECT_EQ(ErrorLine(rows + "1,2\n"), 7u);
  EXPECT_EQ(ErrorLine(rows + "1,x,0\n"), 7u);
  EXPECT_EQ(ErrorLine(rows + "1,2,-1\n"), 7u);
  EXPECT_EQ(ErrorLine(rows + "1,2,0.5\n"), 7u);
  EXPECT_EQ(ErrorLine("a,b,c\n1,2,0\n"), 1u);
  EXPECT_EQ(ErrorLine(""), 1u);
  EXPECT_EQ(ErrorLine(rows), 0u);
}

TEST(SplitTest, IsStratifiedDisjointAndDeterministic) {
  Dataset d = GenerateSynthetic(SmallSpec());
  DataSplit s = Split(d, 300, 500, 4);
  EXPECT_EQ(s.member_indices.size(), 300u);
  EXPECT_EQ(s.nonmember_indices.size(), 500u);
  std::set<size_t> seen(s.member_indices.begin(), s.member_indices.end());
  for (size_t i : s.nonmember_indices) EXPECT_FALSE(seen.count(i));
  std::map<size_t, size_t> per_class;
  for (size_t i : s.member_indices) ++per_class[d.labels[i]];
  for (const auto& [label, count] : per_class) {
    EXPECT_LE(count > 30 ? count - 30 : 30 - count, 1u) << label;
  }
  DataSplit again = Split(d, 300, 500, 4);
  EXPECT_EQ(again.member_indices, s.member_indices);
  EXPECT_EQ(again.nonmember_indices, s.nonmember_indices);
}

TEST(SplitTest, FullPartitionAndOversubscription) {
  Dataset d = GenerateSynthetic(SmallSpec());
  DataSplit s = Split(d, 400, 600, 1);
  std::set<size_t> all(s.member_indices.begin(), s.member_indices.end());
  all.insert(s.nonmember_indices.begin(), s.nonmember_indices.end());
  EXPECT_EQ(all.size(), 1000u);
  EXPECT_THROW(Split(d, 600, 401, 1), std::invalid_argument);
}

TEST(LabelNoiseTest, ZeroFractionIsIdentity) {
  Dataset d = GenerateSynthetic(SmallSpec());
  LabelNoiseResult r = InjectLabelNoise(d, 0.0, 3);
  EXPECT_EQ(r.dataset.labels, d.labels);
  EXPECT_TRUE(r.modified_indices.empty());
}

TEST(LabelNoiseTest, BinaryNoiseFlipsEverySelectedLabel) {
  SyntheticSpec spec = SmallSpec();
  spec.num_classes = 2;
  Dataset d = GenerateSynthetic(spec);
  LabelNoiseResult r = InjectLabelNoise(d, 0.25, 3);
  ASSERT_EQ(r.modified_indices.size(), 50u);
  for (size_t i : r.modified_indices) {
    EXPECT_EQ(r.dataset.labels[i], 1 - d.labels[i]);
  }
  size_t changed = 0;
  for (size_t i = 0; i < d.size(); ++i) {
    changed += r.dataset.labels[i] != d.labels[i] ? 1 : 0;
  }
  EXPECT_EQ(changed, 50u);
  EXPECT_THROW(InjectLabelNoise(d, 1.5, 3), std::invalid_argument);
}

}  // namespace
}  // namespace mia
