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


// Latent-space geometry of training members and the inference-time
// logit-reweighting defense.
//
// Each class gets a centroid: the mean latent vector of its member records
// and the head's logits at that mean. A record's distance from its centroid
// is measured by cosine similarity. The defense blends a record's logits
// with the centroid logits of its predicted class,
//
//   z' = w z + (1 - w) z_c,   w = clamp(cos(h, h_c), floor, 1) ^ sharpness,
//
// so records far from their centroid are pulled harder towards it.

#ifndef MIA_GEOMETRY_H_
#define MIA_GEOMETRY_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mia/matrix.h"
#include "mia/nn.h"
#include "mia/train.h"

namespace mia {

enum class CentroidGrouping {
  kTrueLabel,       // offline analysis
  kPredictedLabel,  // defense lookup at inference time
};

struct ClassCentroid {
  size_t count = 0;
  Vector latent;
  Vector logits;
};

struct CentroidTable {
  CentroidGrouping grouping = CentroidGrouping::kTrueLabel;
  // Indexed by class; empty when no record fell into the class.
  std::vector<std::optional<ClassCentroid>> classes;

  // Throws std::invalid_argument if the class has no centroid.
  const ClassCentroid& at(size_t cls) const;
};

// Averages member latents per class and applies the model's head to each
// mean. With require_all_classes, throws std::invalid_argument listing every
// class that received no record.
CentroidTable ClassCentroids(std::span<const PredictionRecord> records,
                             const MlpModel& model, CentroidGrouping grouping,
                             bool require_all_classes = true);

// 1 - cos(latent, centroid of the record's true class); 1 for zero vectors.
double OutlierScore(const PredictionRecord& record, const CentroidTable& table);
std::vector<double> OutlierScores(std::span<const PredictionRecord> records,
                                  const CentroidTable& table);

struct ReweightConfig {
  double weight_floor = 0.0;
  bool preserve_argmax = true;
  // Exponent on the clamped cosine. 1 blends by the raw cosine; larger
  // values pull off-centroid records harder.
  double sharpness = 1.0;

  void Validate() const;
};

struct ReweightResult {
  Vector logits;
  double weight = 1.0;  // weight on the original logits
  size_t predicted_class = 0;
};

// Throws std::invalid_argument if the table has no entry for the record's
// predicted class.
ReweightResult ReweightLogits(const PredictionRecord& record,
                              const CentroidTable& table,
                              const ReweightConfig& config);

struct DefendedEvaluation {
  double accuracy = 0.0;
  double overhead_seconds = 0.0;
  std::vector<PredictionRecord> records;
  std::vector<double> weights;
};

// Recomputes probabilities and losses from the reweighted logits. Latent
// vectors are carried over unchanged.
DefendedEvaluation DefendedEvaluate(std::span<const PredictionRecord> records,
                                    const CentroidTable& table,
                                    const ReweightConfig& config);

struct Projection {
  Matrix coordinates;  // n x 2
  double variance[2] = {0.0, 0.0};
  Vector axes[2];
};

// Mean-centred projection onto the top two principal directions of the
// population covariance, found by power iteration with deflation.
// Throws std::invalid_argument for fewer than two samples or ragged input.
Projection Project2d(std::span<const Vector> points, uint64_t seed = 0);

std::string CentroidTableToJson(const CentroidTable& table);
CentroidTable CentroidTableFromJson(const std::string& text);

}  // namespace mia

#endif  // MIA_GEOMETRY_H_
