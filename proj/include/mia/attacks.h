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


// Black-box membership scores. Every score is oriented so that larger means
// "more likely a member".

#ifndef MIA_ATTACKS_H_
#define MIA_ATTACKS_H_

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mia/train.h"

namespace mia {

enum class AttackKind { kLoss, kConfidence, kEntropy, kScaledLogit };

inline constexpr AttackKind kAllAttackKinds[] = {
    AttackKind::kLoss, AttackKind::kConfidence, AttackKind::kEntropy,
    AttackKind::kScaledLogit};

// "loss", "confidence", "entropy", "scaled-logit".
std::string_view AttackKindName(AttackKind kind);
// Accepts the names above ("scaled_logit" too); throws std::invalid_argument
// otherwise.
AttackKind ParseAttackKind(std::string_view name);

struct AttackScores {
  AttackKind kind = AttackKind::kLoss;
  std::vector<double> scores;
  std::vector<bool> is_member;
  // Dataset row of each score.
  std::vector<size_t> ids;

  size_t size() const { return scores.size(); }
};

//   loss:         -loss
//   confidence:   max_i p_i
//   entropy:      sum_i p_i ln p_i   (0 ln 0 := 0)
//   scaled_logit: ln(p_y / (1 - p_y)), p_y clamped to [1e-12, 1 - 1e-12]
double AttackScore(AttackKind kind, const PredictionRecord& record);

AttackScores ScoreRecords(AttackKind kind,
                          std::span<const PredictionRecord> records);

// Fixed-threshold rule: member iff loss < mean_train_loss (strict).
std::vector<bool> YeomDecision(std::span<const PredictionRecord> records,
                               double mean_train_loss);

// Columns: index,kind,score,is_member
void WriteScoresCsv(const AttackScores& scores, std::ostream& out);

}  // namespace mia

#endif  // MIA_ATTACKS_H_
