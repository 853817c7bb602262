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


#include "mia/attacks.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace mia {

std::string_view AttackKindName(AttackKind kind) {
  switch (kind) {
    case AttackKind::kLoss:
      return "loss";
    case AttackKind::kConfidence:
      return "confidence";
    case AttackKind::kEntropy:
      return "entropy";
    case AttackKind::kScaledLogit:
      return "scaled-logit";
  }
  throw std::invalid_argument("unknown attack kind");
}

AttackKind ParseAttackKind(std::string_view name) {
  if (name == "loss") return AttackKind::kLoss;
  if (name == "confidence") return AttackKind::kConfidence;
  if (name == "entropy") return AttackKind::kEntropy;
  if (name == "scaled-logit" || name == "scaled_logit") {
    return AttackKind::kScaledLogit;
  }
  throw std::invalid_argument("unknown attack kind '" + std::string(name) +
                              "'");
}

double AttackScore(AttackKind kind, const PredictionRecord& record) {
  const Vector& p = record.probs;
  if (record.label >= p.size()) {
    throw std::invalid_argument("record label outside probability vector");
  }
  switch (kind) {
    case AttackKind::kLoss:
      return -record.loss;
    case AttackKind::kConfidence:
      return *std::max_element(p.begin(), p.end());
    case AttackKind::kEntropy: {
      double neg_entropy = 0.0;
      for (double pi : p) {
        if (pi > 0.0) neg_entropy += pi * std::log(pi);
      }
      return neg_entropy;
    }
    case AttackKind::kScaledLogit: {
      const double py =
          std::clamp(p[record.label], kProbabilityFloor, 1.0 - kProbabilityFloor);
      return std::log(py) - std::log1p(-py);
    }
  }
  throw std::invalid_argument("unknown attack kind");
}

AttackScores ScoreRecords(AttackKind kind,
                          std::span<const PredictionRecord> records) {
  AttackScores out;
  out.kind = kind;
  out.scores.reserve(records.size());
  out.is_member.reserve(records.size());
  out.ids.reserve(records.size());
  for (const PredictionRecord& r : records) {
    out.scores.push_back(AttackScore(kind, r));
    out.is_member.push_back(r.is_member);
    out.ids.push_back(r.index);
  }
  return out;
}

std::vector<bool> YeomDecision(std::span<const PredictionRecord> records,
                               double mean_train_loss) {
  std::vector<bool> decisions;
  decisions.reserve(records.size());
  for (const PredictionRecord& r : records) {
    decisions.push_back(r.loss < mean_train_loss);
  }
  return decisions;
}

void WriteScoresCsv(const AttackScores& scores, std::ostream& out) {
  out << "index,kind,score,is_member\n";
  char buf[32];
  for (size_t i = 0; i < scores.size(); ++i) {
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), scores.scores[i]);
    out << scores.ids[i] << ',' << AttackKindName(scores.kind) << ','
        << std::string_view(buf, end - buf) << ','
        << (scores.is_member[i] ? 1 : 0) << '\n';
  }
}

}  // namespace mia
