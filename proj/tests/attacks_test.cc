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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "mia/metrics.h"

namespace mia {
namespace {

// A record whose softmax output is exactly proportional to `probs`.
PredictionRecord FromProbs(const std::vector<double>& probs, size_t label,
                           bool member = true, size_t index = 0) {
  Vector logits;
  for (double p : probs) logits.push_back(std::log(p));
  return MakeRecord(index, label, member, logits, {});
}

TEST(AttackScoreTest, UniformPrediction) {
  PredictionRecord r = FromProbs(std::vector<double>(4, 0.25), 2);
  EXPECT_NEAR(AttackScore(AttackKind::kEntropy, r), -std::log(4.0), 1e-12);
  EXPECT_NEAR(AttackScore(AttackKind::kConfidence, r), 0.25, 1e-12);
  EXPECT_NEAR(AttackScore(AttackKind::kLoss, r), -std::log(4.0), 1e-12);
}

TEST(AttackScoreTest, KnownValues) {
  PredictionRecord r = FromProbs({0.7, 0.2, 0.1}, 0);
  EXPECT_NEAR(AttackScore(AttackKind::kLoss, r), std::log(0.7), 1e-12);
  EXPECT_NEAR(AttackScore(AttackKind::kScaledLogit, r),
              std::log(0.7 / 0.3), 1e-12);
  EXPECT_NEAR(AttackScore(AttackKind::kConfidence, r), 0.7, 1e-12);
  EXPECT_NEAR(AttackScore(AttackKind::kEntropy, r),
              0.7 * std::log(0.7) + 0.2 * std::log(0.2) + 0.1 * std::log(0.1),
              1e-12);
  EXPECT_NEAR(AttackScore(AttackKind::kScaledLogit, FromProbs({0.5, 0.5}, 1)),
              0.0, 1e-12);
}

TEST(AttackScoreTest, SaturatedProbabilitiesStayFinite) {
  PredictionRecord sure = MakeRecord(0, 0, true, {0.0, -2000.0}, {});
  PredictionRecord wrong = MakeRecord(0, 1, true, {0.0, -2000.0}, {});
  for (AttackKind kind : kAllAttackKinds) {
    EXPECT_TRUE(std::isfinite(AttackScore(kind, sure)));
    EXPECT_TRUE(std::isfinite(AttackScore(kind, wrong)));
  }
  EXPECT_DOUBLE_EQ(AttackScore(AttackKind::kEntropy, sure), 0.0);
  EXPECT_NEAR(AttackScore(AttackKind::kScaledLogit, sure),
              std::log((1.0 - 1e-12) / 1e-12), 1e-3);
}

TEST(AttackScoreTest, ScaledLogitIsAntisymmetric) {
  for (double p : {0.01, 0.2, 0.45, 0.8, 0.999}) {
    const double a =
        AttackScore(AttackKind::kScaledLogit, FromProbs({p, 1.0 - p}, 0));
    const double b =
        AttackScore(AttackKind::kScaledLogit, FromProbs({p, 1.0 - p}, 1));
    EXPECT_NEAR(a, -b, 1e-9);
  }
}

// Moves a fraction t of the off-label mass onto the label, which lowers the
// loss.
std::vector<double> Sharpen(std::vector<double> p, size_t label, double t) {
  double moved = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    if (i == label) continue;
    moved += t * p[i];
    p[i] *= 1.0 - t;
  }
  p[label] += moved;
  return p;
}

TEST(AttackScoreTest, LowerLossNeverLowersTheScore) {
  std::mt19937_64 rng(8);
  std::gamma_distribution<double> gamma(1.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> p(5);
    for (double& v : p) v = gamma(rng) + 1e-3;
    double total = 0.0;
    for (double v : p) total += v;
    for (double& v : p) v /= total;
    const size_t label = rng() % 5;
    const bool label_on_top = label == ArgMax(p);
    PredictionRecord before = FromProbs(p, label);
    PredictionRecord after = FromProbs(Sharpen(p, label, 0.3), label);
    ASSERT_LT(after.loss, before.loss);
    for (AttackKind kind : kAllAttackKinds) {
      // Confidence and entropy do not look at the label, so they only track
      // the loss while the label is the top class.
      if (!label_on_top && (kind == AttackKind::kConfidence ||
                            kind == AttackKind::kEntropy)) {
        continue;
      }
      EXPECT_GE(AttackScore(kind, after), AttackScore(kind, before) - 1e-12)
          << AttackKindName(kind);
    }
    EXPECT_GT(AttackScore(AttackKind::kScaledLogit, after),
              AttackScore(AttackKind::kScaledLogit, before));
  }
}

TEST(AttackScoreTest, ScoresDoNotDependOnRecordOrder) {
  std::vector<PredictionRecord> records;
  records.push_back(FromProbs({0.6, 0.4}, 0, true, 10));
  records.push_back(FromProbs({0.1, 0.9}, 0, false, 11));
  records.push_back(FromProbs({0.3, 0.7}, 1, true, 12));
  std::vector<PredictionRecord> reversed(records.rbegin(), records.rend());
  for (AttackKind kind : kAllAttackKinds) {
    AttackScores a = ScoreRecords(kind, records);
    AttackScores b = ScoreRecords(kind, reversed);
    for (size_t i = 0; i < 3; ++i) {
      EXPECT_EQ(a.scores[i], b.scores[2 - i]);
      EXPECT_EQ(a.ids[i], b.ids[2 - i]);
      EXPECT_EQ(a.is_member[i], b.is_member[2 - i]);
    }
  }
}

TEST(AttackKindTest, NamesRoundTrip) {
  for (AttackKind kind : kAllAttackKinds) {
    EXPECT_EQ(ParseAttackKind(AttackKindName(kind)), kind);
  }
  EXPECT_EQ(ParseAttackKind("scaled_logit"), AttackKind::kScaledLogit);
  EXPECT_THROW(ParseAttackKind("gradient"), std::invalid_argument);
  EXPECT_THROW(AttackScore(static_cast<AttackKind>(99),
                           FromProbs({0.5, 0.5}, 0)),
               std::invalid_argument);
}

TEST(YeomTest, StrictThreshold) {
  std::vector<PredictionRecord> records = {
      MakeRecord(0, 0, true, {50.0, 0.0}, {}),
      MakeRecord(1, 0, false, {0.0, 0.0}, {})};
  std::vector<bool> decision = YeomDecision(records, records[1].loss);
  EXPECT_TRUE(decision[0]);
  EXPECT_FALSE(decision[1]);

  std::vector<PredictionRecord> perfect(3, MakeRecord(0, 0, true, {0.0}, {}));
  for (bool d : YeomDecision(perfect, 1e-9)) EXPECT_TRUE(d);
}

TEST(YeomTest, NeverBeatsTheBestSweptThreshold) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> gauss(0.0, 1.5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<PredictionRecord> records;
    for (size_t i = 0; i < 40; ++i) {
      const bool member = i % 2 == 0;
      records.push_back(MakeRecord(
          i, 0, member, {gauss(rng) + (member ? 1.0 : 0.0), gauss(rng)}, {}));
    }
    double mean = 0.0;
    for (const auto& r : records) mean += r.is_member ? r.loss / 20.0 : 0.0;
    std::vector<bool> d = YeomDecision(records, mean);
    double tp = 0.0;
    double fp = 0.0;
    for (size_t i = 0; i < d.size(); ++i) {
      if (d[i]) (records[i].is_member ? tp : fp) += 1.0 / 20.0;
    }
    const RocCurve curve =
        BuildRocCurve(ScoreRecords(AttackKind::kLoss, records));
    EXPECT_LE(tp - fp, Advantage(curve) + 1e-12);
  }
}

TEST(ScoresCsvTest, OneRowPerScore) {
  std::vector<PredictionRecord> records = {FromProbs({0.6, 0.4}, 0, true, 4),
                                           FromProbs({0.5, 0.5}, 1, false, 9)};
  std::stringstream out;
  WriteScoresCsv(ScoreRecords(AttackKind::kConfidence, records), out);
  std::string line;
  std::getline(out, line);
  EXPECT_EQ(line, "index,kind,score,is_member");
  std::getline(out, line);
  EXPECT_EQ(line.substr(0, 13), "4,confidence,");
  EXPECT_EQ(line.back(), '1');
}

}  // namespace
}  // namespace mia
