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


#include "mia/metrics.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "oracles.h"

namespace mia {
namespace {

AttackScores Make(std::vector<double> scores, std::vector<bool> members) {
  AttackScores s;
  s.scores = std::move(scores);
  s.is_member = std::move(members);
  for (size_t i = 0; i < s.scores.size(); ++i) s.ids.push_back(100 + i);
  return s;
}

TEST(RocTest, PerfectSeparation) {
  AttackScores s = Make({5, 4, 3, 2, 1, 0}, {1, 1, 1, 0, 0, 0});
  RocCurve c = BuildRocCurve(s);
  bool corner = false;
  for (size_t i = 0; i < c.size(); ++i) {
    corner = corner || (c.tpr[i] == 1.0 && c.fpr[i] == 0.0);
  }
  EXPECT_TRUE(corner);
  EXPECT_DOUBLE_EQ(Auc(c), 1.0);
  EXPECT_DOUBLE_EQ(Advantage(c), 1.0);
  EXPECT_DOUBLE_EQ(TprAtFpr(c, 0.01), 1.0);
  EXPECT_EQ(VulnerableMembers(s, 0.01), (std::vector<size_t>{100, 101, 102}));
}

TEST(RocTest, AllTiedScores) {
  AttackScores s = Make({0.3, 0.3, 0.3, 0.3}, {1, 0, 1, 0});
  RocCurve c = BuildRocCurve(s);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c.thresholds[0], std::numeric_limits<double>::infinity());
  EXPECT_EQ(c.tpr[0], 0.0);
  EXPECT_EQ(c.fpr[0], 0.0);
  EXPECT_EQ(c.tpr[1], 1.0);
  EXPECT_EQ(c.fpr[1], 1.0);
  EXPECT_DOUBLE_EQ(Auc(c), 0.5);
  EXPECT_DOUBLE_EQ(Advantage(c), 0.0);
  EXPECT_DOUBLE_EQ(TprAtFpr(c, 0.5), 0.0);
  EXPECT_TRUE(VulnerableMembers(s, 0.5).empty());
}

TEST(RocTest, RejectsDegenerateInput) {
  EXPECT_THROW(BuildRocCurve(Make({1, 2, 3}, {1, 1, 1})),
               std::invalid_argument);
  EXPECT_THROW(BuildRocCurve(Make({1, 2}, {0, 0})), std::invalid_argument);
  EXPECT_THROW(BuildRocCurve(Make({1, std::nan("")}, {1, 0})),
               std::invalid_argument);
  AttackScores ragged = Make({1, 2}, {1, 0});
  ragged.is_member.push_back(true);
  EXPECT_THROW(BuildRocCurve(ragged), std::invalid_argument);
}

TEST(RocTest, PointsMatchBruteForceCounts) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    AttackScores s = testing::RandomScoreSet(rng, 10, trial % 2 == 0);
    RocCurve c = BuildRocCurve(s);
    size_t positives = 0;
    for (bool m : s.is_member) positives += m ? 1 : 0;
    for (size_t i = 0; i < c.size(); ++i) {
      size_t tp = 0;
      size_t fp = 0;
      testing::CountAtOrAbove(s, c.thresholds[i], tp, fp);
      EXPECT_DOUBLE_EQ(c.tpr[i], static_cast<double>(tp) / positives);
      EXPECT_DOUBLE_EQ(c.fpr[i],
                       static_cast<double>(fp) / (s.size() - positives));
      if (i > 0) {
        EXPECT_GE(c.tpr[i], c.tpr[i - 1]);
        EXPECT_GE(c.fpr[i], c.fpr[i - 1]);
        EXPECT_LT(c.thresholds[i], c.thresholds[i - 1]);
      }
    }
    EXPECT_EQ(c.tpr.back(), 1.0);
    EXPECT_EQ(c.fpr.back(), 1.0);
  }
}

TEST(AucTest, EqualsPairwiseOracle) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 60; ++trial) {
    AttackScores s = testing::RandomScoreSet(rng, 300, trial % 3 == 0);
    EXPECT_NEAR(Auc(BuildRocCurve(s)), testing::PairwiseAuc(s), 1e-9);
  }
}

TEST(AucTest, InvariantToMonotoneTransformAndComplementary) {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 30; ++trial) {
    AttackScores s = testing::RandomScoreSet(rng, 200, trial % 2 == 0);
    const double auc = Auc(BuildRocCurve(s));
    AttackScores cubed = s;
    AttackScores negated = s;
    for (double& v : cubed.scores) v = v * v * v + 7.0;
    for (double& v : negated.scores) v = -v;
    EXPECT_NEAR(Auc(BuildRocCurve(cubed)), auc, 1e-12);
    EXPECT_NEAR(Auc(BuildRocCurve(negated)), 1.0 - auc, 1e-12);
  }
}

TEST(AdvantageTest, EqualsExhaustiveSweep) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 60; ++trial) {
    AttackScores s = testing::RandomScoreSet(rng, 20, trial % 2 == 0);
    EXPECT_EQ(Advantage(BuildRocCurve(s)), testing::SweepAdvantage(s));
  }
}

TEST(TprAtFprTest, MatchesSweepAndBoundsAdvantage) {
  std::mt19937_64 rng(24);
  for (int trial = 0; trial < 60; ++trial) {
    AttackScores s = testing::RandomScoreSet(rng, 200, trial % 2 == 0);
    RocCurve c = BuildRocCurve(s);
    for (double alpha : {0.005, 0.01, 0.1, 0.5}) {
      const double tpr = TprAtFpr(c, alpha);
      EXPECT_EQ(tpr, testing::SweepTprAtFpr(s, alpha));
      EXPECT_GE(Advantage(c), tpr - alpha - 1e-12);
    }
    EXPECT_EQ(TprAtFpr(c, 1.0), 1.0);
  }
}

TEST(TprAtFprTest, RejectsAlphaOutsideUnitInterval) {
  RocCurve c = BuildRocCurve(Make({1, 0}, {1, 0}));
  EXPECT_THROW(TprAtFpr(c, 0.0), std::invalid_argument);
  EXPECT_THROW(TprAtFpr(c, 1.5), std::invalid_argument);
}

TEST(VulnerableTest, ImpliedFprStaysWithinAlpha) {
  std::mt19937_64 rng(25);
  for (int trial = 0; trial < 40; ++trial) {
    AttackScores s = testing::RandomScoreSet(rng, 300, trial % 2 == 0);
    size_t negatives = 0;
    for (bool m : s.is_member) negatives += m ? 0 : 1;
    for (double alpha : {0.01, 0.05, 0.2}) {
      std::vector<size_t> ids = VulnerableMembers(s, alpha);
      if (ids.empty()) continue;
      double lowest = std::numeric_limits<double>::infinity();
      for (size_t i = 0; i < s.size(); ++i) {
        const bool listed =
            std::find(ids.begin(), ids.end(), s.ids[i]) != ids.end();
        if (listed) {
          EXPECT_TRUE(s.is_member[i]);
          lowest = std::min(lowest, s.scores[i]);
        }
      }
      size_t tp = 0;
      size_t fp = 0;
      testing::CountAtOrAbove(s, lowest, tp, fp);
      EXPECT_EQ(tp, ids.size());
      EXPECT_LE(static_cast<double>(fp) / negatives, alpha);
    }
  }
}

TEST(HistogramTest, CountsEveryScoreOnce) {
  std::mt19937_64 rng(26);
  AttackScores s = testing::RandomScoreSet(rng, 500, false);
  Histogram h = MakeHistogram(s, 7);
  ASSERT_EQ(h.edges.size(), 8u);
  size_t members = 0;
  size_t nonmembers = 0;
  for (size_t b = 0; b < 7; ++b) {
    members += h.member_counts[b];
    nonmembers += h.nonmember_counts[b];
    size_t expected_members = 0;
    size_t expected_nonmembers = 0;
    for (size_t i = 0; i < s.size(); ++i) {
      const double v = s.scores[i];
      const bool inside = v >= h.edges[b] &&
                          (b == 6 ? v <= h.edges[b + 1] : v < h.edges[b + 1]);
      if (inside) ++(s.is_member[i] ? expected_members : expected_nonmembers);
    }
    EXPECT_EQ(h.member_counts[b], expected_members);
    EXPECT_EQ(h.nonmember_counts[b], expected_nonmembers);
  }
  EXPECT_EQ(members + nonmembers, s.size());
}

TEST(HistogramTest, DegenerateInputs) {
  AttackScores same = Make({2.0, 2.0, 2.0}, {1, 0, 1});
  Histogram one = MakeHistogram(same, 1);
  EXPECT_EQ(one.member_counts[0], 2u);
  EXPECT_EQ(one.nonmember_counts[0], 1u);
  Histogram many = MakeHistogram(same, 4);
  EXPECT_EQ(many.edges.front(), 2.0);
  EXPECT_EQ(many.edges.back(), 3.0);
  EXPECT_EQ(many.member_counts[0], 2u);
  EXPECT_THROW(MakeHistogram(same, 0), std::invalid_argument);
  EXPECT_THROW(MakeHistogram(AttackScores{}, 3), std::invalid_argument);
}

TEST(MiaReportTest, CollectsEveryLevel) {
  AttackScores s = Make({5, 4, 3, 2, 1, 0}, {1, 0, 1, 0, 1, 0});
  const std::vector<double> alphas = {0.01, 0.5};
  MiaReport r = MakeMiaReport(s, alphas);
  EXPECT_EQ(r.auc, Auc(BuildRocCurve(s)));
  EXPECT_EQ(r.tpr_at_fpr.size(), 2u);
  EXPECT_EQ(r.vulnerable_member_indices.at(0.01),
            (std::vector<size_t>{100}));
}

TEST(RocCsvTest, HeaderAndRows) {
  RocCurve c = BuildRocCurve(Make({1, 0, 0}, {1, 0, 1}));
  std::stringstream out;
  WriteRocCsv(c, out);
  std::string line;
  std::getline(out, line);
  EXPECT_EQ(line, "threshold,fpr,tpr");
  size_t rows = 0;
  while (std::getline(out, line)) ++rows;
  EXPECT_EQ(rows, c.size());
}

}  // namespace
}  // namespace mia
