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


// Leakage metrics over attack scores: ROC sweep, AUC, attacker advantage,
// TPR at a fixed FPR, the vulnerable member set and score histograms.
//
// Decision rule: score >= threshold means "member". Tied scores collapse into
// a single ROC point, so the trapezoidal AUC equals the Mann-Whitney
// statistic with ties credited 1/2.

#ifndef MIA_METRICS_H_
#define MIA_METRICS_H_

#include <iosfwd>
#include <map>
#include <span>
#include <vector>

#include "mia/attacks.h"

namespace mia {

struct RocCurve {
  // thresholds[0] is +infinity (the (0, 0) point); the rest are the distinct
  // scores in descending order, the last one giving (1, 1).
  std::vector<double> thresholds;
  std::vector<double> tpr;
  std::vector<double> fpr;

  size_t size() const { return thresholds.size(); }
};

// Throws std::invalid_argument unless there is at least one member and one
// non-member, or if lengths disagree.
RocCurve BuildRocCurve(const AttackScores& scores);

double Auc(const RocCurve& curve);

// max over curve points of tpr - fpr.
double Advantage(const RocCurve& curve);

// Index of the most permissive curve point whose FPR is <= alpha.
size_t OperatingPointAtFpr(const RocCurve& curve, double alpha);

// TPR at OperatingPointAtFpr; no interpolation between points. Throws
// std::invalid_argument unless alpha is in (0, 1].
double TprAtFpr(const RocCurve& curve, double alpha);

// Dataset ids of members scoring at or above the threshold of
// OperatingPointAtFpr(curve, alpha). Sorted ascending.
std::vector<size_t> VulnerableMembers(const AttackScores& scores,
                                      double alpha);

struct Histogram {
  std::vector<double> edges;  // bin_count + 1 entries
  std::vector<size_t> member_counts;
  std::vector<size_t> nonmember_counts;
};

// Equal-width bins over [min, max]; the last bin is closed. When every score
// is equal the range is widened to [v, v + 1] so all mass lands in bin 0.
// Throws std::invalid_argument if bin_count == 0 or scores are empty.
Histogram MakeHistogram(const AttackScores& scores, size_t bin_count);

struct MiaReport {
  AttackKind kind = AttackKind::kLoss;
  double auc = 0.5;
  double advantage = 0.0;
  std::map<double, double> tpr_at_fpr;
  std::map<double, std::vector<size_t>> vulnerable_member_indices;
};

MiaReport MakeMiaReport(const AttackScores& scores,
                        std::span<const double> alphas);

// Columns: threshold,fpr,tpr
void WriteRocCsv(const RocCurve& curve, std::ostream& out);
// Columns: bin,lower,upper,members,nonmembers
void WriteHistogramCsv(const Histogram& histogram, std::ostream& out);

}  // namespace mia

#endif  // MIA_METRICS_H_
