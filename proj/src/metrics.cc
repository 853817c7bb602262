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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

namespace mia {
namespace {

std::string FormatDouble(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

void CheckAlpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("FPR level must be in (0, 1]");
  }
}

}  // namespace

RocCurve BuildRocCurve(const AttackScores& scores) {
  const size_t n = scores.size();
  if (scores.is_member.size() != n) {
    throw std::invalid_argument("scores and membership flags differ in length");
  }
  const auto positives = static_cast<size_t>(
      std::count(scores.is_member.begin(), scores.is_member.end(), true));
  const size_t negatives = n - positives;
  if (positives == 0 || negatives == 0) {
    throw std::invalid_argument(
        "ROC needs both members and non-members; got " +
        std::to_string(positives) + " members and " +
        std::to_string(negatives) + " non-members");
  }
  for (double s : scores.scores) {
    if (std::isnan(s)) throw std::invalid_argument("NaN attack score");
  }

  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return scores.scores[a] > scores.scores[b];
  });

  RocCurve curve;
  curve.thresholds.push_back(std::numeric_limits<double>::infinity());
  curve.tpr.push_back(0.0);
  curve.fpr.push_back(0.0);
  size_t tp = 0;
  size_t fp = 0;
  size_t i = 0;
  while (i < n) {
    const double threshold = scores.scores[order[i]];
    while (i < n && scores.scores[order[i]] == threshold) {
      if (scores.is_member[order[i]]) {
        ++tp;
      } else {
        ++fp;
      }
      ++i;
    }
    curve.thresholds.push_back(threshold);
    curve.tpr.push_back(static_cast<double>(tp) /
                        static_cast<double>(positives));
    curve.fpr.push_back(static_cast<double>(fp) /
                        static_cast<double>(negatives));
  }
  return curve;
}

double Auc(const RocCurve& curve) {
  double area = 0.0;
  for (size_t k = 1; k < curve.size(); ++k) {
    area += (curve.fpr[k] - curve.fpr[k - 1]) *
            (curve.tpr[k] + curve.tpr[k - 1]) * 0.5;
  }
  return area;
}

double Advantage(const RocCurve& curve) {
  double best = 0.0;
  for (size_t k = 0; k < curve.size(); ++k) {
    best = std::max(best, curve.tpr[k] - curve.fpr[k]);
  }
  return best;
}

size_t OperatingPointAtFpr(const RocCurve& curve, double alpha) {
  CheckAlpha(alpha);
  size_t best = 0;
  for (size_t k = 0; k < curve.size(); ++k) {
    if (curve.fpr[k] <= alpha) best = k;
  }
  return best;
}

double TprAtFpr(const RocCurve& curve, double alpha) {
  return curve.tpr[OperatingPointAtFpr(curve, alpha)];
}

std::vector<size_t> VulnerableMembers(const AttackScores& scores,
                                      double alpha) {
  const RocCurve curve = BuildRocCurve(scores);
  const double threshold = curve.thresholds[OperatingPointAtFpr(curve, alpha)];
  std::vector<size_t> ids;
  for (size_t i = 0; i < scores.size(); ++i) {
    if (scores.is_member[i] && scores.scores[i] >= threshold) {
      ids.push_back(scores.ids.empty() ? i : scores.ids[i]);
    }
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

Histogram MakeHistogram(const AttackScores& scores, size_t bin_count) {
  if (bin_count == 0) throw std::invalid_argument("bin_count must be >= 1");
  if (scores.size() == 0) {
    throw std::invalid_argument("cannot histogram an empty score set");
  }
  const auto [min_it, max_it] =
      std::minmax_element(scores.scores.begin(), scores.scores.end());
  const double lo = *min_it;
  double hi = *max_it;
  if (hi == lo) hi = lo + 1.0;
  const double width = (hi - lo) / static_cast<double>(bin_count);

  Histogram h;
  h.edges.resize(bin_count + 1);
  for (size_t b = 0; b <= bin_count; ++b) {
    h.edges[b] = lo + width * static_cast<double>(b);
  }
  h.edges.back() = hi;
  h.member_counts.assign(bin_count, 0);
  h.nonmember_counts.assign(bin_count, 0);
  for (size_t i = 0; i < scores.size(); ++i) {
    auto bin = static_cast<size_t>((scores.scores[i] - lo) / width);
    bin = std::min(bin, bin_count - 1);
    if (scores.is_member[i]) {
      ++h.member_counts[bin];
    } else {
      ++h.nonmember_counts[bin];
    }
  }
  return h;
}

MiaReport MakeMiaReport(const AttackScores& scores,
                        std::span<const double> alphas) {
  const RocCurve curve = BuildRocCurve(scores);
  MiaReport report;
  report.kind = scores.kind;
  report.auc = Auc(curve);
  report.advantage = Advantage(curve);
  for (double alpha : alphas) {
    report.tpr_at_fpr[alpha] = TprAtFpr(curve, alpha);
    report.vulnerable_member_indices[alpha] = VulnerableMembers(scores, alpha);
  }
  return report;
}

void WriteRocCsv(const RocCurve& curve, std::ostream& out) {
  out << "threshold,fpr,tpr\n";
  for (size_t k = 0; k < curve.size(); ++k) {
    out << FormatDouble(curve.thresholds[k]) << ',' << FormatDouble(curve.fpr[k])
        << ',' << FormatDouble(curve.tpr[k]) << '\n';
  }
}

void WriteHistogramCsv(const Histogram& histogram, std::ostream& out) {
  out << "bin,lower,upper,members,nonmembers\n";
  for (size_t b = 0; b < histogram.member_counts.size(); ++b) {
    out << b << ',' << FormatDouble(histogram.edges[b]) << ','
        << FormatDouble(histogram.edges[b + 1]) << ','
        << histogram.member_counts[b] << ',' << histogram.nonmember_counts[b]
        << '\n';
  }
}

}  // namespace mia
