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


#include "mia/geometry.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <stdexcept>

#include "json.hpp"

namespace mia {
namespace {

Vector ApplyAffine(const AffineLayer& layer, std::span<const double> input) {
  Vector out = layer.bias;
  for (size_t i = 0; i < input.size(); ++i) {
    auto w = layer.weight.row(i);
    for (size_t j = 0; j < out.size(); ++j) out[j] += input[i] * w[j];
  }
  return out;
}

Vector Blend(std::span<const double> z, std::span<const double> centroid,
             double w) {
  Vector out(z.size());
  for (size_t j = 0; j < z.size(); ++j) {
    out[j] = w * z[j] + (1.0 - w) * centroid[j];
  }
  return out;
}

Vector MatVec(const Matrix& m, const Vector& v) {
  Vector out(m.rows(), 0.0);
  for (size_t r = 0; r < m.rows(); ++r) out[r] = Dot(m.row(r), v);
  return out;
}

void Normalize(Vector& v) {
  const double n = Norm2(v);
  if (n > 0.0) {
    for (double& x : v) x /= n;
  }
}

// Leading eigenvector of the symmetric PSD matrix `cov`, restricted to the
// complement of `exclude`.
Vector PowerIteration(const Matrix& cov, const Vector* exclude,
                      std::mt19937_64& rng) {
  constexpr double kTolerance = 1e-9;
  constexpr int kMaxIterations = 200000;
  const size_t d = cov.rows();
  std::normal_distribution<double> normal;
  Vector v(d);
  for (double& x : v) x = normal(rng);

  auto orthogonalize = [&](Vector& u) {
    if (exclude == nullptr) return;
    const double proj = Dot(u, *exclude);
    for (size_t i = 0; i < d; ++i) u[i] -= proj * (*exclude)[i];
  };
  orthogonalize(v);
  Normalize(v);

  for (int it = 0; it < kMaxIterations; ++it) {
    Vector next = MatVec(cov, v);
    orthogonalize(next);
    const double norm = Norm2(next);
    if (norm <= 1e-300) return v;  // numerically null on this subspace
    for (double& x : next) x /= norm;
    double diff = 0.0;
    for (size_t i = 0; i < d; ++i) diff = std::max(diff, std::abs(next[i] - v[i]));
    v = std::move(next);
    if (diff < kTolerance) break;
  }
  return v;
}

const char* GroupingName(CentroidGrouping g) {
  return g == CentroidGrouping::kTrueLabel ? "true_label" : "predicted_label";
}

}  // namespace

const ClassCentroid& CentroidTable::at(size_t cls) const {
  if (cls >= classes.size() || !classes[cls].has_value()) {
    throw std::invalid_argument("no centroid for class " + std::to_string(cls));
  }
  return *classes[cls];
}

CentroidTable ClassCentroids(std::span<const PredictionRecord> records,
                             const MlpModel& model, CentroidGrouping grouping,
                             bool require_all_classes) {
  const size_t m = model.num_classes();
  const size_t width = model.latent_width();
  std::vector<Vector> sums(m, Vector(width, 0.0));
  std::vector<size_t> counts(m, 0);
  for (const PredictionRecord& r : records) {
    const size_t cls = grouping == CentroidGrouping::kTrueLabel
                           ? r.label
                           : ArgMax(r.logits);
    if (cls >= m || r.latent.size() != width) {
      throw std::invalid_argument("record does not match model shape");
    }
    for (size_t j = 0; j < width; ++j) sums[cls][j] += r.latent[j];
    ++counts[cls];
  }

  std::string missing;
  CentroidTable table;
  table.grouping = grouping;
  table.classes.resize(m);
  for (size_t c = 0; c < m; ++c) {
    if (counts[c] == 0) {
      if (!missing.empty()) missing += ", ";
      missing += std::to_string(c);
      continue;
    }
    ClassCentroid centroid;
    centroid.count = counts[c];
    centroid.latent = std::move(sums[c]);
    for (double& x : centroid.latent) x /= static_cast<double>(counts[c]);
    centroid.logits = ApplyAffine(model.head(), centroid.latent);
    table.classes[c] = std::move(centroid);
  }
  if (require_all_classes && !missing.empty()) {
    throw std::invalid_argument("no member records for class(es): " + missing);
  }
  return table;
}

double OutlierScore(const PredictionRecord& record,
                    const CentroidTable& table) {
  const ClassCentroid& c = table.at(record.label);
  if (Norm2(record.latent) == 0.0 || Norm2(c.latent) == 0.0) return 1.0;
  return 1.0 - CosineSimilarity(record.latent, c.latent);
}

std::vector<double> OutlierScores(std::span<const PredictionRecord> records,
                                  const CentroidTable& table) {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(OutlierScore(r, table));
  return out;
}

void ReweightConfig::Validate() const {
  if (!(weight_floor >= 0.0 && weight_floor <= 1.0)) {
    throw std::invalid_argument("weight floor must be in [0, 1]");
  }
  if (!(sharpness > 0.0) || !std::isfinite(sharpness)) {
    throw std::invalid_argument("reweight sharpness must be positive");
  }
}

ReweightResult ReweightLogits(const PredictionRecord& record,
                              const CentroidTable& table,
                              const ReweightConfig& config) {
  config.Validate();
  ReweightResult result;
  result.predicted_class = ArgMax(record.logits);
  const ClassCentroid& c = table.at(result.predicted_class);
  if (c.logits.size() != record.logits.size()) {
    throw std::invalid_argument("centroid logits do not match record");
  }

  const double cos = CosineSimilarity(record.latent, c.latent);
  double w = std::pow(std::clamp(cos, config.weight_floor, 1.0),
                      config.sharpness);
  Vector adjusted = Blend(record.logits, c.logits, w);

  if (config.preserve_argmax && ArgMax(adjusted) != result.predicted_class) {
    // Smallest weight in [w, 1] that keeps the prediction; w = 1 always does.
    double lo = w;
    double hi = 1.0;
    for (int it = 0; it < 16; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (ArgMax(Blend(record.logits, c.logits, mid)) ==
          result.predicted_class) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    w = hi;
    adjusted = Blend(record.logits, c.logits, w);
  }
  result.weight = w;
  result.logits = std::move(adjusted);
  return result;
}

DefendedEvaluation DefendedEvaluate(std::span<const PredictionRecord> records,
                                    const CentroidTable& table,
                                    const ReweightConfig& config) {
  if (records.empty()) {
    throw std::invalid_argument("cannot evaluate an empty subset");
  }
  const auto start = std::chrono::steady_clock::now();
  DefendedEvaluation out;
  out.records.reserve(records.size());
  size_t correct = 0;
  for (const PredictionRecord& r : records) {
    ReweightResult rw = ReweightLogits(r, table, config);
    out.weights.push_back(rw.weight);
    PredictionRecord adjusted =
        MakeRecord(r.index, r.label, r.is_member, std::move(rw.logits), r.latent);
    if (ArgMax(adjusted.logits) == adjusted.label) ++correct;
    out.records.push_back(std::move(adjusted));
  }
  out.accuracy =
      static_cast<double>(correct) / static_cast<double>(records.size());
  out.overhead_seconds = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - start)
                             .count();
  return out;
}

Projection Project2d(std::span<const Vector> points, uint64_t seed) {
  if (points.size() < 2) {
    throw std::invalid_argument("projection needs at least two samples");
  }
  const size_t n = points.size();
  const size_t d = points.front().size();
  Vector mean(d, 0.0);
  for (const Vector& p : points) {
    if (p.size() != d) throw std::invalid_argument("ragged projection input");
    for (size_t j = 0; j < d; ++j) mean[j] += p[j];
  }
  for (double& x : mean) x /= static_cast<double>(n);

  Matrix centered(n, d);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < d; ++j) centered(i, j) = points[i][j] - mean[j];
  }
  Matrix cov(d, d);
  for (size_t i = 0; i < n; ++i) {
    auto row = centered.row(i);
    for (size_t a = 0; a < d; ++a) {
      if (row[a] == 0.0) continue;
      auto c = cov.row(a);
      for (size_t b = 0; b < d; ++b) c[b] += row[a] * row[b];
    }
  }
  for (double& x : cov.values()) x /= static_cast<double>(n);

  Projection proj;
  proj.coordinates = Matrix(n, 2);
  std::mt19937_64 rng(seed);
  proj.axes[0] = PowerIteration(cov, nullptr, rng);
  proj.axes[1] = PowerIteration(cov, &proj.axes[0], rng);
  for (int a = 0; a < 2; ++a) {
    const Vector& axis = proj.axes[a];
    double var = 0.0;
    for (size_t i = 0; i < n; ++i) {
      const double coord = Dot(centered.row(i), axis);
      proj.coordinates(i, a) = coord;
      var += coord * coord;
    }
    proj.variance[a] = var / static_cast<double>(n);
  }
  return proj;
}

std::string CentroidTableToJson(const CentroidTable& table) {
  nlohmann::json j;
  j["grouping"] = GroupingName(table.grouping);
  j["classes"] = nlohmann::json::array();
  for (size_t c = 0; c < table.classes.size(); ++c) {
    if (!table.classes[c]) {
      j["classes"].push_back(nullptr);
      continue;
    }
    const ClassCentroid& cc = *table.classes[c];
    j["classes"].push_back(
        {{"count", cc.count}, {"latent", cc.latent}, {"logits", cc.logits}});
  }
  return j.dump(1);
}

CentroidTable CentroidTableFromJson(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  CentroidTable table;
  const std::string grouping = j.at("grouping").get<std::string>();
  if (grouping == "true_label") {
    table.grouping = CentroidGrouping::kTrueLabel;
  } else if (grouping == "predicted_label") {
    table.grouping = CentroidGrouping::kPredictedLabel;
  } else {
    throw std::invalid_argument("unknown centroid grouping '" + grouping + "'");
  }
  for (const auto& entry : j.at("classes")) {
    if (entry.is_null()) {
      table.classes.emplace_back();
      continue;
    }
    ClassCentroid cc;
    cc.count = entry.at("count").get<size_t>();
    cc.latent = entry.at("latent").get<Vector>();
    cc.logits = entry.at("logits").get<Vector>();
    table.classes.emplace_back(std::move(cc));
  }
  return table;
}

}  // namespace mia
