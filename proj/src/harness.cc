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


#include "mia/harness.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <future>
#include <iterator>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>

#include "mia/checkpoint.h"

namespace mia {
namespace {

using Clock = std::chrono::steady_clock;

double Mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) /
         static_cast<double>(v.size());
}

double SampleVariance(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double mu = Mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - mu) * (x - mu);
  return ss / static_cast<double>(v.size() - 1);
}

// One-sided Welch t-test for mean(a) > mean(b); returns {t, p}.
std::pair<double, double> WelchGreater(const std::vector<double>& a,
                                       const std::vector<double>& b) {
  if (a.size() < 2 || b.size() < 2) return {0.0, 1.0};
  const double va = SampleVariance(a) / static_cast<double>(a.size());
  const double vb = SampleVariance(b) / static_cast<double>(b.size());
  const double se = std::sqrt(va + vb);
  if (se == 0.0) return {0.0, 1.0};
  const double t = (Mean(a) - Mean(b)) / se;
  const double df = (va + vb) * (va + vb) /
                    (va * va / static_cast<double>(a.size() - 1) +
                     vb * vb / static_cast<double>(b.size() - 1));
  boost::math::students_t dist(df);
  return {t, boost::math::cdf(boost::math::complement(dist, t))};
}

std::vector<size_t> Intersect(const std::vector<size_t>& a,
                              const std::vector<size_t>& b) {
  std::vector<size_t> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(out));
  return out;
}

std::vector<size_t> Union(const std::vector<size_t>& a,
                          const std::vector<size_t>& b) {
  std::vector<size_t> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                 std::back_inserter(out));
  return out;
}

std::vector<size_t> Difference(const std::vector<size_t>& a,
                               const std::vector<size_t>& b) {
  std::vector<size_t> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                      std::back_inserter(out));
  return out;
}

std::vector<size_t> VulnerableUnion(const std::vector<AttackScores>& scores,
                                    double alpha) {
  std::vector<size_t> out;
  for (const AttackScores& s : scores) out = Union(out, VulnerableMembers(s, alpha));
  return out;
}

std::vector<PredictionRecord> EvaluateSplit(const MlpModel& model,
                                            const Dataset& dataset,
                                            const std::vector<size_t>& members,
                                            const std::vector<size_t>& nonmembers,
                                            double* member_acc,
                                            double* nonmember_acc) {
  Evaluation m = Evaluate(model, dataset, members, true);
  Evaluation n = Evaluate(model, dataset, nonmembers, false);
  if (member_acc != nullptr) *member_acc = m.accuracy;
  if (nonmember_acc != nullptr) *nonmember_acc = n.accuracy;
  std::vector<PredictionRecord> records = std::move(m.records);
  records.insert(records.end(), std::make_move_iterator(n.records.begin()),
                 std::make_move_iterator(n.records.end()));
  return records;
}

double Accuracy(std::span<const PredictionRecord> records, bool members) {
  size_t total = 0;
  size_t correct = 0;
  for (const auto& r : records) {
    if (r.is_member != members) continue;
    ++total;
    if (ArgMax(r.logits) == r.label) ++correct;
  }
  return total == 0 ? 0.0
                    : static_cast<double>(correct) / static_cast<double>(total);
}

void AnalyzeOutliers(const ExperimentConfig& config, ExperimentRun& run) {
  const size_t n_members = run.report.num_members;
  std::span<const PredictionRecord> members(run.records.data(), n_members);
  try {
    run.analysis_centroids = ClassCentroids(members, run.training.model,
                                            CentroidGrouping::kTrueLabel);
  } catch (const std::invalid_argument& e) {
    run.report.notices.push_back(std::string("outlier analysis skipped: ") +
                                 e.what());
    return;
  }
  run.outlier_scores = OutlierScores(run.records, *run.analysis_centroids);

  const std::set<size_t> noisy(run.dataset.noisy_indices.begin(),
                               run.dataset.noisy_indices.end());
  std::vector<double> all_members;
  std::vector<double> noisy_members;
  std::vector<double> clean_members;
  std::map<size_t, double> member_score;
  for (size_t i = 0; i < n_members; ++i) {
    const double s = run.outlier_scores[i];
    all_members.push_back(s);
    member_score[run.records[i].index] = s;
    (noisy.count(run.records[i].index) ? noisy_members : clean_members)
        .push_back(s);
  }

  for (size_t a = 0; a < run.scores.size(); ++a) {
    for (double alpha : config.fpr_levels) {
      const auto& vulnerable =
          run.report.attacks[a].vulnerable_member_indices.at(alpha);
      OutlierSummary summary;
      summary.kind = run.scores[a].kind;
      summary.alpha = alpha;
      summary.vulnerable_count = vulnerable.size();
      std::vector<double> vuln_scores;
      for (size_t id : vulnerable) {
        vuln_scores.push_back(member_score.at(id));
        if (noisy.count(id)) ++summary.vulnerable_noisy_count;
      }
      summary.mean_vulnerable = Mean(vuln_scores);
      summary.mean_all_members = Mean(all_members);
      summary.mean_noisy_members = Mean(noisy_members);
      summary.mean_clean_members = Mean(clean_members);
      std::tie(summary.welch_t, summary.welch_p) =
          WelchGreater(vuln_scores, all_members);
      run.report.outliers.push_back(summary);
    }
  }
}

void ApplyReweighting(const ExperimentConfig& config, ExperimentRun& run) {
  DefenseBlock block;
  block.config = *config.reweight;
  block.before.train_accuracy = run.report.train_accuracy;
  block.before.test_accuracy = run.report.test_accuracy;
  block.before.attacks = run.report.attacks;

  const size_t n_members = run.report.num_members;
  std::span<const PredictionRecord> members(run.records.data(), n_members);
  CentroidTable table =
      ClassCentroids(members, run.training.model,
                     CentroidGrouping::kPredictedLabel,
                     /*require_all_classes=*/false);
  for (const auto& r : run.records) {
    const size_t cls = ArgMax(r.logits);
    if (!table.classes[cls]) {
      block.notice = "no member is predicted as class " + std::to_string(cls) +
                     "; defense not applied";
      run.report.defense = std::move(block);
      return;
    }
  }

  DefendedEvaluation defended =
      DefendedEvaluate(run.records, table, *config.reweight);
  block.applied = true;
  block.after.overhead_seconds = defended.overhead_seconds;
  block.after.train_accuracy = Accuracy(defended.records, true);
  block.after.test_accuracy = Accuracy(defended.records, false);
  for (AttackKind kind : config.attacks) {
    block.after.attacks.push_back(
        MakeMiaReport(ScoreRecords(kind, defended.records), config.fpr_levels));
  }
  run.defense_centroids = std::move(table);
  run.defended_records = std::move(defended.records);
  run.report.defense = std::move(block);
}

void CheckWritableDirectory(const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto probe = dir / ".write_probe";
  {
    std::ofstream out(probe);
    if (!out) throw std::runtime_error("output directory not writable: " +
                                       dir.string());
  }
  std::filesystem::remove(probe);
}

template <typename Writer>
std::filesystem::path WriteFile(const std::filesystem::path& path,
                                 Writer&& writer) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  writer(out);
  if (!out) throw std::runtime_error("write failed for " + path.string());
  return path;
}

}  // namespace

void ExperimentConfig::Validate() const {
  train.Validate();
  if (n_member == 0) throw std::invalid_argument("split.members must be >= 1");
  if (n_nonmember == 0) {
    throw std::invalid_argument("split.nonmembers must be >= 1");
  }
  if (attacks.empty()) throw std::invalid_argument("no attacks configured");
  if (fpr_levels.empty()) throw std::invalid_argument("no FPR levels given");
  for (double alpha : fpr_levels) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
      throw std::invalid_argument("FPR levels must be in (0, 1)");
    }
  }
  for (size_t e : snapshot_epochs) {
    if (e > train.epochs) {
      throw std::invalid_argument("snapshot epoch " + std::to_string(e) +
                                  " exceeds training epochs");
    }
  }
  if (histogram_bins == 0) throw std::invalid_argument("histogram_bins >= 1");
  if (reweight) reweight->Validate();
  if (dataset.kind == DatasetSource::Kind::kCsv && dataset.csv_path.empty()) {
    throw std::invalid_argument("csv dataset needs a path");
  }
}

ExperimentConfig DefaultExperimentConfig() {
  ExperimentConfig c;
  c.name = "overfit";
  c.dataset.kind = DatasetSource::Kind::kSynthetic;
  c.dataset.synthetic.num_classes = 20;
  c.dataset.synthetic.feature_dim = 200;
  c.dataset.synthetic.samples_per_class = 100;
  c.dataset.synthetic.prototype_flip_rate = 0.1;
  c.dataset.synthetic.label_noise_fraction = 0.1;
  c.dataset.synthetic.seed = 1;
  c.n_member = 1000;
  c.n_nonmember = 1000;
  c.split_seed = 2;
  c.train.hidden_widths = {128};
  c.train.epochs = 100;
  c.train.learning_rate = 0.05;
  c.train.batch_size = 32;
  c.train.seed = 3;
  c.attacks = {AttackKind::kLoss, AttackKind::kEntropy,
               AttackKind::kConfidence, AttackKind::kScaledLogit};
  c.fpr_levels = {0.01, 0.005};
  c.snapshot_epochs = {1, 10, 50, 100};
  // Post-ReLU latents sit at cosine 0.95-0.99 from their centroid, so the
  // raw cosine barely moves the logits. A high power spreads the weights.
  c.reweight = ReweightConfig{.sharpness = 100.0};
  return c;
}

Dataset LoadExperimentDataset(const ExperimentConfig& config) {
  if (config.dataset.kind == DatasetSource::Kind::kCsv) {
    return LoadCsv(config.dataset.csv_path);
  }
  return GenerateSynthetic(config.dataset.synthetic);
}

ExperimentRun RunExperiment(const ExperimentConfig& config) {
  config.Validate();
  Dataset dataset = LoadExperimentDataset(config);
  DataSplit split =
      Split(dataset, config.n_member, config.n_nonmember, config.split_seed);
  return RunExperiment(config, dataset, split);
}

ExperimentRun RunExperiment(const ExperimentConfig& config,
                            const Dataset& dataset, const DataSplit& split) {
  config.Validate();
  ValidateDataset(dataset);

  ExperimentRun run;
  run.dataset = dataset;
  run.split = split;
  ReportDocument& report = run.report;
  report.config = ToJson(config);
  report.dataset_name = dataset.name;
  report.num_samples = dataset.size();
  report.feature_dim = dataset.feature_dim();
  report.num_classes = dataset.num_classes;
  report.num_noisy = dataset.noisy_indices.size();
  report.num_nonmembers = split.nonmember_indices.size();

  const std::set<size_t> snapshot_epochs(config.snapshot_epochs.begin(),
                                         config.snapshot_epochs.end());
  std::vector<std::pair<size_t, MlpModel>> snapshot_models;
  auto observer = [&](size_t epoch, const MlpModel& model) {
    if (snapshot_epochs.count(epoch)) snapshot_models.emplace_back(epoch, model);
  };

  const auto start = Clock::now();
  try {
    run.training = Train(dataset, split, config.train, observer);
  } catch (const TrainingError& e) {
    report.runtime_seconds =
        std::chrono::duration<double>(Clock::now() - start).count();
    report.valid = false;
    report.error = e.what();
    report.epochs_run = e.epoch() > 0 ? e.epoch() - 1 : 0;
    return run;
  }
  report.runtime_seconds =
      std::chrono::duration<double>(Clock::now() - start).count();

  const TrainHistory& history = run.training.history;
  report.epochs_run = history.epochs.size();
  report.selected_epoch = history.selected_epoch;
  report.stopped_early = history.stopped_early;
  report.max_clipped_grad_norm = history.max_clipped_grad_norm;
  report.num_members = run.training.training_indices.size();
  report.num_validation = run.training.validation_indices.size();

  run.records = EvaluateSplit(run.training.model, dataset,
                              run.training.training_indices,
                              split.nonmember_indices, &report.train_accuracy,
                              &report.test_accuracy);

  for (AttackKind kind : config.attacks) {
    AttackScores scores = ScoreRecords(kind, run.records);
    report.attacks.push_back(MakeMiaReport(scores, config.fpr_levels));
    run.rocs.push_back(BuildRocCurve(scores));
    run.histograms.push_back(MakeHistogram(scores, config.histogram_bins));
    run.scores.push_back(std::move(scores));
  }

  {
    std::span<const PredictionRecord> members(run.records.data(),
                                              report.num_members);
    double loss = 0.0;
    for (const auto& r : members) loss += r.loss;
    report.yeom.mean_train_loss = loss / static_cast<double>(members.size());
    const auto decisions = YeomDecision(run.records, report.yeom.mean_train_loss);
    size_t tp = 0;
    size_t fp = 0;
    for (size_t i = 0; i < run.records.size(); ++i) {
      if (!decisions[i]) continue;
      (run.records[i].is_member ? tp : fp) += 1;
    }
    report.yeom.tpr =
        static_cast<double>(tp) / static_cast<double>(report.num_members);
    report.yeom.fpr =
        static_cast<double>(fp) / static_cast<double>(report.num_nonmembers);
    report.yeom.advantage = std::max(0.0, report.yeom.tpr - report.yeom.fpr);
  }

  for (const auto& [epoch, model] : snapshot_models) {
    SnapshotSummary snap;
    snap.epoch = epoch;
    const auto records =
        EvaluateSplit(model, dataset, run.training.training_indices,
                      split.nonmember_indices, &snap.train_accuracy,
                      &snap.test_accuracy);
    const AttackScores scores = ScoreRecords(AttackKind::kScaledLogit, records);
    const RocCurve curve = BuildRocCurve(scores);
    snap.auc = Auc(curve);
    snap.advantage = Advantage(curve);
    snap.histogram = MakeHistogram(scores, config.histogram_bins);
    report.snapshots.push_back(std::move(snap));
  }

  for (double alpha : config.fpr_levels) {
    for (size_t a = 0; a < report.attacks.size(); ++a) {
      for (size_t b = a + 1; b < report.attacks.size(); ++b) {
        const auto& va = report.attacks[a].vulnerable_member_indices.at(alpha);
        const auto& vb = report.attacks[b].vulnerable_member_indices.at(alpha);
        report.vulnerable_overlap.push_back(
            {alpha, report.attacks[a].kind, report.attacks[b].kind, va.size(),
             vb.size(), Intersect(va, vb).size()});
      }
    }
  }
  run.vulnerable_union = VulnerableUnion(run.scores, config.fpr_levels.front());

  AnalyzeOutliers(config, run);

  if (report.num_members >= 2) {
    std::vector<Vector> latents;
    for (size_t i = 0; i < report.num_members; ++i) {
      latents.push_back(run.records[i].latent);
    }
    const Projection proj = Project2d(latents, config.train.seed);
    for (size_t i = 0; i < report.num_members; ++i) {
      const size_t id = run.records[i].index;
      run.projection.push_back(
          {id, proj.coordinates(i, 0), proj.coordinates(i, 1),
           run.records[i].label,
           std::binary_search(run.vulnerable_union.begin(),
                              run.vulnerable_union.end(), id)});
    }
  }

  if (config.reweight) ApplyReweighting(config, run);
  return run;
}

DefenseVariant ParseDefenseVariant(const std::string& text) {
  DefenseVariant variant;
  variant.name = text;
  if (text.empty() || text == "original" || text == "none") return variant;
  std::stringstream parts(text);
  std::string part;
  while (std::getline(parts, part, '+')) {
    const size_t eq = part.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("defense '" + part + "' needs key=value");
    }
    const std::string key = part.substr(0, eq);
    const std::string value = part.substr(eq + 1);
    try {
      if (key == "l2") {
        variant.settings.l2_lambda = std::stod(value);
      } else if (key == "dropout") {
        variant.settings.dropout_rate = std::stod(value);
      } else if (key == "label-smooth") {
        variant.settings.label_smoothing = std::stod(value);
      } else if (key == "early-stop") {
        EarlyStopping es;
        const size_t colon = value.find(':');
        es.patience = std::stoul(value.substr(0, colon));
        if (colon != std::string::npos) {
          es.validation_fraction = std::stod(value.substr(colon + 1));
        }
        variant.settings.early_stopping = es;
      } else if (key == "dp") {
        const size_t comma = value.find(',');
        if (comma == std::string::npos) {
          throw std::invalid_argument("dp needs <C>,<sigma>");
        }
        DpParams dp;
        dp.clip_norm = std::stod(value.substr(0, comma));
        dp.noise_multiplier = std::stod(value.substr(comma + 1));
        variant.settings.dp = dp;
      } else {
        throw std::invalid_argument("unknown defense '" + key + "'");
      }
    } catch (const std::logic_error& e) {
      throw std::invalid_argument("bad defense '" + part + "': " + e.what());
    }
  }
  return variant;
}

TrainConfig ApplyDefense(const TrainConfig& base, const DefenseSettings& d) {
  TrainConfig t = base;
  t.l2_lambda = d.l2_lambda;
  t.dropout_rate = d.dropout_rate;
  t.label_smoothing = d.label_smoothing;
  t.early_stopping = d.early_stopping;
  t.dp = d.dp;
  return t;
}

DefenseComparison CompareDefenses(const ExperimentConfig& base,
                                  const std::vector<DefenseVariant>& variants,
                                  bool parallel) {
  base.Validate();
  const Dataset dataset = LoadExperimentDataset(base);
  const DataSplit split =
      Split(dataset, base.n_member, base.n_nonmember, base.split_seed);

  std::vector<ExperimentConfig> configs;
  for (const DefenseVariant& v : variants) {
    ExperimentConfig c = base;
    c.name = v.name;
    c.train = ApplyDefense(base.train, v.settings);
    c.Validate();
    configs.push_back(std::move(c));
  }

  DefenseComparison comparison;
  comparison.kind = base.attacks.front();
  if (parallel) {
    std::vector<std::future<ExperimentRun>> futures;
    for (const auto& c : configs) {
      futures.push_back(std::async(std::launch::async, [&dataset, &split, &c] {
        return RunExperiment(c, dataset, split);
      }));
    }
    for (auto& f : futures) comparison.runs.push_back(f.get());
  } else {
    for (const auto& c : configs) {
      comparison.runs.push_back(RunExperiment(c, dataset, split));
    }
  }

  for (size_t k = 0; k < comparison.runs.size(); ++k) {
    const ReportDocument& r = comparison.runs[k].report;
    DefenseRow row;
    row.name = variants[k].name;
    row.valid = r.valid;
    row.train_accuracy = r.train_accuracy;
    row.test_accuracy = r.test_accuracy;
    row.runtime_seconds = r.runtime_seconds;
    if (!r.attacks.empty()) {
      row.auc = r.attacks.front().auc;
      row.advantage = r.attacks.front().advantage;
    }
    comparison.rows.push_back(row);
  }
  return comparison;
}

ExclusionResult ExcludeAndRetrain(const ExperimentConfig& config,
                                  double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("alpha must be in (0, 1)");
  }
  ExclusionResult result;
  result.alpha = alpha;
  result.before = RunExperiment(config);
  if (!result.before.report.valid) {
    throw std::runtime_error("baseline run failed: " +
                             result.before.report.error);
  }
  result.excluded = VulnerableUnion(result.before.scores, alpha);
  const auto& noisy = result.before.dataset.noisy_indices;
  result.excluded_noisy = Intersect(result.excluded, noisy).size();

  if (result.excluded.empty()) {
    result.notice = "no vulnerable members at FPR " + std::to_string(alpha) +
                    "; retraining skipped";
    result.after = result.before;
    result.after.report.notices.push_back(result.notice);
    return result;
  }

  DataSplit split = result.before.split;
  split.member_indices = Difference(split.member_indices, result.excluded);
  split.nonmember_indices = Union(split.nonmember_indices, result.excluded);
  result.after = RunExperiment(config, result.before.dataset, split);
  result.retrained = true;
  if (result.after.report.valid) {
    result.new_vulnerable =
        Difference(VulnerableUnion(result.after.scores, alpha),
                   VulnerableUnion(result.before.scores, alpha));
  }
  return result;
}

std::vector<std::filesystem::path> ExportReport(
    const ExperimentRun& run, const std::filesystem::path& dir) {
  CheckWritableDirectory(dir);
  std::vector<std::filesystem::path> files;

  files.push_back(WriteFile(dir / "history.csv", [&](std::ostream& out) {
    WriteHistoryCsv(run.training.history, out);
  }));
  if (run.report.valid) {
    files.push_back(WriteFile(dir / "model.ckpt", [&](std::ostream& out) {
      WriteModel(run.training.model, out);
    }));
  }
  for (size_t a = 0; a < run.scores.size(); ++a) {
    const std::string kind(AttackKindName(run.scores[a].kind));
    files.push_back(WriteFile(dir / ("roc_" + kind + ".csv"),
                              [&](std::ostream& out) {
                                WriteRocCsv(run.rocs[a], out);
                              }));
    files.push_back(WriteFile(dir / ("hist_" + kind + ".csv"),
                              [&](std::ostream& out) {
                                WriteHistogramCsv(run.histograms[a], out);
                              }));
    files.push_back(WriteFile(dir / ("scores_" + kind + ".csv"),
                              [&](std::ostream& out) {
                                WriteScoresCsv(run.scores[a], out);
                              }));
  }
  for (const SnapshotSummary& s : run.report.snapshots) {
    files.push_back(WriteFile(
        dir / ("hist_scaled-logit_epoch" + std::to_string(s.epoch) + ".csv"),
        [&](std::ostream& out) { WriteHistogramCsv(s.histogram, out); }));
  }
  if (!run.projection.empty()) {
    files.push_back(WriteFile(dir / "projection.csv", [&](std::ostream& out) {
      out << "index,x,y,class,is_vulnerable\n";
      for (const ProjectionRow& p : run.projection) {
        out << p.index << ',' << nlohmann::json(p.x).dump() << ','
            << nlohmann::json(p.y).dump() << ',' << p.label << ','
            << (p.is_vulnerable ? 1 : 0) << '\n';
      }
    }));
  }
  if (!run.outlier_scores.empty()) {
    const std::set<size_t> noisy(run.dataset.noisy_indices.begin(),
                                 run.dataset.noisy_indices.end());
    files.push_back(WriteFile(dir / "outliers.csv", [&](std::ostream& out) {
      out << "index,label,is_member,is_noisy,outlier_score\n";
      for (size_t i = 0; i < run.records.size(); ++i) {
        const auto& r = run.records[i];
        out << r.index << ',' << r.label << ',' << (r.is_member ? 1 : 0) << ','
            << (noisy.count(r.index) ? 1 : 0) << ','
            << nlohmann::json(run.outlier_scores[i]).dump() << '\n';
      }
    }));
  }
  if (run.analysis_centroids) {
    files.push_back(WriteFile(dir / "centroids.json", [&](std::ostream& out) {
      out << CentroidTableToJson(*run.analysis_centroids) << '\n';
    }));
  }
  if (run.defense_centroids) {
    files.push_back(
        WriteFile(dir / "defense_centroids.json", [&](std::ostream& out) {
          out << CentroidTableToJson(*run.defense_centroids) << '\n';
        }));
  }

  const auto tmp = dir / "report.json.tmp";
  WriteFile(tmp, [&](std::ostream& out) {
    out << ToJson(run.report).dump(2) << '\n';
  });
  std::filesystem::rename(tmp, dir / "report.json");
  files.push_back(dir / "report.json");
  return files;
}

}  // namespace mia
