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


// End-to-end experiment pipelines: train, attack, measure leakage, track
// scaled-logit histograms across epochs, characterise vulnerable members,
// apply the reweighting defense, compare training-time defenses and retrain
// after excluding vulnerable members.

#ifndef MIA_HARNESS_H_
#define MIA_HARNESS_H_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mia/attacks.h"
#include "mia/data.h"
#include "mia/geometry.h"
#include "mia/metrics.h"
#include "mia/train.h"

namespace mia {

inline constexpr int kReportSchemaVersion = 1;

struct DatasetSource {
  enum class Kind { kSynthetic, kCsv };
  Kind kind = Kind::kSynthetic;
  SyntheticSpec synthetic;
  std::string csv_path;
};

struct ExperimentConfig {
  std::string name = "experiment";
  DatasetSource dataset;
  size_t n_member = 1000;
  size_t n_nonmember = 1000;
  uint64_t split_seed = 0;
  TrainConfig train;
  std::vector<AttackKind> attacks = {AttackKind::kLoss, AttackKind::kEntropy};
  std::vector<double> fpr_levels = {0.01, 0.005};
  std::optional<ReweightConfig> reweight;
  std::vector<size_t> snapshot_epochs;
  size_t histogram_bins = 40;
  std::string output_dir = "mia_out";

  // Throws std::invalid_argument naming the offending field.
  void Validate() const;
};

// The desk-scale overfitting setup: 20 classes of 200 binary features, 50
// members and 50 non-members per class, 10% planted label noise, no defenses.
ExperimentConfig DefaultExperimentConfig();

nlohmann::json ToJson(const ExperimentConfig& config);
// Missing keys keep their DefaultExperimentConfig() values.
ExperimentConfig ExperimentConfigFromJson(const nlohmann::json& j);

struct SnapshotSummary {
  size_t epoch = 0;
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
  double auc = 0.5;
  double advantage = 0.0;
  Histogram histogram;  // scaled-logit scores
};

struct OverlapEntry {
  double alpha = 0.0;
  AttackKind first = AttackKind::kLoss;
  AttackKind second = AttackKind::kLoss;
  size_t first_count = 0;
  size_t second_count = 0;
  size_t intersection = 0;
};

// Centroid-distance statistics of one attack's vulnerable set.
struct OutlierSummary {
  AttackKind kind = AttackKind::kLoss;
  double alpha = 0.0;
  size_t vulnerable_count = 0;
  size_t vulnerable_noisy_count = 0;
  double mean_vulnerable = 0.0;
  double mean_all_members = 0.0;
  double mean_noisy_members = 0.0;
  double mean_clean_members = 0.0;
  // One-sided Welch test of mean_vulnerable > mean_all_members.
  double welch_t = 0.0;
  double welch_p = 1.0;
};

struct DefenseSide {
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
  double overhead_seconds = 0.0;
  std::vector<MiaReport> attacks;
};

struct DefenseBlock {
  ReweightConfig config;
  bool applied = false;
  std::string notice;
  DefenseSide before;
  DefenseSide after;
};

struct YeomSummary {
  double mean_train_loss = 0.0;
  double tpr = 0.0;
  double fpr = 0.0;
  double advantage = 0.0;
};

struct ReportDocument {
  int schema_version = kReportSchemaVersion;
  bool valid = true;
  std::string error;
  nlohmann::json config;
  std::string dataset_name;
  size_t num_samples = 0;
  size_t feature_dim = 0;
  size_t num_classes = 0;
  size_t num_noisy = 0;
  size_t num_members = 0;     // used for training
  size_t num_validation = 0;  // held out of the members for early stopping
  size_t num_nonmembers = 0;
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
  double runtime_seconds = 0.0;
  size_t epochs_run = 0;
  size_t selected_epoch = 0;
  bool stopped_early = false;
  double max_clipped_grad_norm = 0.0;
  std::vector<MiaReport> attacks;
  YeomSummary yeom;
  std::vector<SnapshotSummary> snapshots;
  std::vector<OverlapEntry> vulnerable_overlap;
  std::vector<OutlierSummary> outliers;
  std::optional<DefenseBlock> defense;
  std::vector<std::string> notices;
};

nlohmann::json ToJson(const ReportDocument& report);
ReportDocument ReportFromJson(const nlohmann::json& j);
// Sorted list of the top-level keys every report carries.
std::vector<std::string> ReportFieldNames();
// Returns a description of the first schema violation, or "" if valid.
std::string ValidateReportJson(const nlohmann::json& j);
// Copy of the report JSON with wall-clock fields zeroed.
nlohmann::json WithoutRuntimes(const nlohmann::json& report);

struct ProjectionRow {
  size_t index = 0;
  double x = 0.0;
  double y = 0.0;
  size_t label = 0;
  bool is_vulnerable = false;
};

// Everything one run produced; the report plus in-memory sidecar data.
struct ExperimentRun {
  ReportDocument report;
  Dataset dataset;
  DataSplit split;
  TrainResult training;
  std::vector<PredictionRecord> records;  // trained members, then non-members
  std::vector<AttackScores> scores;       // parallel to report.attacks
  std::vector<RocCurve> rocs;
  std::vector<Histogram> histograms;
  std::vector<double> outlier_scores;  // parallel to records
  std::vector<ProjectionRow> projection;
  std::optional<CentroidTable> analysis_centroids;  // by true label
  std::optional<CentroidTable> defense_centroids;   // by predicted label
  std::vector<PredictionRecord> defended_records;
  // Union across attacks at fpr_levels[0].
  std::vector<size_t> vulnerable_union;
};

Dataset LoadExperimentDataset(const ExperimentConfig& config);

// Loads the dataset, splits, trains and evaluates. A TrainingError yields a
// report with valid == false and the partial history; other errors throw.
ExperimentRun RunExperiment(const ExperimentConfig& config);
// Same pipeline on an explicit dataset and split.
ExperimentRun RunExperiment(const ExperimentConfig& config,
                            const Dataset& dataset, const DataSplit& split);

// Defense knobs a comparison row may change.
struct DefenseSettings {
  double l2_lambda = 0.0;
  double dropout_rate = 0.0;
  double label_smoothing = 0.0;
  std::optional<EarlyStopping> early_stopping;
  std::optional<DpParams> dp;
};

struct DefenseVariant {
  std::string name;
  DefenseSettings settings;
};

// Parses "original", "l2=<v>", "dropout=<r>", "label-smooth=<e>",
// "early-stop=<patience>", "dp=<C>,<sigma>"; several may be joined with '+'
// (e.g. "l2=5e-4+dropout=0.25").
DefenseVariant ParseDefenseVariant(const std::string& text);
TrainConfig ApplyDefense(const TrainConfig& base, const DefenseSettings& d);

struct DefenseRow {
  std::string name;
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
  double runtime_seconds = 0.0;
  double auc = 0.5;       // first configured attack
  double advantage = 0.0;
  bool valid = true;
};

struct DefenseComparison {
  AttackKind kind = AttackKind::kLoss;
  std::vector<DefenseRow> rows;
  std::vector<ExperimentRun> runs;
};

// Every row trains on the identical dataset and split. Rows are independent
// and run concurrently when `parallel` is set; results do not depend on it.
DefenseComparison CompareDefenses(const ExperimentConfig& base,
                                  const std::vector<DefenseVariant>& variants,
                                  bool parallel = true);

struct ExclusionResult {
  double alpha = 0.0;
  ExperimentRun before;
  ExperimentRun after;
  bool retrained = false;
  std::string notice;
  std::vector<size_t> excluded;
  // Vulnerable (union across attacks at alpha) after retraining but not
  // before.
  std::vector<size_t> new_vulnerable;
  size_t excluded_noisy = 0;
};

ExclusionResult ExcludeAndRetrain(const ExperimentConfig& config,
                                  double alpha);

// Writes report.json plus history.csv, roc_*.csv, hist_*.csv, scores_*.csv,
// projection.csv and model.ckpt into `dir`; returns the paths written.
// Throws before touching report.json if the directory is unusable.
std::vector<std::filesystem::path> ExportReport(
    const ExperimentRun& run, const std::filesystem::path& dir);

// Fixed-width table in the style of a defense-comparison table.
std::string FormatDefenseTable(const DefenseComparison& comparison);
std::string FormatReportSummary(const ReportDocument& report);

}  // namespace mia

#endif  // MIA_HARNESS_H_
