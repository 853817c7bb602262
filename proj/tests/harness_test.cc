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

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace mia {
namespace {

namespace fs = std::filesystem;

ExperimentConfig SmallConfig() {
  ExperimentConfig c = DefaultExperimentConfig();
  c.name = "small";
  c.dataset.synthetic.num_classes = 5;
  c.dataset.synthetic.feature_dim = 40;
  c.dataset.synthetic.samples_per_class = 40;
  c.n_member = 100;
  c.n_nonmember = 100;
  c.train.hidden_widths = {32};
  c.train.epochs = 30;
  c.snapshot_epochs = {1, 30};
  c.fpr_levels = {0.05};
  return c;
}

size_t CountLines(const fs::path& path) {
  std::ifstream in(path);
  size_t lines = 0;
  std::string line;
  while (std::getline(in, line)) ++lines;
  return lines;
}

fs::path FreshDir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("mia_harness_test_" + name);
  fs::remove_all(dir);
  return dir;
}

TEST(HarnessTest, UntrainedModelLeaksNothing) {
  ExperimentConfig c = DefaultExperimentConfig();
  c.train.epochs = 0;
  c.snapshot_epochs.clear();
  ExperimentRun run = RunExperiment(c);
  ASSERT_TRUE(run.report.valid);
  for (const MiaReport& r : run.report.attacks) {
    EXPECT_NEAR(r.auc, 0.5, 0.05) << AttackKindName(r.kind);
  }
}

TEST(HarnessTest, RerunIsByteIdentical) {
  ExperimentConfig c = SmallConfig();
  const std::string a = WithoutRuntimes(ToJson(RunExperiment(c).report)).dump();
  const std::string b = WithoutRuntimes(ToJson(RunExperiment(c).report)).dump();
  EXPECT_EQ(a, b);
}

TEST(HarnessTest, ReportCoversEveryAttackAndSnapshot) {
  ExperimentRun run = RunExperiment(SmallConfig());
  const ReportDocument& r = run.report;
  EXPECT_EQ(r.attacks.size(), 4u);
  EXPECT_EQ(run.scores.size(), 4u);
  EXPECT_EQ(r.snapshots.size(), 2u);
  EXPECT_EQ(r.snapshots[0].epoch, 1u);
  EXPECT_EQ(r.outliers.size(), 4u);
  EXPECT_EQ(run.records.size(), r.num_members + r.num_nonmembers);
  EXPECT_EQ(run.outlier_scores.size(), run.records.size());
  ASSERT_TRUE(r.defense.has_value());
  // preserve_argmax keeps every prediction.
  EXPECT_EQ(r.defense->before.train_accuracy, r.defense->after.train_accuracy);
  EXPECT_EQ(r.defense->before.test_accuracy, r.defense->after.test_accuracy);
  for (const MiaReport& a : r.attacks) {
    EXPECT_GE(a.auc, 0.0);
    EXPECT_LE(a.auc, 1.0);
  }
}

TEST(HarnessTest, ReportJsonRoundTripsAndValidates) {
  ExperimentRun run = RunExperiment(SmallConfig());
  const nlohmann::json j = ToJson(run.report);
  EXPECT_EQ(ValidateReportJson(j), "");
  EXPECT_EQ(ToJson(ReportFromJson(j)), j);

  std::vector<std::string> keys;
  for (const auto& item : j.items()) keys.push_back(item.key());
  std::sort(keys.begin(), keys.end());
  EXPECT_EQ(keys, ReportFieldNames());

  nlohmann::json missing = j;
  missing.erase("attacks");
  EXPECT_NE(ValidateReportJson(missing), "");
  nlohmann::json extra = j;
  extra["surprise"] = 1;
  EXPECT_NE(ValidateReportJson(extra), "");
  nlohmann::json bad_auc = j;
  bad_auc["attacks"][0]["auc"] = 1.5;
  EXPECT_NE(ValidateReportJson(bad_auc), "");
}

TEST(HarnessTest, ConfigJsonRoundTrips) {
  ExperimentConfig c = SmallConfig();
  c.train.dp = DpParams{.clip_norm = 0.5, .noise_multiplier = 2.0};
  c.train.early_stopping = EarlyStopping{.patience = 4};
  const nlohmann::json j = ToJson(c);
  EXPECT_EQ(ToJson(ExperimentConfigFromJson(j)), j);
  // Missing keys fall back to the defaults.
  EXPECT_EQ(ToJson(ExperimentConfigFromJson(nlohmann::json::object())),
            ToJson(DefaultExperimentConfig()));
  ExperimentConfig bad = SmallConfig();
  bad.snapshot_epochs = {31};
  EXPECT_THROW(bad.Validate(), std::invalid_argument);
}

TEST(HarnessTest, DivergentTrainingGivesAnInvalidReport) {
  ExperimentConfig c = SmallConfig();
  Dataset d = LoadExperimentDataset(c);
  for (size_t i = 0; i < d.size(); ++i) d.features(i, 0) = 1e300;
  DataSplit split = Split(d, c.n_member, c.n_nonmember, c.split_seed);
  ExperimentRun run = RunExperiment(c, d, split);
  EXPECT_FALSE(run.report.valid);
  EXPECT_NE(run.report.error.find("epoch"), std::string::npos);
  EXPECT_EQ(ValidateReportJson(ToJson(run.report)), "");
}

TEST(ExportTest, WritesEveryArtifact) {
  ExperimentRun run = RunExperiment(SmallConfig());
  const fs::path dir = FreshDir("export");
  std::vector<fs::path> files = ExportReport(run, dir);
  EXPECT_EQ(files.back().filename(), "report.json");
  for (const fs::path& f : files) EXPECT_TRUE(fs::exists(f)) << f;

  EXPECT_EQ(CountLines(dir / "history.csv"), 31u);
  EXPECT_EQ(CountLines(dir / "scores_loss.csv"), run.records.size() + 1);
  EXPECT_EQ(CountLines(dir / "roc_loss.csv"), run.rocs[0].size() + 1);
  EXPECT_EQ(CountLines(dir / "hist_loss.csv"), 41u);
  EXPECT_EQ(CountLines(dir / "projection.csv"), run.projection.size() + 1);
  EXPECT_TRUE(fs::exists(dir / "model.ckpt"));

  std::ifstream in(dir / "report.json");
  const nlohmann::json j = nlohmann::json::parse(in);
  EXPECT_EQ(ValidateReportJson(j), "");
  EXPECT_EQ(j, ToJson(run.report));
  fs::remove_all(dir);
}

TEST(ExportTest, UnusableDirectoryFailsBeforeTheReport) {
  ExperimentRun run = RunExperiment(SmallConfig());
  const fs::path base = FreshDir("blocked");
  fs::create_directories(base);
  std::ofstream(base / "file") << "x";
  const fs::path dir = base / "file" / "out";
  EXPECT_THROW(ExportReport(run, dir), std::exception);
  EXPECT_FALSE(fs::exists(dir / "report.json"));
  fs::remove_all(base);
}

TEST(DefenseVariantTest, Parses) {
  EXPECT_EQ(ParseDefenseVariant("original").settings.l2_lambda, 0.0);
  DefenseVariant v = ParseDefenseVariant("l2=5e-3+dropout=0.25");
  EXPECT_EQ(v.name, "l2=5e-3+dropout=0.25");
  EXPECT_EQ(v.settings.l2_lambda, 5e-3);
  EXPECT_EQ(v.settings.dropout_rate, 0.25);
  DefenseVariant dp = ParseDefenseVariant("dp=1.5,0.8");
  ASSERT_TRUE(dp.settings.dp.has_value());
  EXPECT_EQ(dp.settings.dp->clip_norm, 1.5);
  EXPECT_EQ(dp.settings.dp->noise_multiplier, 0.8);
  DefenseVariant es = ParseDefenseVariant("early-stop=7:0.2");
  ASSERT_TRUE(es.settings.early_stopping.has_value());
  EXPECT_EQ(es.settings.early_stopping->patience, 7u);
  EXPECT_EQ(es.settings.early_stopping->validation_fraction, 0.2);
  EXPECT_EQ(ParseDefenseVariant("label-smooth=0.1").settings.label_smoothing,
            0.1);
  EXPECT_THROW(ParseDefenseVariant("magic=1"), std::invalid_argument);
  EXPECT_THROW(ParseDefenseVariant("dp=1"), std::invalid_argument);
}

TEST(CompareTest, OriginalRowMatchesAPlainRun) {
  ExperimentConfig c = SmallConfig();
  DefenseComparison cmp =
      CompareDefenses(c, {ParseDefenseVariant("original")});
  ASSERT_EQ(cmp.rows.size(), 1u);
  ExperimentRun run = RunExperiment(c);
  EXPECT_EQ(cmp.rows[0].auc, run.report.attacks[0].auc);
  EXPECT_EQ(cmp.rows[0].advantage, run.report.attacks[0].advantage);
  EXPECT_EQ(cmp.rows[0].train_accuracy, run.report.train_accuracy);
  EXPECT_NE(FormatDefenseTable(cmp).find("MIA AUC"), std::string::npos);
}

TEST(CompareTest, ParallelAndSequentialAgree) {
  ExperimentConfig c = SmallConfig();
  c.train.epochs = 10;
  c.snapshot_epochs = {};
  const std::vector<DefenseVariant> variants = {
      ParseDefenseVariant("original"), ParseDefenseVariant("l2=1e-2"),
      ParseDefenseVariant("dp=1,1")};
  DefenseComparison a = CompareDefenses(c, variants, true);
  DefenseComparison b = CompareDefenses(c, variants, false);
  ASSERT_EQ(a.rows.size(), 3u);
  for (size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(a.rows[i].name, b.rows[i].name);
    EXPECT_EQ(a.rows[i].auc, b.rows[i].auc);
    EXPECT_EQ(a.rows[i].train_accuracy, b.rows[i].train_accuracy);
    // Every row sees the same split.
    EXPECT_EQ(a.runs[i].split.member_indices, a.runs[0].split.member_indices);
  }
}

TEST(ExclusionTest, MovesExcludedMembersToTheNonmemberSide) {
  ExperimentConfig c = SmallConfig();
  ExclusionResult r = ExcludeAndRetrain(c, 0.05);
  const std::set<size_t> members(r.after.split.member_indices.begin(),
                                 r.after.split.member_indices.end());
  const std::set<size_t> nonmembers(r.after.split.nonmember_indices.begin(),
                                    r.after.split.nonmember_indices.end());
  EXPECT_EQ(r.excluded, r.before.vulnerable_union);
  for (size_t i : r.excluded) {
    EXPECT_FALSE(members.count(i));
    EXPECT_TRUE(nonmembers.count(i));
  }
  EXPECT_EQ(members.size() + r.excluded.size(),
            r.before.split.member_indices.size());
  EXPECT_EQ(r.retrained, !r.excluded.empty());
  for (size_t i : r.new_vulnerable) {
    EXPECT_TRUE(std::find(r.excluded.begin(), r.excluded.end(), i) ==
                r.excluded.end());
  }
  EXPECT_THROW(ExcludeAndRetrain(c, 0.0), std::invalid_argument);
}

}  // namespace
}  // namespace mia
