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


// Command-line front end for the membership-inference experiment harness.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mia/checkpoint.h"
#include "mia/harness.h"

namespace {

struct CommonOptions {
  std::string config_path;
  std::optional<uint64_t> seed;
  std::string out;
  std::string dataset;
  std::string attacks;
  std::string fpr;
  std::vector<std::string> defenses;
  std::optional<std::string> reweight;
  bool reweight_flag = false;
  std::optional<size_t> epochs;
};

std::vector<std::string> SplitList(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

mia::ReweightConfig ParseReweight(const std::string& text) {
  mia::ReweightConfig cfg = *mia::DefaultExperimentConfig().reweight;
  for (const std::string& part : SplitList(text, ',')) {
    if (part == "no-preserve-argmax") {
      cfg.preserve_argmax = false;
    } else if (part.rfind("floor=", 0) == 0) {
      cfg.weight_floor = std::stod(part.substr(6));
    } else if (part.rfind("sharpness=", 0) == 0) {
      cfg.sharpness = std::stod(part.substr(10));
    } else {
      throw std::invalid_argument("unknown --reweight option '" + part + "'");
    }
  }
  cfg.Validate();
  return cfg;
}

void AddCommonOptions(CLI::App* app, CommonOptions& opts) {
  app->add_option("--config", opts.config_path, "JSON experiment config");
  app->add_option("--seed", opts.seed,
                  "Seed for data generation, split and training");
  app->add_option("--out", opts.out, "Output directory");
  app->add_option("--dataset", opts.dataset, "csv:<path> or synthetic");
  app->add_option("--attacks", opts.attacks,
                  "Comma list of loss,entropy,confidence,scaled-logit");
  app->add_option("--fpr", opts.fpr, "Comma list of FPR levels, e.g. 0.01");
  app->add_option("--defense", opts.defenses,
                  "l2=<v>|dropout=<r>|label-smooth=<e>|early-stop=<p>|"
                  "dp=<C>,<sigma>; join with '+'");
  app->add_option("--epochs", opts.epochs, "Override training epochs");
  app->add_option("--reweight", opts.reweight,
                  "Logit reweighting: [floor=<f>][,sharpness=<s>]"
                  "[,no-preserve-argmax]")
      ->expected(0, 1);
}

mia::ExperimentConfig BuildConfig(const CommonOptions& opts,
                                  bool apply_defenses) {
  mia::ExperimentConfig config = mia::DefaultExperimentConfig();
  if (!opts.config_path.empty()) {
    std::ifstream in(opts.config_path);
    if (!in) throw std::runtime_error("cannot open " + opts.config_path);
    config = mia::ExperimentConfigFromJson(nlohmann::json::parse(in));
  }
  if (opts.seed) {
    config.dataset.synthetic.seed = *opts.seed;
    config.split_seed = *opts.seed + 1;
    config.train.seed = *opts.seed + 2;
  }
  if (!opts.out.empty()) config.output_dir = opts.out;
  if (!opts.dataset.empty()) {
    if (opts.dataset == "synthetic") {
      config.dataset.kind = mia::DatasetSource::Kind::kSynthetic;
    } else if (opts.dataset.rfind("csv:", 0) == 0) {
      config.dataset.kind = mia::DatasetSource::Kind::kCsv;
      config.dataset.csv_path = opts.dataset.substr(4);
    } else {
      throw std::invalid_argument("--dataset must be csv:<path> or synthetic");
    }
  }
  if (!opts.attacks.empty()) {
    config.attacks.clear();
    for (const auto& name : SplitList(opts.attacks, ',')) {
      config.attacks.push_back(mia::ParseAttackKind(name));
    }
  }
  if (!opts.fpr.empty()) {
    config.fpr_levels.clear();
    for (const auto& v : SplitList(opts.fpr, ',')) {
      config.fpr_levels.push_back(std::stod(v));
    }
  }
  if (opts.epochs) {
    config.train.epochs = *opts.epochs;
    std::erase_if(config.snapshot_epochs,
                  [&](size_t e) { return e > *opts.epochs; });
  }
  if (opts.reweight_flag) {
    config.reweight = ParseReweight(opts.reweight.value_or(""));
  }
  if (apply_defenses) {
    mia::DefenseSettings merged;
    for (const auto& d : opts.defenses) {
      const mia::DefenseSettings s = mia::ParseDefenseVariant(d).settings;
      if (s.l2_lambda != 0.0) merged.l2_lambda = s.l2_lambda;
      if (s.dropout_rate != 0.0) merged.dropout_rate = s.dropout_rate;
      if (s.label_smoothing != 0.0) merged.label_smoothing = s.label_smoothing;
      if (s.early_stopping) merged.early_stopping = s.early_stopping;
      if (s.dp) merged.dp = s.dp;
    }
    if (!opts.defenses.empty()) {
      config.train = mia::ApplyDefense(config.train, merged);
    }
  }
  config.Validate();
  return config;
}

void PrintFiles(const std::vector<std::filesystem::path>& files) {
  for (const auto& f : files) std::cout << "wrote " << f.string() << '\n';
}

int RunTrain(const CommonOptions& opts) {
  const mia::ExperimentConfig config = BuildConfig(opts, true);
  const mia::Dataset dataset = mia::LoadExperimentDataset(config);
  const mia::DataSplit split = mia::Split(dataset, config.n_member,
                                          config.n_nonmember, config.split_seed);
  const mia::TrainResult result = mia::Train(dataset, split, config.train);
  const auto train_eval =
      mia::Evaluate(result.model, dataset, result.training_indices, true);
  const auto test_eval =
      mia::Evaluate(result.model, dataset, split.nonmember_indices, false);
  std::filesystem::create_directories(config.output_dir);
  const std::filesystem::path dir = config.output_dir;
  mia::SaveModel(result.model, dir / "model.ckpt");
  std::ofstream history(dir / "history.csv");
  mia::WriteHistoryCsv(result.history, history);
  std::printf("train acc %.2f%%  test acc %.2f%%  epochs %zu\n",
              100.0 * train_eval.accuracy, 100.0 * test_eval.accuracy,
              result.history.epochs.size());
  std::cout << "wrote " << (dir / "model.ckpt").string() << '\n'
            << "wrote " << (dir / "history.csv").string() << '\n';
  return 0;
}

int RunAttack(const CommonOptions& opts) {
  const mia::ExperimentConfig config = BuildConfig(opts, true);
  const mia::ExperimentRun run = mia::RunExperiment(config);
  std::cout << mia::FormatReportSummary(run.report);
  PrintFiles(mia::ExportReport(run, config.output_dir));
  return run.report.valid ? 0 : 2;
}

int RunCompare(const CommonOptions& opts) {
  const mia::ExperimentConfig config = BuildConfig(opts, false);
  std::vector<mia::DefenseVariant> variants = {
      mia::ParseDefenseVariant("original")};
  for (const auto& d : opts.defenses) {
    variants.push_back(mia::ParseDefenseVariant(d));
  }
  const mia::DefenseComparison comparison =
      mia::CompareDefenses(config, variants);
  const std::string table = mia::FormatDefenseTable(comparison);
  std::cout << table;
  const std::filesystem::path dir = config.output_dir;
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "defenses.txt") << table;
  for (size_t k = 0; k < comparison.runs.size(); ++k) {
    PrintFiles(mia::ExportReport(comparison.runs[k],
                                 dir / ("variant" + std::to_string(k))));
  }
  bool ok = true;
  for (const auto& row : comparison.rows) ok = ok && row.valid;
  return ok ? 0 : 2;
}

int RunExclude(const CommonOptions& opts, std::optional<double> alpha) {
  const mia::ExperimentConfig config = BuildConfig(opts, true);
  const double a = alpha.value_or(config.fpr_levels.front());
  const mia::ExclusionResult result = mia::ExcludeAndRetrain(config, a);
  std::cout << "== before ==\n" << mia::FormatReportSummary(result.before.report);
  std::cout << "== after ==\n" << mia::FormatReportSummary(result.after.report);
  std::cout << "excluded " << result.excluded.size() << " members ("
            << result.excluded_noisy << " planted noisy); "
            << result.new_vulnerable.size()
            << " members newly vulnerable after retraining\n";
  if (!result.notice.empty()) std::cout << "note: " << result.notice << '\n';
  const std::filesystem::path dir = config.output_dir;
  PrintFiles(mia::ExportReport(result.before, dir / "before"));
  PrintFiles(mia::ExportReport(result.after, dir / "after"));
  nlohmann::json summary = {{"alpha", a},
                            {"retrained", result.retrained},
                            {"notice", result.notice},
                            {"excluded", result.excluded},
                            {"excluded_noisy", result.excluded_noisy},
                            {"new_vulnerable", result.new_vulnerable}};
  std::ofstream(dir / "exclusion.json") << summary.dump(2) << '\n';
  return result.after.report.valid ? 0 : 2;
}

int RunReport(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  const nlohmann::json j = nlohmann::json::parse(in);
  const mia::ReportDocument report = mia::ReportFromJson(j);
  std::cout << mia::FormatReportSummary(report);
  return report.valid ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Membership-inference leakage toolkit"};
  app.require_subcommand(1);

  CommonOptions train_opts, attack_opts, compare_opts, exclude_opts;
  auto* train = app.add_subcommand("train", "Train a model and save it");
  AddCommonOptions(train, train_opts);
  auto* attack = app.add_subcommand(
      "attack", "Train, attack and write a leakage report");
  AddCommonOptions(attack, attack_opts);
  auto* compare = app.add_subcommand(
      "compare", "Compare training-time defenses on one split");
  AddCommonOptions(compare, compare_opts);
  auto* exclude = app.add_subcommand(
      "exclude-retrain", "Retrain after removing vulnerable members");
  AddCommonOptions(exclude, exclude_opts);
  std::optional<double> alpha;
  exclude->add_option("--alpha", alpha, "FPR level for the vulnerable set");
  auto* report = app.add_subcommand("report", "Summarise a saved report");
  std::string report_path;
  report->add_option("--in", report_path, "report.json to read")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    const std::pair<CLI::App*, CommonOptions*> commands[] = {
        {train, &train_opts},
        {attack, &attack_opts},
        {compare, &compare_opts},
        {exclude, &exclude_opts}};
    for (const auto& [cmd, opts] : commands) {
      opts->reweight_flag = cmd->count("--reweight") > 0;
    }
    if (*train) return RunTrain(train_opts);
    if (*attack) return RunAttack(attack_opts);
    if (*compare) return RunCompare(compare_opts);
    if (*exclude) return RunExclude(exclude_opts, alpha);
    if (*report) return RunReport(report_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
