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


// JSON forms of experiment configs and reports, plus text summaries.

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "mia/harness.h"

namespace mia {
namespace {

using nlohmann::json;

std::string AlphaKey(double alpha) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), alpha);
  return std::string(buf, end);
}

double ParseAlphaKey(const std::string& key) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), v);
  if (ec != std::errc() || ptr != key.data() + key.size()) {
    throw std::invalid_argument("bad FPR key '" + key + "'");
  }
  return v;
}

json ToJson(const Histogram& h) {
  return {{"edges", h.edges},
          {"member_counts", h.member_counts},
          {"nonmember_counts", h.nonmember_counts}};
}

Histogram HistogramFromJson(const json& j) {
  Histogram h;
  h.edges = j.at("edges").get<std::vector<double>>();
  h.member_counts = j.at("member_counts").get<std::vector<size_t>>();
  h.nonmember_counts = j.at("nonmember_counts").get<std::vector<size_t>>();
  return h;
}

json ToJson(const MiaReport& r) {
  json tpr = json::object();
  for (const auto& [alpha, v] : r.tpr_at_fpr) tpr[AlphaKey(alpha)] = v;
  json vuln = json::object();
  for (const auto& [alpha, ids] : r.vulnerable_member_indices) {
    vuln[AlphaKey(alpha)] = ids;
  }
  return {{"kind", std::string(AttackKindName(r.kind))},
          {"auc", r.auc},
          {"advantage", r.advantage},
          {"tpr_at_fpr", tpr},
          {"vulnerable_member_indices", vuln}};
}

MiaReport MiaReportFromJson(const json& j) {
  MiaReport r;
  r.kind = ParseAttackKind(j.at("kind").get<std::string>());
  r.auc = j.at("auc").get<double>();
  r.advantage = j.at("advantage").get<double>();
  for (const auto& [key, v] : j.at("tpr_at_fpr").items()) {
    r.tpr_at_fpr[ParseAlphaKey(key)] = v.get<double>();
  }
  for (const auto& [key, v] : j.at("vulnerable_member_indices").items()) {
    r.vulnerable_member_indices[ParseAlphaKey(key)] =
        v.get<std::vector<size_t>>();
  }
  return r;
}

json ToJson(const ReweightConfig& c) {
  return {{"weight_floor", c.weight_floor},
          {"preserve_argmax", c.preserve_argmax},
          {"sharpness", c.sharpness}};
}

ReweightConfig ReweightFromJson(const json& j) {
  ReweightConfig c;
  c.weight_floor = j.value("weight_floor", c.weight_floor);
  c.preserve_argmax = j.value("preserve_argmax", c.preserve_argmax);
  c.sharpness = j.value("sharpness", c.sharpness);
  return c;
}

json ToJson(const DefenseSide& s) {
  json attacks = json::array();
  for (const auto& a : s.attacks) attacks.push_back(ToJson(a));
  return {{"train_accuracy", s.train_accuracy},
          {"test_accuracy", s.test_accuracy},
          {"overhead_seconds", s.overhead_seconds},
          {"attacks", attacks}};
}

DefenseSide DefenseSideFromJson(const json& j) {
  DefenseSide s;
  s.train_accuracy = j.at("train_accuracy").get<double>();
  s.test_accuracy = j.at("test_accuracy").get<double>();
  s.overhead_seconds = j.at("overhead_seconds").get<double>();
  for (const auto& a : j.at("attacks")) s.attacks.push_back(MiaReportFromJson(a));
  return s;
}

json Metadata() {
  return {
      {"optimizer", "plain mini-batch SGD, constant learning rate, no momentum"},
      {"entropy_log", "natural"},
      {"auc_tie_rule",
       "tied scores form one ROC point; pairwise ties credited 1/2"},
      {"tpr_at_fpr_rule",
       "most permissive threshold with FPR <= alpha; no interpolation"},
      {"reweight_weight", "w = clamp(cos(latent, centroid), floor, 1)^sharpness"},
      {"reweight_scope", "training members and non-members"},
      {"dp_accounting",
       "epsilon is not computed; clip norm, noise multiplier and delta are "
       "reported as configured"},
      {"vulnerable_union", "union across configured attacks at the first FPR"},
  };
}

const char* kReportFields[] = {
    "schema_version", "valid",        "error",          "config",
    "dataset",        "split",        "train_accuracy", "test_accuracy",
    "runtime_seconds", "training",    "attacks",        "yeom",
    "snapshots",      "vulnerable_overlap", "outliers", "defense",
    "notices",        "metadata",
};

}  // namespace

json ToJson(const ExperimentConfig& c) {
  json dataset;
  if (c.dataset.kind == DatasetSource::Kind::kCsv) {
    dataset = {{"source", "csv"}, {"path", c.dataset.csv_path}};
  } else {
    const SyntheticSpec& s = c.dataset.synthetic;
    dataset = {{"source", "synthetic"},
               {"num_classes", s.num_classes},
               {"feature_dim", s.feature_dim},
               {"samples_per_class", s.samples_per_class},
               {"prototype_flip_rate", s.prototype_flip_rate},
               {"label_noise_fraction", s.label_noise_fraction},
               {"seed", s.seed}};
  }
  const TrainConfig& t = c.train;
  json train = {{"hidden_widths", t.hidden_widths},
                {"epochs", t.epochs},
                {"learning_rate", t.learning_rate},
                {"batch_size", t.batch_size},
                {"l2_lambda", t.l2_lambda},
                {"dropout_rate", t.dropout_rate},
                {"label_smoothing", t.label_smoothing},
                {"seed", t.seed},
                {"early_stopping", nullptr},
                {"dp", nullptr}};
  if (t.early_stopping) {
    train["early_stopping"] = {
        {"patience", t.early_stopping->patience},
        {"validation_fraction", t.early_stopping->validation_fraction}};
  }
  if (t.dp) {
    train["dp"] = {{"clip_norm", t.dp->clip_norm},
                   {"noise_multiplier", t.dp->noise_multiplier},
                   {"delta", t.dp->delta}};
  }
  json attacks = json::array();
  for (AttackKind k : c.attacks) attacks.push_back(std::string(AttackKindName(k)));
  return {{"name", c.name},
          {"dataset", dataset},
          {"split", {{"members", c.n_member},
                     {"nonmembers", c.n_nonmember},
                     {"seed", c.split_seed}}},
          {"train", train},
          {"attacks", attacks},
          {"fpr", c.fpr_levels},
          {"reweight", c.reweight ? ToJson(*c.reweight) : json(nullptr)},
          {"snapshot_epochs", c.snapshot_epochs},
          {"histogram_bins", c.histogram_bins},
          {"output_dir", c.output_dir}};
}

ExperimentConfig ExperimentConfigFromJson(const json& j) {
  ExperimentConfig c = DefaultExperimentConfig();
  c.name = j.value("name", c.name);
  if (j.contains("dataset")) {
    const json& d = j.at("dataset");
    const std::string source = d.value("source", std::string("synthetic"));
    if (source == "csv") {
      c.dataset.kind = DatasetSource::Kind::kCsv;
      c.dataset.csv_path = d.at("path").get<std::string>();
    } else if (source == "synthetic") {
      c.dataset.kind = DatasetSource::Kind::kSynthetic;
      SyntheticSpec& s = c.dataset.synthetic;
      s.num_classes = d.value("num_classes", s.num_classes);
      s.feature_dim = d.value("feature_dim", s.feature_dim);
      s.samples_per_class = d.value("samples_per_class", s.samples_per_class);
      s.prototype_flip_rate =
          d.value("prototype_flip_rate", s.prototype_flip_rate);
      s.label_noise_fraction =
          d.value("label_noise_fraction", s.label_noise_fraction);
      s.seed = d.value("seed", s.seed);
    } else {
      throw std::invalid_argument("unknown dataset source '" + source + "'");
    }
  }
  if (j.contains("split")) {
    const json& s = j.at("split");
    c.n_member = s.value("members", c.n_member);
    c.n_nonmember = s.value("nonmembers", c.n_nonmember);
    c.split_seed = s.value("seed", c.split_seed);
  }
  if (j.contains("train")) {
    const json& t = j.at("train");
    TrainConfig& tc = c.train;
    tc.hidden_widths = t.value("hidden_widths", tc.hidden_widths);
    tc.epochs = t.value("epochs", tc.epochs);
    tc.learning_rate = t.value("learning_rate", tc.learning_rate);
    tc.batch_size = t.value("batch_size", tc.batch_size);
    tc.l2_lambda = t.value("l2_lambda", tc.l2_lambda);
    tc.dropout_rate = t.value("dropout_rate", tc.dropout_rate);
    tc.label_smoothing = t.value("label_smoothing", tc.label_smoothing);
    tc.seed = t.value("seed", tc.seed);
    if (t.contains("early_stopping") && !t.at("early_stopping").is_null()) {
      const json& e = t.at("early_stopping");
      EarlyStopping es;
      es.patience = e.value("patience", es.patience);
      es.validation_fraction =
          e.value("validation_fraction", es.validation_fraction);
      tc.early_stopping = es;
    }
    if (t.contains("dp") && !t.at("dp").is_null()) {
      const json& d = t.at("dp");
      DpParams dp;
      dp.clip_norm = d.value("clip_norm", dp.clip_norm);
      dp.noise_multiplier = d.value("noise_multiplier", dp.noise_multiplier);
      dp.delta = d.value("delta", dp.delta);
      tc.dp = dp;
    }
  }
  if (j.contains("attacks")) {
    c.attacks.clear();
    for (const auto& a : j.at("attacks")) {
      c.attacks.push_back(ParseAttackKind(a.get<std::string>()));
    }
  }
  if (j.contains("fpr")) c.fpr_levels = j.at("fpr").get<std::vector<double>>();
  if (j.contains("reweight")) {
    if (j.at("reweight").is_null()) {
      c.reweight.reset();
    } else {
      c.reweight = ReweightFromJson(j.at("reweight"));
    }
  }
  if (j.contains("snapshot_epochs")) {
    c.snapshot_epochs = j.at("snapshot_epochs").get<std::vector<size_t>>();
  }
  c.histogram_bins = j.value("histogram_bins", c.histogram_bins);
  c.output_dir = j.value("output_dir", c.output_dir);
  return c;
}

json ToJson(const ReportDocument& r) {
  json attacks = json::array();
  for (const auto& a : r.attacks) attacks.push_back(ToJson(a));
  json snapshots = json::array();
  for (const auto& s : r.snapshots) {
    snapshots.push_back({{"epoch", s.epoch},
                         {"train_accuracy", s.train_accuracy},
                         {"test_accuracy", s.test_accuracy},
                         {"auc", s.auc},
                         {"advantage", s.advantage},
                         {"histogram", ToJson(s.histogram)}});
  }
  json overlap = json::array();
  for (const auto& o : r.vulnerable_overlap) {
    overlap.push_back({{"alpha", o.alpha},
                       {"first", std::string(AttackKindName(o.first))},
                       {"second", std::string(AttackKindName(o.second))},
                       {"first_count", o.first_count},
                       {"second_count", o.second_count},
                       {"intersection", o.intersection}});
  }
  json outliers = json::array();
  for (const auto& o : r.outliers) {
    outliers.push_back({{"kind", std::string(AttackKindName(o.kind))},
                        {"alpha", o.alpha},
                        {"vulnerable_count", o.vulnerable_count},
                        {"vulnerable_noisy_count", o.vulnerable_noisy_count},
                        {"mean_vulnerable", o.mean_vulnerable},
                        {"mean_all_members", o.mean_all_members},
                        {"mean_noisy_members", o.mean_noisy_members},
                        {"mean_clean_members", o.mean_clean_members},
                        {"welch_t", o.welch_t},
                        {"welch_p", o.welch_p}});
  }
  json defense = nullptr;
  if (r.defense) {
    defense = {{"config", ToJson(r.defense->config)},
               {"applied", r.defense->applied},
               {"notice", r.defense->notice},
               {"before", ToJson(r.defense->before)},
               {"after", ToJson(r.defense->after)}};
  }
  return {{"schema_version", r.schema_version},
          {"valid", r.valid},
          {"error", r.error},
          {"config", r.config},
          {"dataset", {{"name", r.dataset_name},
                       {"num_samples", r.num_samples},
                       {"feature_dim", r.feature_dim},
                       {"num_classes", r.num_classes},
                       {"num_noisy", r.num_noisy}}},
          {"split", {{"members", r.num_members},
                     {"validation", r.num_validation},
                     {"nonmembers", r.num_nonmembers}}},
          {"train_accuracy", r.train_accuracy},
          {"test_accuracy", r.test_accuracy},
          {"runtime_seconds", r.runtime_seconds},
          {"training", {{"epochs_run", r.epochs_run},
                        {"selected_epoch", r.selected_epoch},
                        {"stopped_early", r.stopped_early},
                        {"max_clipped_grad_norm", r.max_clipped_grad_norm}}},
          {"attacks", attacks},
          {"yeom", {{"mean_train_loss", r.yeom.mean_train_loss},
                    {"tpr", r.yeom.tpr},
                    {"fpr", r.yeom.fpr},
                    {"advantage", r.yeom.advantage}}},
          {"snapshots", snapshots},
          {"vulnerable_overlap", overlap},
          {"outliers", outliers},
          {"defense", defense},
          {"notices", r.notices},
          {"metadata", Metadata()}};
}

ReportDocument ReportFromJson(const json& j) {
  if (const std::string problem = ValidateReportJson(j); !problem.empty()) {
    throw std::invalid_argument("invalid report: " + problem);
  }
  ReportDocument r;
  r.schema_version = j.at("schema_version").get<int>();
  r.valid = j.at("valid").get<bool>();
  r.error = j.at("error").get<std::string>();
  r.config = j.at("config");
  const json& d = j.at("dataset");
  r.dataset_name = d.at("name").get<std::string>();
  r.num_samples = d.at("num_samples").get<size_t>();
  r.feature_dim = d.at("feature_dim").get<size_t>();
  r.num_classes = d.at("num_classes").get<size_t>();
  r.num_noisy = d.at("num_noisy").get<size_t>();
  const json& s = j.at("split");
  r.num_members = s.at("members").get<size_t>();
  r.num_validation = s.at("validation").get<size_t>();
  r.num_nonmembers = s.at("nonmembers").get<size_t>();
  r.train_accuracy = j.at("train_accuracy").get<double>();
  r.test_accuracy = j.at("test_accuracy").get<double>();
  r.runtime_seconds = j.at("runtime_seconds").get<double>();
  const json& t = j.at("training");
  r.epochs_run = t.at("epochs_run").get<size_t>();
  r.selected_epoch = t.at("selected_epoch").get<size_t>();
  r.stopped_early = t.at("stopped_early").get<bool>();
  r.max_clipped_grad_norm = t.at("max_clipped_grad_norm").get<double>();
  for (const auto& a : j.at("attacks")) r.attacks.push_back(MiaReportFromJson(a));
  const json& y = j.at("yeom");
  r.yeom = {y.at("mean_train_loss").get<double>(), y.at("tpr").get<double>(),
            y.at("fpr").get<double>(), y.at("advantage").get<double>()};
  for (const auto& sj : j.at("snapshots")) {
    SnapshotSummary snap;
    snap.epoch = sj.at("epoch").get<size_t>();
    snap.train_accuracy = sj.at("train_accuracy").get<double>();
    snap.test_accuracy = sj.at("test_accuracy").get<double>();
    snap.auc = sj.at("auc").get<double>();
    snap.advantage = sj.at("advantage").get<double>();
    snap.histogram = HistogramFromJson(sj.at("histogram"));
    r.snapshots.push_back(std::move(snap));
  }
  for (const auto& oj : j.at("vulnerable_overlap")) {
    OverlapEntry o;
    o.alpha = oj.at("alpha").get<double>();
    o.first = ParseAttackKind(oj.at("first").get<std::string>());
    o.second = ParseAttackKind(oj.at("second").get<std::string>());
    o.first_count = oj.at("first_count").get<size_t>();
    o.second_count = oj.at("second_count").get<size_t>();
    o.intersection = oj.at("intersection").get<size_t>();
    r.vulnerable_overlap.push_back(o);
  }
  for (const auto& oj : j.at("outliers")) {
    OutlierSummary o;
    o.kind = ParseAttackKind(oj.at("kind").get<std::string>());
    o.alpha = oj.at("alpha").get<double>();
    o.vulnerable_count = oj.at("vulnerable_count").get<size_t>();
    o.vulnerable_noisy_count = oj.at("vulnerable_noisy_count").get<size_t>();
    o.mean_vulnerable = oj.at("mean_vulnerable").get<double>();
    o.mean_all_members = oj.at("mean_all_members").get<double>();
    o.mean_noisy_members = oj.at("mean_noisy_members").get<double>();
    o.mean_clean_members = oj.at("mean_clean_members").get<double>();
    o.welch_t = oj.at("welch_t").get<double>();
    o.welch_p = oj.at("welch_p").get<double>();
    r.outliers.push_back(o);
  }
  if (!j.at("defense").is_null()) {
    const json& dj = j.at("defense");
    DefenseBlock block;
    block.config = ReweightFromJson(dj.at("config"));
    block.applied = dj.at("applied").get<bool>();
    block.notice = dj.at("notice").get<std::string>();
    block.before = DefenseSideFromJson(dj.at("before"));
    block.after = DefenseSideFromJson(dj.at("after"));
    r.defense = std::move(block);
  }
  r.notices = j.at("notices").get<std::vector<std::string>>();
  return r;
}

std::vector<std::string> ReportFieldNames() {
  std::vector<std::string> names(std::begin(kReportFields),
                                 std::end(kReportFields));
  std::sort(names.begin(), names.end());
  return names;
}

std::string ValidateReportJson(const json& j) {
  if (!j.is_object()) return "report is not an object";
  for (const char* field : kReportFields) {
    if (!j.contains(field)) return std::string("missing field '") + field + "'";
  }
  for (const auto& [key, value] : j.items()) {
    if (std::find(std::begin(kReportFields), std::end(kReportFields), key) ==
        std::end(kReportFields)) {
      return "unexpected field '" + key + "'";
    }
  }
  if (!j.at("schema_version").is_number_integer() ||
      j.at("schema_version").get<int>() != kReportSchemaVersion) {
    return "unsupported schema_version";
  }
  if (!j.at("attacks").is_array()) return "'attacks' must be an array";
  static const char* kMiaFields[] = {"kind", "auc", "advantage", "tpr_at_fpr",
                                     "vulnerable_member_indices"};
  for (const auto& a : j.at("attacks")) {
    for (const char* field : kMiaFields) {
      if (!a.contains(field)) {
        return std::string("attack entry missing '") + field + "'";
      }
    }
    const double auc = a.at("auc").get<double>();
    const double adv = a.at("advantage").get<double>();
    if (!(auc >= 0.0 && auc <= 1.0)) return "attack auc outside [0, 1]";
    if (!(adv >= 0.0 && adv <= 1.0)) return "attack advantage outside [0, 1]";
  }
  for (const char* field : {"train_accuracy", "test_accuracy"}) {
    if (!j.at(field).is_number()) {
      return std::string("'") + field + "' must be a number";
    }
  }
  return "";
}

json WithoutRuntimes(const json& report) {
  json copy = report;
  copy["runtime_seconds"] = 0.0;
  if (copy.contains("defense") && !copy["defense"].is_null()) {
    copy["defense"]["before"]["overhead_seconds"] = 0.0;
    copy["defense"]["after"]["overhead_seconds"] = 0.0;
  }
  return copy;
}

std::string FormatDefenseTable(const DefenseComparison& comparison) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-28s %10s %10s %12s %10s %10s\n",
                "Method", "Train Acc", "Test Acc", "Runtime (s)", "MIA AUC",
                "MIA Adv.");
  out << line;
  for (const DefenseRow& row : comparison.rows) {
    std::snprintf(line, sizeof(line),
                  "%-28s %9.2f%% %9.2f%% %12.2f %9.2f%% %9.2f%%%s\n",
                  row.name.c_str(), 100.0 * row.train_accuracy,
                  100.0 * row.test_accuracy, row.runtime_seconds,
                  100.0 * row.auc, 100.0 * row.advantage,
                  row.valid ? "" : "  (invalid)");
    out << line;
  }
  out << "attack: " << AttackKindName(comparison.kind) << '\n';
  return out.str();
}

std::string FormatReportSummary(const ReportDocument& r) {
  std::ostringstream out;
  char line[256];
  out << "dataset " << r.dataset_name << ": " << r.num_samples << " samples, "
      << r.num_classes << " classes, " << r.num_noisy << " planted noisy\n";
  std::snprintf(line, sizeof(line),
                "train acc %.2f%%  test acc %.2f%%  runtime %.2fs  epochs %zu\n",
                100.0 * r.train_accuracy, 100.0 * r.test_accuracy,
                r.runtime_seconds, r.epochs_run);
  out << line;
  if (!r.valid) out << "INVALID: " << r.error << '\n';
  for (const MiaReport& a : r.attacks) {
    std::snprintf(line, sizeof(line), "%-13s AUC %6.2f%%  Adv %6.2f%%",
                  std::string(AttackKindName(a.kind)).c_str(), 100.0 * a.auc,
                  100.0 * a.advantage);
    out << line;
    for (const auto& [alpha, tpr] : a.tpr_at_fpr) {
      std::snprintf(line, sizeof(line), "  TPR@%g%%FPR %.2f%% (%zu)",
                    100.0 * alpha, 100.0 * tpr,
                    a.vulnerable_member_indices.at(alpha).size());
      out << line;
    }
    out << '\n';
  }
  std::snprintf(line, sizeof(line), "yeom fixed threshold: advantage %.2f%%\n",
                100.0 * r.yeom.advantage);
  out << line;
  for (const OutlierSummary& o : r.outliers) {
    std::snprintf(line, sizeof(line),
                  "outliers %s@%g: %zu vulnerable (%zu noisy), mean score %.4f "
                  "vs %.4f all members (p=%.3g)\n",
                  std::string(AttackKindName(o.kind)).c_str(), o.alpha,
                  o.vulnerable_count, o.vulnerable_noisy_count,
                  o.mean_vulnerable, o.mean_all_members, o.welch_p);
    out << line;
  }
  if (r.defense && r.defense->applied) {
    const DefenseBlock& d = *r.defense;
    for (size_t k = 0; k < d.before.attacks.size(); ++k) {
      std::snprintf(
          line, sizeof(line),
          "reweight %-13s AUC %6.2f%% -> %6.2f%%  Adv %6.2f%% -> %6.2f%%  "
          "overhead %.3fs\n",
          std::string(AttackKindName(d.before.attacks[k].kind)).c_str(),
          100.0 * d.before.attacks[k].auc, 100.0 * d.after.attacks[k].auc,
          100.0 * d.before.attacks[k].advantage,
          100.0 * d.after.attacks[k].advantage, d.after.overhead_seconds);
      out << line;
    }
  } else if (r.defense) {
    out << "reweight skipped: " << r.defense->notice << '\n';
  }
  for (const std::string& n : r.notices) out << "note: " << n << '\n';
  return out.str();
}

}  // namespace mia
