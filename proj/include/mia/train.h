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


#ifndef MIA_TRAIN_H_
#define MIA_TRAIN_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mia/data.h"
#include "mia/nn.h"

namespace mia {

struct EarlyStopping {
  size_t patience = 5;
  double validation_fraction = 0.1;
};

// Training hyperparameters plus the five defenses: early stopping, L2,
// dropout, label smoothing and DP-SGD. The optimizer is plain mini-batch SGD
// without momentum or schedule.
struct TrainConfig {
  std::vector<size_t> hidden_widths = {128};
  size_t epochs = 100;
  double learning_rate = 0.05;
  size_t batch_size = 32;
  double l2_lambda = 0.0;
  double dropout_rate = 0.0;
  double label_smoothing = 0.0;
  std::optional<EarlyStopping> early_stopping;
  std::optional<DpParams> dp;
  uint64_t seed = 0;

  // Throws std::invalid_argument describing the first invalid field.
  void Validate() const;
};

struct EpochStats {
  size_t epoch = 0;  // 1-based
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
  double train_loss = 0.0;
  double test_loss = 0.0;
};

struct TrainHistory {
  std::vector<EpochStats> epochs;
  // Epoch whose parameters were returned; 0 means the initial model.
  size_t selected_epoch = 0;
  bool stopped_early = false;
  // Largest per-example gradient norm after clipping, over the whole run.
  // Only populated when DP-SGD is enabled.
  double max_clipped_grad_norm = 0.0;
};

struct TrainResult {
  MlpModel model;
  TrainHistory history;
  // Members actually used for gradient steps (members minus validation).
  std::vector<size_t> training_indices;
  std::vector<size_t> validation_indices;
};

class TrainingError : public std::runtime_error {
 public:
  TrainingError(size_t epoch, size_t batch, const std::string& message);
  size_t epoch() const { return epoch_; }
  size_t batch() const { return batch_; }

 private:
  size_t epoch_;
  size_t batch_;
};

// Called with epoch 0 and the initial model, then after every epoch.
using EpochObserver = std::function<void(size_t, const MlpModel&)>;

// Mini-batch SGD on split.member_indices; nonmembers only feed the test
// columns of the history. Deterministic in (dataset, split, config). Throws
// TrainingError naming the epoch and batch if the loss becomes non-finite.
TrainResult Train(const Dataset& dataset, const DataSplit& split,
                  const TrainConfig& config, const EpochObserver& observer = {});

struct PredictionRecord {
  size_t index = 0;  // row in the dataset
  size_t label = 0;
  bool is_member = false;
  Vector logits;
  Vector probs;
  Vector latent;
  double loss = 0.0;  // unsmoothed cross-entropy
};

struct Evaluation {
  double accuracy = 0.0;
  double mean_loss = 0.0;
  std::vector<PredictionRecord> records;
};

// Deterministic inference on dataset rows `indices`. Throws
// std::invalid_argument if `indices` is empty.
Evaluation Evaluate(const MlpModel& model, const Dataset& dataset,
                    std::span<const size_t> indices, bool is_member);

// Builds a record from logits alone (used after logit post-processing).
PredictionRecord MakeRecord(size_t index, size_t label, bool is_member,
                            Vector logits, Vector latent);

}  // namespace mia

#endif  // MIA_TRAIN_H_
