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


#include "mia/train.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace mia {
namespace {

// Independent, reproducible RNG streams derived from the config seed.
enum class Stream : uint64_t {
  kInit = 1,
  kShuffle = 2,
  kDropout = 3,
  kNoise = 4,
  kValidation = 5,
};

std::mt19937_64 MakeStream(uint64_t seed, Stream stream) {
  std::seed_seq seq{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32),
                    static_cast<uint32_t>(stream)};
  return std::mt19937_64(seq);
}

uint64_t DeriveSeed(uint64_t seed, Stream stream) {
  auto rng = MakeStream(seed, stream);
  return rng();
}

struct SubsetStats {
  double accuracy = 0.0;
  double loss = 0.0;
};

SubsetStats Measure(const MlpModel& model, const Dataset& dataset,
                    std::span<const size_t> indices) {
  if (indices.empty()) return {};
  size_t correct = 0;
  double loss = 0.0;
  for (size_t i : indices) {
    const ForwardTrace trace = Forward(model, dataset.features.row(i));
    if (ArgMax(trace.logits) == dataset.labels[i]) ++correct;
    loss += CrossEntropyLoss(trace.probs, dataset.labels[i], 0.0);
  }
  const double n = static_cast<double>(indices.size());
  return {static_cast<double>(correct) / n, loss / n};
}

}  // namespace

void TrainConfig::Validate() const {
  for (size_t w : hidden_widths) {
    if (w == 0) throw std::invalid_argument("hidden widths must be positive");
  }
  if (!(learning_rate > 0.0)) {
    throw std::invalid_argument("learning rate must be positive");
  }
  if (batch_size == 0) throw std::invalid_argument("batch size must be >= 1");
  if (!(l2_lambda >= 0.0)) throw std::invalid_argument("l2 must be >= 0");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
    throw std::invalid_argument("dropout rate must be in [0, 1)");
  }
  if (!(label_smoothing >= 0.0 && label_smoothing < 1.0)) {
    throw std::invalid_argument("label smoothing must be in [0, 1)");
  }
  if (early_stopping) {
    const double f = early_stopping->validation_fraction;
    if (!(f > 0.0 && f < 1.0)) {
      throw std::invalid_argument("validation fraction must be in (0, 1)");
    }
    if (early_stopping->patience == 0) {
      throw std::invalid_argument("early-stopping patience must be >= 1");
    }
  }
  if (dp) {
    if (!(dp->clip_norm > 0.0)) {
      throw std::invalid_argument("DP clip norm must be positive");
    }
    if (!(dp->noise_multiplier >= 0.0)) {
      throw std::invalid_argument("DP noise multiplier must be nonnegative");
    }
  }
}

TrainingError::TrainingError(size_t epoch, size_t batch,
                             const std::string& message)
    : std::runtime_error("epoch " + std::to_string(epoch) + ", batch " +
                         std::to_string(batch) + ": " + message),
      epoch_(epoch),
      batch_(batch) {}

TrainResult Train(const Dataset& dataset, const DataSplit& split,
                  const TrainConfig& config, const EpochObserver& observer) {
  config.Validate();
  ValidateDataset(dataset);
  if (split.member_indices.empty()) {
    throw std::invalid_argument("member set is empty");
  }

  std::vector<size_t> widths = {dataset.feature_dim()};
  widths.insert(widths.end(), config.hidden_widths.begin(),
                config.hidden_widths.end());
  widths.push_back(dataset.num_classes);

  TrainResult result;
  result.model =
      MlpModel::Initialize(widths, DeriveSeed(config.seed, Stream::kInit));
  result.training_indices = split.member_indices;

  if (config.early_stopping) {
    auto rng = MakeStream(config.seed, Stream::kValidation);
    std::vector<size_t> shuffled = split.member_indices;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    auto n_val = static_cast<size_t>(
        std::round(config.early_stopping->validation_fraction *
                   static_cast<double>(shuffled.size())));
    n_val = std::clamp<size_t>(n_val, 1, shuffled.size() - 1);
    result.validation_indices.assign(shuffled.begin(), shuffled.begin() + n_val);
    result.training_indices.assign(shuffled.begin() + n_val, shuffled.end());
    std::sort(result.validation_indices.begin(),
              result.validation_indices.end());
    std::sort(result.training_indices.begin(), result.training_indices.end());
  }
  if (result.training_indices.empty()) {
    throw std::invalid_argument("no members left for training");
  }

  MlpModel& model = result.model;
  auto shuffle_rng = MakeStream(config.seed, Stream::kShuffle);
  auto dropout_rng = MakeStream(config.seed, Stream::kDropout);
  auto noise_rng = MakeStream(config.seed, Stream::kNoise);

  std::vector<size_t> order = result.training_indices;
  GradientSet batch_grads = GradientSet::ZerosLike(model);
  std::vector<GradientSet> per_example;

  MlpModel best_model = model;
  double best_val_accuracy = -1.0;
  double best_val_loss = 0.0;
  size_t epochs_since_best = 0;

  if (observer) observer(0, model);
  for (size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    size_t batch_no = 0;
    for (size_t start = 0; start < order.size();
         start += config.batch_size, ++batch_no) {
      const size_t end = std::min(order.size(), start + config.batch_size);
      const size_t batch = end - start;
      const double inv_batch = 1.0 / static_cast<double>(batch);

      std::optional<DropoutMasks> masks;
      if (config.dropout_rate > 0.0) {
        masks = MakeDropoutMasks(model, config.dropout_rate, dropout_rng);
      }

      double batch_loss = 0.0;
      if (config.dp) {
        per_example.clear();
        for (size_t b = start; b < end; ++b) {
          const size_t i = order[b];
          const ForwardTrace trace = Forward(
              model, dataset.features.row(i), masks ? &*masks : nullptr);
          batch_loss += CrossEntropyLoss(trace.probs, dataset.labels[i],
                                         config.label_smoothing);
          per_example.push_back(Backward(trace, dataset.labels[i], model,
                                         config.l2_lambda,
                                         config.label_smoothing));
        }
        if (!std::isfinite(batch_loss)) {
          throw TrainingError(epoch, batch_no, "non-finite loss");
        }
        const DpStepStats stats = DpSgdStep(model, per_example, *config.dp,
                                            config.learning_rate, noise_rng);
        result.history.max_clipped_grad_norm =
            std::max(result.history.max_clipped_grad_norm,
                     stats.max_clipped_norm);
      } else {
        batch_grads.Scale(0.0);
        for (size_t b = start; b < end; ++b) {
          const size_t i = order[b];
          const ForwardTrace trace = Forward(
              model, dataset.features.row(i), masks ? &*masks : nullptr);
          batch_loss += CrossEntropyLoss(trace.probs, dataset.labels[i],
                                         config.label_smoothing);
          AccumulateDataGradient(trace, dataset.labels[i], model,
                                 config.label_smoothing, inv_batch,
                                 batch_grads);
        }
        if (!std::isfinite(batch_loss)) {
          throw TrainingError(epoch, batch_no, "non-finite loss");
        }
        AddL2Gradient(model, config.l2_lambda, batch_grads);
        SgdStep(model, batch_grads, config.learning_rate);
      }
    }

    const SubsetStats train = Measure(model, dataset, result.training_indices);
    const SubsetStats test = Measure(model, dataset, split.nonmember_indices);
    if (!std::isfinite(train.loss)) {
      throw TrainingError(epoch, batch_no, "non-finite training loss");
    }
    result.history.epochs.push_back(
        {epoch, train.accuracy, test.accuracy, train.loss, test.loss});
    if (observer) observer(epoch, model);

    if (config.early_stopping) {
      const SubsetStats val =
          Measure(model, dataset, result.validation_indices);
      const bool improved =
          val.accuracy > best_val_accuracy ||
          (val.accuracy == best_val_accuracy && val.loss < best_val_loss);
      if (improved) {
        best_val_accuracy = val.accuracy;
        best_val_loss = val.loss;
        best_model = model;
        result.history.selected_epoch = epoch;
        epochs_since_best = 0;
      } else if (++epochs_since_best >= config.early_stopping->patience) {
        result.history.stopped_early = true;
        break;
      }
    } else {
      result.history.selected_epoch = epoch;
    }
  }

  if (config.early_stopping && result.history.selected_epoch > 0) {
    model = std::move(best_model);
  }
  return result;
}

PredictionRecord MakeRecord(size_t index, size_t label, bool is_member,
                            Vector logits, Vector latent) {
  PredictionRecord record;
  record.index = index;
  record.label = label;
  record.is_member = is_member;
  record.probs = Softmax(logits);
  record.loss = CrossEntropyLoss(record.probs, label, 0.0);
  record.logits = std::move(logits);
  record.latent = std::move(latent);
  return record;
}

Evaluation Evaluate(const MlpModel& model, const Dataset& dataset,
                    std::span<const size_t> indices, bool is_member) {
  if (indices.empty()) {
    throw std::invalid_argument("cannot evaluate an empty subset");
  }
  Evaluation eval;
  eval.records.reserve(indices.size());
  size_t correct = 0;
  double loss = 0.0;
  for (size_t i : indices) {
    if (i >= dataset.size()) {
      throw std::invalid_argument("sample index " + std::to_string(i) +
                                  " out of range");
    }
    ForwardTrace trace = Forward(model, dataset.features.row(i));
    PredictionRecord record;
    record.index = i;
    record.label = dataset.labels[i];
    record.is_member = is_member;
    record.loss = CrossEntropyLoss(trace.probs, record.label, 0.0);
    if (ArgMax(trace.logits) == record.label) ++correct;
    loss += record.loss;
    record.logits = std::move(trace.logits);
    record.probs = std::move(trace.probs);
    record.latent = std::move(trace.latent);
    eval.records.push_back(std::move(record));
  }
  const double n = static_cast<double>(indices.size());
  eval.accuracy = static_cast<double>(correct) / n;
  eval.mean_loss = loss / n;
  return eval;
}

}  // namespace mia
