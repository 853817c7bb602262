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


#include "mia/nn.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mia {
namespace {

void CheckWidth(size_t got, size_t want, const char* what) {
  if (got != want) {
    throw std::invalid_argument(std::string(what) + ": expected width " +
                                std::to_string(want) + ", got " +
                                std::to_string(got));
  }
}

void CheckSameShape(const MlpModel& model, const GradientSet& grads) {
  const auto& layers = model.layers();
  if (layers.size() != grads.layers.size()) {
    throw std::invalid_argument("gradient layer count does not match model");
  }
  for (size_t k = 0; k < layers.size(); ++k) {
    if (layers[k].weight.rows() != grads.layers[k].weight.rows() ||
        layers[k].weight.cols() != grads.layers[k].weight.cols() ||
        layers[k].bias.size() != grads.layers[k].bias.size()) {
      throw std::invalid_argument("gradient shape does not match layer " +
                                  std::to_string(k));
    }
  }
}

}  // namespace

MlpModel::MlpModel(std::vector<AffineLayer> layers)
    : layers_(std::move(layers)) {
  if (layers_.empty()) {
    throw std::invalid_argument("MlpModel needs at least one layer");
  }
  for (size_t k = 0; k < layers_.size(); ++k) {
    CheckWidth(layers_[k].bias.size(), layers_[k].out_width(), "bias");
    if (k > 0) {
      CheckWidth(layers_[k].in_width(), layers_[k - 1].out_width(),
                 "layer input");
    }
  }
}

MlpModel MlpModel::Initialize(std::span<const size_t> widths, uint64_t seed) {
  if (widths.size() < 2) {
    throw std::invalid_argument("need at least input and output widths");
  }
  std::mt19937_64 rng(seed);
  std::vector<AffineLayer> layers;
  for (size_t k = 0; k + 1 < widths.size(); ++k) {
    const size_t fan_in = widths[k];
    const size_t fan_out = widths[k + 1];
    if (fan_in == 0 || fan_out == 0) {
      throw std::invalid_argument("layer widths must be positive");
    }
    const double limit =
        std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    AffineLayer layer{Matrix(fan_in, fan_out), Vector(fan_out, 0.0)};
    for (double& w : layer.weight.values()) w = dist(rng);
    layers.push_back(std::move(layer));
  }
  return MlpModel(std::move(layers));
}

size_t MlpModel::num_parameters() const {
  size_t n = 0;
  for (const auto& layer : layers_) n += layer.weight.size() + layer.bias.size();
  return n;
}

GradientSet GradientSet::ZerosLike(const MlpModel& model) {
  GradientSet grads;
  for (const auto& layer : model.layers()) {
    grads.layers.push_back({Matrix(layer.in_width(), layer.out_width()),
                            Vector(layer.out_width(), 0.0)});
  }
  return grads;
}

double GradientSet::SquaredNorm() const {
  double sum = 0.0;
  for (const auto& layer : layers) {
    for (double w : layer.weight.values()) sum += w * w;
    for (double b : layer.bias) sum += b * b;
  }
  return sum;
}

double GradientSet::Norm() const { return std::sqrt(SquaredNorm()); }

void GradientSet::Scale(double factor) {
  for (auto& layer : layers) {
    for (double& w : layer.weight.values()) w *= factor;
    for (double& b : layer.bias) b *= factor;
  }
}

void GradientSet::AddScaled(const GradientSet& other, double factor) {
  for (size_t k = 0; k < layers.size(); ++k) {
    auto dst = layers[k].weight.values();
    auto src = other.layers[k].weight.values();
    for (size_t i = 0; i < dst.size(); ++i) dst[i] += factor * src[i];
    for (size_t j = 0; j < layers[k].bias.size(); ++j) {
      layers[k].bias[j] += factor * other.layers[k].bias[j];
    }
  }
}

Vector Softmax(std::span<const double> logits) {
  Vector probs(logits.size());
  if (logits.empty()) return probs;
  const double max_logit = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (size_t i = 0; i < logits.size(); ++i) {
    probs[i] = std::exp(logits[i] - max_logit);
    sum += probs[i];
  }
  for (double& p : probs) p /= sum;
  return probs;
}

ForwardTrace Forward(const MlpModel& model, std::span<const double> input,
                     const DropoutMasks* masks) {
  CheckWidth(input.size(), model.input_width(), "Forward input");
  const auto& layers = model.layers();
  if (masks != nullptr) {
    CheckWidth(masks->size(), model.num_hidden(), "dropout mask count");
    for (size_t k = 0; k < masks->size(); ++k) {
      CheckWidth((*masks)[k].size(), layers[k].out_width(), "dropout mask");
    }
  }

  ForwardTrace trace;
  trace.activations.reserve(layers.size());
  trace.pre_activations.reserve(layers.size());
  trace.activations.emplace_back(input.begin(), input.end());

  for (size_t k = 0; k < layers.size(); ++k) {
    const AffineLayer& layer = layers[k];
    const Vector& in = trace.activations.back();
    Vector out = layer.bias;
    for (size_t i = 0; i < in.size(); ++i) {
      const double a = in[i];
      if (a == 0.0) continue;
      auto w = layer.weight.row(i);
      for (size_t j = 0; j < out.size(); ++j) out[j] += a * w[j];
    }
    const bool is_hidden = k + 1 < layers.size();
    if (is_hidden) {
      Vector act(out.size());
      for (size_t j = 0; j < out.size(); ++j) {
        act[j] = out[j] > 0.0 ? out[j] : 0.0;
        if (masks != nullptr) act[j] *= (*masks)[k][j];
      }
      trace.pre_activations.push_back(std::move(out));
      trace.activations.push_back(std::move(act));
    } else {
      trace.pre_activations.push_back(std::move(out));
    }
  }
  trace.logits = trace.pre_activations.back();
  trace.probs = Softmax(trace.logits);
  trace.latent = trace.activations.back();
  if (masks != nullptr) trace.masks = *masks;
  return trace;
}

Vector SmoothedTarget(size_t label, size_t num_classes, double smoothing) {
  if (label >= num_classes) {
    throw std::invalid_argument("label " + std::to_string(label) +
                                " out of range for " +
                                std::to_string(num_classes) + " classes");
  }
  if (!(smoothing >= 0.0 && smoothing < 1.0)) {
    throw std::invalid_argument("label smoothing must be in [0, 1)");
  }
  Vector target(num_classes, smoothing / static_cast<double>(num_classes));
  target[label] += 1.0 - smoothing;
  return target;
}

double CrossEntropyLoss(std::span<const double> probs, size_t label,
                        double smoothing) {
  if (smoothing == 0.0) {
    if (label >= probs.size()) {
      throw std::invalid_argument("label out of range");
    }
    return -std::log(std::max(probs[label], kProbabilityFloor));
  }
  const Vector target = SmoothedTarget(label, probs.size(), smoothing);
  double loss = 0.0;
  for (size_t i = 0; i < probs.size(); ++i) {
    if (target[i] == 0.0) continue;
    loss -= target[i] * std::log(std::max(probs[i], kProbabilityFloor));
  }
  return loss;
}

void AccumulateDataGradient(const ForwardTrace& trace, size_t label,
                            const MlpModel& model, double smoothing,
                            double scale, GradientSet& grads) {
  const auto& layers = model.layers();
  const Vector target = SmoothedTarget(label, model.num_classes(), smoothing);

  // Softmax-CE identity: dL/dz = p - y.
  Vector delta(trace.probs.size());
  for (size_t j = 0; j < delta.size(); ++j) {
    delta[j] = trace.probs[j] - target[j];
  }

  for (size_t k = layers.size(); k-- > 0;) {
    const Vector& in = trace.activations[k];
    AffineLayer& g = grads.layers[k];
    for (size_t i = 0; i < in.size(); ++i) {
      const double a = in[i] * scale;
      if (a == 0.0) continue;
      auto row = g.weight.row(i);
      for (size_t j = 0; j < delta.size(); ++j) row[j] += a * delta[j];
    }
    for (size_t j = 0; j < delta.size(); ++j) g.bias[j] += scale * delta[j];
    if (k == 0) break;

    // Back through W, then through the ReLU and dropout mask of layer k-1.
    const Vector& pre = trace.pre_activations[k - 1];
    const Vector* mask = trace.masks.empty() ? nullptr : &trace.masks[k - 1];
    Vector prev(in.size(), 0.0);
    for (size_t i = 0; i < in.size(); ++i) {
      if (pre[i] <= 0.0) continue;
      const double local = mask != nullptr ? (*mask)[i] : 1.0;
      if (local == 0.0) continue;
      auto w = layers[k].weight.row(i);
      double sum = 0.0;
      for (size_t j = 0; j < delta.size(); ++j) sum += w[j] * delta[j];
      prev[i] = sum * local;
    }
    delta = std::move(prev);
  }
}

void AddL2Gradient(const MlpModel& model, double l2_lambda,
                   GradientSet& grads) {
  if (l2_lambda == 0.0) return;
  const auto& layers = model.layers();
  for (size_t k = 0; k < layers.size(); ++k) {
    auto dst = grads.layers[k].weight.values();
    auto w = layers[k].weight.values();
    for (size_t i = 0; i < dst.size(); ++i) dst[i] += l2_lambda * w[i];
  }
}

GradientSet Backward(const ForwardTrace& trace, size_t label,
                     const MlpModel& model, double l2_lambda,
                     double smoothing) {
  GradientSet grads = GradientSet::ZerosLike(model);
  AccumulateDataGradient(trace, label, model, smoothing, 1.0, grads);
  AddL2Gradient(model, l2_lambda, grads);
  return grads;
}

void SgdStep(MlpModel& model, const GradientSet& grads, double learning_rate) {
  CheckSameShape(model, grads);
  auto& layers = model.mutable_layers();
  for (size_t k = 0; k < layers.size(); ++k) {
    auto w = layers[k].weight.values();
    auto g = grads.layers[k].weight.values();
    for (size_t i = 0; i < w.size(); ++i) w[i] -= learning_rate * g[i];
    for (size_t j = 0; j < layers[k].bias.size(); ++j) {
      layers[k].bias[j] -= learning_rate * grads.layers[k].bias[j];
    }
  }
}

double ClipGradient(GradientSet& grads, double clip_norm) {
  const double norm = grads.Norm();
  if (norm > clip_norm) {
    grads.Scale(clip_norm / norm);
    return grads.Norm();
  }
  return norm;
}

DpStepStats DpSgdStep(MlpModel& model,
                      std::span<const GradientSet> per_example_grads,
                      const DpParams& params, double learning_rate,
                      std::mt19937_64& rng) {
  if (!(params.clip_norm > 0.0)) {
    throw std::invalid_argument("DP clip norm must be positive");
  }
  if (!(params.noise_multiplier >= 0.0)) {
    throw std::invalid_argument("DP noise multiplier must be nonnegative");
  }
  if (per_example_grads.empty()) {
    throw std::invalid_argument("DP-SGD step needs at least one example");
  }

  DpStepStats stats;
  GradientSet sum = GradientSet::ZerosLike(model);
  for (const GradientSet& g : per_example_grads) {
    CheckSameShape(model, g);
    GradientSet clipped = g;
    stats.max_raw_norm = std::max(stats.max_raw_norm, g.Norm());
    const double clipped_norm = ClipGradient(clipped, params.clip_norm);
    stats.max_clipped_norm = std::max(stats.max_clipped_norm, clipped_norm);
    sum.AddScaled(clipped, 1.0);
  }

  if (params.noise_multiplier > 0.0) {
    std::normal_distribution<double> noise(
        0.0, params.noise_multiplier * params.clip_norm);
    for (auto& layer : sum.layers) {
      for (double& w : layer.weight.values()) w += noise(rng);
      for (double& b : layer.bias) b += noise(rng);
    }
  }
  if (per_example_grads.size() > 1) {
    sum.Scale(1.0 / static_cast<double>(per_example_grads.size()));
  }
  SgdStep(model, sum, learning_rate);
  return stats;
}

DropoutMasks MakeDropoutMasks(const MlpModel& model, double rate,
                              std::mt19937_64& rng) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw std::invalid_argument("dropout rate must be in [0, 1)");
  }
  DropoutMasks masks;
  const auto& layers = model.layers();
  const double keep_scale = 1.0 / (1.0 - rate);
  std::bernoulli_distribution keep(1.0 - rate);
  for (size_t k = 0; k + 1 < layers.size(); ++k) {
    Vector mask(layers[k].out_width(), 1.0);
    if (rate > 0.0) {
      for (double& m : mask) m = keep(rng) ? keep_scale : 0.0;
    }
    masks.push_back(std::move(mask));
  }
  return masks;
}

}  // namespace mia
