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


// Fully-connected ReLU classifier: forward pass, softmax cross-entropy with
// optional label smoothing, backpropagation, and the SGD / DP-SGD updates.

#ifndef MIA_NN_H_
#define MIA_NN_H_

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "mia/matrix.h"

namespace mia {

// Floor applied to probabilities before any logarithm.
inline constexpr double kProbabilityFloor = 1e-12;

// One affine layer; weight is d_in x d_out.
struct AffineLayer {
  Matrix weight;
  Vector bias;

  size_t in_width() const { return weight.rows(); }
  size_t out_width() const { return weight.cols(); }
  friend bool operator==(const AffineLayer&, const AffineLayer&) = default;
};

// Affine layers separated by ReLU. The output of the last hidden layer (the
// input of the final affine layer) is the latent vector.
class MlpModel {
 public:
  MlpModel() = default;
  // Throws std::invalid_argument if adjacent widths do not chain.
  explicit MlpModel(std::vector<AffineLayer> layers);

  // Glorot-uniform weights in +-sqrt(6 / (fan_in + fan_out)), zero biases.
  // `widths` is {input, hidden..., num_classes}.
  static MlpModel Initialize(std::span<const size_t> widths, uint64_t seed);

  size_t input_width() const { return layers_.front().in_width(); }
  size_t num_classes() const { return layers_.back().out_width(); }
  size_t latent_width() const { return layers_.back().in_width(); }
  size_t num_hidden() const { return layers_.size() - 1; }
  size_t num_parameters() const;

  const std::vector<AffineLayer>& layers() const { return layers_; }
  std::vector<AffineLayer>& mutable_layers() { return layers_; }
  const AffineLayer& head() const { return layers_.back(); }

  friend bool operator==(const MlpModel&, const MlpModel&) = default;

 private:
  std::vector<AffineLayer> layers_;
};

// Per-layer gradients, shaped like the model's parameters.
struct GradientSet {
  std::vector<AffineLayer> layers;

  static GradientSet ZerosLike(const MlpModel& model);
  double SquaredNorm() const;
  double Norm() const;
  void Scale(double factor);
  // this += factor * other
  void AddScaled(const GradientSet& other, double factor);
};

// Inverted-dropout masks, one per hidden layer; entries are 0 or 1/(1-rate).
using DropoutMasks = std::vector<Vector>;

struct ForwardTrace {
  // activations[0] is the input, activations[k] the (masked) ReLU output of
  // hidden layer k. pre_activations[k] is the affine output of layer k.
  std::vector<Vector> activations;
  std::vector<Vector> pre_activations;
  Vector logits;
  Vector probs;
  Vector latent;
  // Copy of the masks used, empty for a deterministic pass.
  DropoutMasks masks;
};

// Numerically stable softmax (max subtraction).
Vector Softmax(std::span<const double> logits);

// Throws std::invalid_argument on any width mismatch.
ForwardTrace Forward(const MlpModel& model, std::span<const double> input,
                     const DropoutMasks* masks = nullptr);

// (1 - smoothing) * onehot(label) + smoothing / m.
Vector SmoothedTarget(size_t label, size_t num_classes, double smoothing);

// -sum_i y_i log(max(p_i, 1e-12)) with y = SmoothedTarget(label, m, smoothing).
double CrossEntropyLoss(std::span<const double> probs, size_t label,
                        double smoothing);

// Gradient of CrossEntropyLoss + (l2_lambda / 2) * sum ||W||^2 for one
// example. Biases are not penalized.
GradientSet Backward(const ForwardTrace& trace, size_t label,
                     const MlpModel& model, double l2_lambda,
                     double smoothing);

// Adds scale * (data gradient of one example) into `grads`, without the L2
// term. Used by the mini-batch loop to avoid per-example allocations.
void AccumulateDataGradient(const ForwardTrace& trace, size_t label,
                            const MlpModel& model, double smoothing,
                            double scale, GradientSet& grads);

// grads.weight += l2_lambda * W for every layer.
void AddL2Gradient(const MlpModel& model, double l2_lambda,
                   GradientSet& grads);

// theta <- theta - learning_rate * g
void SgdStep(MlpModel& model, const GradientSet& grads, double learning_rate);

struct DpParams {
  double clip_norm = 1.0;         // C
  double noise_multiplier = 0.0;  // sigma
  double delta = 1e-5;            // reported only; no accountant
};

struct DpStepStats {
  double max_raw_norm = 0.0;
  double max_clipped_norm = 0.0;
};

// Rescales `grads` by min(1, clip_norm / ||g||) over the flattened parameter
// vector and returns the resulting norm.
double ClipGradient(GradientSet& grads, double clip_norm);

// Clips each per-example gradient, sums, adds N(0, (sigma*C)^2) noise per
// coordinate, divides by the batch size and takes an SGD step. Throws
// std::invalid_argument if clip_norm <= 0 or noise_multiplier < 0.
DpStepStats DpSgdStep(MlpModel& model,
                      std::span<const GradientSet> per_example_grads,
                      const DpParams& params, double learning_rate,
                      std::mt19937_64& rng);

// Throws std::invalid_argument unless rate is in [0, 1).
DropoutMasks MakeDropoutMasks(const MlpModel& model, double rate,
                              std::mt19937_64& rng);

}  // namespace mia

#endif  // MIA_NN_H_
