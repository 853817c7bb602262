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


// Plain-text model checkpoints and training-history CSV.
//
// Checkpoint layout (whitespace separated, shortest round-trip decimals):
//
//   MIA-MLP 1
//   layers <L>
//   layer <d_in> <d_out>        repeated L times, followed by
//   <d_in rows of d_out weights, row-major>
//   <d_out biases>

#ifndef MIA_CHECKPOINT_H_
#define MIA_CHECKPOINT_H_

#include <filesystem>
#include <iosfwd>

#include "mia/nn.h"
#include "mia/train.h"

namespace mia {

inline constexpr char kCheckpointMagic[] = "MIA-MLP";
inline constexpr int kCheckpointVersion = 1;

void WriteModel(const MlpModel& model, std::ostream& out);
// Throws std::runtime_error on a malformed or truncated checkpoint.
MlpModel ReadModel(std::istream& in);

void SaveModel(const MlpModel& model, const std::filesystem::path& path);
MlpModel LoadModel(const std::filesystem::path& path);

// Columns: epoch,train_acc,test_acc,train_loss,test_loss
void WriteHistoryCsv(const TrainHistory& history, std::ostream& out);

}  // namespace mia

#endif  // MIA_CHECKPOINT_H_
