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


#include "mia/checkpoint.h"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace mia {
namespace {

std::string FormatDouble(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

std::string NextToken(std::istream& in, const char* what) {
  std::string token;
  if (!(in >> token)) {
    throw std::runtime_error(std::string("checkpoint truncated reading ") +
                             what);
  }
  return token;
}

size_t ReadCount(std::istream& in, const char* what) {
  const std::string token = NextToken(in, what);
  size_t v = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw std::runtime_error(std::string("checkpoint: bad ") + what + " '" +
                             token + "'");
  }
  return v;
}

double ReadValue(std::istream& in) {
  const std::string token = NextToken(in, "parameter");
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw std::runtime_error("checkpoint: bad parameter '" + token + "'");
  }
  return v;
}

}  // namespace

void WriteModel(const MlpModel& model, std::ostream& out) {
  out << kCheckpointMagic << ' ' << kCheckpointVersion << '\n';
  out << "layers " << model.layers().size() << '\n';
  for (const AffineLayer& layer : model.layers()) {
    out << "layer " << layer.in_width() << ' ' << layer.out_width() << '\n';
    for (size_t r = 0; r < layer.weight.rows(); ++r) {
      std::string line;
      for (double w : layer.weight.row(r)) {
        if (!line.empty()) line += ' ';
        line += FormatDouble(w);
      }
      out << line << '\n';
    }
    std::string line;
    for (double b : layer.bias) {
      if (!line.empty()) line += ' ';
      line += FormatDouble(b);
    }
    out << line << '\n';
  }
}

MlpModel ReadModel(std::istream& in) {
  if (NextToken(in, "magic") != kCheckpointMagic) {
    throw std::runtime_error("not a model checkpoint (bad magic)");
  }
  const size_t version = ReadCount(in, "version");
  if (version != kCheckpointVersion) {
    throw std::runtime_error("unsupported checkpoint version " +
                             std::to_string(version));
  }
  if (NextToken(in, "layers keyword") != "layers") {
    throw std::runtime_error("checkpoint: expected 'layers'");
  }
  const size_t n_layers = ReadCount(in, "layer count");
  std::vector<AffineLayer> layers;
  for (size_t k = 0; k < n_layers; ++k) {
    if (NextToken(in, "layer keyword") != "layer") {
      throw std::runtime_error("checkpoint: expected 'layer'");
    }
    const size_t d_in = ReadCount(in, "input width");
    const size_t d_out = ReadCount(in, "output width");
    AffineLayer layer{Matrix(d_in, d_out), Vector(d_out)};
    for (double& w : layer.weight.values()) w = ReadValue(in);
    for (double& b : layer.bias) b = ReadValue(in);
    layers.push_back(std::move(layer));
  }
  return MlpModel(std::move(layers));
}

void SaveModel(const MlpModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  WriteModel(model, out);
}

MlpModel LoadModel(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return ReadModel(in);
}

void WriteHistoryCsv(const TrainHistory& history, std::ostream& out) {
  out << "epoch,train_acc,test_acc,train_loss,test_loss\n";
  for (const EpochStats& e : history.epochs) {
    out << e.epoch << ',' << FormatDouble(e.train_accuracy) << ','
        << FormatDouble(e.test_accuracy) << ',' << FormatDouble(e.train_loss)
        << ',' << FormatDouble(e.test_loss) << '\n';
  }
}

}  // namespace mia
