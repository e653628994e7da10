//
// Copyright 2026 The Cleanmark Authors
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
//

#ifndef CLEANMARK_MODEL_H_
#define CLEANMARK_MODEL_H_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "cleanmark/arch.h"
#include "cleanmark/dataset.h"

namespace cleanmark {

namespace detail {
class Network;
}  // namespace detail

// Named slice of the flat parameter vector.
struct ParamBlock {
  std::string name;
  size_t offset = 0;
  size_t size = 0;
  size_t fan_in = 0;
  size_t fan_out = 0;
  bool is_bias = false;
};

// A classifier (or autoencoder) of the fixed zoo with its parameters.
// Immutable; training returns a new Model.
class Model {
 public:
  // Throws InvalidArgumentError if the arch is invalid, the parameter count
  // differs from the arch-implied count, or any parameter is not finite.
  Model(ArchSpec arch, std::vector<double> params,
        std::vector<std::string> lineage = {});

  const ArchSpec& arch() const { return arch_; }
  std::span<const double> params() const { return params_; }
  size_t param_count() const { return params_.size(); }
  const std::vector<ParamBlock>& layout() const;
  // Provenance entries, e.g. "init seed=7", "train seed=9 epochs=12".
  const std::vector<std::string>& lineage() const { return lineage_; }
  size_t output_size() const;

  Model WithParams(std::vector<double> params, std::string lineage_entry) const;

  const detail::Network& network() const { return *net_; }

 private:
  ArchSpec arch_;
  std::vector<double> params_;
  std::vector<std::string> lineage_;
  std::shared_ptr<const detail::Network> net_;
};

size_t ParamCount(const ArchSpec& arch);

// Glorot-uniform weights in [-s, s], s = sqrt(6 / (fan_in + fan_out)) per
// layer; zero biases. Deterministic given seed.
Model InitModel(const ArchSpec& arch, uint64_t seed);

// Raw outputs: logits for classifiers, reconstruction for the autoencoder.
std::vector<double> Forward(const Model& model, const SampleView& x);
// Softmax posterior over the classes.
std::vector<double> PredictProba(const Model& model, const SampleView& x);
// argmax with ties broken toward the lowest class index.
uint32_t PredictClass(const Model& model, const SampleView& x);
uint32_t ArgMax(std::span<const double> values);

// Cross-entropy for classifiers; mean squared reconstruction error for the
// autoencoder (label ignored).
double Loss(const Model& model, const SampleView& x, uint32_t label);

// dL/dx with the sample's shape. Throws UnsupportedModalityError for token
// inputs.
std::vector<double> InputGradient(const Model& model, const SampleView& x,
                                  uint32_t label);

// Adds dL/dtheta into grad (size param_count) and returns the loss.
double AccumulateParamGradient(const Model& model, const SampleView& x,
                               uint32_t label, std::span<double> grad);

// Autoencoder output; throws for classifiers.
std::vector<double> Reconstruct(const Model& model, const SampleView& x);

// Mean of the bow-text token embeddings; throws for other families.
std::vector<double> SentenceEmbedding(const Model& model,
                                      std::span<const uint32_t> tokens);

// Discrete switches taken by the forward pass (ReLU on/off, max-pool
// winners). Two inputs with the same pattern lie in one linear region.
std::vector<int32_t> ActivationPattern(const Model& model, const SampleView& x);

// SHA-256 over arch and little-endian parameter bytes.
std::string Fingerprint(const Model& model);

// Model file: one line of JSON header (format, arch, lineage), a newline,
// then the "CMP1" blob: u64 count followed by little-endian f32 parameters in
// layout order. Parameters are narrowed to f32 on save.
void SaveModel(const Model& model, const std::filesystem::path& path);
Model LoadModel(const std::filesystem::path& path);

}  // namespace cleanmark

#endif  // CLEANMARK_MODEL_H_
