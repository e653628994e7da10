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

#include "cleanmark/model.h"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "cleanmark/errors.h"
#include "cleanmark/hash.h"
#include "cleanmark/rng.h"
#include "cleanmark/serialization.h"
#include "layers.h"
#include "networks.h"

namespace cleanmark {
namespace {

detail::Tape& ThreadTape() {
  thread_local detail::Tape tape;
  return tape;
}

void CheckSample(const Model& model, const SampleView& x) {
  const ArchSpec& arch = model.arch();
  if (TakesTokens(arch)) {
    if (x.tokens.empty()) throw InvalidArgumentError("token sequence is empty");
    const size_t vocab = arch.input_shape[0];
    for (uint32_t id : x.tokens) {
      if (id >= vocab) {
        throw InvalidArgumentError("token id " + std::to_string(id) +
                                   " outside the embedding table");
      }
    }
    return;
  }
  if (x.values.size() != InputSize(arch)) {
    throw InvalidArgumentError("sample has " + std::to_string(x.values.size()) +
                               " values but " + std::string(FamilyName(arch.family)) +
                               " expects " + std::to_string(InputSize(arch)));
  }
}

void CheckLabel(const Model& model, uint32_t label) {
  if (IsClassifier(model.arch()) && label >= model.arch().num_classes) {
    throw InvalidArgumentError("label " + std::to_string(label) + " out of range");
  }
}

// Loss and dL/d output for the pass cached in tape.
double OutputLoss(const Model& model, const SampleView& x, uint32_t label,
                  detail::Tape& tape, std::vector<double>& grad_out) {
  const size_t n = tape.output.size();
  grad_out.resize(n);
  if (IsClassifier(model.arch())) {
    std::vector<double> probs(n);
    return detail::SoftmaxCrossEntropy(tape.output, label, probs, grad_out);
  }
  double loss = 0.0;
  const double inv = 1.0 / static_cast<double>(n);
  for (size_t i = 0; i < n; ++i) {
    const double diff = tape.output[i] - static_cast<double>(x.values[i]);
    loss += diff * diff;
    grad_out[i] = 2.0 * diff * inv;
  }
  return loss * inv;
}

}  // namespace

Model::Model(ArchSpec arch, std::vector<double> params,
             std::vector<std::string> lineage)
    : arch_(std::move(arch)),
      params_(std::move(params)),
      lineage_(std::move(lineage)),
      net_(detail::MakeNetwork(arch_)) {
  if (params_.size() != net_->param_count()) {
    throw InvalidArgumentError("parameter vector has " + std::to_string(params_.size()) +
                               " entries but the arch implies " +
                               std::to_string(net_->param_count()));
  }
  for (size_t i = 0; i < params_.size(); ++i) {
    if (!std::isfinite(params_[i])) {
      throw InvalidArgumentError("parameter " + std::to_string(i) + " is not finite");
    }
  }
}

const std::vector<ParamBlock>& Model::layout() const { return net_->layout(); }

size_t Model::output_size() const { return net_->output_size(); }

Model Model::WithParams(std::vector<double> params, std::string lineage_entry) const {
  auto lineage = lineage_;
  if (!lineage_entry.empty()) lineage.push_back(std::move(lineage_entry));
  return Model(arch_, std::move(params), std::move(lineage));
}

size_t ParamCount(const ArchSpec& arch) { return detail::MakeNetwork(arch)->param_count(); }

Model InitModel(const ArchSpec& arch, uint64_t seed) {
  auto net = detail::MakeNetwork(arch);
  std::vector<double> params(net->param_count(), 0.0);
  Rng rng(DeriveSeed(seed, "init"));
  for (const ParamBlock& block : net->layout()) {
    if (block.is_bias) continue;
    const double s = std::sqrt(6.0 / static_cast<double>(block.fan_in + block.fan_out));
    for (size_t i = 0; i < block.size; ++i) {
      params[block.offset + i] = rng.Uniform(-s, s);
    }
  }
  return Model(arch, std::move(params), {"init seed=" + std::to_string(seed)});
}

std::vector<double> Forward(const Model& model, const SampleView& x) {
  CheckSample(model, x);
  auto& tape = ThreadTape();
  model.network().Forward(model.params(), x, tape);
  return tape.output;
}

std::vector<double> PredictProba(const Model& model, const SampleView& x) {
  if (!IsClassifier(model.arch())) {
    throw InvalidArgumentError("PredictProba needs a classifier");
  }
  std::vector<double> logits = Forward(model, x);
  std::vector<double> probs(logits.size());
  detail::SoftmaxCrossEntropy(logits, 0, probs, {});
  return probs;
}

uint32_t ArgMax(std::span<const double> values) {
  uint32_t best = 0;
  for (uint32_t k = 1; k < values.size(); ++k) {
    if (values[k] > values[best]) best = k;
  }
  return best;
}

uint32_t PredictClass(const Model& model, const SampleView& x) {
  return ArgMax(PredictProba(model, x));
}

double Loss(const Model& model, const SampleView& x, uint32_t label) {
  CheckSample(model, x);
  CheckLabel(model, label);
  auto& tape = ThreadTape();
  model.network().Forward(model.params(), x, tape);
  std::vector<double> grad_out;
  return OutputLoss(model, x, label, tape, grad_out);
}

std::vector<double> InputGradient(const Model& model, const SampleView& x,
                                  uint32_t label) {
  if (TakesTokens(model.arch())) {
    throw UnsupportedModalityError(
        "input gradients are undefined for token inputs; text uses discrete edits");
  }
  CheckSample(model, x);
  CheckLabel(model, label);
  auto& tape = ThreadTape();
  model.network().Forward(model.params(), x, tape);
  std::vector<double> grad_out;
  OutputLoss(model, x, label, tape, grad_out);
  std::vector<double> grad(x.values.size(), 0.0);
  model.network().Backward(model.params(), x, tape, grad_out, {}, grad);
  if (!IsClassifier(model.arch())) {
    // The reconstruction target is the input itself.
    for (size_t i = 0; i < grad.size(); ++i) grad[i] -= grad_out[i];
  }
  return grad;
}

double AccumulateParamGradient(const Model& model, const SampleView& x,
                               uint32_t label, std::span<double> grad) {
  CheckSample(model, x);
  CheckLabel(model, label);
  if (grad.size() != model.param_count()) {
    throw InvalidArgumentError("gradient buffer has the wrong size");
  }
  auto& tape = ThreadTape();
  model.network().Forward(model.params(), x, tape);
  std::vector<double> grad_out;
  const double loss = OutputLoss(model, x, label, tape, grad_out);
  model.network().Backward(model.params(), x, tape, grad_out, grad, {});
  return loss;
}

std::vector<double> Reconstruct(const Model& model, const SampleView& x) {
  if (IsClassifier(model.arch())) {
    throw InvalidArgumentError("Reconstruct needs a dense-autoencoder");
  }
  return Forward(model, x);
}

std::vector<double> SentenceEmbedding(const Model& model,
                                      std::span<const uint32_t> tokens) {
  if (!TakesTokens(model.arch())) {
    throw InvalidArgumentError("SentenceEmbedding needs a bow-text model");
  }
  CheckSample(model, {{}, tokens});
  const ParamBlock& emb = model.layout()[0];
  const size_t dim = model.arch().embed_dim;
  std::vector<double> mean(dim, 0.0);
  for (uint32_t id : tokens) {
    const double* row = model.params().data() + emb.offset + static_cast<size_t>(id) * dim;
    for (size_t d = 0; d < dim; ++d) mean[d] += row[d];
  }
  for (double& v : mean) v /= static_cast<double>(tokens.size());
  return mean;
}

std::vector<int32_t> ActivationPattern(const Model& model, const SampleView& x) {
  CheckSample(model, x);
  auto& tape = ThreadTape();
  model.network().Forward(model.params(), x, tape);
  return tape.switches;
}

std::string Fingerprint(const Model& model) {
  std::string bytes = ArchToJson(model.arch()).dump();
  const size_t offset = bytes.size();
  bytes.resize(offset + 8 * model.param_count());
  for (size_t i = 0; i < model.param_count(); ++i) {
    uint64_t bits;
    std::memcpy(&bits, &model.params()[i], 8);
    for (int b = 0; b < 8; ++b) {
      bytes[offset + 8 * i + static_cast<size_t>(b)] = static_cast<char>(bits >> (8 * b));
    }
  }
  return Sha256Hex(bytes);
}

}  // namespace cleanmark
