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

#include "cleanmark/train.h"

#include <cmath>
#include <numeric>
#include <string>

#include "cleanmark/errors.h"
#include "cleanmark/kernels.h"
#include "cleanmark/rng.h"

namespace cleanmark {

void ValidateTrainConfig(const TrainConfig& cfg) {
  if (cfg.epochs == 0) throw InvalidArgumentError("epochs must be at least 1");
  if (cfg.batch_size == 0) throw InvalidArgumentError("batch_size must be at least 1");
  if (!(cfg.schedule.initial_rate > 0.0) || !(cfg.schedule.decayed_rate > 0.0)) {
    throw InvalidArgumentError("learning rates must be positive");
  }
  if (!(cfg.momentum >= 0.0 && cfg.momentum < 1.0)) {
    throw InvalidArgumentError("momentum must lie in [0, 1)");
  }
}

Model Train(const Model& model, const Dataset& dataset, const TrainConfig& cfg,
            TrainLog* log, Execution exec) {
  ValidateTrainConfig(cfg);
  if (dataset.empty()) throw InvalidArgumentError("cannot train on an empty dataset");
  CheckCompatible(model.arch(), dataset);

  const size_t n = dataset.size();
  const size_t p = model.param_count();
  std::vector<double> params(model.params().begin(), model.params().end());
  std::vector<double> velocity(p, 0.0);
  std::vector<double> grad(p, 0.0);
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});

  if (log != nullptr) {
    auto losses = PerSampleLoss(model, dataset, exec);
    log->initial_loss = std::accumulate(losses.begin(), losses.end(), 0.0) /
                        static_cast<double>(n);
    log->epoch_loss.clear();
  }

  Model current = model;
  for (size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng rng(DeriveSeed(cfg.seed, epoch));
    rng.Shuffle(order);
    const double rate = cfg.schedule.RateAt(epoch);
    double loss_sum = 0.0;
    size_t batches = 0;
    for (size_t start = 0; start < n; start += cfg.batch_size) {
      const size_t end = std::min(n, start + cfg.batch_size);
      const std::span<const size_t> batch(order.data() + start, end - start);
      const double loss = MeanGradient(current, dataset, batch, grad, exec);
      if (!std::isfinite(loss)) {
        throw NumericError("non-finite loss at epoch " + std::to_string(epoch) +
                           ", batch " + std::to_string(batches) + " (rate " +
                           std::to_string(rate) + ")");
      }
      for (size_t j = 0; j < p; ++j) {
        velocity[j] = cfg.momentum * velocity[j] + grad[j];
        params[j] -= rate * velocity[j];
      }
      for (size_t j = 0; j < p; ++j) {
        if (!std::isfinite(static_cast<float>(params[j]))) {
          throw NumericError("parameter " + std::to_string(j) +
                             " diverged at epoch " + std::to_string(epoch) +
                             ", batch " + std::to_string(batches));
        }
      }
      current = Model(current.arch(), params, current.lineage());
      loss_sum += loss * static_cast<double>(end - start);
      ++batches;
    }
    if (log != nullptr) log->epoch_loss.push_back(loss_sum / static_cast<double>(n));
  }
  return current.WithParams(params, "train seed=" + std::to_string(cfg.seed) +
                                        " epochs=" + std::to_string(cfg.epochs) +
                                        " samples=" + std::to_string(n));
}

double Accuracy(const Model& model, const Dataset& dataset, Execution exec) {
  if (dataset.empty()) throw InvalidArgumentError("accuracy of an empty dataset");
  CheckCompatible(model.arch(), dataset);
  const auto predicted = PredictClassBatch(model, dataset, exec);
  size_t correct = 0;
  for (size_t i = 0; i < dataset.size(); ++i) correct += predicted[i] == dataset.label(i);
  return static_cast<double>(correct) / static_cast<double>(dataset.size());
}

}  // namespace cleanmark
