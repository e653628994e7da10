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

#ifndef CLEANMARK_TRAIN_H_
#define CLEANMARK_TRAIN_H_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "cleanmark/dataset.h"
#include "cleanmark/model.h"
#include "cleanmark/parallel.h"

namespace cleanmark {

// Step decay: initial_rate until decay_epoch, decayed_rate afterwards.
struct LearningRateSchedule {
  double initial_rate = 0.01;
  size_t decay_epoch = 10;
  double decayed_rate = 0.001;

  double RateAt(size_t epoch) const {
    return epoch < decay_epoch ? initial_rate : decayed_rate;
  }
};

struct TrainConfig {
  size_t epochs = 20;
  size_t batch_size = 128;
  LearningRateSchedule schedule;
  double momentum = 0.9;
  uint64_t seed = 0;
};

// Throws InvalidArgumentError unless rates > 0, momentum in [0, 1),
// epochs >= 1 and batch_size >= 1.
void ValidateTrainConfig(const TrainConfig& cfg);

struct TrainLog {
  // Mean loss over the dataset before the first update.
  double initial_loss = 0.0;
  // Running mean of minibatch losses per epoch.
  std::vector<double> epoch_loss;
};

// Minibatch SGD with momentum (v <- momentum * v + g; theta <- theta - lr * v)
// on the batch-mean gradient. Samples are reshuffled every epoch. Per-sample
// gradients may be computed concurrently but are reduced in sample order, so
// the result is a pure function of (model, dataset, cfg) for any thread count.
// Throws NumericError (with epoch and batch) if the loss becomes non-finite.
Model Train(const Model& model, const Dataset& dataset, const TrainConfig& cfg,
            TrainLog* log = nullptr, Execution exec = Execution::kParallel);

// Fraction of samples whose argmax prediction equals the label.
double Accuracy(const Model& model, const Dataset& dataset,
                Execution exec = Execution::kParallel);

}  // namespace cleanmark

#endif  // CLEANMARK_TRAIN_H_
