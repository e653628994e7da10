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

#ifndef CLEANMARK_KERNELS_H_
#define CLEANMARK_KERNELS_H_

#include <cstddef>
#include <span>
#include <vector>

#include "cleanmark/dataset.h"
#include "cleanmark/model.h"
#include "cleanmark/parallel.h"

namespace cleanmark {

// Batch kernels over a dataset. Each has a serial reference path
// (Execution::kSerial) and an OpenMP path; both produce bit-identical output.

// Row-major n x K posterior matrix.
std::vector<double> PredictProbaBatch(const Model& model, const Dataset& dataset,
                                      Execution exec);
std::vector<uint32_t> PredictClassBatch(const Model& model, const Dataset& dataset,
                                        Execution exec);
std::vector<double> PerSampleLoss(const Model& model, const Dataset& dataset,
                                  Execution exec);

// Mean loss and mean parameter gradient over dataset[indices]. Per-sample
// gradients are formed independently and summed in index order.
double MeanGradient(const Model& model, const Dataset& dataset,
                    std::span<const size_t> indices, std::span<double> grad,
                    Execution exec);

}  // namespace cleanmark

#endif  // CLEANMARK_KERNELS_H_
