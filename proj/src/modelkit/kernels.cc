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

#include "cleanmark/kernels.h"

#include <algorithm>

#include "cleanmark/errors.h"

namespace cleanmark {

std::vector<double> PredictProbaBatch(const Model& model, const Dataset& dataset,
                                      Execution exec) {
  const size_t k = model.output_size();
  std::vector<double> out(dataset.size() * k);
  ForEachIndex(dataset.size(), exec, [&](size_t i) {
    auto p = PredictProba(model, dataset.sample(i));
    std::copy(p.begin(), p.end(), out.begin() + static_cast<std::ptrdiff_t>(i * k));
  });
  return out;
}

std::vector<uint32_t> PredictClassBatch(const Model& model, const Dataset& dataset,
                                        Execution exec) {
  std::vector<uint32_t> out(dataset.size());
  ForEachIndex(dataset.size(), exec,
               [&](size_t i) { out[i] = PredictClass(model, dataset.sample(i)); });
  return out;
}

std::vector<double> PerSampleLoss(const Model& model, const Dataset& dataset,
                                  Execution exec) {
  std::vector<double> out(dataset.size());
  ForEachIndex(dataset.size(), exec, [&](size_t i) {
    out[i] = Loss(model, dataset.sample(i), dataset.label(i));
  });
  return out;
}

double MeanGradient(const Model& model, const Dataset& dataset,
                    std::span<const size_t> indices, std::span<double> grad,
                    Execution exec) {
  const size_t p = model.param_count();
  if (grad.size() != p) throw InvalidArgumentError("gradient buffer has the wrong size");
  if (indices.empty()) throw InvalidArgumentError("empty batch");
  std::fill(grad.begin(), grad.end(), 0.0);
  const size_t n = indices.size();
  std::vector<double> losses(n);
  if (exec == Execution::kSerial) {
    std::vector<double> one(p);
    for (size_t b = 0; b < n; ++b) {
      std::fill(one.begin(), one.end(), 0.0);
      const size_t i = indices[b];
      losses[b] = AccumulateParamGradient(model, dataset.sample(i), dataset.label(i), one);
      for (size_t j = 0; j < p; ++j) grad[j] += one[j];
    }
  } else {
    std::vector<double> rows(n * p, 0.0);
    ForEachIndex(n, exec, [&](size_t b) {
      const size_t i = indices[b];
      losses[b] = AccumulateParamGradient(model, dataset.sample(i), dataset.label(i),
                                          std::span<double>(rows).subspan(b * p, p));
    });
    for (size_t b = 0; b < n; ++b) {
      const double* row = rows.data() + b * p;
      for (size_t j = 0; j < p; ++j) grad[j] += row[j];
    }
  }
  const double inv = 1.0 / static_cast<double>(n);
  for (double& g : grad) g *= inv;
  double loss = 0.0;
  for (double l : losses) loss += l;
  return loss * inv;
}

}  // namespace cleanmark
