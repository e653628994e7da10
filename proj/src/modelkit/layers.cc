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

#include "layers.h"

#include <cmath>

namespace cleanmark::detail {

void ReluForward(std::span<double> v, std::vector<int32_t>& switches) {
  for (double& x : v) {
    const bool on = x > 0.0;
    if (!on) x = 0.0;
    switches.push_back(on ? 1 : 0);
  }
}

void ReluBackward(std::span<const double> activation, std::span<double> g) {
  for (size_t i = 0; i < g.size(); ++i) {
    if (!(activation[i] > 0.0)) g[i] = 0.0;
  }
}

void MaxPool2Forward(size_t height, size_t width, size_t channels,
                     std::span<const double> x, std::span<double> out,
                     std::span<int32_t> argmax, std::vector<int32_t>& switches) {
  const size_t oh = height / 2, ow = width / 2;
  for (size_t r = 0; r < oh; ++r) {
    for (size_t c = 0; c < ow; ++c) {
      for (size_t k = 0; k < channels; ++k) {
        size_t best = ((2 * r) * width + 2 * c) * channels + k;
        for (size_t dr = 0; dr < 2; ++dr) {
          for (size_t dc = 0; dc < 2; ++dc) {
            const size_t idx = ((2 * r + dr) * width + 2 * c + dc) * channels + k;
            if (x[idx] > x[best]) best = idx;
          }
        }
        const size_t o = (r * ow + c) * channels + k;
        out[o] = x[best];
        argmax[o] = static_cast<int32_t>(best);
        switches.push_back(static_cast<int32_t>(best));
      }
    }
  }
}

void MaxPool2Backward(std::span<const int32_t> argmax, std::span<const double> g,
                      std::span<double> gx) {
  for (size_t o = 0; o < g.size(); ++o) gx[static_cast<size_t>(argmax[o])] += g[o];
}

double SoftmaxCrossEntropy(std::span<const double> logits, uint32_t label,
                           std::span<double> probs, std::span<double> grad) {
  double max_logit = logits[0];
  for (double v : logits) max_logit = std::max(max_logit, v);
  double sum = 0.0;
  for (size_t k = 0; k < logits.size(); ++k) {
    probs[k] = std::exp(logits[k] - max_logit);
    sum += probs[k];
  }
  for (size_t k = 0; k < logits.size(); ++k) probs[k] /= sum;
  const double loss = -(logits[label] - max_logit - std::log(sum));
  if (!grad.empty()) {
    for (size_t k = 0; k < logits.size(); ++k) grad[k] = probs[k];
    grad[label] -= 1.0;
  }
  return loss;
}

}  // namespace cleanmark::detail
