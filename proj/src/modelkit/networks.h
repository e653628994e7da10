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

#ifndef CLEANMARK_MODELKIT_NETWORKS_H_
#define CLEANMARK_MODELKIT_NETWORKS_H_

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "cleanmark/arch.h"
#include "cleanmark/dataset.h"
#include "cleanmark/model.h"

namespace cleanmark::detail {

// Per-thread scratch for one forward/backward pass.
struct Tape {
  std::vector<std::vector<double>> act;
  std::vector<std::vector<double>> grad;
  std::vector<std::vector<int32_t>> argmax;
  std::vector<int32_t> switches;
  std::vector<double> output;
};

class Network {
 public:
  virtual ~Network() = default;

  const std::vector<ParamBlock>& layout() const { return layout_; }
  size_t param_count() const;
  virtual size_t output_size() const = 0;

  // Fills tape.output (logits or reconstruction) and the activation cache.
  virtual void Forward(std::span<const double> params, const SampleView& x,
                       Tape& tape) const = 0;

  // Backpropagates grad_output (dL/d output) through the pass cached in
  // tape. Adds into grad_params when non-empty and into grad_input (sized
  // like the sample) when non-empty.
  virtual void Backward(std::span<const double> params, const SampleView& x,
                        Tape& tape, std::span<const double> grad_output,
                        std::span<double> grad_params,
                        std::span<double> grad_input) const = 0;

 protected:
  void AddBlock(std::string name, size_t size, size_t fan_in, size_t fan_out,
                bool is_bias);

  std::vector<ParamBlock> layout_;
};

std::shared_ptr<const Network> MakeNetwork(const ArchSpec& arch);

}  // namespace cleanmark::detail

#endif  // CLEANMARK_MODELKIT_NETWORKS_H_
