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

#include "networks.h"

#include <string>

#include "cleanmark/errors.h"
#include "layers.h"

namespace cleanmark::detail {
namespace {

// Returns the block's start within params, or nullptr for an empty span.
const double* At(std::span<const double> params, const ParamBlock& b) {
  return params.data() + b.offset;
}
double* At(std::span<double> grads, const ParamBlock& b) {
  return grads.empty() ? nullptr : grads.data() + b.offset;
}

std::span<double> Sized(std::vector<double>& v, size_t n) {
  v.resize(n);
  return v;
}

std::span<double> Zeroed(std::vector<double>& v, size_t n) {
  v.assign(n, 0.0);
  return v;
}

void Prepare(Tape& tape, size_t acts, size_t argmaxes) {
  if (tape.act.size() < acts) tape.act.resize(acts);
  if (tape.grad.size() < acts) tape.grad.resize(acts);
  if (tape.argmax.size() < argmaxes) tape.argmax.resize(argmaxes);
  tape.switches.clear();
}

class LinearSoftmax final : public Network {
 public:
  explicit LinearSoftmax(const ArchSpec& arch)
      : in_(InputSize(arch)), out_(arch.num_classes) {
    AddBlock("dense.w", in_ * out_, in_, out_, false);
    AddBlock("dense.b", out_, in_, out_, true);
  }
  size_t output_size() const override { return out_; }

  void Forward(std::span<const double> params, const SampleView& x,
               Tape& tape) const override {
    Prepare(tape, 0, 0);
    DenseForward(x.values, At(params, layout_[0]), At(params, layout_[1]),
                 Sized(tape.output, out_));
  }

  void Backward(std::span<const double> params, const SampleView& x, Tape&,
                std::span<const double> g, std::span<double> gp,
                std::span<double> gx) const override {
    DenseBackward(x.values, At(params, layout_[0]), g, At(gp, layout_[0]),
                  At(gp, layout_[1]), gx);
  }

 private:
  size_t in_, out_;
};

// Shared by mlp (softmax head) and the dense autoencoder (reconstruction).
class TwoLayerDense final : public Network {
 public:
  TwoLayerDense(const ArchSpec& arch, size_t out)
      : in_(InputSize(arch)), hidden_(arch.hidden), out_(out) {
    AddBlock("hidden.w", in_ * hidden_, in_, hidden_, false);
    AddBlock("hidden.b", hidden_, in_, hidden_, true);
    AddBlock("out.w", hidden_ * out_, hidden_, out_, false);
    AddBlock("out.b", out_, hidden_, out_, true);
  }
  size_t output_size() const override { return out_; }

  void Forward(std::span<const double> params, const SampleView& x,
               Tape& tape) const override {
    Prepare(tape, 1, 0);
    auto h = Sized(tape.act[0], hidden_);
    DenseForward(x.values, At(params, layout_[0]), At(params, layout_[1]), h);
    ReluForward(h, tape.switches);
    DenseForward(std::span<const double>(h), At(params, layout_[2]),
                 At(params, layout_[3]), Sized(tape.output, out_));
  }

  void Backward(std::span<const double> params, const SampleView& x, Tape& tape,
                std::span<const double> g, std::span<double> gp,
                std::span<double> gx) const override {
    const std::span<const double> h = tape.act[0];
    auto gh = Zeroed(tape.grad[0], hidden_);
    DenseBackward(h, At(params, layout_[2]), g, At(gp, layout_[2]),
                  At(gp, layout_[3]), gh);
    ReluBackward(h, gh);
    DenseBackward(x.values, At(params, layout_[0]), std::span<const double>(gh),
                  At(gp, layout_[0]), At(gp, layout_[1]), gx);
  }

 private:
  size_t in_, hidden_, out_;
};

class SmallCnn final : public Network {
 public:
  explicit SmallCnn(const ArchSpec& arch)
      : h_(arch.input_shape[0]),
        w_(arch.input_shape[1]),
        c_(arch.input_shape[2]),
        c1_(arch.channels1),
        c2_(arch.channels2),
        k_(arch.num_classes) {
    AddBlock("conv1.w", 9 * c_ * c1_, 9 * c_, 9 * c1_, false);
    AddBlock("conv1.b", c1_, 9 * c_, 9 * c1_, true);
    AddBlock("conv2.w", 9 * c1_ * c2_, 9 * c1_, 9 * c2_, false);
    AddBlock("conv2.b", c2_, 9 * c1_, 9 * c2_, true);
    const size_t flat = (h_ / 4) * (w_ / 4) * c2_;
    AddBlock("dense.w", flat * k_, flat, k_, false);
    AddBlock("dense.b", k_, flat, k_, true);
  }
  size_t output_size() const override { return k_; }

  void Forward(std::span<const double> params, const SampleView& x,
               Tape& tape) const override {
    Prepare(tape, 4, 2);
    const Conv2DShape s1{h_, w_, c_, c1_};
    const Conv2DShape s2{h_ / 2, w_ / 2, c1_, c2_};
    auto a1 = Sized(tape.act[0], h_ * w_ * c1_);
    Conv3x3Forward(s1, x.values, At(params, layout_[0]), At(params, layout_[1]), a1);
    ReluForward(a1, tape.switches);
    auto p1 = Sized(tape.act[1], (h_ / 2) * (w_ / 2) * c1_);
    tape.argmax[0].resize(p1.size());
    MaxPool2Forward(h_, w_, c1_, a1, p1, tape.argmax[0], tape.switches);
    auto a2 = Sized(tape.act[2], (h_ / 2) * (w_ / 2) * c2_);
    Conv3x3Forward(s2, std::span<const double>(p1), At(params, layout_[2]),
                   At(params, layout_[3]), a2);
    ReluForward(a2, tape.switches);
    auto p2 = Sized(tape.act[3], (h_ / 4) * (w_ / 4) * c2_);
    tape.argmax[1].resize(p2.size());
    MaxPool2Forward(h_ / 2, w_ / 2, c2_, a2, p2, tape.argmax[1], tape.switches);
    DenseForward(std::span<const double>(p2), At(params, layout_[4]),
                 At(params, layout_[5]), Sized(tape.output, k_));
  }

  void Backward(std::span<const double> params, const SampleView& x, Tape& tape,
                std::span<const double> g, std::span<double> gp,
                std::span<double> gx) const override {
    const Conv2DShape s1{h_, w_, c_, c1_};
    const Conv2DShape s2{h_ / 2, w_ / 2, c1_, c2_};
    auto gp2 = Zeroed(tape.grad[3], tape.act[3].size());
    DenseBackward(std::span<const double>(tape.act[3]), At(params, layout_[4]), g,
                  At(gp, layout_[4]), At(gp, layout_[5]), gp2);
    auto ga2 = Zeroed(tape.grad[2], tape.act[2].size());
    MaxPool2Backward(tape.argmax[1], gp2, ga2);
    ReluBackward(tape.act[2], ga2);
    auto gp1 = Zeroed(tape.grad[1], tape.act[1].size());
    Conv3x3Backward(s2, std::span<const double>(tape.act[1]), At(params, layout_[2]),
                    std::span<const double>(ga2), At(gp, layout_[2]),
                    At(gp, layout_[3]), gp1);
    auto ga1 = Zeroed(tape.grad[0], tape.act[0].size());
    MaxPool2Backward(tape.argmax[0], gp1, ga1);
    ReluBackward(tape.act[0], ga1);
    Conv3x3Backward(s1, x.values, At(params, layout_[0]), std::span<const double>(ga1),
                    At(gp, layout_[0]), At(gp, layout_[1]), gx);
  }

 private:
  size_t h_, w_, c_, c1_, c2_, k_;
};

class AudioConv final : public Network {
 public:
  explicit AudioConv(const ArchSpec& arch)
      : s1_{arch.input_shape[0], 1, arch.channels1, arch.kernel, arch.stride},
        s2_{s1_.out_length(), arch.channels1, arch.channels2, arch.kernel, arch.stride},
        k_(arch.num_classes) {
    AddBlock("conv1.w", s1_.kernel * s1_.in_channels * s1_.out_channels,
             s1_.kernel * s1_.in_channels, s1_.kernel * s1_.out_channels, false);
    AddBlock("conv1.b", s1_.out_channels, s1_.kernel * s1_.in_channels,
             s1_.kernel * s1_.out_channels, true);
    AddBlock("conv2.w", s2_.kernel * s2_.in_channels * s2_.out_channels,
             s2_.kernel * s2_.in_channels, s2_.kernel * s2_.out_channels, false);
    AddBlock("conv2.b", s2_.out_channels, s2_.kernel * s2_.in_channels,
             s2_.kernel * s2_.out_channels, true);
    const size_t flat = s2_.out_length() * s2_.out_channels;
    AddBlock("dense.w", flat * k_, flat, k_, false);
    AddBlock("dense.b", k_, flat, k_, true);
  }
  size_t output_size() const override { return k_; }

  void Forward(std::span<const double> params, const SampleView& x,
               Tape& tape) const override {
    Prepare(tape, 2, 0);
    auto a1 = Sized(tape.act[0], s1_.out_length() * s1_.out_channels);
    Conv1DForward(s1_, x.values, At(params, layout_[0]), At(params, layout_[1]), a1);
    ReluForward(a1, tape.switches);
    auto a2 = Sized(tape.act[1], s2_.out_length() * s2_.out_channels);
    Conv1DForward(s2_, std::span<const double>(a1), At(params, layout_[2]),
                  At(params, layout_[3]), a2);
    ReluForward(a2, tape.switches);
    DenseForward(std::span<const double>(a2), At(params, layout_[4]),
                 At(params, layout_[5]), Sized(tape.output, k_));
  }

  void Backward(std::span<const double> params, const SampleView& x, Tape& tape,
                std::span<const double> g, std::span<double> gp,
                std::span<double> gx) const override {
    auto ga2 = Zeroed(tape.grad[1], tape.act[1].size());
    DenseBackward(std::span<const double>(tape.act[1]), At(params, layout_[4]), g,
                  At(gp, layout_[4]), At(gp, layout_[5]), ga2);
    ReluBackward(tape.act[1], ga2);
    auto ga1 = Zeroed(tape.grad[0], tape.act[0].size());
    Conv1DBackward(s2_, std::span<const double>(tape.act[0]), At(params, layout_[2]),
                   std::span<const double>(ga2), At(gp, layout_[2]),
                   At(gp, layout_[3]), ga1);
    ReluBackward(tape.act[0], ga1);
    Conv1DBackward(s1_, x.values, At(params, layout_[0]), std::span<const double>(ga1),
                   At(gp, layout_[0]), At(gp, layout_[1]), gx);
  }

 private:
  Conv1DShape s1_, s2_;
  size_t k_;
};

class BowText final : public Network {
 public:
  explicit BowText(const ArchSpec& arch)
      : vocab_(arch.input_shape[0]), dim_(arch.embed_dim), k_(arch.num_classes) {
    AddBlock("embedding", vocab_ * dim_, vocab_, dim_, false);
    AddBlock("dense.w", dim_ * k_, dim_, k_, false);
    AddBlock("dense.b", k_, dim_, k_, true);
  }
  size_t output_size() const override { return k_; }

  void Forward(std::span<const double> params, const SampleView& x,
               Tape& tape) const override {
    Prepare(tape, 1, 0);
    auto h = Zeroed(tape.act[0], dim_);
    const double* emb = At(params, layout_[0]);
    for (uint32_t id : x.tokens) {
      const double* row = emb + static_cast<size_t>(id) * dim_;
      for (size_t d = 0; d < dim_; ++d) h[d] += row[d];
    }
    const double inv = 1.0 / static_cast<double>(x.tokens.size());
    for (double& v : h) v *= inv;
    DenseForward(std::span<const double>(h), At(params, layout_[1]),
                 At(params, layout_[2]), Sized(tape.output, k_));
  }

  void Backward(std::span<const double> params, const SampleView& x, Tape& tape,
                std::span<const double> g, std::span<double> gp,
                std::span<double>) const override {
    auto gh = Zeroed(tape.grad[0], dim_);
    DenseBackward(std::span<const double>(tape.act[0]), At(params, layout_[1]), g,
                  At(gp, layout_[1]), At(gp, layout_[2]), gh);
    double* gemb = At(gp, layout_[0]);
    if (gemb == nullptr) return;
    const double inv = 1.0 / static_cast<double>(x.tokens.size());
    for (uint32_t id : x.tokens) {
      double* row = gemb + static_cast<size_t>(id) * dim_;
      for (size_t d = 0; d < dim_; ++d) row[d] += gh[d] * inv;
    }
  }

 private:
  size_t vocab_, dim_, k_;
};

}  // namespace

size_t Network::param_count() const {
  return layout_.empty() ? 0 : layout_.back().offset + layout_.back().size;
}

void Network::AddBlock(std::string name, size_t size, size_t fan_in,
                       size_t fan_out, bool is_bias) {
  ParamBlock b;
  b.name = std::move(name);
  b.offset = param_count();
  b.size = size;
  b.fan_in = fan_in;
  b.fan_out = fan_out;
  b.is_bias = is_bias;
  layout_.push_back(std::move(b));
}

std::shared_ptr<const Network> MakeNetwork(const ArchSpec& arch) {
  ValidateArch(arch);
  switch (arch.family) {
    case Family::kLinearSoftmax:
      return std::make_shared<LinearSoftmax>(arch);
    case Family::kMlp:
      return std::make_shared<TwoLayerDense>(arch, arch.num_classes);
    case Family::kSmallCnn:
      return std::make_shared<SmallCnn>(arch);
    case Family::kAudioConv:
      return std::make_shared<AudioConv>(arch);
    case Family::kBowText:
      return std::make_shared<BowText>(arch);
    case Family::kDenseAutoencoder:
      return std::make_shared<TwoLayerDense>(arch, InputSize(arch));
  }
  throw InvalidArgumentError("unknown model family");
}

}  // namespace cleanmark::detail
