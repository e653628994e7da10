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

#ifndef CLEANMARK_MODELKIT_LAYERS_H_
#define CLEANMARK_MODELKIT_LAYERS_H_

// Forward and backward kernels for the zoo's layers. Tensors are flat,
// row-major, channels last. Backward kernels accumulate (+=) parameter
// gradients and input gradients; callers zero the buffers.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace cleanmark::detail {

// out[o] = b[o] + sum_i x[i] * w[i * n_out + o]
template <typename T>
void DenseForward(std::span<const T> x, const double* w, const double* b,
                  std::span<double> out) {
  const size_t n_out = out.size();
  for (size_t o = 0; o < n_out; ++o) out[o] = b[o];
  for (size_t i = 0; i < x.size(); ++i) {
    const double xi = static_cast<double>(x[i]);
    if (xi == 0.0) continue;
    const double* row = w + i * n_out;
    for (size_t o = 0; o < n_out; ++o) out[o] += xi * row[o];
  }
}

// gw, gb may be null (input gradient only); gx may be empty.
template <typename T>
void DenseBackward(std::span<const T> x, const double* w, std::span<const double> g,
                   double* gw, double* gb, std::span<double> gx) {
  const size_t n_out = g.size();
  if (gb != nullptr) {
    for (size_t o = 0; o < n_out; ++o) gb[o] += g[o];
  }
  for (size_t i = 0; i < x.size(); ++i) {
    const double* row = w + i * n_out;
    if (gw != nullptr) {
      const double xi = static_cast<double>(x[i]);
      double* grow = gw + i * n_out;
      if (xi != 0.0) {
        for (size_t o = 0; o < n_out; ++o) grow[o] += xi * g[o];
      }
    }
    if (!gx.empty()) {
      double acc = 0.0;
      for (size_t o = 0; o < n_out; ++o) acc += row[o] * g[o];
      gx[i] += acc;
    }
  }
}

// In place; appends one switch per unit.
void ReluForward(std::span<double> v, std::vector<int32_t>& switches);
// Zeroes g where the stored activation is not positive.
void ReluBackward(std::span<const double> activation, std::span<double> g);

struct Conv2DShape {
  size_t height;
  size_t width;
  size_t in_channels;
  size_t out_channels;
};

// 3x3 convolution, stride 1, zero padding 1. Weights [kh][kw][cin][cout].
template <typename T>
void Conv3x3Forward(const Conv2DShape& s, std::span<const T> x, const double* w,
                    const double* b, std::span<double> out) {
  const size_t h = s.height, wd = s.width, ci = s.in_channels, co = s.out_channels;
  for (size_t r = 0; r < h; ++r) {
    for (size_t c = 0; c < wd; ++c) {
      double* o = out.data() + (r * wd + c) * co;
      for (size_t k = 0; k < co; ++k) o[k] = b[k];
      for (size_t kh = 0; kh < 3; ++kh) {
        const ptrdiff_t rr = static_cast<ptrdiff_t>(r + kh) - 1;
        if (rr < 0 || rr >= static_cast<ptrdiff_t>(h)) continue;
        for (size_t kw = 0; kw < 3; ++kw) {
          const ptrdiff_t cc = static_cast<ptrdiff_t>(c + kw) - 1;
          if (cc < 0 || cc >= static_cast<ptrdiff_t>(wd)) continue;
          const T* in = x.data() + (static_cast<size_t>(rr) * wd + static_cast<size_t>(cc)) * ci;
          const double* wk = w + (kh * 3 + kw) * ci * co;
          for (size_t i = 0; i < ci; ++i) {
            const double xi = static_cast<double>(in[i]);
            const double* wrow = wk + i * co;
            for (size_t k = 0; k < co; ++k) o[k] += xi * wrow[k];
          }
        }
      }
    }
  }
}

template <typename T>
void Conv3x3Backward(const Conv2DShape& s, std::span<const T> x, const double* w,
                     std::span<const double> g, double* gw, double* gb,
                     std::span<double> gx) {
  const size_t h = s.height, wd = s.width, ci = s.in_channels, co = s.out_channels;
  for (size_t r = 0; r < h; ++r) {
    for (size_t c = 0; c < wd; ++c) {
      const double* go = g.data() + (r * wd + c) * co;
      if (gb != nullptr) {
        for (size_t k = 0; k < co; ++k) gb[k] += go[k];
      }
      for (size_t kh = 0; kh < 3; ++kh) {
        const ptrdiff_t rr = static_cast<ptrdiff_t>(r + kh) - 1;
        if (rr < 0 || rr >= static_cast<ptrdiff_t>(h)) continue;
        for (size_t kw = 0; kw < 3; ++kw) {
          const ptrdiff_t cc = static_cast<ptrdiff_t>(c + kw) - 1;
          if (cc < 0 || cc >= static_cast<ptrdiff_t>(wd)) continue;
          const size_t in_off = (static_cast<size_t>(rr) * wd + static_cast<size_t>(cc)) * ci;
          const T* in = x.data() + in_off;
          const double* wk = w + (kh * 3 + kw) * ci * co;
          double* gwk = gw == nullptr ? nullptr : gw + (kh * 3 + kw) * ci * co;
          for (size_t i = 0; i < ci; ++i) {
            const double* wrow = wk + i * co;
            if (gwk != nullptr) {
              const double xi = static_cast<double>(in[i]);
              double* grow = gwk + i * co;
              for (size_t k = 0; k < co; ++k) grow[k] += xi * go[k];
            }
            if (!gx.empty()) {
              double acc = 0.0;
              for (size_t k = 0; k < co; ++k) acc += wrow[k] * go[k];
              gx[in_off + i] += acc;
            }
          }
        }
      }
    }
  }
}

// 2x2 max pool, stride 2. Ties go to the first window element in row-major
// order. Records the winning input offset per output in `argmax` and appends
// it to `switches`.
void MaxPool2Forward(size_t height, size_t width, size_t channels,
                     std::span<const double> x, std::span<double> out,
                     std::span<int32_t> argmax, std::vector<int32_t>& switches);
void MaxPool2Backward(std::span<const int32_t> argmax, std::span<const double> g,
                      std::span<double> gx);

struct Conv1DShape {
  size_t length;
  size_t in_channels;
  size_t out_channels;
  size_t kernel;
  size_t stride;
  size_t out_length() const { return (length - kernel) / stride + 1; }
};

// Valid 1-D convolution. Weights [k][cin][cout].
template <typename T>
void Conv1DForward(const Conv1DShape& s, std::span<const T> x, const double* w,
                   const double* b, std::span<double> out) {
  const size_t lo = s.out_length(), ci = s.in_channels, co = s.out_channels;
  for (size_t t = 0; t < lo; ++t) {
    double* o = out.data() + t * co;
    for (size_t k = 0; k < co; ++k) o[k] = b[k];
    for (size_t j = 0; j < s.kernel; ++j) {
      const T* in = x.data() + (t * s.stride + j) * ci;
      const double* wj = w + j * ci * co;
      for (size_t i = 0; i < ci; ++i) {
        const double xi = static_cast<double>(in[i]);
        const double* wrow = wj + i * co;
        for (size_t k = 0; k < co; ++k) o[k] += xi * wrow[k];
      }
    }
  }
}

template <typename T>
void Conv1DBackward(const Conv1DShape& s, std::span<const T> x, const double* w,
                    std::span<const double> g, double* gw, double* gb,
                    std::span<double> gx) {
  const size_t lo = s.out_length(), ci = s.in_channels, co = s.out_channels;
  for (size_t t = 0; t < lo; ++t) {
    const double* go = g.data() + t * co;
    if (gb != nullptr) {
      for (size_t k = 0; k < co; ++k) gb[k] += go[k];
    }
    for (size_t j = 0; j < s.kernel; ++j) {
      const size_t in_off = (t * s.stride + j) * ci;
      const T* in = x.data() + in_off;
      const double* wj = w + j * ci * co;
      double* gwj = gw == nullptr ? nullptr : gw + j * ci * co;
      for (size_t i = 0; i < ci; ++i) {
        const double* wrow = wj + i * co;
        if (gwj != nullptr) {
          const double xi = static_cast<double>(in[i]);
          double* grow = gwj + i * co;
          for (size_t k = 0; k < co; ++k) grow[k] += xi * go[k];
        }
        if (!gx.empty()) {
          double acc = 0.0;
          for (size_t k = 0; k < co; ++k) acc += wrow[k] * go[k];
          gx[in_off + i] += acc;
        }
      }
    }
  }
}

// Softmax of logits into probs; returns -log probs[label] computed with the
// log-sum-exp shift. grad (optional) receives probs - onehot(label).
double SoftmaxCrossEntropy(std::span<const double> logits, uint32_t label,
                           std::span<double> probs, std::span<double> grad);

}  // namespace cleanmark::detail

#endif  // CLEANMARK_MODELKIT_LAYERS_H_
