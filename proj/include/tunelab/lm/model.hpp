/* Copyright 2026 The Tunelab Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tunelab/common/error.hpp"
#include "tunelab/common/rng.hpp"

namespace tunelab::lm {

class NumericError : public Error {
 public:
  using Error::Error;
};

enum class Mode { Char, Token };
std::string_view to_string(Mode mode);
Mode parse_mode(std::string_view text);

struct ModelConfig {
  int vocab_size = 2;
  int layers = 3;
  int hidden = 512;
  double dropout = 0.5;
  Mode mode = Mode::Token;

  // Throws Error when an invariant (V >= 2, L >= 1, H >= 1, 0 <= p < 1) fails.
  void validate() const;
  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

// 4(H(V+H)+H) + (L-1)*4(H(2H)+H) + (HV+V)
std::int64_t param_count(const ModelConfig& config);

// A named block of the flat parameter vector.
struct TensorInfo {
  std::string name;
  int rows;
  int cols;
  std::size_t offset;
  std::size_t size() const { return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols); }
};

// Names, shapes and offsets in storage order: per layer `lstm.<l>.w_input`
// (D x 4H), `lstm.<l>.w_hidden` (H x 4H), `lstm.<l>.bias` (1 x 4H); then
// `output.weight` (H x V) and `output.bias` (1 x V). Gate columns run
// input, forget, output, candidate.
std::vector<TensorInfo> tensor_layout(const ModelConfig& config);

// Inputs, next-step targets and loss mask for B sequences of T steps,
// stored row-major as [b * T + t].
struct Minibatch {
  int batch = 0;
  int steps = 0;
  std::vector<int> inputs;
  std::vector<int> targets;
  std::vector<float> mask;

  std::size_t index(int b, int t) const { return static_cast<std::size_t>(b) * steps + t; }
  double mask_sum() const;
};

// Hidden and cell state of every layer for B rows.
template <class T>
struct LstmState {
  int batch = 0;
  std::vector<std::vector<T>> h;  // [layer][b * H + j]
  std::vector<std::vector<T>> c;
};

// Stacked LSTM language model over one-hot inputs. T is float for training
// and double for gradient checks.
template <class T>
class Lstm {
 public:
  explicit Lstm(const ModelConfig& config);

  const ModelConfig& config() const { return config_; }
  const std::vector<TensorInfo>& layout() const { return layout_; }
  const TensorInfo& tensor(std::string_view name) const;

  std::vector<T>& params() { return params_; }
  const std::vector<T>& params() const { return params_; }
  const std::vector<T>& grads() const { return grads_; }
  std::vector<T>& grads() { return grads_; }

  // Weights uniform in [-0.08, 0.08]; forget-gate biases 1, other biases 0.
  void init(std::uint64_t seed);

  LstmState<T> zero_state(int batch) const;

  // Runs B x T inputs from `state`, leaving the final state in `state`.
  // Dropout (inverted, rate from the config) follows every layer when
  // `dropout_rng` is non-null. Keeps what backward() needs.
  void forward(const Minibatch& batch, LstmState<T>& state, CounterRng* dropout_rng);

  // Logits of the last forward pass at (b, t).
  std::span<const T> logits(int b, int t) const;

  // Mean negative log-likelihood over mask=1 positions of the last forward
  // pass. Throws Error on an all-zero mask, NumericError on a non-finite value.
  T loss(const Minibatch& batch);

  // Full backpropagation through time for the last forward()+loss(); overwrites
  // grads(). Throws NumericError naming the first tensor with a non-finite
  // gradient.
  void backward(const Minibatch& batch);

  // One inference step for B rows without touching any training cache; safe to
  // call concurrently on a shared model. `logits` is resized to B x V.
  void step(std::span<const int> tokens, LstmState<T>& state, std::vector<T>& logits) const;

 private:
  struct LayerCache {
    std::vector<T> gates;    // [t*B + b][4H] after the nonlinearities
    std::vector<T> cell;     // [t*B + b][H]
    std::vector<T> hidden;   // [t*B + b][H] before dropout
    std::vector<T> out;      // [t*B + b][H] after dropout, input of the next layer
    std::vector<T> keep;     // dropout scale per unit, empty when off
    std::vector<T> h0, c0;   // state entering the batch
  };

  int input_dim(int layer) const { return layer == 0 ? config_.vocab_size : config_.hidden; }
  const T* ptr(std::size_t tensor_index) const { return params_.data() + layout_[tensor_index].offset; }
  T* grad_ptr(std::size_t tensor_index) { return grads_.data() + layout_[tensor_index].offset; }

  ModelConfig config_;
  std::vector<TensorInfo> layout_;
  std::vector<T> params_;
  std::vector<T> grads_;

  // Cache of the last forward pass.
  int batch_ = 0;
  int steps_ = 0;
  std::vector<int> inputs_tm_;  // time-major copy of the inputs
  std::vector<LayerCache> cache_;
  std::vector<T> logits_;  // [t*B + b][V]
  std::vector<T> probs_;   // softmax of logits_, filled by loss()
};

extern template class Lstm<float>;
extern template class Lstm<double>;

// Numerically stable in-place softmax of one row.
template <class T>
void softmax(std::span<T> row);

// Elementwise clamp to [lo, hi].
template <class T>
void clip(std::span<T> values, T lo = T(-5), T hi = T(5));

struct RmsProp {
  double rho = 0.95;
  double epsilon = 1e-8;
  std::vector<float> mean_square;

  // a <- rho a + (1 - rho) g^2; p <- p - lr g / (sqrt(a) + eps)
  void step(std::span<float> params, std::span<const float> grads, double lr);
};

}  // namespace tunelab::lm
