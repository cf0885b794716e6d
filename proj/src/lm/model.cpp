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

#include "tunelab/lm/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tunelab/lm/kernels.hpp"

namespace tunelab::lm {
namespace {

template <class T>
T sigmoid(T x) {
  return T(1) / (T(1) + std::exp(-x));
}

template <class T>
bool all_finite(const T* p, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    if (!std::isfinite(p[i])) return false;
  return true;
}

}  // namespace

std::string_view to_string(Mode mode) { return mode == Mode::Char ? "char" : "token"; }

Mode parse_mode(std::string_view text) {
  if (text == "char") return Mode::Char;
  if (text == "token") return Mode::Token;
  throw Error("unknown model mode '" + std::string(text) + "' (expected char or token)");
}

void ModelConfig::validate() const {
  if (vocab_size < 2) throw Error("model vocabulary must hold at least 2 symbols");
  if (layers < 1) throw Error("model needs at least one layer");
  if (hidden < 1) throw Error("hidden size must be positive");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw Error("dropout rate must lie in [0, 1)");
}

std::int64_t param_count(const ModelConfig& c) {
  const std::int64_t v = c.vocab_size, h = c.hidden, l = c.layers;
  return 4 * (h * (v + h) + h) + (l - 1) * 4 * (h * (h + h) + h) + (v * h + v);
}

std::vector<TensorInfo> tensor_layout(const ModelConfig& c) {
  c.validate();
  std::vector<TensorInfo> out;
  std::size_t offset = 0;
  auto add = [&](std::string name, int rows, int cols) {
    out.push_back(TensorInfo{std::move(name), rows, cols, offset});
    offset += out.back().size();
  };
  for (int l = 0; l < c.layers; ++l) {
    const std::string prefix = "lstm." + std::to_string(l) + ".";
    add(prefix + "w_input", l == 0 ? c.vocab_size : c.hidden, 4 * c.hidden);
    add(prefix + "w_hidden", c.hidden, 4 * c.hidden);
    add(prefix + "bias", 1, 4 * c.hidden);
  }
  add("output.weight", c.hidden, c.vocab_size);
  add("output.bias", 1, c.vocab_size);
  return out;
}

double Minibatch::mask_sum() const {
  double s = 0;
  for (float m : mask) s += m;
  return s;
}

template <class T>
void softmax(std::span<T> row) {
  if (row.empty()) return;
  const T top = *std::max_element(row.begin(), row.end());
  T sum = 0;
  for (auto& x : row) {
    x = std::exp(x - top);
    sum += x;
  }
  for (auto& x : row) x /= sum;
}

template <class T>
void clip(std::span<T> values, T lo, T hi) {
  for (auto& x : values) x = std::clamp(x, lo, hi);
}

template void softmax<float>(std::span<float>);
template void softmax<double>(std::span<double>);
template void clip<float>(std::span<float>, float, float);
template void clip<double>(std::span<double>, double, double);

void RmsProp::step(std::span<float> params, std::span<const float> grads, double lr) {
  if (mean_square.size() != params.size()) mean_square.assign(params.size(), 0.0f);
  const float r = static_cast<float>(rho);
  const float one_minus = static_cast<float>(1.0 - rho);
  const float eps = static_cast<float>(epsilon);
  const float rate = static_cast<float>(lr);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const float g = grads[i];
    float& a = mean_square[i];
    a = r * a + one_minus * g * g;
    params[i] -= rate * g / (std::sqrt(a) + eps);
  }
}

// ---------------------------------------------------------------------------

template <class T>
Lstm<T>::Lstm(const ModelConfig& config) : config_(config), layout_(tensor_layout(config)) {
  const auto n = static_cast<std::size_t>(param_count(config));
  params_.assign(n, T(0));
  grads_.assign(n, T(0));
}

template <class T>
const TensorInfo& Lstm<T>::tensor(std::string_view name) const {
  for (const auto& t : layout_)
    if (t.name == name) return t;
  throw Error("no tensor named '" + std::string(name) + "'");
}

template <class T>
void Lstm<T>::init(std::uint64_t seed) {
  CounterRng rng(seed);
  const int h = config_.hidden;
  for (const auto& t : layout_) {
    T* p = params_.data() + t.offset;
    const bool bias = t.rows == 1;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (!bias) {
        p[i] = static_cast<T>(rng.uniform(-0.08, 0.08));
      } else {
        const bool forget = t.name != "output.bias" && static_cast<int>(i) >= h && static_cast<int>(i) < 2 * h;
        p[i] = forget ? T(1) : T(0);
      }
    }
  }
}

template <class T>
LstmState<T> Lstm<T>::zero_state(int batch) const {
  LstmState<T> s;
  s.batch = batch;
  const auto n = static_cast<std::size_t>(batch) * config_.hidden;
  s.h.assign(config_.layers, std::vector<T>(n, T(0)));
  s.c.assign(config_.layers, std::vector<T>(n, T(0)));
  return s;
}

template <class T>
void Lstm<T>::forward(const Minibatch& batch, LstmState<T>& state, CounterRng* dropout_rng) {
  const int B = batch.batch, steps = batch.steps, H = config_.hidden, V = config_.vocab_size, G = 4 * H;
  const auto rows = static_cast<std::size_t>(B) * steps;
  if (batch.inputs.size() != rows) throw Error("minibatch input size does not match its shape");
  if (state.batch != B) throw Error("state batch size does not match the minibatch");
  batch_ = B;
  steps_ = steps;

  inputs_tm_.resize(rows);
  for (int b = 0; b < B; ++b) {
    for (int t = 0; t < steps; ++t) {
      const int x = batch.inputs[batch.index(b, t)];
      if (x < 0 || x >= V) throw Error("input index " + std::to_string(x) + " outside the vocabulary");
      inputs_tm_[static_cast<std::size_t>(t) * B + b] = x;
    }
  }

  cache_.resize(config_.layers);
  const bool drop = dropout_rng != nullptr && config_.dropout > 0.0;
  const T scale = static_cast<T>(1.0 / (1.0 - config_.dropout));
  for (int l = 0; l < config_.layers; ++l) {
    auto& lc = cache_[l];
    const T* wx = ptr(3 * l);
    const T* wh = ptr(3 * l + 1);
    const T* bias = ptr(3 * l + 2);
    lc.h0 = state.h[l];
    lc.c0 = state.c[l];
    lc.gates.resize(rows * G);
    lc.cell.resize(rows * H);
    lc.hidden.resize(rows * H);

    // Input projections for every step at once.
    for (std::size_t r = 0; r < rows; ++r) std::copy(bias, bias + G, lc.gates.data() + r * G);
    if (l == 0) {
      for (std::size_t r = 0; r < rows; ++r)
        kernels::axpy(G, T(1), wx + static_cast<std::size_t>(inputs_tm_[r]) * G, lc.gates.data() + r * G);
    } else {
      kernels::gemm_nn(static_cast<int>(rows), G, H, cache_[l - 1].out.data(), H, wx, G, lc.gates.data(), G);
    }

    const T* h_prev = lc.h0.data();
    const T* c_prev = lc.c0.data();
    for (int t = 0; t < steps; ++t) {
      const std::size_t base = static_cast<std::size_t>(t) * B;
      T* z = lc.gates.data() + base * G;
      kernels::gemm_nn(B, G, H, h_prev, H, wh, G, z, G);
      T* cell = lc.cell.data() + base * H;
      T* hid = lc.hidden.data() + base * H;
      for (int b = 0; b < B; ++b) {
        T* zb = z + static_cast<std::size_t>(b) * G;
        for (int j = 0; j < H; ++j) {
          const T i = sigmoid(zb[j]);
          const T f = sigmoid(zb[H + j]);
          const T o = sigmoid(zb[2 * H + j]);
          const T g = std::tanh(zb[3 * H + j]);
          zb[j] = i;
          zb[H + j] = f;
          zb[2 * H + j] = o;
          zb[3 * H + j] = g;
          const std::size_t k = static_cast<std::size_t>(b) * H + j;
          const T c = f * c_prev[k] + i * g;
          cell[k] = c;
          hid[k] = o * std::tanh(c);
        }
      }
      h_prev = hid;
      c_prev = cell;
    }
    if (steps > 0) {
      std::copy(h_prev, h_prev + static_cast<std::size_t>(B) * H, state.h[l].begin());
      std::copy(c_prev, c_prev + static_cast<std::size_t>(B) * H, state.c[l].begin());
    }

    if (drop) {
      lc.keep.resize(rows * H);
      lc.out.resize(rows * H);
      for (std::size_t k = 0; k < rows * H; ++k) {
        lc.keep[k] = dropout_rng->uniform() >= config_.dropout ? scale : T(0);
        lc.out[k] = lc.hidden[k] * lc.keep[k];
      }
    } else {
      lc.keep.clear();
      lc.out = lc.hidden;
    }
  }

  const T* wy = ptr(3 * config_.layers);
  const T* by = ptr(3 * config_.layers + 1);
  logits_.resize(rows * V);
  for (std::size_t r = 0; r < rows; ++r) std::copy(by, by + V, logits_.data() + r * V);
  kernels::gemm_nn(static_cast<int>(rows), V, H, cache_.back().out.data(), H, wy, V, logits_.data(), V);
  if (!all_finite(logits_.data(), logits_.size())) throw NumericError("non-finite logits in forward pass");
  probs_.clear();
}

template <class T>
std::span<const T> Lstm<T>::logits(int b, int t) const {
  const std::size_t r = static_cast<std::size_t>(t) * batch_ + b;
  return {logits_.data() + r * config_.vocab_size, static_cast<std::size_t>(config_.vocab_size)};
}

template <class T>
T Lstm<T>::loss(const Minibatch& batch) {
  const int B = batch_, V = config_.vocab_size;
  if (batch.batch != B || batch.steps != steps_) throw Error("loss called with a different minibatch shape");
  const double count = batch.mask_sum();
  if (count <= 0.0) throw Error("loss over an all-zero mask");
  probs_ = logits_;
  T total = 0;
  for (int t = 0; t < steps_; ++t) {
    for (int b = 0; b < B; ++b) {
      const std::size_t r = static_cast<std::size_t>(t) * B + b;
      std::span<T> row(probs_.data() + r * V, static_cast<std::size_t>(V));
      softmax(row);
      const float m = batch.mask[batch.index(b, t)];
      if (m == 0.0f) continue;
      const int y = batch.targets[batch.index(b, t)];
      if (y < 0 || y >= V) throw Error("target index " + std::to_string(y) + " outside the vocabulary");
      // log p from the logits directly keeps tiny probabilities exact.
      const T* z = logits_.data() + r * V;
      const T top = *std::max_element(z, z + V);
      T sum = 0;
      for (int v = 0; v < V; ++v) sum += std::exp(z[v] - top);
      total -= static_cast<T>(m) * (z[y] - top - std::log(sum));
    }
  }
  const T mean = total / static_cast<T>(count);
  if (!std::isfinite(mean)) throw NumericError("non-finite loss");
  return mean;
}

template <class T>
void Lstm<T>::backward(const Minibatch& batch) {
  if (probs_.empty() && !logits_.empty()) throw Error("backward called before loss");
  const int B = batch_, steps = steps_, H = config_.hidden, V = config_.vocab_size, G = 4 * H, L = config_.layers;
  const auto rows = static_cast<std::size_t>(B) * steps;
  std::fill(grads_.begin(), grads_.end(), T(0));
  const T inv_count = static_cast<T>(1.0 / batch.mask_sum());

  std::vector<T> dy(rows * V, T(0));
  for (int t = 0; t < steps; ++t) {
    for (int b = 0; b < B; ++b) {
      const float m = batch.mask[batch.index(b, t)];
      if (m == 0.0f) continue;
      const std::size_t r = static_cast<std::size_t>(t) * B + b;
      const T w = static_cast<T>(m) * inv_count;
      for (int v = 0; v < V; ++v) dy[r * V + v] = w * probs_[r * V + v];
      dy[r * V + batch.targets[batch.index(b, t)]] -= w;
    }
  }

  const std::size_t out_w = 3 * L, out_b = 3 * L + 1;
  kernels::gemm_tn(H, V, static_cast<int>(rows), cache_.back().out.data(), H, dy.data(), V, grad_ptr(out_w), V);
  T* dby = grad_ptr(out_b);
  for (std::size_t r = 0; r < rows; ++r) kernels::axpy(V, T(1), dy.data() + r * V, dby);

  std::vector<T> d_out(rows * H, T(0));
  kernels::gemm_nt(static_cast<int>(rows), H, V, dy.data(), V, ptr(out_w), V, d_out.data(), H);

  std::vector<T> dz(rows * G);
  std::vector<T> dh_next(static_cast<std::size_t>(B) * H);
  std::vector<T> dc_next(static_cast<std::size_t>(B) * H);
  for (int l = L - 1; l >= 0; --l) {
    const auto& lc = cache_[l];
    if (!lc.keep.empty())
      for (std::size_t k = 0; k < d_out.size(); ++k) d_out[k] *= lc.keep[k];
    std::fill(dh_next.begin(), dh_next.end(), T(0));
    std::fill(dc_next.begin(), dc_next.end(), T(0));
    const T* wh = ptr(3 * l + 1);
    T* dwh = grad_ptr(3 * l + 1);

    for (int t = steps - 1; t >= 0; --t) {
      const std::size_t base = static_cast<std::size_t>(t) * B;
      const T* c_prev = t > 0 ? lc.cell.data() + (base - B) * H : lc.c0.data();
      const T* h_prev = t > 0 ? lc.hidden.data() + (base - B) * H : lc.h0.data();
      for (int b = 0; b < B; ++b) {
        const std::size_t r = base + b;
        const T* gate = lc.gates.data() + r * G;
        T* d = dz.data() + r * G;
        for (int j = 0; j < H; ++j) {
          const std::size_t k = static_cast<std::size_t>(b) * H + j;
          const T i = gate[j], f = gate[H + j], o = gate[2 * H + j], g = gate[3 * H + j];
          const T tc = std::tanh(lc.cell[r * H + j]);
          const T dh = d_out[r * H + j] + dh_next[k];
          const T dc = dc_next[k] + dh * o * (T(1) - tc * tc);
          dc_next[k] = dc * f;
          d[j] = dc * g * i * (T(1) - i);
          d[H + j] = dc * c_prev[k] * f * (T(1) - f);
          d[2 * H + j] = dh * tc * o * (T(1) - o);
          d[3 * H + j] = dc * i * (T(1) - g * g);
        }
      }
      std::fill(dh_next.begin(), dh_next.end(), T(0));
      kernels::gemm_nt(B, H, G, dz.data() + base * G, G, wh, G, dh_next.data(), H);
      kernels::gemm_tn(H, G, B, h_prev, H, dz.data() + base * G, G, dwh, G);
    }

    T* db = grad_ptr(3 * l + 2);
    for (std::size_t r = 0; r < rows; ++r) kernels::axpy(G, T(1), dz.data() + r * G, db);
    T* dwx = grad_ptr(3 * l);
    if (l == 0) {
      for (std::size_t r = 0; r < rows; ++r)
        kernels::axpy(G, T(1), dz.data() + r * G, dwx + static_cast<std::size_t>(inputs_tm_[r]) * G);
    } else {
      kernels::gemm_tn(H, G, static_cast<int>(rows), cache_[l - 1].out.data(), H, dz.data(), G, dwx, G);
      std::fill(d_out.begin(), d_out.end(), T(0));
      kernels::gemm_nt(static_cast<int>(rows), H, G, dz.data(), G, ptr(3 * l), G, d_out.data(), H);
    }
  }

  for (const auto& t : layout_) {
    if (!all_finite(grads_.data() + t.offset, t.size()))
      throw NumericError("non-finite gradient in tensor '" + t.name + "'");
  }
}

template <class T>
void Lstm<T>::step(std::span<const int> tokens, LstmState<T>& state, std::vector<T>& logits) const {
  const int B = static_cast<int>(tokens.size()), H = config_.hidden, V = config_.vocab_size, G = 4 * H;
  if (state.batch != B) throw Error("state batch size does not match the step input");
  std::vector<T> z(static_cast<std::size_t>(B) * G);
  for (int l = 0; l < config_.layers; ++l) {
    const T* wx = ptr(3 * l);
    const T* wh = ptr(3 * l + 1);
    const T* bias = ptr(3 * l + 2);
    for (int b = 0; b < B; ++b) std::copy(bias, bias + G, z.data() + static_cast<std::size_t>(b) * G);
    if (l == 0) {
      for (int b = 0; b < B; ++b) {
        const int x = tokens[b];
        if (x < 0 || x >= V) throw Error("input index " + std::to_string(x) + " outside the vocabulary");
        kernels::axpy(G, T(1), wx + static_cast<std::size_t>(x) * G, z.data() + static_cast<std::size_t>(b) * G);
      }
    } else {
      kernels::gemm_nn(B, G, H, state.h[l - 1].data(), H, wx, G, z.data(), G);
    }
    kernels::gemm_nn(B, G, H, state.h[l].data(), H, wh, G, z.data(), G);
    auto& hs = state.h[l];
    auto& cs = state.c[l];
    for (int b = 0; b < B; ++b) {
      const T* zb = z.data() + static_cast<std::size_t>(b) * G;
      for (int j = 0; j < H; ++j) {
        const std::size_t k = static_cast<std::size_t>(b) * H + j;
        const T c = sigmoid(zb[H + j]) * cs[k] + sigmoid(zb[j]) * std::tanh(zb[3 * H + j]);
        cs[k] = c;
        hs[k] = sigmoid(zb[2 * H + j]) * std::tanh(c);
      }
    }
  }
  const T* wy = ptr(3 * config_.layers);
  const T* by = ptr(3 * config_.layers + 1);
  logits.resize(static_cast<std::size_t>(B) * V);
  for (int b = 0; b < B; ++b) std::copy(by, by + V, logits.data() + static_cast<std::size_t>(b) * V);
  kernels::gemm_nn(B, V, H, state.h.back().data(), H, wy, V, logits.data(), V);
  if (!all_finite(logits.data(), logits.size())) throw NumericError("non-finite logits in inference step");
}

template class Lstm<float>;
template class Lstm<double>;

}  // namespace tunelab::lm
