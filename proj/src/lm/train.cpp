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

#include "tunelab/lm/train.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>

#include "tunelab/lm/batching.hpp"

namespace tunelab::lm {
namespace {

std::vector<int> concatenate(const TrainingData& data, const std::vector<std::size_t>& which) {
  std::vector<int> text;
  for (std::size_t i : which) text.insert(text.end(), data.sequences[i].begin(), data.sequences[i].end());
  return text;
}

std::vector<std::vector<int>> select(const TrainingData& data, const std::vector<std::size_t>& which) {
  std::vector<std::vector<int>> out;
  out.reserve(which.size());
  for (std::size_t i : which) out.push_back(data.sequences[i]);
  return out;
}

// Char-mode validation text is usually far shorter than a training batch, so
// the stream count and window shrink to fit it.
std::vector<Minibatch> char_eval_batches(std::span<const int> text, const Schedule& s) {
  if (text.size() < 2) return {};
  const int seq_len = static_cast<int>(std::min<std::size_t>(s.seq_len, text.size() - 1));
  const int batch = static_cast<int>(std::clamp<std::size_t>((text.size() - 1) / seq_len, 1, s.batch));
  return make_char_batches(text, batch, seq_len);
}

struct BatchPlan {
  std::vector<Minibatch> batches;
  bool stateful = false;
};

double weighted_loss(Lstm<float>& model, const BatchPlan& plan) {
  if (plan.batches.empty()) return std::numeric_limits<double>::quiet_NaN();
  double total = 0, weight = 0;
  LstmState<float> state;
  for (const auto& mb : plan.batches) {
    if (!plan.stateful || state.batch != mb.batch) state = model.zero_state(mb.batch);
    model.forward(mb, state, nullptr);
    const double w = mb.mask_sum();
    total += static_cast<double>(model.loss(mb)) * w;
    weight += w;
  }
  return total / weight;
}

BatchPlan eval_plan(const TrainingData& data, const std::vector<std::size_t>& which, const Schedule& s) {
  BatchPlan plan;
  if (which.empty()) return plan;
  if (data.vocab.mode == Mode::Char) {
    plan.batches = char_eval_batches(concatenate(data, which), s);
    plan.stateful = true;
  } else {
    CounterRng order(0);
    plan.batches = make_token_batches(select(data, which), s.batch, *data.vocab.null_index(), order);
  }
  return plan;
}

void emit(std::ostream* log, const std::string& line) {
  if (log) *log << line << '\n' << std::flush;
}

}  // namespace

TrainSettings train_settings(Mode mode, const KeyValueConfig& config) {
  const auto unknown = config.unknown_keys({"layers", "hidden", "dropout", "epochs", "learning_rate", "decay",
                                            "decay_after", "batch", "seq_len", "clip", "validation_fraction", "seed",
                                            "mode"});
  if (!unknown.empty()) throw Error("unknown training setting '" + unknown.front() + "'");
  TrainSettings t;
  t.architecture.mode = mode;
  t.schedule = mode == Mode::Char ? Schedule::char_default() : Schedule::token_default();
  t.architecture.layers = config.get_int("layers", t.architecture.layers);
  t.architecture.hidden = config.get_int("hidden", t.architecture.hidden);
  t.architecture.dropout = config.get_double("dropout", t.architecture.dropout);
  Schedule& s = t.schedule;
  s.epochs = config.get_int("epochs", s.epochs);
  s.learning_rate = config.get_double("learning_rate", s.learning_rate);
  s.decay = config.get_double("decay", s.decay);
  s.decay_after = config.get_int("decay_after", s.decay_after);
  s.batch = config.get_int("batch", s.batch);
  s.seq_len = config.get_int("seq_len", s.seq_len);
  s.clip = config.get_double("clip", s.clip);
  s.validation_fraction = config.get_double("validation_fraction", s.validation_fraction);
  t.seed = config.get_u64("seed", t.seed);
  s.validate();
  return t;
}

double evaluate(Lstm<float>& model, const TrainingData& data, const std::vector<std::size_t>& which,
                const Schedule& schedule) {
  return weighted_loss(model, eval_plan(data, which, schedule));
}

TrainResult train(const TrainingData& data, const ModelConfig& architecture, const Schedule& schedule_in,
                  const TrainOptions& options) {
  TrainResult result;
  Checkpoint& ck = result.last;
  if (options.resume) {
    ck = *options.resume;
    if (ck.data_fingerprint != data.fingerprint()) throw Error("checkpoint was trained on different data");
    if (!(ck.vocab == data.vocab)) throw Error("checkpoint vocabulary differs from the data vocabulary");
  } else {
    ck.config = architecture;
    ck.config.vocab_size = data.vocab.size();
    ck.config.mode = data.vocab.mode;
    ck.vocab = data.vocab;
    ck.schedule = schedule_in;
    ck.seed = options.seed;
    ck.data_fingerprint = data.fingerprint();
  }
  ck.config.validate();
  ck.schedule.validate();
  const Schedule& s = ck.schedule;

  Lstm<float> model(ck.config);
  RmsProp optimizer;
  if (options.resume) {
    model.params() = ck.params;
    optimizer.mean_square = ck.mean_square;
  } else {
    model.init(CounterRng(ck.seed).fork(0).next_u64());
  }

  const DataSplit split = split_data(data.sequences.size(), ck.seed, s.validation_fraction);
  if (split.train.empty()) throw Error("no training data");
  const BatchPlan validation = eval_plan(data, split.validation, s);
  const bool char_mode = data.vocab.mode == Mode::Char;
  const std::vector<int> train_text = char_mode ? concatenate(data, split.train) : std::vector<int>{};
  const std::vector<std::vector<int>> train_seqs = char_mode ? std::vector<std::vector<int>>{} : select(data, split.train);
  const std::vector<Minibatch> char_batches =
      char_mode ? make_char_batches(train_text, s.batch, s.seq_len) : std::vector<Minibatch>{};

  if (!options.resume) {
    ck.initial_validation = weighted_loss(model, validation);
    char buf[96];
    std::snprintf(buf, sizeof buf, "epoch    0  val %.4f  params %lld", ck.initial_validation,
                  static_cast<long long>(param_count(ck.config)));
    emit(options.log, buf);
  }

  const int last_epoch = options.stop_after > 0 ? std::min(options.stop_after, s.epochs) : s.epochs;
  const CounterRng root(ck.seed);
  for (int epoch = ck.epoch + 1; epoch <= last_epoch; ++epoch) {
    const auto started = std::chrono::steady_clock::now();
    const double lr = s.lr_at(epoch);
    CounterRng epoch_rng = root.fork(static_cast<std::uint64_t>(epoch));
    CounterRng shuffle_rng = epoch_rng.fork(0);
    CounterRng dropout_rng = epoch_rng.fork(1);
    CounterRng* dropout = ck.config.dropout > 0 ? &dropout_rng : nullptr;
    const std::vector<Minibatch> token_batches =
        char_mode ? std::vector<Minibatch>{} : make_token_batches(train_seqs, s.batch, *data.vocab.null_index(), shuffle_rng);
    const std::vector<Minibatch>& batches = char_mode ? char_batches : token_batches;
    if (batches.empty()) throw Error("training split holds no sequence of two or more symbols");

    EpochLog entry;
    try {
      double total = 0, weight = 0;
      LstmState<float> state = model.zero_state(batches.front().batch);
      for (const auto& mb : batches) {
        if (!char_mode) state = model.zero_state(mb.batch);
        model.forward(mb, state, dropout);
        const double w = mb.mask_sum();
        total += static_cast<double>(model.loss(mb)) * w;
        weight += w;
        model.backward(mb);
        clip(std::span<float>(model.grads()), static_cast<float>(-s.clip), static_cast<float>(s.clip));
        optimizer.step(model.params(), model.grads(), lr);
      }
      entry.epoch = epoch;
      entry.lr = lr;
      entry.train_loss = total / weight;
      entry.validation_loss = weighted_loss(model, validation);
      if (!std::isfinite(entry.train_loss)) throw NumericError("non-finite training loss");
    } catch (const NumericError& e) {
      result.aborted = true;
      result.error = "epoch " + std::to_string(epoch) + ": " + e.what();
      emit(options.log, "aborted at " + result.error);
      return result;
    }
    entry.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    ck.epoch = epoch;
    ck.lr = lr;
    ck.rng = root.fork(static_cast<std::uint64_t>(epoch + 1));
    ck.history.push_back(entry);
    ck.params = model.params();
    ck.mean_square = optimizer.mean_square;
    emit(options.log, format_epoch_log(entry));
    if (!options.checkpoint_dir.empty()) {
      std::filesystem::create_directories(options.checkpoint_dir);
      char name[32];
      std::snprintf(name, sizeof name, "epoch-%04d.ckpt", epoch);
      save_checkpoint(options.checkpoint_dir / name, ck);
      save_checkpoint(options.checkpoint_dir / "latest.ckpt", ck);
    }
  }
  if (ck.params.empty()) ck.params = model.params();
  return result;
}

}  // namespace tunelab::lm
