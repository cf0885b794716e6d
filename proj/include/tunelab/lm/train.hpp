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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "tunelab/common/config.hpp"
#include "tunelab/lm/checkpoint.hpp"
#include "tunelab/lm/data.hpp"
#include "tunelab/lm/model.hpp"

namespace tunelab::lm {

struct TrainOptions {
  std::uint64_t seed = 1;
  // Checkpoints go to <dir>/epoch-NNNN.ckpt and <dir>/latest.ckpt when set.
  std::filesystem::path checkpoint_dir;
  // Continue from this state; config, schedule and seed come from it.
  std::optional<Checkpoint> resume;
  // Stop after this epoch even if the schedule runs longer (0 = schedule end).
  int stop_after = 0;
  std::ostream* log = nullptr;
};

struct TrainResult {
  Checkpoint last;  // state after the last completed epoch
  bool aborted = false;
  std::string error;
};

struct TrainSettings {
  ModelConfig architecture;
  Schedule schedule;
  std::uint64_t seed = 1;
};

// Mode defaults (3 x 512, dropout 0.5, the mode's schedule) overridden by the
// keys layers, hidden, dropout, epochs, learning_rate, decay, decay_after,
// batch, seq_len, clip, validation_fraction and seed. Unknown keys are errors.
TrainSettings train_settings(Mode mode, const KeyValueConfig& config);

// Trains `architecture` (its vocab_size and mode are taken from the data) with
// RMSprop, elementwise clipping and the schedule's learning-rate decay. Char
// mode carries the hidden state across the minibatches of an epoch; token
// mode starts every batch from zero. Epoch e draws from CounterRng(seed).fork(e),
// so a resumed run repeats an uninterrupted one exactly. A NumericError ends
// training with aborted = true; checkpoints already on disk stay intact.
TrainResult train(const TrainingData& data, const ModelConfig& architecture, const Schedule& schedule,
                  const TrainOptions& options);

// Mask-weighted mean loss of `sequences` without dropout.
double evaluate(Lstm<float>& model, const TrainingData& data, const std::vector<std::size_t>& which,
                const Schedule& schedule);

}  // namespace tunelab::lm
