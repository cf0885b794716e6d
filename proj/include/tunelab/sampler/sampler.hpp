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
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tunelab/common/rng.hpp"
#include "tunelab/lm/data.hpp"
#include "tunelab/lm/model.hpp"

namespace tunelab::sampler {

enum class StopReason { EndToken, MaxSteps, Delimiter };
std::string_view to_string(StopReason reason);

struct GenerationConfig {
  std::vector<std::string> seed;  // vocabulary symbols; see split_seed
  double temperature = 1.0;
  int max_steps = 1000;
  std::uint64_t rng_seed = 1;
  bool stop_at_delimiter = false;  // char mode: stop after a blank line
  bool random_state = false;       // start from U(-1, 1) state instead of zeros

  void validate() const;
};

// Token mode splits on whitespace; char mode keeps every code point.
std::vector<std::string> split_seed(lm::Mode mode, std::string_view text);

// Draws from softmax(logits / temperature), giving `masked` probability 0.
// The draw is computed in double from one uniform variate, so a given rng
// state yields the same index on every platform.
int sample_next(std::span<const float> logits, double temperature, CounterRng& rng,
                std::optional<int> masked = std::nullopt);

struct Primed {
  lm::LstmState<float> state;
  int next_input = 0;
};

// Feeds all but the last seed symbol; the last one becomes the first sampling
// input. An empty seed starts from `<s>` in token mode and from a newline in
// char mode. Throws Error naming any symbol outside the vocabulary.
Primed prime(const lm::Lstm<float>& model, const lm::ModelVocab& vocab, std::span<const std::string> seed,
             lm::LstmState<float> initial);

struct Generation {
  std::vector<std::string> output;  // excludes the seed
  StopReason stop = StopReason::MaxSteps;
};

Generation generate(const lm::Lstm<float>& model, const lm::ModelVocab& vocab, const GenerationConfig& config);

// Full transcription of a token-mode generation: the seed (or `<s>` when the
// seed is empty) followed by the output.
std::vector<std::string> full_transcription(const GenerationConfig& config, const Generation& gen);

struct GeneratedTune {
  std::vector<std::string> tokens;
  StopReason stop = StopReason::MaxSteps;
  std::size_t length = 0;  // generated symbols, seed excluded
  bool valid = false;      // passes the transcription grammar
};

// `count` token-mode generations; generation i draws from
// CounterRng(config.rng_seed).fork(i). Runs on up to `threads` workers
// (0 = hardware concurrency); the result does not depend on the thread count.
std::vector<GeneratedTune> generate_corpus(const lm::Lstm<float>& model, const lm::ModelVocab& vocab,
                                           std::size_t count, const GenerationConfig& config,
                                           unsigned threads = 0);

// One line per generation: index, stop reason, length, valid flag.
void write_generation_report(std::ostream& out, const std::vector<GeneratedTune>& tunes);

}  // namespace tunelab::sampler
