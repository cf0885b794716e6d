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

#include "tunelab/sampler/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "tunelab/abc/grammar.hpp"
#include "tunelab/abc/token.hpp"
#include "tunelab/abc/tokenizer.hpp"

namespace tunelab::sampler {

std::string_view to_string(StopReason reason) {
  switch (reason) {
    case StopReason::EndToken: return "end-token";
    case StopReason::MaxSteps: return "max-steps";
    case StopReason::Delimiter: return "delimiter";
  }
  return "?";
}

void GenerationConfig::validate() const {
  if (!(temperature > 0) || !std::isfinite(temperature)) throw Error("temperature must be a positive number");
  if (max_steps < 1) throw Error("max_steps must be at least 1");
}

std::vector<std::string> split_seed(lm::Mode mode, std::string_view text) {
  if (mode == lm::Mode::Token) return abc::split_tokens(text);
  return abc::utf8_chars(text);
}

int sample_next(std::span<const float> logits, double temperature, CounterRng& rng, std::optional<int> masked) {
  const int n = static_cast<int>(logits.size());
  double top = -INFINITY;
  for (int i = 0; i < n; ++i) {
    if (i != masked) top = std::max(top, static_cast<double>(logits[i]));
  }
  std::vector<double> weight(n, 0.0);
  double total = 0;
  for (int i = 0; i < n; ++i) {
    if (i == masked) continue;
    weight[i] = std::exp((static_cast<double>(logits[i]) - top) / temperature);
    total += weight[i];
  }
  const double u = rng.uniform() * total;
  double acc = 0;
  int last = -1;
  for (int i = 0; i < n; ++i) {
    if (weight[i] == 0) continue;
    acc += weight[i];
    last = i;
    if (u < acc) return i;
  }
  return last;
}

Primed prime(const lm::Lstm<float>& model, const lm::ModelVocab& vocab, std::span<const std::string> seed,
             lm::LstmState<float> initial) {
  std::vector<int> ids;
  ids.reserve(seed.size());
  for (const auto& s : seed) {
    const auto found = vocab.symbols.find(s);
    if (!found) throw Error("seed symbol '" + s + "' is not in the model vocabulary");
    ids.push_back(static_cast<int>(*found));
  }
  if (ids.empty()) {
    const std::string start = vocab.mode == lm::Mode::Token ? std::string(abc::kStartToken) : std::string("\n");
    const auto found = vocab.symbols.find(start);
    if (!found) throw Error("the model vocabulary has no default start symbol");
    ids.push_back(static_cast<int>(*found));
  }
  Primed p{std::move(initial), ids.back()};
  std::vector<float> logits;
  for (std::size_t i = 0; i + 1 < ids.size(); ++i) {
    const int x = ids[i];
    model.step(std::span<const int>(&x, 1), p.state, logits);
  }
  return p;
}

Generation generate(const lm::Lstm<float>& model, const lm::ModelVocab& vocab, const GenerationConfig& config) {
  config.validate();
  CounterRng rng(config.rng_seed);
  lm::LstmState<float> initial = model.zero_state(1);
  if (config.random_state) {
    for (auto* layers : {&initial.h, &initial.c}) {
      for (auto& layer : *layers) {
        for (auto& v : layer) v = static_cast<float>(rng.uniform(-1.0, 1.0));
      }
    }
  }
  Primed p = prime(model, vocab, config.seed, std::move(initial));
  const bool token_mode = vocab.mode == lm::Mode::Token;
  const auto end = token_mode ? vocab.symbols.find(abc::kEndToken) : std::nullopt;

  Generation gen;
  std::vector<float> logits;
  int input = p.next_input;
  for (int i = 0; i < config.max_steps; ++i) {
    model.step(std::span<const int>(&input, 1), p.state, logits);
    input = sample_next(logits, config.temperature, rng, vocab.null_index());
    gen.output.push_back(vocab.decode(input));
    if (end && input == static_cast<int>(*end)) {
      gen.stop = StopReason::EndToken;
      return gen;
    }
    if (!token_mode && config.stop_at_delimiter && gen.output.size() >= 2 && gen.output.back() == "\n" &&
        gen.output[gen.output.size() - 2] == "\n") {
      gen.stop = StopReason::Delimiter;
      return gen;
    }
  }
  gen.stop = StopReason::MaxSteps;
  return gen;
}

std::vector<std::string> full_transcription(const GenerationConfig& config, const Generation& gen) {
  std::vector<std::string> out = config.seed;
  if (out.empty()) out.emplace_back(abc::kStartToken);
  out.insert(out.end(), gen.output.begin(), gen.output.end());
  return out;
}

std::vector<GeneratedTune> generate_corpus(const lm::Lstm<float>& model, const lm::ModelVocab& vocab,
                                           std::size_t count, const GenerationConfig& config, unsigned threads) {
  if (vocab.mode != lm::Mode::Token) throw Error("corpus generation needs a token-mode model");
  config.validate();
  std::vector<GeneratedTune> out(count);
  const CounterRng root(config.rng_seed);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      GenerationConfig c = config;
      c.rng_seed = root.fork(i).key();
      const Generation gen = generate(model, vocab, c);
      GeneratedTune& t = out[i];
      t.tokens = full_transcription(c, gen);
      t.stop = gen.stop;
      t.length = gen.output.size();
      t.valid = abc::validate_grammar(std::span<const std::string>(t.tokens)).valid();
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return out;
}

void write_generation_report(std::ostream& out, const std::vector<GeneratedTune>& tunes) {
  out << "index\tstop\tlength\tvalid\n";
  for (std::size_t i = 0; i < tunes.size(); ++i) {
    out << i << '\t' << to_string(tunes[i].stop) << '\t' << tunes[i].length << '\t' << (tunes[i].valid ? 1 : 0)
        << '\n';
  }
}

}  // namespace tunelab::sampler
