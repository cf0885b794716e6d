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

#include "tunelab/lm/batching.hpp"

#include <algorithm>
#include <map>
#include <string>

namespace tunelab::lm {

std::vector<Minibatch> make_char_batches(std::span<const int> text, int batch, int seq_len) {
  if (batch < 1 || seq_len < 1) throw Error("batch and sequence length must be positive");
  const std::size_t chunk = static_cast<std::size_t>(batch) * static_cast<std::size_t>(seq_len);
  if (text.size() < chunk) {
    throw Error("text of " + std::to_string(text.size()) + " symbols is shorter than one " +
                std::to_string(batch) + " x " + std::to_string(seq_len) + " minibatch");
  }
  const std::size_t count = text.size() / chunk;
  const std::size_t kept = count * chunk;
  const std::size_t stream_len = count * static_cast<std::size_t>(seq_len);
  auto next = [&](std::size_t i) { return i + 1 < kept ? text[i + 1] : text[0]; };

  std::vector<Minibatch> out(count);
  for (std::size_t k = 0; k < count; ++k) {
    Minibatch& mb = out[k];
    mb.batch = batch;
    mb.steps = seq_len;
    mb.inputs.resize(chunk);
    mb.targets.resize(chunk);
    mb.mask.assign(chunk, 1.0f);
    for (int b = 0; b < batch; ++b) {
      for (int t = 0; t < seq_len; ++t) {
        const std::size_t src = static_cast<std::size_t>(b) * stream_len + k * seq_len + t;
        mb.inputs[mb.index(b, t)] = text[src];
        mb.targets[mb.index(b, t)] = next(src);
      }
    }
  }
  return out;
}

std::vector<Minibatch> make_token_batches(const std::vector<std::vector<int>>& sequences, int batch,
                                          int null_index, CounterRng& rng) {
  if (batch < 1) throw Error("batch size must be positive");
  std::map<std::size_t, std::vector<std::size_t>> buckets;
  for (std::size_t i = 0; i < sequences.size(); ++i) {
    if (sequences[i].size() < 2) continue;
    buckets[(sequences[i].size() - 1) / kBucketWidth].push_back(i);
  }

  std::vector<std::vector<std::size_t>> groups;
  for (auto& [key, members] : buckets) {
    rng.shuffle(std::span<std::size_t>(members));
    for (std::size_t start = 0; start < members.size(); start += batch) {
      const std::size_t end = std::min(members.size(), start + static_cast<std::size_t>(batch));
      groups.emplace_back(members.begin() + static_cast<std::ptrdiff_t>(start),
                          members.begin() + static_cast<std::ptrdiff_t>(end));
    }
  }
  rng.shuffle(std::span<std::vector<std::size_t>>(groups));

  std::vector<Minibatch> out;
  out.reserve(groups.size());
  for (const auto& group : groups) {
    std::size_t steps = 0;
    for (std::size_t i : group) steps = std::max(steps, sequences[i].size() - 1);
    Minibatch mb;
    mb.batch = static_cast<int>(group.size());
    mb.steps = static_cast<int>(steps);
    mb.inputs.assign(group.size() * steps, null_index);
    mb.targets.assign(group.size() * steps, null_index);
    mb.mask.assign(group.size() * steps, 0.0f);
    for (int b = 0; b < mb.batch; ++b) {
      const auto& seq = sequences[group[b]];
      for (std::size_t t = 0; t + 1 < seq.size(); ++t) {
        const std::size_t at = mb.index(b, static_cast<int>(t));
        mb.inputs[at] = seq[t];
        mb.targets[at] = seq[t + 1];
        mb.mask[at] = 1.0f;
      }
    }
    out.push_back(std::move(mb));
  }
  return out;
}

}  // namespace tunelab::lm
