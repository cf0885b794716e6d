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
#include <span>
#include <vector>

#include "tunelab/common/rng.hpp"
#include "tunelab/lm/model.hpp"

namespace tunelab::lm {

// Contiguous-stream batches over continuous text.
//
// The first floor(n / (B*S)) * B*S symbols are cut into `batch` contiguous
// streams; minibatch k holds steps [k*S, (k+1)*S) of every stream, so a hidden
// state carried from one minibatch to the next continues each stream. Targets
// are the next symbol of the kept text, the last one wrapping to its first
// symbol. Mask is all ones. Throws Error when n < B*S.
std::vector<Minibatch> make_char_batches(std::span<const int> text, int batch = 50, int seq_len = 50);

inline constexpr int kBucketWidth = 32;

// Length-bucketed batches of whole sequences for one epoch.
//
// A sequence of n symbols contributes n-1 (input, target) steps. Sequences are
// grouped by (n-1) / kBucketWidth, shuffled within each bucket, cut into
// batches of at most `batch`, and the batch order is shuffled. Each batch is
// right-padded with `null_index` (mask 0) to its own longest sequence.
// Sequences shorter than 2 symbols are skipped.
std::vector<Minibatch> make_token_batches(const std::vector<std::vector<int>>& sequences, int batch,
                                          int null_index, CounterRng& rng);

}  // namespace tunelab::lm
