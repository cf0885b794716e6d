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
#include <string>
#include <vector>

#include "tunelab/common/rng.hpp"
#include "tunelab/lm/data.hpp"
#include "tunelab/lm/model.hpp"

namespace tunelab::lm {

// Everything needed to resume training or to sample.
//
// File layout: the 4 bytes "TLCK", a u32 format version, a u64 header length,
// a UTF-8 JSON header (config, vocabulary, tensor table, schedule, seed, epoch,
// lr, rng, history), then the parameters and the optimizer accumulators as
// little-endian f32 arrays. All integers are little-endian.
struct Checkpoint {
  ModelConfig config;
  ModelVocab vocab;
  Schedule schedule;
  std::uint64_t seed = 0;
  int epoch = 0;  // completed epochs
  double lr = 0;  // rate of the last completed epoch
  CounterRng rng; // stream the next epoch draws from
  std::uint64_t data_fingerprint = 0;
  double initial_validation = 0;
  std::vector<EpochLog> history;
  std::vector<float> params;
  std::vector<float> mean_square;  // empty before the first update

  Lstm<float> make_model() const;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

std::string encode_checkpoint(const Checkpoint& ckpt);
// Throws IoError on a truncated or inconsistent image.
Checkpoint decode_checkpoint(const std::string& bytes);

// Writes to a sibling temporary file and renames it over `path`.
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace tunelab::lm
