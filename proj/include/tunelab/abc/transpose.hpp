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

#include "tunelab/abc/key.hpp"
#include "tunelab/abc/token.hpp"
#include "tunelab/common/error.hpp"

namespace tunelab::abc {

class TranspositionError : public Error {
 public:
  using Error::Error;
};

// Moves a tokenized transcription from `from` to the key with root C and the
// same mode.
//
// Every sounding pitch is raised by shift_to_c(from) semitones. Sounding
// pitches are read under the source signature with bar-scoped accidentals, and
// respelled a fixed number of letters away under the target signature, writing
// `^`, `_` or `=` only where the signature plus earlier accidentals in the bar
// would not already give the pitch. The key token becomes K:C<mode>.
TokenSeq transpose(const TokenSeq& seq, const KeySpec& from);

// Number of letter steps used to respell notes from `from` to root C.
int letter_shift_to_c(const KeySpec& from);

}  // namespace tunelab::abc
