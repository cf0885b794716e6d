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
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tunelab::abc {

// Bijection between element texts and dense indices, ordered lexicographically
// by text. In character mode each element is one UTF-8 encoded code point.
class Vocabulary {
 public:
  Vocabulary() = default;
  // Deduplicates and sorts `elements`.
  explicit Vocabulary(std::vector<std::string> elements);

  std::size_t size() const { return elements_.size(); }
  bool empty() const { return elements_.empty(); }

  std::optional<std::size_t> find(std::string_view text) const;
  // Throws Error naming the element if absent.
  std::size_t encode(std::string_view text) const;
  const std::string& decode(std::size_t index) const { return elements_.at(index); }

  const std::vector<std::string>& elements() const { return elements_; }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) { return a.elements_ == b.elements_; }

 private:
  std::vector<std::string> elements_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

// Splits UTF-8 text into code points (invalid bytes become single elements).
std::vector<std::string> utf8_chars(std::string_view text);

// Token vocabulary over a list of token lines / sequences.
Vocabulary build_token_vocabulary(const std::vector<std::vector<std::string>>& transcriptions);
// Character vocabulary over a text.
Vocabulary build_char_vocabulary(std::string_view text);

}  // namespace tunelab::abc
