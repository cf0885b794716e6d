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

#include "tunelab/abc/vocabulary.hpp"

#include <algorithm>
#include <set>

#include "tunelab/common/error.hpp"

namespace tunelab::abc {

Vocabulary::Vocabulary(std::vector<std::string> elements) {
  std::sort(elements.begin(), elements.end());
  elements.erase(std::unique(elements.begin(), elements.end()), elements.end());
  elements_ = std::move(elements);
  for (std::size_t i = 0; i < elements_.size(); ++i) index_.emplace(elements_[i], i);
}

std::optional<std::size_t> Vocabulary::find(std::string_view text) const {
  auto it = index_.find(text);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Vocabulary::encode(std::string_view text) const {
  if (auto i = find(text)) return *i;
  throw Error("'" + std::string(text) + "' is not in the vocabulary");
}

std::vector<std::string> utf8_chars(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const auto lead = static_cast<unsigned char>(text[i]);
    std::size_t len = 1;
    if (lead >= 0xF0) {
      len = 4;
    } else if (lead >= 0xE0) {
      len = 3;
    } else if (lead >= 0xC0) {
      len = 2;
    }
    if (i + len > text.size()) len = 1;
    for (std::size_t k = 1; k < len; ++k) {
      if ((static_cast<unsigned char>(text[i + k]) & 0xC0) != 0x80) {
        len = 1;
        break;
      }
    }
    out.emplace_back(text.substr(i, len));
    i += len;
  }
  return out;
}

Vocabulary build_token_vocabulary(const std::vector<std::vector<std::string>>& transcriptions) {
  std::set<std::string> seen;
  for (const auto& t : transcriptions) seen.insert(t.begin(), t.end());
  if (seen.empty()) throw Error("cannot build a vocabulary from an empty corpus");
  return Vocabulary(std::vector<std::string>(seen.begin(), seen.end()));
}

Vocabulary build_char_vocabulary(std::string_view text) {
  if (text.empty()) throw Error("cannot build a vocabulary from an empty corpus");
  auto chars = utf8_chars(text);
  return Vocabulary(std::move(chars));
}

}  // namespace tunelab::abc
