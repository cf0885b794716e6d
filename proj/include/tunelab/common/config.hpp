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
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tunelab/common/error.hpp"

namespace tunelab {

// Plain-text `key = value` settings. Blank lines and lines starting with `#`
// are ignored; keys and values are trimmed; a repeated key keeps the last value.
class KeyValueConfig {
 public:
  KeyValueConfig() = default;

  // Throws ParseError (with the 1-based line number) on a line without `=`.
  static KeyValueConfig parse(std::istream& in);
  static KeyValueConfig parse(std::string_view text);
  // Throws IoError when the file cannot be read.
  static KeyValueConfig load(const std::string& path);

  bool has(std::string_view key) const { return values_.find(key) != values_.end(); }
  std::optional<std::string> get(std::string_view key) const;
  std::string get_or(std::string_view key, std::string fallback) const;
  // Typed readers throw Error naming the key when the value does not parse.
  int get_int(std::string_view key, int fallback) const;
  std::uint64_t get_u64(std::string_view key, std::uint64_t fallback) const;
  double get_double(std::string_view key, double fallback) const;
  bool get_bool(std::string_view key, bool fallback) const;

  // Keys that start with `prefix`, prefix stripped, in key order.
  std::vector<std::pair<std::string, std::string>> with_prefix(std::string_view prefix) const;
  // Keys not in `known`; callers use this to reject typos.
  std::vector<std::string> unknown_keys(const std::vector<std::string_view>& known,
                                        std::string_view allowed_prefix = {}) const;

  void set(std::string key, std::string value) { values_[std::move(key)] = std::move(value); }

 private:
  std::map<std::string, std::string, std::less<>> values_;
};

}  // namespace tunelab
