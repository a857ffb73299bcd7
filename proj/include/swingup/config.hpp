// Copyright 2026 The swingup Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

namespace swingup {

/// Plain-text key=value configuration. Lines starting with '#' are comments.
/// Keys are kept sorted so serialization (and the fingerprint) is canonical.
class KeyValueConfig {
 public:
  KeyValueConfig() = default;

  static KeyValueConfig parse(const std::string& text);
  static KeyValueConfig load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path, const std::string& header = {}) const;
  std::string serialize() const;

  bool contains(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  void set(const std::string& key, double value);
  void set(const std::string& key, std::int64_t value);

  const std::string& get(const std::string& key) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key) const;

  /// Overwrites entries with those of `other`.
  void merge(const KeyValueConfig& other);

  const std::map<std::string, std::string>& entries() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

/// FNV-1a 64-bit hash of an arbitrary byte string.
std::uint64_t fnv1a64(const std::string& bytes);

/// Hex fingerprint of a canonical configuration.
std::string fingerprint(const KeyValueConfig& cfg);

/// Formats a double so that it parses back to the identical value.
std::string format_exact(double value);

}  // namespace swingup
