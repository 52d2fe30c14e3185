// Copyright 2026 The MVAE-AIF Authors
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

#ifndef MAIF_CONFIG_H_
#define MAIF_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace maif {

// Flat `key = value` configuration. Lines starting with '#' are comments,
// keys are unique, and iteration order is sorted so that serialisation is
// canonical (the bench hashes configs byte for byte).
class KeyValueConfig {
 public:
  KeyValueConfig() = default;

  static KeyValueConfig Parse(const std::string& text);
  static KeyValueConfig Load(const std::filesystem::path& path);
  std::string Serialize() const;
  void Save(const std::filesystem::path& path) const;

  bool Has(const std::string& key) const;
  void Set(const std::string& key, const std::string& value);
  void Set(const std::string& key, double value);
  void Set(const std::string& key, std::int64_t value);
  void Set(const std::string& key, bool value);
  void Set(const std::string& key, const std::vector<double>& values);
  // Copies every entry of `other`, replacing existing keys.
  void Merge(const KeyValueConfig& other);

  std::string GetString(const std::string& key) const;
  std::string GetString(const std::string& key, const std::string& fallback) const;
  double GetDouble(const std::string& key) const;
  double GetDouble(const std::string& key, double fallback) const;
  std::int64_t GetInt(const std::string& key) const;
  std::int64_t GetInt(const std::string& key, std::int64_t fallback) const;
  bool GetBool(const std::string& key, bool fallback) const;
  // Comma separated list.
  std::vector<double> GetDoubles(const std::string& key) const;
  std::vector<double> GetDoubles(const std::string& key,
                                 const std::vector<double>& fallback) const;

  // Keys with the given prefix, the prefix stripped.
  KeyValueConfig Subset(const std::string& prefix) const;
  const std::map<std::string, std::string>& entries() const { return entries_; }

  bool operator==(const KeyValueConfig& other) const = default;

 private:
  std::map<std::string, std::string> entries_;
};

// Shortest decimal text that round-trips the double exactly.
std::string FormatDouble(double value);

// 64-bit FNV-1a of a byte string, printed as 16 hex digits.
std::string Fnv1aHex(const std::string& bytes);

}  // namespace maif

#endif  // MAIF_CONFIG_H_
