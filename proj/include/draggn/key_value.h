// Copyright 2026 The DRAGGN Authors.
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

// Flat "key = value" text used by corpus specs and run configs. '#' starts a
// comment line; keys may not repeat.

#ifndef DRAGGN_KEY_VALUE_H_
#define DRAGGN_KEY_VALUE_H_

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace draggn {

using KeyValues = std::map<std::string, std::string>;

// Throws ParseError naming the line for malformed or duplicate entries.
KeyValues ParseKeyValues(std::string_view text);
KeyValues ReadKeyValueFile(const std::string &path);  // IoError, ParseError

std::string RenderKeyValues(const KeyValues &values);

// Typed accessors; throw SpecError naming the key on bad values.
int GetInt(const KeyValues &values, const std::string &key, int fallback);
uint64_t GetUint64(const KeyValues &values, const std::string &key,
                   uint64_t fallback);
double GetDouble(const KeyValues &values, const std::string &key,
                 double fallback);
std::string GetString(const KeyValues &values, const std::string &key,
                      const std::string &fallback);

// Splits "a, b ,c" into trimmed non-empty items.
std::vector<std::string> SplitList(std::string_view text, char sep = ',');
std::string Trim(std::string_view text);

std::string ReadFile(const std::string &path);  // throws IoError
void WriteFile(const std::string &path, std::string_view bytes);

// 64-bit FNV-1a, rendered as 16 hex digits.
std::string Fnv1aHex(std::string_view bytes);

}  // namespace draggn

#endif  // DRAGGN_KEY_VALUE_H_
