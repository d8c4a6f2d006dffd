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

#include "draggn/key_value.h"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "draggn/errors.h"

namespace draggn {

std::string Trim(std::string_view text) {
  size_t begin = text.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) return "";
  size_t end = text.find_last_not_of(" \t\r\n");
  return std::string(text.substr(begin, end - begin + 1));
}

KeyValues ParseKeyValues(std::string_view text) {
  KeyValues values;
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::string trimmed = Trim(line);
    if (trimmed.empty() || trimmed[0] == '#') continue;
    size_t eq = trimmed.find('=');
    if (eq == std::string::npos) {
      throw ParseError("expected 'key = value'", number, 1);
    }
    std::string key = Trim(trimmed.substr(0, eq));
    if (key.empty()) throw ParseError("empty key", number, 1);
    if (!values.emplace(key, Trim(trimmed.substr(eq + 1))).second) {
      throw ParseError("duplicate key '" + key + "'", number, 1);
    }
  }
  return values;
}

KeyValues ReadKeyValueFile(const std::string &path) {
  return ParseKeyValues(ReadFile(path));
}

std::string RenderKeyValues(const KeyValues &values) {
  std::string out;
  for (const auto &[key, value] : values) out += key + " = " + value + "\n";
  return out;
}

int GetInt(const KeyValues &values, const std::string &key, int fallback) {
  auto it = values.find(key);
  if (it == values.end()) return fallback;
  try {
    size_t used = 0;
    int x = std::stoi(it->second, &used);
    if (used == it->second.size()) return x;
  } catch (const std::exception &) {
  }
  throw SpecError("key '" + key + "': expected an integer, got '" +
                  it->second + "'");
}

uint64_t GetUint64(const KeyValues &values, const std::string &key,
                   uint64_t fallback) {
  auto it = values.find(key);
  if (it == values.end()) return fallback;
  try {
    size_t used = 0;
    if (!it->second.empty() && it->second[0] != '-') {
      uint64_t x = std::stoull(it->second, &used);
      if (used == it->second.size()) return x;
    }
  } catch (const std::exception &) {
  }
  throw SpecError("key '" + key + "': expected an unsigned integer, got '" +
                  it->second + "'");
}

double GetDouble(const KeyValues &values, const std::string &key,
                 double fallback) {
  auto it = values.find(key);
  if (it == values.end()) return fallback;
  try {
    size_t used = 0;
    double x = std::stod(it->second, &used);
    if (used == it->second.size()) return x;
  } catch (const std::exception &) {
  }
  throw SpecError("key '" + key + "': expected a number, got '" +
                  it->second + "'");
}

std::string GetString(const KeyValues &values, const std::string &key,
                      const std::string &fallback) {
  auto it = values.find(key);
  return it == values.end() ? fallback : it->second;
}

std::vector<std::string> SplitList(std::string_view text, char sep) {
  std::vector<std::string> items;
  size_t start = 0;
  while (start <= text.size()) {
    size_t end = text.find(sep, start);
    if (end == std::string_view::npos) end = text.size();
    std::string item = Trim(text.substr(start, end - start));
    if (!item.empty()) items.push_back(std::move(item));
    start = end + 1;
  }
  return items;
}

std::string ReadFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void WriteFile(const std::string &path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing '" + path + "'");
}

std::string Fnv1aHex(std::string_view bytes) {
  uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char out[17];
  std::snprintf(out, sizeof(out), "%016llx",
                static_cast<unsigned long long>(hash));
  return out;
}

}  // namespace draggn
