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

// Binary checkpoint container. All integers little-endian.
//
//   magic        8 bytes  "DRAGGNCK"
//   version      u32      (currently 1)
//   architecture str
//   metadata     u32 count, then (str key, str value) pairs
//   enumerations u32 count, then (str name, u32 n, n x str)
//   tensors      u32 count, then (str name, u32 rank, rank x u64 dim,
//                                 prod(dim) x f64 value)
//
// where str is a u32 byte length followed by UTF-8 bytes. Writing the same
// checkpoint twice yields identical bytes.

#ifndef DRAGGN_CHECKPOINT_H_
#define DRAGGN_CHECKPOINT_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace draggn::neural {

inline constexpr uint32_t kCheckpointVersion = 1;

struct NamedTensor {
  std::string name;
  std::vector<uint64_t> shape;
  std::vector<double> values;
};

struct Checkpoint {
  uint32_t version = kCheckpointVersion;
  std::string architecture;
  std::map<std::string, std::string> metadata;
  // e.g. "vocabulary", "units", "arguments", "labels".
  std::map<std::string, std::vector<std::string>> enumerations;
  std::vector<NamedTensor> tensors;

  // Throws LookupError if absent.
  const NamedTensor &Tensor(const std::string &name) const;
};

std::string SerializeCheckpoint(const Checkpoint &checkpoint);
// Throws ParseError on a bad magic, unsupported version or truncation.
Checkpoint DeserializeCheckpoint(const std::string &bytes);

// Throw IoError on file system failure.
void WriteCheckpoint(const Checkpoint &checkpoint, const std::string &path);
Checkpoint ReadCheckpoint(const std::string &path);

}  // namespace draggn::neural

#endif  // DRAGGN_CHECKPOINT_H_
