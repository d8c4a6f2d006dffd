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

#include "draggn/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "draggn/errors.h"

namespace draggn::neural {

namespace {

constexpr char kMagic[8] = {'D', 'R', 'A', 'G', 'G', 'N', 'C', 'K'};

class Writer {
 public:
  void U32(uint32_t x) { Little(x, 4); }
  void U64(uint64_t x) { Little(x, 8); }
  void F64(double x) { U64(std::bit_cast<uint64_t>(x)); }
  void Str(const std::string &s) {
    U32(static_cast<uint32_t>(s.size()));
    out_ += s;
  }
  void Raw(const char *data, size_t n) { out_.append(data, n); }
  std::string Take() { return std::move(out_); }

 private:
  void Little(uint64_t x, int bytes) {
    for (int i = 0; i < bytes; ++i) {
      out_ += static_cast<char>((x >> (8 * i)) & 0xff);
    }
  }
  std::string out_;
};

class Reader {
 public:
  explicit Reader(const std::string &in) : in_(in) {}

  uint32_t U32() { return static_cast<uint32_t>(Little(4)); }
  uint64_t U64() { return Little(8); }
  double F64() { return std::bit_cast<double>(U64()); }
  std::string Str() {
    uint32_t n = U32();
    Need(n);
    std::string s = in_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  void Raw(char *data, size_t n) {
    Need(n);
    std::memcpy(data, in_.data() + pos_, n);
    pos_ += n;
  }
  bool done() const { return pos_ == in_.size(); }

 private:
  void Need(size_t n) {
    if (in_.size() - pos_ < n) throw ParseError("checkpoint is truncated");
  }
  uint64_t Little(int bytes) {
    Need(bytes);
    uint64_t x = 0;
    for (int i = 0; i < bytes; ++i) {
      x |= static_cast<uint64_t>(static_cast<unsigned char>(in_[pos_ + i]))
           << (8 * i);
    }
    pos_ += bytes;
    return x;
  }

  const std::string &in_;
  size_t pos_ = 0;
};

}  // namespace

const NamedTensor &Checkpoint::Tensor(const std::string &name) const {
  for (const NamedTensor &tensor : tensors) {
    if (tensor.name == name) return tensor;
  }
  throw LookupError("checkpoint has no tensor '" + name + "'");
}

std::string SerializeCheckpoint(const Checkpoint &checkpoint) {
  Writer w;
  w.Raw(kMagic, sizeof(kMagic));
  w.U32(checkpoint.version);
  w.Str(checkpoint.architecture);
  w.U32(static_cast<uint32_t>(checkpoint.metadata.size()));
  for (const auto &[key, value] : checkpoint.metadata) {
    w.Str(key);
    w.Str(value);
  }
  w.U32(static_cast<uint32_t>(checkpoint.enumerations.size()));
  for (const auto &[name, items] : checkpoint.enumerations) {
    w.Str(name);
    w.U32(static_cast<uint32_t>(items.size()));
    for (const std::string &item : items) w.Str(item);
  }
  w.U32(static_cast<uint32_t>(checkpoint.tensors.size()));
  for (const NamedTensor &tensor : checkpoint.tensors) {
    uint64_t count = 1;
    for (uint64_t d : tensor.shape) count *= d;
    if (count != tensor.values.size()) {
      throw ContractViolation("tensor '" + tensor.name +
                              "' value count does not match its shape");
    }
    w.Str(tensor.name);
    w.U32(static_cast<uint32_t>(tensor.shape.size()));
    for (uint64_t d : tensor.shape) w.U64(d);
    for (double x : tensor.values) w.F64(x);
  }
  return w.Take();
}

Checkpoint DeserializeCheckpoint(const std::string &bytes) {
  Reader r(bytes);
  char magic[sizeof(kMagic)];
  r.Raw(magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw ParseError("not a checkpoint (bad magic)");
  }
  Checkpoint checkpoint;
  checkpoint.version = r.U32();
  if (checkpoint.version != kCheckpointVersion) {
    throw ParseError("unsupported checkpoint version " +
                     std::to_string(checkpoint.version));
  }
  checkpoint.architecture = r.Str();
  for (uint32_t n = r.U32(); n > 0; --n) {
    std::string key = r.Str();
    checkpoint.metadata[key] = r.Str();
  }
  for (uint32_t n = r.U32(); n > 0; --n) {
    std::string name = r.Str();
    std::vector<std::string> &items = checkpoint.enumerations[name];
    for (uint32_t k = r.U32(); k > 0; --k) items.push_back(r.Str());
  }
  for (uint32_t n = r.U32(); n > 0; --n) {
    NamedTensor tensor;
    tensor.name = r.Str();
    uint64_t count = 1;
    for (uint32_t rank = r.U32(); rank > 0; --rank) {
      tensor.shape.push_back(r.U64());
      count *= tensor.shape.back();
    }
    if (count > bytes.size() / 8) throw ParseError("checkpoint is truncated");
    tensor.values.resize(count);
    for (double &x : tensor.values) x = r.F64();
    checkpoint.tensors.push_back(std::move(tensor));
  }
  if (!r.done()) throw ParseError("trailing bytes after checkpoint");
  return checkpoint;
}

void WriteCheckpoint(const Checkpoint &checkpoint, const std::string &path) {
  std::string bytes = SerializeCheckpoint(checkpoint);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing '" + path + "'");
}

Checkpoint ReadCheckpoint(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return DeserializeCheckpoint(buffer.str());
}

}  // namespace draggn::neural
