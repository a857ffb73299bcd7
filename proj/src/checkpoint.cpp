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

#include "swingup/checkpoint.hpp"

#include <fstream>

#include "swingup/binio.hpp"
#include "swingup/error.hpp"

namespace swingup::nn {

void write_checkpoint(std::ostream& out,
                      const std::vector<std::pair<std::string, const Tensor*>>& tensors) {
  out.write(kCheckpointMagic, 4);
  binio::put_le<std::uint32_t>(out, kCheckpointVersion);
  for (const auto& [name, t] : tensors) {
    binio::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    binio::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(t->rank()));
    for (int d : t->shape()) binio::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(d));
    for (double v : t->data()) binio::put_le<float>(out, static_cast<float>(v));
  }
}

void save_checkpoint(const std::filesystem::path& path,
                     const std::vector<std::pair<std::string, const Tensor*>>& tensors) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write checkpoint " + path.string());
  write_checkpoint(out, tensors);
  if (!out) throw IoError("write failed for " + path.string());
}

NamedTensors read_checkpoint(std::istream& in) {
  binio::expect_magic(in, kCheckpointMagic, "SBNT checkpoint");
  const auto version = binio::get_le<std::uint32_t>(in, "version");
  if (version != kCheckpointVersion) {
    throw FormatError("unsupported SBNT version " + std::to_string(version) + " (expected " +
                      std::to_string(kCheckpointVersion) + ")");
  }
  NamedTensors out;
  while (in.peek() != std::char_traits<char>::eof()) {
    const auto name_len = binio::get_le<std::uint32_t>(in, "name length");
    if (name_len > (1u << 16)) throw FormatError("implausible tensor name length");
    std::string name(name_len, '\0');
    in.read(name.data(), name_len);
    if (in.gcount() != static_cast<std::streamsize>(name_len)) throw FormatError("truncated tensor name");
    const auto rank = binio::get_le<std::uint32_t>(in, "rank");
    if (rank == 0 || rank > 8) throw FormatError("implausible tensor rank in " + name);
    Shape shape;
    std::size_t count = 1;
    for (std::uint32_t i = 0; i < rank; ++i) {
      const auto d = binio::get_le<std::uint32_t>(in, "dimension");
      if (d == 0 || d > (1u << 24)) throw FormatError("implausible dimension in " + name);
      shape.push_back(static_cast<int>(d));
      count *= d;
    }
    std::vector<double> data(count);
    for (double& v : data) v = binio::get_le<float>(in, "tensor data");
    out.emplace_back(std::move(name), Tensor(std::move(shape), std::move(data)));
  }
  return out;
}

NamedTensors load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  return read_checkpoint(in);
}

}  // namespace swingup::nn
