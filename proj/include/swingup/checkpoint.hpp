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
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "swingup/tensor.hpp"

namespace swingup::nn {

/// Binary tensor archive:
///   "SBNT" | version u32 | { name_len u32 | name | rank u32 | dims u32... |
///   data f32... } until end of file. All integers and floats little-endian.
inline constexpr char kCheckpointMagic[4] = {'S', 'B', 'N', 'T'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

using NamedTensors = std::vector<std::pair<std::string, Tensor>>;

void write_checkpoint(std::ostream& out, const std::vector<std::pair<std::string, const Tensor*>>& tensors);
void save_checkpoint(const std::filesystem::path& path,
                     const std::vector<std::pair<std::string, const Tensor*>>& tensors);

/// Throws FormatError on bad magic, unknown version or truncation.
NamedTensors read_checkpoint(std::istream& in);
NamedTensors load_checkpoint(const std::filesystem::path& path);

}  // namespace swingup::nn
