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
#include <vector>

#include "swingup/config.hpp"
#include "swingup/core.hpp"
#include "swingup/simdyn.hpp"
#include "swingup/tactsim.hpp"

namespace swingup {

inline constexpr char kDatasetMagic[4] = {'S', 'W', 'N', 'G'};
inline constexpr std::uint32_t kDatasetVersion = 1;

struct Dataset {
  std::vector<ObjectSpec> catalog;
  std::vector<Episode> episodes;
  std::uint64_t seed = 0;
  SwingConfig sim;
  TactileConfig tact;

  /// Throws InvalidArgument for ids outside the catalog.
  const ObjectSpec& spec(int object_id) const;
  /// Indices of the episodes recorded for `object_id`, in file order.
  std::vector<std::size_t> episodes_of(int object_id) const;
  /// Generation seed plus both simulator configurations.
  KeyValueConfig provenance() const;
};

/// Per-episode seed: splitmix mix of the global seed, object id and trial.
std::uint64_t episode_seed(std::uint64_t global_seed, int object_id, int trial);

/// One trial: w ~ U[0,1] (stored at float precision), two tilt frames, one
/// shake sequence and the swing outcome, all drawn from the episode seed.
Episode generate_episode(const ObjectSpec& spec, const SwingConfig& sim, const TactileConfig& tact,
                         std::uint64_t seed);

/// Final angle of an episode recomputed from (spec, w, seed).
double replay_final_angle(const ObjectSpec& spec, double w, std::uint64_t seed,
                          const SwingConfig& sim);

/// catalog.size() x trials episodes, object-major. `workers` > 1 splits the
/// episodes across threads; the output does not depend on the worker count.
Dataset generate_dataset(const std::vector<ObjectSpec>& catalog, const SwingConfig& sim,
                         const TactileConfig& tact, std::uint64_t seed, int workers = 1,
                         int trials = kTrialsPerObject);

void write_episodes(std::ostream& out, const std::vector<Episode>& episodes);
/// Throws FormatError on bad magic, unknown version, truncation or an
/// episode that violates its invariants.
std::vector<Episode> read_episodes(std::istream& in);

/// Writes `path` (SWNG) and `path`.meta holding seed, configs and fingerprint.
void save_dataset(const std::filesystem::path& path, const Dataset& data);
/// Reads both files; the catalog is rebuilt and checked against episode ids.
Dataset load_dataset(const std::filesystem::path& path);

}  // namespace swingup
