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

#include "swingup/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <thread>

#include "swingup/binio.hpp"
#include "swingup/error.hpp"
#include "swingup/rng.hpp"

namespace swingup {
namespace {

constexpr std::uint64_t kControlStream = 1;
constexpr std::uint64_t kTactileStream = 2;
constexpr std::uint64_t kSwingStream = 3;

void put_frame(std::ostream& out, const TactileFrame& f) {
  for (float v : f.values) binio::put_le<float>(out, v);
}

TactileFrame get_frame(std::istream& in) {
  TactileFrame f;
  for (float& v : f.values) v = binio::get_le<float>(in, "tactile frame");
  return f;
}

}  // namespace

const ObjectSpec& Dataset::spec(int object_id) const {
  for (const auto& s : catalog) {
    if (s.id == object_id) return s;
  }
  throw InvalidArgument("object id " + std::to_string(object_id) + " is not in the catalog");
}

std::vector<std::size_t> Dataset::episodes_of(int object_id) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < episodes.size(); ++i) {
    if (episodes[i].object_id == object_id) out.push_back(i);
  }
  return out;
}

KeyValueConfig Dataset::provenance() const {
  KeyValueConfig c = sim.to_config();
  c.merge(tact.to_config());
  c.set("data.seed", std::to_string(seed));
  c.set("data.episodes", static_cast<std::int64_t>(episodes.size()));
  return c;
}

std::uint64_t episode_seed(std::uint64_t global_seed, int object_id, int trial) {
  return derive_seed({global_seed, static_cast<std::uint64_t>(object_id),
                      static_cast<std::uint64_t>(trial)});
}

double replay_final_angle(const ObjectSpec& spec, double w, std::uint64_t seed,
                          const SwingConfig& sim) {
  Rng rng(derive_seed({seed, kSwingStream}));
  return simulate_swing(spec, w, sim, rng).final_angle_deg;
}

Episode generate_episode(const ObjectSpec& spec, const SwingConfig& sim, const TactileConfig& tact,
                         std::uint64_t seed) {
  Episode ep;
  ep.object_id = spec.id;
  ep.seed = seed;
  Rng control_rng(derive_seed({seed, kControlStream}));
  ep.control_w = static_cast<float>(control_rng.uniform(0.0, 1.0));
  Rng tact_rng(derive_seed({seed, kTactileStream}));
  ep.tilt_frames[0] = synth_tilt_frame(spec, kTiltAnglesDeg[0], tact, tact_rng);
  ep.tilt_frames[1] = synth_tilt_frame(spec, kTiltAnglesDeg[1], tact, tact_rng);
  ep.shake_frames = synth_shake_sequence(spec, tact, tact_rng);
  const double angle = replay_final_angle(spec, ep.control_w, seed, sim);
  if (!std::isfinite(angle)) {
    throw NumericError("swing integration failed for object " + std::to_string(spec.id));
  }
  ep.final_angle_deg = static_cast<float>(angle);
  return ep;
}

Dataset generate_dataset(const std::vector<ObjectSpec>& catalog, const SwingConfig& sim,
                         const TactileConfig& tact, std::uint64_t seed, int workers, int trials) {
  sim.validate();
  tact.validate();
  if (trials <= 0) throw InvalidArgument("generate_dataset: trials must be positive");
  if (workers <= 0) throw InvalidArgument("generate_dataset: workers must be positive");
  Dataset data;
  data.catalog = catalog;
  data.seed = seed;
  data.sim = sim;
  data.tact = tact;
  const std::size_t total = catalog.size() * static_cast<std::size_t>(trials);
  data.episodes.resize(total);

  auto run = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const ObjectSpec& spec = catalog[i / trials];
      const int trial = static_cast<int>(i % trials);
      data.episodes[i] = generate_episode(spec, sim, tact, episode_seed(seed, spec.id, trial));
    }
  };
  if (workers == 1) {
    run(0, total);
    return data;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  const std::size_t chunk = (total + workers - 1) / workers;
  for (int k = 0; k < workers; ++k) {
    const std::size_t begin = std::min(total, k * chunk);
    const std::size_t end = std::min(total, begin + chunk);
    pool.emplace_back([&, k, begin, end] {
      try {
        run(begin, end);
      } catch (...) {
        errors[static_cast<std::size_t>(k)] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return data;
}

void write_episodes(std::ostream& out, const std::vector<Episode>& episodes) {
  out.write(kDatasetMagic, 4);
  binio::put_le<std::uint32_t>(out, kDatasetVersion);
  binio::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(episodes.size()));
  for (const Episode& ep : episodes) {
    binio::put_le<std::int32_t>(out, ep.object_id);
    binio::put_le<float>(out, ep.control_w);
    binio::put_le<float>(out, ep.final_angle_deg);
    binio::put_le<std::uint64_t>(out, ep.seed);
    put_frame(out, ep.tilt_frames[0]);
    put_frame(out, ep.tilt_frames[1]);
    binio::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(ep.shake_frames.size()));
    for (const auto& f : ep.shake_frames) put_frame(out, f);
  }
}

std::vector<Episode> read_episodes(std::istream& in) {
  binio::expect_magic(in, kDatasetMagic, "SWNG dataset");
  const auto version = binio::get_le<std::uint32_t>(in, "version");
  if (version != kDatasetVersion) {
    throw FormatError("unsupported SWNG version " + std::to_string(version) + " (expected " +
                      std::to_string(kDatasetVersion) + ")");
  }
  const auto count = binio::get_le<std::uint32_t>(in, "episode count");
  if (count > (1u << 20)) throw FormatError("implausible episode count");
  std::vector<Episode> out;
  out.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    Episode ep;
    ep.object_id = binio::get_le<std::int32_t>(in, "object id");
    ep.control_w = binio::get_le<float>(in, "control w");
    ep.final_angle_deg = binio::get_le<float>(in, "final angle");
    ep.seed = binio::get_le<std::uint64_t>(in, "seed");
    ep.tilt_frames[0] = get_frame(in);
    ep.tilt_frames[1] = get_frame(in);
    const auto t = binio::get_le<std::uint32_t>(in, "shake frame count");
    if (t < kMinShakeFrames || t > kMaxShakeFrames) {
      throw FormatError("episode " + std::to_string(i) + ": shake frame count " +
                        std::to_string(t) + " outside [60,70]");
    }
    ep.shake_frames.reserve(t);
    for (std::uint32_t k = 0; k < t; ++k) ep.shake_frames.push_back(get_frame(in));
    try {
      ep.validate();
    } catch (const InvalidArgument& e) {
      throw FormatError("episode " + std::to_string(i) + ": " + e.what());
    }
    out.push_back(std::move(ep));
  }
  if (in.peek() != std::char_traits<char>::eof()) throw FormatError("trailing bytes after last episode");
  return out;
}

void save_dataset(const std::filesystem::path& path, const Dataset& data) {
  {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write dataset " + path.string());
    write_episodes(out, data.episodes);
    if (!out) throw IoError("write failed for " + path.string());
  }
  data.provenance().save(path.string() + ".meta", "dataset sidecar");
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open dataset " + path.string());
  Dataset data;
  data.episodes = read_episodes(in);
  const std::filesystem::path meta_path = path.string() + ".meta";
  if (std::filesystem::exists(meta_path)) {
    const KeyValueConfig meta = KeyValueConfig::load(meta_path);
    try {
      data.sim = SwingConfig::from_config(meta);
      data.tact = TactileConfig::from_config(meta);
      data.seed = std::stoull(meta.get("data.seed"));
    } catch (const InvalidArgument& e) {
      throw FormatError(std::string("dataset sidecar: ") + e.what());
    } catch (const std::logic_error& e) {
      throw FormatError(std::string("dataset sidecar: bad seed"));
    }
  }
  data.catalog = build_catalog().specs;
  for (const Episode& ep : data.episodes) {
    if (ep.object_id < 0 || ep.object_id >= static_cast<int>(data.catalog.size())) {
      throw FormatError("episode references unknown object id " + std::to_string(ep.object_id));
    }
  }
  return data;
}

}  // namespace swingup
