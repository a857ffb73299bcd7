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

#include <gtest/gtest.h>

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "swingup/error.hpp"

namespace swingup {
namespace {

SwingConfig calibrated() {
  SwingConfig cfg;
  cfg.l_imp = calibrate_impulse(build_catalog().specs, cfg);
  return cfg;
}

std::string bytes_of(const std::vector<Episode>& eps) {
  std::ostringstream out;
  write_episodes(out, eps);
  return out.str();
}

class DatasetTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    sim_ = new SwingConfig(calibrated());
    small_ = new Dataset(generate_dataset(build_catalog().specs, *sim_, TactileConfig{}, 11, 1, 3));
  }
  static void TearDownTestSuite() {
    delete small_;
    delete sim_;
  }
  static SwingConfig* sim_;
  static Dataset* small_;
};
SwingConfig* DatasetTest::sim_ = nullptr;
Dataset* DatasetTest::small_ = nullptr;

TEST_F(DatasetTest, LayoutIsObjectMajor) {
  ASSERT_EQ(small_->episodes.size(), 99u);
  for (std::size_t i = 0; i < small_->episodes.size(); ++i) {
    EXPECT_EQ(small_->episodes[i].object_id, static_cast<int>(i / 3));
    EXPECT_EQ(small_->episodes[i].seed, episode_seed(11, static_cast<int>(i / 3), i % 3));
  }
  EXPECT_EQ(small_->episodes_of(4), (std::vector<std::size_t>{12, 13, 14}));
}

TEST_F(DatasetTest, SameSeedSameBytes) {
  const Dataset again = generate_dataset(build_catalog().specs, *sim_, TactileConfig{}, 11, 1, 3);
  EXPECT_EQ(bytes_of(again.episodes), bytes_of(small_->episodes));
  const Dataset other = generate_dataset(build_catalog().specs, *sim_, TactileConfig{}, 12, 1, 3);
  EXPECT_NE(bytes_of(other.episodes), bytes_of(small_->episodes));
}

TEST_F(DatasetTest, WorkerCountDoesNotChangeOutput) {
  for (int workers : {2, 5}) {
    const Dataset d = generate_dataset(build_catalog().specs, *sim_, TactileConfig{}, 11, workers, 3);
    EXPECT_EQ(bytes_of(d.episodes), bytes_of(small_->episodes)) << workers << " workers";
  }
}

TEST_F(DatasetTest, EpisodesSatisfyInvariants) {
  for (const Episode& e : small_->episodes) {
    EXPECT_NO_THROW(e.validate());
    EXPECT_GE(e.shake_frames.size(), 60u);
    EXPECT_LE(e.shake_frames.size(), 70u);
    EXPECT_GE(e.control_w, 0.0f);
    EXPECT_LE(e.control_w, 1.0f);
  }
}

TEST_F(DatasetTest, ReplayReproducesFinalAngle) {
  for (const Episode& e : small_->episodes) {
    const double a = replay_final_angle(small_->spec(e.object_id), e.control_w, e.seed, *sim_);
    EXPECT_EQ(static_cast<float>(a), e.final_angle_deg);
  }
}

TEST_F(DatasetTest, StreamRoundTrip) {
  std::istringstream in(bytes_of(small_->episodes));
  EXPECT_EQ(read_episodes(in), small_->episodes);
}

TEST_F(DatasetTest, HeaderLayout) {
  const std::string b = bytes_of(small_->episodes);
  EXPECT_EQ(b.substr(0, 4), "SWNG");
  std::uint32_t version = 0;
  std::memcpy(&version, b.data() + 4, 4);
  EXPECT_EQ(version, kDatasetVersion);
}

TEST_F(DatasetTest, CorruptStreamsRejected) {
  const std::string good = bytes_of(small_->episodes);
  auto read = [](std::string s) {
    std::istringstream in(s);
    return read_episodes(in);
  };
  std::string bad_magic = good;
  bad_magic[0] = 'X';
  EXPECT_THROW(read(bad_magic), FormatError);
  std::string bad_version = good;
  bad_version[4] = 2;
  EXPECT_THROW(read(bad_version), FormatError);
  EXPECT_THROW(read(good.substr(0, good.size() - 7)), FormatError);
  EXPECT_THROW(read(good + "x"), FormatError);
}

TEST_F(DatasetTest, FileRoundTripKeepsProvenance) {
  const auto dir = std::filesystem::temp_directory_path() / "swingup_dataset_test";
  std::filesystem::create_directories(dir);
  save_dataset(dir / "d.swng", *small_);
  const Dataset back = load_dataset(dir / "d.swng");
  EXPECT_EQ(back.episodes, small_->episodes);
  EXPECT_EQ(back.seed, 11u);
  EXPECT_EQ(back.sim.l_imp, sim_->l_imp);
  EXPECT_EQ(back.provenance().get("data.seed"), small_->provenance().get("data.seed"));
  EXPECT_THROW(load_dataset(dir / "missing.swng"), IoError);
  std::filesystem::remove_all(dir);
}

TEST(DatasetFullTest, FinalAnglesSpanTheRange) {
  const Dataset d = generate_dataset(build_catalog().specs, calibrated(), TactileConfig{}, 3, 2);
  ASSERT_EQ(d.episodes.size(), 33u * kTrialsPerObject);
  float lo = 1e9f, hi = -1e9f;
  for (const Episode& e : d.episodes) {
    lo = std::min(lo, e.final_angle_deg);
    hi = std::max(hi, e.final_angle_deg);
  }
  EXPECT_LE(lo, 5.0f);
  EXPECT_GE(hi, 195.0f);
}

}  // namespace
}  // namespace swingup
