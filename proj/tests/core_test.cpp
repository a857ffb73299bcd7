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

#include "swingup/core.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "swingup/error.hpp"

namespace swingup {
namespace {

// Independent composite-body oracle: the rack is sliced into many point
// masses and every disk is a point mass.
struct PointSum {
  double mass_g = 0, first_moment = 0, moi_gm2 = 0;
};

PointSum brute_force(const TemplateCatalog& t, const std::vector<DiskPlacement>& disks) {
  PointSum s;
  constexpr int kSlices = 200000;
  const double dm = t.rack_mass_g / kSlices;
  for (int i = 0; i < kSlices; ++i) {
    const double r_mm = t.rack_offset_mm + (i + 0.5) * t.rack_length_mm / kSlices;
    s.mass_g += dm;
    s.first_moment += dm * r_mm;
    s.moi_gm2 += dm * (r_mm * 1e-3) * (r_mm * 1e-3);
  }
  for (const auto& d : disks) {
    s.mass_g += d.mass_g;
    s.first_moment += d.mass_g * d.slot_mm;
    s.moi_gm2 += d.mass_g * (d.slot_mm * 1e-3) * (d.slot_mm * 1e-3);
  }
  return s;
}

TEST(CoreTest, FrictionClasses) {
  std::set<double> mus;
  for (const auto& fc : kFrictionClasses) {
    EXPECT_GT(fc.mu_kinetic, 0.0);
    mus.insert(fc.mu_kinetic);
    EXPECT_EQ(parse_friction(friction_name(fc.label)), fc.label);
  }
  EXPECT_EQ(mus.size(), 3u);
  EXPECT_THROW(parse_friction("rubber"), InvalidArgument);
}

TEST(CoreTest, CatalogHas33DistinctSpecsInRange) {
  const Catalog cat = build_catalog();
  ASSERT_EQ(cat.specs.size(), 33u);
  std::set<std::tuple<int, double, double>> distinct;
  for (std::size_t i = 0; i < cat.specs.size(); ++i) {
    const ObjectSpec& s = cat.specs[i];
    EXPECT_EQ(s.id, static_cast<int>(i));
    EXPECT_GT(s.mass_g, 0.0);
    EXPECT_GE(s.com_mm, kComMinMm);
    EXPECT_LE(s.com_mm, kComMaxMm);
    EXPECT_GE(s.moi_gm2, kMoiMinGm2);
    EXPECT_LE(s.moi_gm2, kMoiMaxGm2);
    distinct.insert({static_cast<int>(s.friction.label), s.mass_g, s.com_mm});
  }
  EXPECT_EQ(distinct.size(), 33u);
  for (const auto& fc : kFrictionClasses) {
    EXPECT_EQ(std::count_if(cat.specs.begin(), cat.specs.end(),
                            [&](const ObjectSpec& s) { return s.friction.label == fc.label; }),
              11);
  }
}

TEST(CoreTest, RackOnlyFoamObject) {
  const ObjectSpec s = build_catalog().specs[0];
  EXPECT_EQ(s.friction.label, FrictionLabel::kFoam);
  EXPECT_TRUE(s.disks.empty());
  EXPECT_DOUBLE_EQ(s.mass_g, 15.6);
}

TEST(CoreTest, CompositeBodyMatchesPointMassOracle) {
  const Catalog cat = build_catalog();
  for (const ObjectSpec& s : cat.specs) {
    const PointSum o = brute_force(cat.templ, s.disks);
    EXPECT_NEAR(s.mass_g, o.mass_g, 1e-9);
    EXPECT_NEAR(s.com_mm, o.first_moment / o.mass_g, 1e-9);
    EXPECT_NEAR(s.moi_gm2, o.moi_gm2, 1e-9);
  }
  // The heaviest disk in the farthest slot, singled out.
  const TemplateCatalog t;
  const ObjectSpec far = assemble(t, kFrictionClasses[0], {{14.5, 130.0}}, 0);
  const PointSum o = brute_force(t, {{14.5, 130.0}});
  EXPECT_NEAR(far.com_mm, o.first_moment / o.mass_g, 1e-9);
  EXPECT_NEAR(far.moi_gm2, o.moi_gm2, 1e-9);
}

TEST(CoreTest, DiskAtPivotAddsNoFirstMoment) {
  const TemplateCatalog t;
  const ObjectSpec rack = assemble(t, kFrictionClasses[0], {}, 0);
  const ObjectSpec s = assemble(t, kFrictionClasses[0], {{3.7, 0.0}}, 1);
  EXPECT_DOUBLE_EQ(s.com_mm, rack.com_mm * rack.mass_g / (rack.mass_g + 3.7));
  EXPECT_DOUBLE_EQ(s.moi_gm2, rack.moi_gm2);
}

TEST(CoreTest, MovingDiskOutwardIncreasesComAndMoi) {
  const TemplateCatalog t;
  for (double m : t.disk_masses_g) {
    for (std::size_t k = 0; k + 1 < t.disk_slots_mm.size(); ++k) {
      const ObjectSpec a = assemble(t, kFrictionClasses[1], {{m, t.disk_slots_mm[k]}}, 0);
      const ObjectSpec b = assemble(t, kFrictionClasses[1], {{m, t.disk_slots_mm[k + 1]}}, 0);
      EXPECT_GT(b.com_mm, a.com_mm);
      EXPECT_GT(b.moi_gm2, a.moi_gm2);
    }
  }
  EXPECT_THROW(assemble(t, kFrictionClasses[0], {{-1.0, 60.0}}, 0), InvalidArgument);
}

TEST(CoreTest, CatalogIsDeterministic) {
  const auto a = build_catalog().specs;
  const auto b = build_catalog().specs;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].mass_g, b[i].mass_g);
    EXPECT_EQ(a[i].com_mm, b[i].com_mm);
    EXPECT_EQ(a[i].moi_gm2, b[i].moi_gm2);
  }
}

TEST(CoreTest, CatalogCsv) {
  std::ostringstream out;
  write_catalog_csv(out, build_catalog().specs);
  const std::string s = out.str();
  EXPECT_EQ(s.rfind("id,friction,mass_g,com_mm,moi_gm2\n", 0), 0u);
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 34);
}

TEST(CoreTest, NormalizedPropertiesSpanUnitInterval) {
  const auto specs = build_catalog().specs;
  const PropertyRanges r = property_ranges(specs);
  double lo = 1, hi = 0;
  for (const auto& s : specs) {
    for (double v : normalized_properties(s, r)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  EXPECT_DOUBLE_EQ(lo, 0.0);
  EXPECT_DOUBLE_EQ(hi, 1.0);
}

std::vector<Episode> fake_episodes(const std::vector<ObjectSpec>& specs, int per_object) {
  std::vector<Episode> eps;
  for (const auto& s : specs) {
    for (int t = 0; t < per_object; ++t) {
      Episode e;
      e.object_id = s.id;
      e.seed = static_cast<std::uint64_t>(t);
      eps.push_back(e);
    }
  }
  return eps;
}

TEST(CoreTest, SeenSplitCounts) {
  const auto specs = build_catalog().specs;
  const SplitSpec split = make_split(specs, SplitMode::kSeen);
  const auto eps = fake_episodes(specs, kTrialsPerObject);
  const SplitIndices idx = partition(eps, split);
  EXPECT_EQ(idx.train.size(), 1485u);
  EXPECT_EQ(idx.test.size(), 165u);
  // The last five trials of every object are held out.
  for (std::size_t i : idx.test) EXPECT_GE(eps[i].seed, 45u);
  for (std::size_t i : idx.train) EXPECT_LT(eps[i].seed, 45u);
}

TEST(CoreTest, UnseenSplitCountsAndDisjointness) {
  const auto specs = build_catalog().specs;
  const SplitSpec split = make_split(specs, SplitMode::kUnseen);
  EXPECT_EQ(split.train_object_ids.size(), 27u);
  EXPECT_EQ(split.test_object_ids.size(), 6u);
  for (int id : split.test_object_ids) EXPECT_EQ(split.train_object_ids.count(id), 0u);
  const SplitIndices idx = partition(fake_episodes(specs, kTrialsPerObject), split);
  EXPECT_EQ(idx.train.size(), 1350u);
  EXPECT_EQ(idx.test.size(), 300u);
}

TEST(CoreTest, UnseenObjectsAreTheDocumentedAssemblies) {
  const auto specs = build_catalog().specs;
  int slick = 0, plastic = 0;
  for (int id : unseen_object_ids(specs)) {
    const ObjectSpec& s = specs[static_cast<std::size_t>(id)];
    ASSERT_EQ(s.disks.size(), 1u);
    EXPECT_TRUE(s.disks[0].slot_mm == 60.0 || s.disks[0].slot_mm == 130.0);
    if (s.friction.label == FrictionLabel::kSlickTape) ++slick;
    if (s.friction.label == FrictionLabel::kPlastic) {
      ++plastic;
      EXPECT_EQ(s.disks[0].mass_g, 14.5);
    }
  }
  EXPECT_EQ(slick, 4);
  EXPECT_EQ(plastic, 2);
}

TEST(CoreTest, PartitionRejectsMismatchedCounts) {
  const auto specs = build_catalog().specs;
  auto eps = fake_episodes(specs, kTrialsPerObject);
  eps.pop_back();
  EXPECT_THROW(partition(eps, make_split(specs, SplitMode::kSeen)), InvalidArgument);
  EXPECT_THROW(parse_split("train"), InvalidArgument);
}

TEST(CoreTest, EpisodeValidation) {
  Episode e;
  e.shake_frames.resize(60);
  EXPECT_NO_THROW(e.validate());
  e.shake_frames.resize(71);
  EXPECT_THROW(e.validate(), InvalidArgument);
  e.shake_frames.resize(65);
  e.control_w = 1.5f;
  EXPECT_THROW(e.validate(), InvalidArgument);
  e.control_w = 0.5f;
  e.final_angle_deg = 201.0f;
  EXPECT_THROW(e.validate(), InvalidArgument);
  e.final_angle_deg = 10.0f;
  e.tilt_frames[1].at(3, 4, 1) = std::numeric_limits<float>::quiet_NaN();
  EXPECT_THROW(e.validate(), InvalidArgument);
}

}  // namespace
}  // namespace swingup
