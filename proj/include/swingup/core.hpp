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

#include <array>
#include <cstdint>
#include <iosfwd>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace swingup {

// ---------------------------------------------------------------------------
// Friction classes of the handle surface.

enum class FrictionLabel : int { kFoam = 0, kSlickTape = 1, kPlastic = 2 };

struct FrictionClass {
  FrictionLabel label;
  double mu_kinetic;
};

inline constexpr std::array<FrictionClass, 3> kFrictionClasses = {{
    {FrictionLabel::kFoam, 0.9},
    {FrictionLabel::kSlickTape, 0.3},
    {FrictionLabel::kPlastic, 0.6},
}};

FrictionClass friction_class(FrictionLabel label);
std::string_view friction_name(FrictionLabel label);
FrictionLabel parse_friction(std::string_view name);

// ---------------------------------------------------------------------------
// Assembled template objects.

/// One disk pressed onto the rack.
struct DiskPlacement {
  double mass_g;
  double slot_mm;
  bool operator==(const DiskPlacement&) const = default;
};

/// Ground-truth physical parameters of one assembled object. `moi_gm2` is
/// about the grip pivot axis.
struct ObjectSpec {
  int id = 0;
  double mass_g = 0.0;
  double com_mm = 0.0;
  double moi_gm2 = 0.0;
  FrictionClass friction{FrictionLabel::kFoam, 0.9};
  std::vector<DiskPlacement> disks;

  double mass_kg() const { return mass_g * 1e-3; }
  double com_m() const { return com_mm * 1e-3; }
  double inertia_kgm2() const { return moi_gm2 * 1e-3; }
};

struct TemplateCatalog {
  double rack_mass_g = 15.6;
  double rack_length_mm = 150.0;
  /// Distance from the pivot to the near end of the rack (handle length).
  double rack_offset_mm = 20.0;
  std::array<double, 3> disk_masses_g = {3.7, 7.3, 14.5};
  std::array<double, 3> disk_slots_mm = {60.0, 95.0, 130.0};

  double rack_com_mm() const { return rack_offset_mm + 0.5 * rack_length_mm; }
  /// Rack inertia about the pivot in g*m^2 (uniform rod, parallel axis).
  double rack_moi_gm2() const;
};

inline constexpr double kComMinMm = 77.0;
inline constexpr double kComMaxMm = 134.0;
inline constexpr double kMoiMinGm2 = 0.03;
inline constexpr double kMoiMaxGm2 = 0.58;

/// Composite-body mass, com and pivot inertia for a rack with disks.
ObjectSpec assemble(const TemplateCatalog& catalog, FrictionClass friction,
                    std::vector<DiskPlacement> disks, int id);

struct Catalog {
  TemplateCatalog templ;
  std::vector<ObjectSpec> specs;
};

/// 3 frictions x (rack-only, 9 single-disk, 1 double-disk) = 33 objects,
/// ids 0..32 in friction-major order.
Catalog build_catalog();

/// CSV: id,friction,mass_g,com_mm,moi_gm2
void write_catalog_csv(std::ostream& out, const std::vector<ObjectSpec>& specs);

/// Min/max over the catalog, used for property normalization.
struct PropertyRanges {
  double mass_min, mass_max, com_min, com_max, moi_min, moi_max;
};
PropertyRanges property_ranges(const std::vector<ObjectSpec>& specs);

/// (mass, com, moi) min-max normalized to [0,1].
std::array<double, 3> normalized_properties(const ObjectSpec& spec, const PropertyRanges& ranges);

// ---------------------------------------------------------------------------
// Tactile observations and episodes.

inline constexpr int kGridH = 12;
inline constexpr int kGridW = 14;
inline constexpr int kFrameValues = kGridH * kGridW * 2;

/// Marker displacement field, row-major [row][col][dx,dy].
struct TactileFrame {
  std::array<float, kFrameValues> values{};

  float& at(int row, int col, int comp) { return values[(row * kGridW + col) * 2 + comp]; }
  float at(int row, int col, int comp) const { return values[(row * kGridW + col) * 2 + comp]; }
  bool all_finite() const;
  bool operator==(const TactileFrame&) const = default;
};

inline constexpr int kMinShakeFrames = 60;
inline constexpr int kMaxShakeFrames = 70;

struct Episode {
  int object_id = 0;
  std::array<TactileFrame, 2> tilt_frames;  // 20 deg, 45 deg
  std::vector<TactileFrame> shake_frames;
  float control_w = 0.0f;
  float final_angle_deg = 0.0f;
  std::uint64_t seed = 0;

  /// Throws InvalidArgument when an invariant is violated.
  void validate() const;
  bool operator==(const Episode&) const = default;
};

// ---------------------------------------------------------------------------
// Train/test splits.

enum class SplitMode { kSeen, kUnseen };

std::string_view split_name(SplitMode mode);
SplitMode parse_split(std::string_view name);

struct SplitSpec {
  SplitMode mode = SplitMode::kSeen;
  std::set<int> train_object_ids;
  std::set<int> test_object_ids;
  double per_object_train_fraction = 0.9;
};

inline constexpr int kTrialsPerObject = 50;

/// Object ids of the 6 held-out assemblies: SlickTape x {3.7 g, 14.5 g} x
/// {60 mm, 130 mm} plus Plastic x 14.5 g x {60 mm, 130 mm}.
std::vector<int> unseen_object_ids(const std::vector<ObjectSpec>& specs);

SplitSpec make_split(const std::vector<ObjectSpec>& specs, SplitMode mode);

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Assigns episode indices to train/test. Trial order is the order of
/// appearance per object; in Seen mode the last 10% of trials are held out.
/// Throws InvalidArgument unless every split object has exactly
/// `trials_per_object` episodes.
SplitIndices partition(const std::vector<Episode>& episodes, const SplitSpec& split,
                       int trials_per_object = kTrialsPerObject);

}  // namespace swingup
