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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>

#include "swingup/error.hpp"

namespace swingup {

FrictionClass friction_class(FrictionLabel label) {
  for (const auto& fc : kFrictionClasses) {
    if (fc.label == label) return fc;
  }
  throw InvalidArgument("unknown friction label");
}

std::string_view friction_name(FrictionLabel label) {
  switch (label) {
    case FrictionLabel::kFoam: return "Foam";
    case FrictionLabel::kSlickTape: return "SlickTape";
    case FrictionLabel::kPlastic: return "Plastic";
  }
  return "?";
}

FrictionLabel parse_friction(std::string_view name) {
  for (const auto& fc : kFrictionClasses) {
    if (friction_name(fc.label) == name) return fc.label;
  }
  throw InvalidArgument("unknown friction class '" + std::string(name) + "'");
}

double TemplateCatalog::rack_moi_gm2() const {
  const double length_m = rack_length_mm * 1e-3;
  const double com_m = rack_com_mm() * 1e-3;
  return rack_mass_g * (length_m * length_m / 12.0 + com_m * com_m);
}

ObjectSpec assemble(const TemplateCatalog& catalog, FrictionClass friction,
                    std::vector<DiskPlacement> disks, int id) {
  double mass = catalog.rack_mass_g;
  double first_moment = catalog.rack_mass_g * catalog.rack_com_mm();
  double moi = catalog.rack_moi_gm2();
  for (const auto& d : disks) {
    if (!(d.mass_g > 0.0) || d.slot_mm < 0.0) {
      throw InvalidArgument("disk mass must be positive and slot non-negative");
    }
    mass += d.mass_g;
    first_moment += d.mass_g * d.slot_mm;
    const double r_m = d.slot_mm * 1e-3;
    moi += d.mass_g * r_m * r_m;  // point mass about the pivot
  }
  ObjectSpec spec;
  spec.id = id;
  spec.mass_g = mass;
  spec.com_mm = first_moment / mass;
  spec.moi_gm2 = moi;
  spec.friction = friction;
  spec.disks = std::move(disks);
  return spec;
}

Catalog build_catalog() {
  Catalog cat;
  const TemplateCatalog& t = cat.templ;
  int id = 0;
  for (const auto& fc : kFrictionClasses) {
    cat.specs.push_back(assemble(t, fc, {}, id++));
    for (double m : t.disk_masses_g) {
      for (double s : t.disk_slots_mm) {
        cat.specs.push_back(assemble(t, fc, {{m, s}}, id++));
      }
    }
    cat.specs.push_back(assemble(
        t, fc, {{t.disk_masses_g[1], t.disk_slots_mm[1]}, {t.disk_masses_g[2], t.disk_slots_mm[2]}},
        id++));
  }
  return cat;
}

void write_catalog_csv(std::ostream& out, const std::vector<ObjectSpec>& specs) {
  out << "id,friction,mass_g,com_mm,moi_gm2\n";
  char buf[160];
  for (const auto& s : specs) {
    std::snprintf(buf, sizeof(buf), "%d,%s,%.3f,%.3f,%.5f\n", s.id,
                  std::string(friction_name(s.friction.label)).c_str(), s.mass_g, s.com_mm,
                  s.moi_gm2);
    out << buf;
  }
}

PropertyRanges property_ranges(const std::vector<ObjectSpec>& specs) {
  if (specs.empty()) throw InvalidArgument("property_ranges: empty catalog");
  PropertyRanges r{specs[0].mass_g, specs[0].mass_g, specs[0].com_mm,
                   specs[0].com_mm, specs[0].moi_gm2, specs[0].moi_gm2};
  for (const auto& s : specs) {
    r.mass_min = std::min(r.mass_min, s.mass_g);
    r.mass_max = std::max(r.mass_max, s.mass_g);
    r.com_min = std::min(r.com_min, s.com_mm);
    r.com_max = std::max(r.com_max, s.com_mm);
    r.moi_min = std::min(r.moi_min, s.moi_gm2);
    r.moi_max = std::max(r.moi_max, s.moi_gm2);
  }
  return r;
}

std::array<double, 3> normalized_properties(const ObjectSpec& spec, const PropertyRanges& r) {
  auto norm = [](double v, double lo, double hi) { return hi > lo ? (v - lo) / (hi - lo) : 0.0; };
  return {norm(spec.mass_g, r.mass_min, r.mass_max), norm(spec.com_mm, r.com_min, r.com_max),
          norm(spec.moi_gm2, r.moi_min, r.moi_max)};
}

bool TactileFrame::all_finite() const {
  return std::all_of(values.begin(), values.end(), [](float v) { return std::isfinite(v); });
}

void Episode::validate() const {
  const auto t = static_cast<int>(shake_frames.size());
  if (t < kMinShakeFrames || t > kMaxShakeFrames) {
    throw InvalidArgument("episode shake sequence length " + std::to_string(t) +
                          " outside [60,70]");
  }
  if (!(control_w >= 0.0f && control_w <= 1.0f)) {
    throw InvalidArgument("episode control_w outside [0,1]");
  }
  if (!(final_angle_deg >= 0.0f && final_angle_deg <= 200.0f)) {
    throw InvalidArgument("episode final angle outside [0,200]");
  }
  for (const auto& f : tilt_frames) {
    if (!f.all_finite()) throw InvalidArgument("non-finite tilt frame");
  }
  for (const auto& f : shake_frames) {
    if (!f.all_finite()) throw InvalidArgument("non-finite shake frame");
  }
}

std::string_view split_name(SplitMode mode) {
  return mode == SplitMode::kSeen ? "seen" : "unseen";
}

SplitMode parse_split(std::string_view name) {
  if (name == "seen") return SplitMode::kSeen;
  if (name == "unseen") return SplitMode::kUnseen;
  throw InvalidArgument("unknown split '" + std::string(name) + "' (expected seen|unseen)");
}

std::vector<int> unseen_object_ids(const std::vector<ObjectSpec>& specs) {
  struct Want {
    FrictionLabel friction;
    double mass;
    double slot;
  };
  static constexpr Want kWanted[] = {
      {FrictionLabel::kSlickTape, 3.7, 60.0},  {FrictionLabel::kSlickTape, 3.7, 130.0},
      {FrictionLabel::kSlickTape, 14.5, 60.0}, {FrictionLabel::kSlickTape, 14.5, 130.0},
      {FrictionLabel::kPlastic, 14.5, 60.0},   {FrictionLabel::kPlastic, 14.5, 130.0},
  };
  std::vector<int> ids;
  for (const auto& w : kWanted) {
    const auto it = std::find_if(specs.begin(), specs.end(), [&](const ObjectSpec& s) {
      return s.friction.label == w.friction && s.disks.size() == 1 &&
             s.disks[0] == DiskPlacement{w.mass, w.slot};
    });
    if (it == specs.end()) throw InvalidArgument("catalog lacks an unseen-set assembly");
    ids.push_back(it->id);
  }
  return ids;
}

SplitSpec make_split(const std::vector<ObjectSpec>& specs, SplitMode mode) {
  SplitSpec split;
  split.mode = mode;
  if (mode == SplitMode::kSeen) {
    for (const auto& s : specs) {
      split.train_object_ids.insert(s.id);
      split.test_object_ids.insert(s.id);
    }
    split.per_object_train_fraction = 0.9;
    return split;
  }
  const auto unseen = unseen_object_ids(specs);
  split.test_object_ids.insert(unseen.begin(), unseen.end());
  for (const auto& s : specs) {
    if (!split.test_object_ids.count(s.id)) split.train_object_ids.insert(s.id);
  }
  split.per_object_train_fraction = 1.0;
  return split;
}

SplitIndices partition(const std::vector<Episode>& episodes, const SplitSpec& split,
                       int trials_per_object) {
  std::map<int, std::vector<std::size_t>> by_object;
  for (std::size_t i = 0; i < episodes.size(); ++i) by_object[episodes[i].object_id].push_back(i);

  std::set<int> needed = split.train_object_ids;
  needed.insert(split.test_object_ids.begin(), split.test_object_ids.end());
  for (int id : needed) {
    const auto it = by_object.find(id);
    const std::size_t n = it == by_object.end() ? 0 : it->second.size();
    if (n != static_cast<std::size_t>(trials_per_object)) {
      throw InvalidArgument("object " + std::to_string(id) + " has " + std::to_string(n) +
                            " episodes, expected " + std::to_string(trials_per_object));
    }
  }

  SplitIndices out;
  if (split.mode == SplitMode::kSeen) {
    const auto n_train = static_cast<std::size_t>(
        std::lround(split.per_object_train_fraction * trials_per_object));
    for (const auto& [id, idx] : by_object) {
      if (!needed.count(id)) continue;
      for (std::size_t k = 0; k < idx.size(); ++k) {
        (k < n_train ? out.train : out.test).push_back(idx[k]);
      }
    }
  } else {
    for (const auto& [id, idx] : by_object) {
      if (split.train_object_ids.count(id)) out.train.insert(out.train.end(), idx.begin(), idx.end());
      if (split.test_object_ids.count(id)) out.test.insert(out.test.end(), idx.begin(), idx.end());
    }
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

}  // namespace swingup
