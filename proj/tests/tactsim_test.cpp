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

#include "swingup/tactsim.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "swingup/error.hpp"

namespace swingup {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

TactileConfig quiet() {
  TactileConfig cfg;
  cfg.noise_sd = 0.0;
  return cfg;
}

ObjectSpec point_object(double mass_g, double com_mm, double mu) {
  ObjectSpec s;
  s.mass_g = mass_g;
  s.com_mm = com_mm;
  s.moi_gm2 = mass_g * com_mm * com_mm * 1e-6;
  s.friction = {FrictionLabel::kFoam, mu};
  return s;
}

// Independent per-marker model: the tangential load m g sin(phi) shears the
// gel by alpha_t per newton, the torque m g r sin(phi) twists it by alpha_r per
// N*m per unit radius, and each marker slips once its displacement exceeds
// mu F / k.
void expected_tilt_marker(const ObjectSpec& s, double phi_deg, const TactileConfig& cfg, int row,
                          int col, double& ux, double& uy) {
  const double x = col - 6.5;
  const double y = row - 5.5;
  const double f_t = s.mass_g / 1000.0 * cfg.g * std::sin(phi_deg * kDegToRad);
  const double tau = f_t * s.com_mm / 1000.0;
  ux = -cfg.alpha_r * tau * y;
  uy = cfg.alpha_t * f_t + cfg.alpha_r * tau * x;
  const double limit = s.friction.mu_kinetic * cfg.f_hold / cfg.k_shear;
  const double n = std::sqrt(ux * ux + uy * uy);
  if (n > limit) {
    ux = ux / n * limit;
    uy = uy / n * limit;
  }
}

TEST(TactsimTest, MarkerOffsetsAreCentered) {
  EXPECT_DOUBLE_EQ(marker_offset(0, 0).dx, -6.5);
  EXPECT_DOUBLE_EQ(marker_offset(0, 0).dy, -5.5);
  EXPECT_DOUBLE_EQ(marker_offset(11, 13).dx, 6.5);
  EXPECT_DOUBLE_EQ(marker_offset(11, 13).dy, 5.5);
}

TEST(TactsimTest, TiltFieldMatchesPerMarkerOracle) {
  const TactileConfig cfg = quiet();
  for (double mu : {0.9, 0.05}) {  // unsaturated and heavily clipped
    const ObjectSpec s = point_object(31.4, 100.0, mu);
    for (double phi : {20.0, 45.0}) {
      Rng rng(1);
      const TactileFrame f = synth_tilt_frame(s, phi, cfg, rng);
      for (int r = 0; r < kGridH; ++r) {
        for (int c = 0; c < kGridW; ++c) {
          double ux, uy;
          expected_tilt_marker(s, phi, cfg, r, c, ux, uy);
          EXPECT_NEAR(f.at(r, c, 0), ux, 1e-7 + 1e-6 * std::abs(ux));
          EXPECT_NEAR(f.at(r, c, 1), uy, 1e-7 + 1e-6 * std::abs(uy));
        }
      }
    }
  }
}

TEST(TactsimTest, TiltFieldVanishesWithoutLoad) {
  const TactileConfig cfg = quiet();
  Rng rng(1);
  const TactileFrame massless = synth_tilt_frame(point_object(0.0, 100.0, 0.9), 45.0, cfg, rng);
  for (float v : massless.values) EXPECT_EQ(v, 0.0f);
}

TEST(TactsimTest, TorsionDoublesWithComDistance) {
  const TactileConfig cfg = quiet();
  Rng rng(1);
  const ObjectSpec near = point_object(10.0, 50.0, 0.9);
  const ObjectSpec far = point_object(10.0, 100.0, 0.9);
  ASSERT_EQ(tilt_saturated_fraction(far, 45.0, cfg), 0.0);
  const FieldFit a = fit_field(synth_tilt_frame(near, 45.0, cfg, rng));
  const FieldFit b = fit_field(synth_tilt_frame(far, 45.0, cfg, rng));
  EXPECT_NEAR(b.torsion / a.torsion, 2.0, 1e-5);
  EXPECT_NEAR(b.translation / a.translation, 1.0, 1e-5);
}

TEST(TactsimTest, UnsupportedTiltAngleRejected) {
  Rng rng(1);
  const ObjectSpec s = point_object(10.0, 80.0, 0.9);
  EXPECT_THROW(synth_tilt_frame(s, 30.0, quiet(), rng), InvalidArgument);
  EXPECT_THROW(tilt_saturated_fraction(s, 0.0, quiet()), InvalidArgument);
}

TEST(TactsimTest, TiltLoadIsIdentifiableWhenUnsaturated) {
  const TactileConfig cfg = quiet();
  int checked = 0;
  for (const ObjectSpec& s : build_catalog().specs) {
    if (tilt_saturated_fraction(s, 45.0, cfg) > 0.0) continue;
    Rng rng(1);
    const TactileFrame a = synth_tilt_frame(s, 20.0, cfg, rng);
    const TactileFrame b = synth_tilt_frame(s, 45.0, cfg, rng);
    const TiltLoad load = estimate_tilt_load(a, b, cfg);
    EXPECT_NEAR(load.mass_kg / s.mass_kg(), 1.0, 1e-6) << "object " << s.id;
    EXPECT_NEAR(load.com_m / s.com_m(), 1.0, 1e-6) << "object " << s.id;
    ++checked;
  }
  EXPECT_GE(checked, 11);
}

TEST(TactsimTest, SaturationGrowsWithTiltAndShrinksWithFriction) {
  const TactileConfig cfg = quiet();
  for (const ObjectSpec& s : build_catalog().specs) {
    EXPECT_GE(tilt_saturated_fraction(s, 45.0, cfg), tilt_saturated_fraction(s, 20.0, cfg));
    ObjectSpec grippy = s;
    grippy.friction.mu_kinetic = 10.0;
    EXPECT_EQ(tilt_saturated_fraction(grippy, 45.0, cfg), 0.0);
  }
}

TEST(TactsimTest, ShakeTwistTracksWristWhenStuck) {
  TactileConfig cfg = quiet();
  const ObjectSpec s = point_object(20.0, 100.0, 100.0);
  const ShakeKinematics k = shake_kinematics(s, cfg, 65);
  for (std::size_t i = 0; i < k.t.size(); ++i) EXPECT_NEAR(k.twist[i], k.beta[i], 1e-12);
}

TEST(TactsimTest, FrictionlessShakeLeavesOnlyInertialTorsion) {
  const TactileConfig cfg = quiet();
  const ObjectSpec s = point_object(20.0, 100.0, 0.0);
  Rng rng(1);
  const auto frames = synth_shake_frames(s, cfg, 60, rng);
  const ShakeKinematics k = shake_kinematics(s, cfg, 60);
  for (int f = 0; f < 60; ++f) {
    EXPECT_EQ(k.twist[f], 0.0);
    const double expected = cfg.alpha_r * cfg.inertial_gain * s.inertia_kgm2() * k.beta_dd[f];
    EXPECT_NEAR(fit_field(frames[f]).torsion, expected, 1e-6 * std::abs(expected) + 1e-9);
  }
}

TEST(TactsimTest, SlipTwistScalesWithFriction) {
  TactileConfig cfg = quiet();
  cfg.inertial_gain = 0.0;
  const auto& specs = build_catalog().specs;
  ObjectSpec foam = specs[0];
  ObjectSpec slick = foam;
  slick.friction = friction_class(FrictionLabel::kSlickTape);
  Rng rng(1);
  const double a = peak_shake_twist(synth_shake_frames(foam, cfg, 65, rng), cfg);
  const double b = peak_shake_twist(synth_shake_frames(slick, cfg, 65, rng), cfg);
  EXPECT_NEAR(a / b, 3.0, 1e-4);
  EXPECT_NEAR(a, 0.9 * cfg.f_explore * cfg.r_grip / cfg.k_theta, 1e-6);
}

TEST(TactsimTest, ShakeSeparatesFrictionClasses) {
  const TactileConfig cfg;  // with noise
  std::array<std::vector<double>, 3> groups;
  Rng rng(5);
  for (const ObjectSpec& s : build_catalog().specs) {
    for (int trial = 0; trial < 5; ++trial) {
      groups[static_cast<int>(s.friction.label)].push_back(
          peak_shake_twist(synth_shake_sequence(s, cfg, rng), cfg));
    }
  }
  auto mean = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x;
    return m / v.size();
  };
  auto var = [&](const std::vector<double>& v) {
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / (v.size() - 1);
  };
  const int order[3] = {1, 2, 0};  // SlickTape < Plastic < Foam
  for (int i = 0; i + 1 < 3; ++i) {
    const auto& lo = groups[order[i]];
    const auto& hi = groups[order[i + 1]];
    const double pooled = std::sqrt(0.5 * (var(lo) + var(hi)));
    EXPECT_GT(mean(hi) - mean(lo), 2.0 * pooled);
  }
}

TEST(TactsimTest, ShakeLengthWithinRange) {
  const TactileConfig cfg;
  Rng rng(9);
  const ObjectSpec s = build_catalog().specs[3];
  int lo = 100, hi = 0;
  for (int i = 0; i < 300; ++i) {
    const int t = static_cast<int>(synth_shake_sequence(s, cfg, rng).size());
    lo = std::min(lo, t);
    hi = std::max(hi, t);
  }
  EXPECT_EQ(lo, kMinShakeFrames);
  EXPECT_EQ(hi, kMaxShakeFrames);
}

TEST(TactsimTest, NoiseIsSeededAndBounded) {
  const TactileConfig cfg;
  const ObjectSpec s = build_catalog().specs[7];
  Rng a(3), b(3);
  EXPECT_EQ(synth_tilt_frame(s, 20.0, cfg, a), synth_tilt_frame(s, 20.0, cfg, b));
  Rng c(3);
  const TactileFrame noisy = synth_tilt_frame(s, 20.0, cfg, c);
  Rng d(3);
  const TactileFrame clean = synth_tilt_frame(s, 20.0, quiet(), d);
  double ss = 0.0;
  for (int i = 0; i < kFrameValues; ++i) {
    const double e = noisy.values[i] - clean.values[i];
    ss += e * e;
  }
  EXPECT_NEAR(std::sqrt(ss / kFrameValues), cfg.noise_sd, 0.2 * cfg.noise_sd);
}

TEST(TactsimTest, ConfigValidation) {
  TactileConfig cfg;
  cfg.shake_amplitude_deg = 6.0;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
  cfg = TactileConfig{};
  cfg.f_explore = cfg.f_hold;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
  cfg = TactileConfig{};
  cfg.noise_sd = 1.25e-4;
  EXPECT_EQ(TactileConfig::from_config(cfg.to_config()).noise_sd, cfg.noise_sd);
}

}  // namespace
}  // namespace swingup
