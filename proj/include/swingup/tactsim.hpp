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

#include <vector>

#include "swingup/config.hpp"
#include "swingup/core.hpp"
#include "swingup/rng.hpp"

namespace swingup {

/// Synthetic marker-field model. Displacements are in marker-grid units;
/// the grid has unit pitch and is centered on the contact.
struct TactileConfig {
  double g = 9.81;
  double alpha_t = 0.02;          // translational compliance, disp per N
  double alpha_r = 0.0218;        // torsional compliance, disp per N*m per grid unit
  double k_shear = 865.0;         // gel shear stiffness, N per unit disp
  double f_hold = 10.0;           // N, grip force while tilting
  double f_explore = 2.0;         // N, loosened grip while shaking
  double r_grip = 0.01;           // m, friction radius of the contact patch
  double k_theta = 0.3;           // N*m/rad, torsional stiffness of the gel
  double inertial_gain = 0.2;     // scales I*beta'' into the shake torque
  double shake_amplitude_deg = 5.0;
  double shake_freq_hz = 2.0;
  double frame_rate_hz = 30.0;
  double noise_sd = 8e-5;

  void validate() const;
  KeyValueConfig to_config() const;
  static TactileConfig from_config(const KeyValueConfig& cfg);
};

inline constexpr double kTiltAnglesDeg[2] = {20.0, 45.0};

/// Marker position relative to the grid center (x = column, y = row).
struct MarkerOffset {
  double dx, dy;
};
MarkerOffset marker_offset(int row, int col);

/// Slip-saturation radius mu * F_hold / k_shear.
double tilt_saturation(const ObjectSpec& spec, const TactileConfig& cfg);

/// Tilt-pose field. `phi_deg` must be 20 or 45. Pass a zero-noise config
/// (or noise_sd = 0) for the deterministic field.
TactileFrame synth_tilt_frame(const ObjectSpec& spec, double phi_deg, const TactileConfig& cfg,
                              Rng& rng);

/// Fraction of markers whose noise-free displacement hits the slip clip.
double tilt_saturated_fraction(const ObjectSpec& spec, double phi_deg, const TactileConfig& cfg);

/// Relative twist of the object in the gripper for the commanded wrist angle
/// history (stick-slip play operator). Angles in radians, one entry per frame.
struct ShakeKinematics {
  std::vector<double> t;       // s
  std::vector<double> beta;    // commanded wrist angle, rad
  std::vector<double> beta_dd; // rad/s^2
  std::vector<double> twist;   // gel twist gamma, rad
};
ShakeKinematics shake_kinematics(const ObjectSpec& spec, const TactileConfig& cfg, int frames);

/// Torsion coefficient (disp per grid unit) of a shake frame before noise.
double shake_torsion(const ObjectSpec& spec, const TactileConfig& cfg, double twist,
                     double beta_dd);

/// T ~ UniformInt[60,70] frames of the shaking action.
std::vector<TactileFrame> synth_shake_sequence(const ObjectSpec& spec, const TactileConfig& cfg,
                                               Rng& rng);

/// Deterministic shake frames for a given length (noise still drawn from rng
/// when cfg.noise_sd > 0).
std::vector<TactileFrame> synth_shake_frames(const ObjectSpec& spec, const TactileConfig& cfg,
                                             int frames, Rng& rng);

/// Least-squares decomposition of a field into uniform translation along the
/// gravity direction and a rigid torsion about the grid center.
struct FieldFit {
  double translation;  // mean displacement along gravity
  double torsion;      // coefficient of rot90(p - p_c)
};
FieldFit fit_field(const TactileFrame& frame);

/// Recovers (mass kg, com m) from the two unsaturated tilt frames.
struct TiltLoad {
  double mass_kg;
  double com_m;
};
TiltLoad estimate_tilt_load(const TactileFrame& tilt20, const TactileFrame& tilt45,
                            const TactileConfig& cfg);

/// Largest |torsion| across a shake sequence, converted to gel twist (rad).
double peak_shake_twist(const std::vector<TactileFrame>& frames, const TactileConfig& cfg);

}  // namespace swingup
