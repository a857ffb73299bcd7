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

#include <optional>
#include <vector>

#include "swingup/config.hpp"
#include "swingup/core.hpp"
#include "swingup/rng.hpp"

namespace swingup {

struct SwingConfig {
  double g = 9.81;                 // m/s^2
  double f_max = 100.0;            // N, grip normal force fully tightened
  double r_grip = 0.01;            // m, effective friction radius
  double l_imp = 8.65e-3;          // N*m*s, angular impulse of the wrist flick
  double t_stop = 1.0;             // s, gripper re-tightens
  double omega_noise_frac = 0.02;  // launch noise sd as a fraction of nominal omega0
  double dt = 1e-4;                // s

  /// Throws InvalidArgument on non-positive values or dt > 1e-3.
  void validate() const;
  KeyValueConfig to_config() const;
  static SwingConfig from_config(const KeyValueConfig& cfg);
};

inline constexpr double kMaxSwingDeg = 200.0;

struct SwingSample {
  double t;
  double theta;  // rad
  double omega;  // rad/s
};

struct SwingOutcome {
  double final_angle_deg = 0.0;
  std::optional<std::vector<SwingSample>> trajectory;
};

/// Pendulum state and physical coefficients in SI units.
struct PendulumParams {
  double inertia;        // kg*m^2 about the pivot
  double gravity_term;   // m*g*r, N*m
  double friction_torque;  // N*m, opposes positive omega
};

PendulumParams pendulum_params(const ObjectSpec& spec, double w, const SwingConfig& cfg);

/// One classical RK4 step of I*theta'' = -m g r sin(theta) - tau_f.
/// The friction sign is fixed to the forward swing.
SwingSample rk4_step(const SwingSample& s, const PendulumParams& p, double dt);

/// Frictionless, non-stopping RK4 integration for `duration` seconds.
std::vector<SwingSample> integrate_free(const PendulumParams& p, double omega0, double duration,
                                        double dt);

/// Mechanical energy 1/2 I w^2 + m g r (1 - cos theta), joules.
double mechanical_energy(const PendulumParams& p, const SwingSample& s);

/// F = F_max * (1 - w).
double grip_force(double w, const SwingConfig& cfg);

/// tau_f = mu * F(w) * R_grip.
double friction_torque(const ObjectSpec& spec, double w, const SwingConfig& cfg);

/// Nominal L_imp / I_pivot.
double nominal_launch_velocity(const ObjectSpec& spec, const SwingConfig& cfg);

/// Nominal launch velocity plus Gaussian noise truncated at +-3 sd.
double launch_velocity(const ObjectSpec& spec, const SwingConfig& cfg, Rng& rng);

/// Integrates from theta=0 with the given launch velocity until omega <= 0,
/// theta reaches the 200 deg clamp, or t = T_stop.
SwingOutcome simulate_from(const ObjectSpec& spec, double w, double omega0,
                           const SwingConfig& cfg, bool record_trajectory = false);

/// Draws the launch velocity from `rng` then simulates.
SwingOutcome simulate_swing(const ObjectSpec& spec, double w, const SwingConfig& cfg, Rng& rng,
                            bool record_trajectory = false);

/// Noise-free outcome (omega0 = nominal launch velocity).
double nominal_final_angle(const ObjectSpec& spec, double w, const SwingConfig& cfg);

/// Object with the largest I_pivot * m * g * r, i.e. the one needing the
/// largest impulse to reach a given angle.
const ObjectSpec& hardest_object(const std::vector<ObjectSpec>& specs);

/// Bisection over L_imp so that `target` at w=1 (noise off) peaks within
/// [lo_deg, hi_deg). Returns the calibrated impulse.
double calibrate_impulse_for(const ObjectSpec& target, const SwingConfig& cfg,
                             double lo_deg = 195.0, double hi_deg = 200.0);

/// Calibrates on hardest_object(specs).
double calibrate_impulse(const std::vector<ObjectSpec>& specs, const SwingConfig& cfg);

}  // namespace swingup
