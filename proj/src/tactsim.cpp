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

#include <algorithm>
#include <cmath>
#include <numbers>

#include "swingup/error.hpp"

namespace swingup {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

// Internal time steps per frame used to resolve reversals of the wrist motion.
constexpr int kShakeSubsteps = 64;

double torsion_norm2() {
  double s = 0.0;
  for (int r = 0; r < kGridH; ++r) {
    for (int c = 0; c < kGridW; ++c) {
      const MarkerOffset d = marker_offset(r, c);
      s += d.dx * d.dx + d.dy * d.dy;
    }
  }
  return s;
}

void add_noise(TactileFrame& frame, double sd, Rng& rng) {
  if (sd <= 0.0) return;
  for (float& v : frame.values) v = static_cast<float>(v + rng.normal(0.0, sd));
}

}  // namespace

void TactileConfig::validate() const {
  if (!(g > 0 && alpha_t > 0 && alpha_r > 0 && k_shear > 0 && f_hold > 0 && f_explore > 0 &&
        r_grip > 0 && k_theta > 0 && inertial_gain >= 0 && shake_amplitude_deg > 0 &&
        shake_freq_hz > 0 && frame_rate_hz > 0 && noise_sd >= 0)) {
    throw InvalidArgument("TactileConfig: parameters must be positive");
  }
  if (f_explore >= f_hold) throw InvalidArgument("TactileConfig: f_explore must be < f_hold");
  if (shake_amplitude_deg != 5.0) {
    throw InvalidArgument("TactileConfig: shake amplitude is fixed at 5 degrees");
  }
}

KeyValueConfig TactileConfig::to_config() const {
  KeyValueConfig c;
  c.set("tact.g", g);
  c.set("tact.alpha_t", alpha_t);
  c.set("tact.alpha_r", alpha_r);
  c.set("tact.k_shear", k_shear);
  c.set("tact.f_hold", f_hold);
  c.set("tact.f_explore", f_explore);
  c.set("tact.r_grip", r_grip);
  c.set("tact.k_theta", k_theta);
  c.set("tact.inertial_gain", inertial_gain);
  c.set("tact.shake_amplitude_deg", shake_amplitude_deg);
  c.set("tact.shake_freq_hz", shake_freq_hz);
  c.set("tact.frame_rate_hz", frame_rate_hz);
  c.set("tact.noise_sd", noise_sd);
  return c;
}

TactileConfig TactileConfig::from_config(const KeyValueConfig& c) {
  TactileConfig t;
  t.g = c.get_double("tact.g", t.g);
  t.alpha_t = c.get_double("tact.alpha_t", t.alpha_t);
  t.alpha_r = c.get_double("tact.alpha_r", t.alpha_r);
  t.k_shear = c.get_double("tact.k_shear", t.k_shear);
  t.f_hold = c.get_double("tact.f_hold", t.f_hold);
  t.f_explore = c.get_double("tact.f_explore", t.f_explore);
  t.r_grip = c.get_double("tact.r_grip", t.r_grip);
  t.k_theta = c.get_double("tact.k_theta", t.k_theta);
  t.inertial_gain = c.get_double("tact.inertial_gain", t.inertial_gain);
  t.shake_amplitude_deg = c.get_double("tact.shake_amplitude_deg", t.shake_amplitude_deg);
  t.shake_freq_hz = c.get_double("tact.shake_freq_hz", t.shake_freq_hz);
  t.frame_rate_hz = c.get_double("tact.frame_rate_hz", t.frame_rate_hz);
  t.noise_sd = c.get_double("tact.noise_sd", t.noise_sd);
  t.validate();
  return t;
}

MarkerOffset marker_offset(int row, int col) {
  return {col - 0.5 * (kGridW - 1), row - 0.5 * (kGridH - 1)};
}

double tilt_saturation(const ObjectSpec& spec, const TactileConfig& cfg) {
  return spec.friction.mu_kinetic * cfg.f_hold / cfg.k_shear;
}

namespace {

// Noise-free tilt field; returns the number of clipped markers.
int tilt_field(const ObjectSpec& spec, double phi_deg, const TactileConfig& cfg,
               TactileFrame& frame) {
  if (phi_deg != kTiltAnglesDeg[0] && phi_deg != kTiltAnglesDeg[1]) {
    throw InvalidArgument("synth_tilt_frame: tilt angle must be 20 or 45 degrees");
  }
  const double s = std::sin(phi_deg * kDegToRad);
  const double weight = spec.mass_kg() * cfg.g;
  const double translation = cfg.alpha_t * weight * s;               // along +y
  const double torsion = cfg.alpha_r * weight * spec.com_m() * s;    // per grid unit
  const double s_max = tilt_saturation(spec, cfg);
  int clipped = 0;
  for (int r = 0; r < kGridH; ++r) {
    for (int c = 0; c < kGridW; ++c) {
      const MarkerOffset d = marker_offset(r, c);
      double ux = -torsion * d.dy;
      double uy = translation + torsion * d.dx;
      const double mag = std::hypot(ux, uy);
      if (mag > s_max) {
        ux *= s_max / mag;
        uy *= s_max / mag;
        ++clipped;
      }
      frame.at(r, c, 0) = static_cast<float>(ux);
      frame.at(r, c, 1) = static_cast<float>(uy);
    }
  }
  return clipped;
}

}  // namespace

TactileFrame synth_tilt_frame(const ObjectSpec& spec, double phi_deg, const TactileConfig& cfg,
                              Rng& rng) {
  TactileFrame frame;
  tilt_field(spec, phi_deg, cfg, frame);
  add_noise(frame, cfg.noise_sd, rng);
  return frame;
}

double tilt_saturated_fraction(const ObjectSpec& spec, double phi_deg, const TactileConfig& cfg) {
  TactileFrame frame;
  return static_cast<double>(tilt_field(spec, phi_deg, cfg, frame)) / (kGridH * kGridW);
}

ShakeKinematics shake_kinematics(const ObjectSpec& spec, const TactileConfig& cfg, int frames) {
  if (frames <= 0) throw InvalidArgument("shake_kinematics: frame count must be positive");
  const double amp = cfg.shake_amplitude_deg * kDegToRad;
  const double omega = 2.0 * std::numbers::pi * cfg.shake_freq_hz;
  const double slip_torque = spec.friction.mu_kinetic * cfg.f_explore * cfg.r_grip;
  const double gamma_slip = slip_torque / cfg.k_theta;

  ShakeKinematics k;
  const double frame_dt = 1.0 / cfg.frame_rate_hz;
  const double sub_dt = frame_dt / kShakeSubsteps;
  double gamma = 0.0;
  double beta_prev = 0.0;
  for (int f = 0; f < frames; ++f) {
    if (f > 0) {
      // Play operator: the gel twists with the wrist until the friction
      // torque limit, then the object slips and the twist saturates.
      for (int s = 1; s <= kShakeSubsteps; ++s) {
        const double t = (f - 1) * frame_dt + s * sub_dt;
        const double beta = amp * std::sin(omega * t);
        gamma = std::clamp(gamma + (beta - beta_prev), -gamma_slip, gamma_slip);
        beta_prev = beta;
      }
    }
    const double t = f * frame_dt;
    k.t.push_back(t);
    k.beta.push_back(amp * std::sin(omega * t));
    k.beta_dd.push_back(-amp * omega * omega * std::sin(omega * t));
    k.twist.push_back(gamma);
  }
  return k;
}

double shake_torsion(const ObjectSpec& spec, const TactileConfig& cfg, double twist,
                     double beta_dd) {
  return cfg.alpha_r *
         (cfg.k_theta * twist + cfg.inertial_gain * spec.inertia_kgm2() * beta_dd);
}

std::vector<TactileFrame> synth_shake_frames(const ObjectSpec& spec, const TactileConfig& cfg,
                                             int frames, Rng& rng) {
  const ShakeKinematics k = shake_kinematics(spec, cfg, frames);
  std::vector<TactileFrame> out(static_cast<std::size_t>(frames));
  for (int f = 0; f < frames; ++f) {
    const double torsion = shake_torsion(spec, cfg, k.twist[f], k.beta_dd[f]);
    TactileFrame& frame = out[f];
    for (int r = 0; r < kGridH; ++r) {
      for (int c = 0; c < kGridW; ++c) {
        const MarkerOffset d = marker_offset(r, c);
        frame.at(r, c, 0) = static_cast<float>(-torsion * d.dy);
        frame.at(r, c, 1) = static_cast<float>(torsion * d.dx);
      }
    }
    add_noise(frame, cfg.noise_sd, rng);
  }
  return out;
}

std::vector<TactileFrame> synth_shake_sequence(const ObjectSpec& spec, const TactileConfig& cfg,
                                               Rng& rng) {
  const int frames = rng.uniform_int(kMinShakeFrames, kMaxShakeFrames);
  return synth_shake_frames(spec, cfg, frames, rng);
}

FieldFit fit_field(const TactileFrame& frame) {
  static const double kNorm2 = torsion_norm2();
  double sum_y = 0.0;
  double dot_rot = 0.0;
  for (int r = 0; r < kGridH; ++r) {
    for (int c = 0; c < kGridW; ++c) {
      const MarkerOffset d = marker_offset(r, c);
      sum_y += frame.at(r, c, 1);
      dot_rot += -d.dy * frame.at(r, c, 0) + d.dx * frame.at(r, c, 1);
    }
  }
  return {sum_y / (kGridH * kGridW), dot_rot / kNorm2};
}

TiltLoad estimate_tilt_load(const TactileFrame& tilt20, const TactileFrame& tilt45,
                            const TactileConfig& cfg) {
  // Both frames share the unknowns (m*g*alpha_t, m*g*r*alpha_r) scaled by
  // sin(phi); the joint least-squares solution weights each frame by sin(phi).
  const FieldFit f[2] = {fit_field(tilt20), fit_field(tilt45)};
  double num_a = 0.0, num_b = 0.0, den = 0.0;
  for (int k = 0; k < 2; ++k) {
    const double s = std::sin(kTiltAnglesDeg[k] * kDegToRad);
    num_a += s * f[k].translation;
    num_b += s * f[k].torsion;
    den += s * s;
  }
  const double weight = num_a / den / cfg.alpha_t;  // m*g
  const double moment = num_b / den / cfg.alpha_r;  // m*g*r
  return {weight / cfg.g, moment / weight};
}

double peak_shake_twist(const std::vector<TactileFrame>& frames, const TactileConfig& cfg) {
  double peak = 0.0;
  for (const auto& f : frames) peak = std::max(peak, std::abs(fit_field(f).torsion));
  return peak / (cfg.alpha_r * cfg.k_theta);
}

}  // namespace swingup
