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

#include "swingup/simdyn.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "swingup/error.hpp"

namespace swingup {

void SwingConfig::validate() const {
  if (!(g > 0 && f_max > 0 && r_grip > 0 && l_imp >= 0 && t_stop > 0 && omega_noise_frac >= 0 &&
        dt > 0)) {
    throw InvalidArgument("SwingConfig: parameters must be positive");
  }
  if (dt > 1e-3) throw InvalidArgument("SwingConfig: dt must be <= 1e-3");
}

KeyValueConfig SwingConfig::to_config() const {
  KeyValueConfig c;
  c.set("sim.g", g);
  c.set("sim.f_max", f_max);
  c.set("sim.r_grip", r_grip);
  c.set("sim.l_imp", l_imp);
  c.set("sim.t_stop", t_stop);
  c.set("sim.omega_noise_frac", omega_noise_frac);
  c.set("sim.dt", dt);
  return c;
}

SwingConfig SwingConfig::from_config(const KeyValueConfig& c) {
  SwingConfig s;
  s.g = c.get_double("sim.g", s.g);
  s.f_max = c.get_double("sim.f_max", s.f_max);
  s.r_grip = c.get_double("sim.r_grip", s.r_grip);
  s.l_imp = c.get_double("sim.l_imp", s.l_imp);
  s.t_stop = c.get_double("sim.t_stop", s.t_stop);
  s.omega_noise_frac = c.get_double("sim.omega_noise_frac", s.omega_noise_frac);
  s.dt = c.get_double("sim.dt", s.dt);
  s.validate();
  return s;
}

double grip_force(double w, const SwingConfig& cfg) {
  if (!(w >= 0.0 && w <= 1.0)) throw InvalidArgument("grip_force: w must lie in [0,1]");
  return cfg.f_max * (1.0 - w);
}

double friction_torque(const ObjectSpec& spec, double w, const SwingConfig& cfg) {
  return spec.friction.mu_kinetic * grip_force(w, cfg) * cfg.r_grip;
}

PendulumParams pendulum_params(const ObjectSpec& spec, double w, const SwingConfig& cfg) {
  return {spec.inertia_kgm2(), spec.mass_kg() * cfg.g * spec.com_m(),
          friction_torque(spec, w, cfg)};
}

namespace {

struct Deriv {
  double dtheta, domega;
};

inline Deriv rhs(double theta, double omega, const PendulumParams& p) {
  return {omega, (-p.gravity_term * std::sin(theta) - p.friction_torque) / p.inertia};
}

}  // namespace

SwingSample rk4_step(const SwingSample& s, const PendulumParams& p, double dt) {
  const Deriv k1 = rhs(s.theta, s.omega, p);
  const Deriv k2 = rhs(s.theta + 0.5 * dt * k1.dtheta, s.omega + 0.5 * dt * k1.domega, p);
  const Deriv k3 = rhs(s.theta + 0.5 * dt * k2.dtheta, s.omega + 0.5 * dt * k2.domega, p);
  const Deriv k4 = rhs(s.theta + dt * k3.dtheta, s.omega + dt * k3.domega, p);
  return {s.t + dt, s.theta + dt / 6.0 * (k1.dtheta + 2 * k2.dtheta + 2 * k3.dtheta + k4.dtheta),
          s.omega + dt / 6.0 * (k1.domega + 2 * k2.domega + 2 * k3.domega + k4.domega)};
}

std::vector<SwingSample> integrate_free(const PendulumParams& p, double omega0, double duration,
                                        double dt) {
  PendulumParams free = p;
  free.friction_torque = 0.0;
  std::vector<SwingSample> out;
  SwingSample s{0.0, 0.0, omega0};
  out.push_back(s);
  const auto steps = static_cast<long>(std::llround(duration / dt));
  for (long i = 0; i < steps; ++i) {
    s = rk4_step(s, free, dt);
    out.push_back(s);
  }
  return out;
}

double mechanical_energy(const PendulumParams& p, const SwingSample& s) {
  return 0.5 * p.inertia * s.omega * s.omega + p.gravity_term * (1.0 - std::cos(s.theta));
}

double nominal_launch_velocity(const ObjectSpec& spec, const SwingConfig& cfg) {
  return cfg.l_imp / spec.inertia_kgm2();
}

double launch_velocity(const ObjectSpec& spec, const SwingConfig& cfg, Rng& rng) {
  const double nominal = nominal_launch_velocity(spec, cfg);
  const double sd = cfg.omega_noise_frac * nominal;
  if (sd <= 0.0) return nominal;
  double eps = 0.0;
  do {
    eps = rng.normal(0.0, sd);
  } while (std::abs(eps) > 3.0 * sd);
  return nominal + eps;
}

SwingOutcome simulate_from(const ObjectSpec& spec, double w, double omega0,
                           const SwingConfig& cfg, bool record_trajectory) {
  const PendulumParams p = pendulum_params(spec, w, cfg);
  const double clamp_rad = kMaxSwingDeg * std::numbers::pi / 180.0;

  SwingOutcome outcome;
  std::vector<SwingSample> traj;
  SwingSample s{0.0, 0.0, omega0};
  if (record_trajectory) traj.push_back(s);

  double peak = 0.0;
  if (omega0 > 0.0) {
    const auto max_steps = static_cast<long>(std::ceil(cfg.t_stop / cfg.dt - 1e-9));
    for (long i = 0; i < max_steps; ++i) {
      const double dt = std::min(cfg.dt, cfg.t_stop - s.t);
      const SwingSample next = rk4_step(s, p, dt);
      if (!std::isfinite(next.theta) || !std::isfinite(next.omega)) {
        throw NumericError("simulate_swing: non-finite state at t=" + std::to_string(next.t));
      }
      if (next.omega <= 0.0) {
        // Peak inside the step: omega is linear to first order, so theta
        // gains the area of the triangle up to the zero crossing.
        const double frac = s.omega / (s.omega - next.omega);
        peak = s.theta + 0.5 * s.omega * frac * dt;
        if (record_trajectory) traj.push_back({s.t + frac * dt, peak, 0.0});
        s = next;
        break;
      }
      s = next;
      peak = s.theta;
      if (record_trajectory) traj.push_back(s);
      if (s.theta >= clamp_rad) break;
    }
  }
  outcome.final_angle_deg = std::clamp(peak * 180.0 / std::numbers::pi, 0.0, kMaxSwingDeg);
  if (record_trajectory) outcome.trajectory = std::move(traj);
  return outcome;
}

SwingOutcome simulate_swing(const ObjectSpec& spec, double w, const SwingConfig& cfg, Rng& rng,
                            bool record_trajectory) {
  if (!(w >= 0.0 && w <= 1.0)) throw InvalidArgument("simulate_swing: w must lie in [0,1]");
  return simulate_from(spec, w, launch_velocity(spec, cfg, rng), cfg, record_trajectory);
}

double nominal_final_angle(const ObjectSpec& spec, double w, const SwingConfig& cfg) {
  return simulate_from(spec, w, nominal_launch_velocity(spec, cfg), cfg).final_angle_deg;
}

const ObjectSpec& hardest_object(const std::vector<ObjectSpec>& specs) {
  if (specs.empty()) throw InvalidArgument("hardest_object: empty catalog");
  return *std::max_element(specs.begin(), specs.end(), [](const auto& a, const auto& b) {
    return a.moi_gm2 * a.mass_g * a.com_mm < b.moi_gm2 * b.mass_g * b.com_mm;
  });
}

double calibrate_impulse_for(const ObjectSpec& target, const SwingConfig& cfg, double lo_deg,
                             double hi_deg) {
  SwingConfig trial = cfg;
  auto angle_at = [&](double l) {
    trial.l_imp = l;
    return nominal_final_angle(target, 1.0, trial);
  };
  double lo = 0.0;
  double hi = 1e-3;
  while (angle_at(hi) < lo_deg) {
    lo = hi;
    hi *= 2.0;
    if (hi > 10.0) throw NumericError("calibrate_impulse: no impulse reaches the target angle");
  }
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double a = angle_at(mid);
    if (a >= lo_deg && a < hi_deg) return mid;
    (a < lo_deg ? lo : hi) = mid;
  }
  throw NumericError("calibrate_impulse: bisection did not land in the target window");
}

double calibrate_impulse(const std::vector<ObjectSpec>& specs, const SwingConfig& cfg) {
  return calibrate_impulse_for(hardest_object(specs), cfg);
}

}  // namespace swingup
