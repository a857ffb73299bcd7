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

#include "swingup/control.hpp"

#include <cmath>
#include <map>
#include <ostream>

#include "swingup/config.hpp"
#include "swingup/error.hpp"
#include "swingup/rng.hpp"

namespace swingup {

ControlChoice select_control(const std::function<double(double)>& predictor, double goal_deg,
                             int n_samples) {
  if (n_samples < 2) throw InvalidArgument("select_control: n_samples must be at least 2");
  if (!(goal_deg >= 0.0 && goal_deg <= kMaxSwingDeg)) {
    throw InvalidArgument("select_control: goal must lie in [0,200] degrees");
  }
  ControlChoice best;
  double best_gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n_samples; ++i) {
    const double w = static_cast<double>(i) / (n_samples - 1);
    const double pred = predictor(w);
    const double gap = std::abs(pred - goal_deg);
    if (gap < best_gap) {
      best_gap = gap;
      best = {w, pred};
    }
  }
  return best;
}

ControlChoice select_control(TrainedModel& model, const std::vector<double>& embedding,
                             double goal_deg, int n_samples) {
  return select_control([&](double w) { return model.predict_angle(embedding, w); }, goal_deg,
                        n_samples);
}

Planner model_planner(TrainedModel& model, int n_samples) {
  return [&model, n_samples](const ObjectSpec& spec, const std::array<TactileFrame, 2>& tilt,
                             const std::vector<TactileFrame>& shake, double goal) {
    const auto e = model.embedding_values(tilt, shake, spec);
    return select_control(model, e, goal, n_samples);
  };
}

Planner simulator_planner(const SwingConfig& sim, int n_samples) {
  return [sim, n_samples](const ObjectSpec& spec, const std::array<TactileFrame, 2>&,
                          const std::vector<TactileFrame>&, double goal) {
    return select_control([&](double w) { return nominal_final_angle(spec, w, sim); }, goal,
                          n_samples);
  };
}

ClosedLoopReport closed_loop_eval(const Planner& planner, const std::vector<ObjectSpec>& specs,
                                  const SwingConfig& sim, const TactileConfig& tact,
                                  std::uint64_t seed, const ClosedLoopOptions& opts) {
  if (opts.trials <= 0) throw InvalidArgument("closed_loop_eval: trials must be positive");
  SwingConfig sim_run = sim;
  TactileConfig tact_run = tact;
  if (!opts.noise) {
    sim_run.omega_noise_frac = 0.0;
    tact_run.noise_sd = 0.0;
  }
  ClosedLoopReport report;
  double total = 0.0;
  for (const ObjectSpec& spec : specs) {
    double obj_total = 0.0;
    int obj_count = 0;
    for (std::size_t gi = 0; gi < opts.goals.size(); ++gi) {
      for (int trial = 0; trial < opts.trials; ++trial) {
        const std::uint64_t s = derive_seed({seed, static_cast<std::uint64_t>(spec.id), gi,
                                             static_cast<std::uint64_t>(trial)});
        Rng obs_rng(derive_seed({s, 1}));
        std::array<TactileFrame, 2> tilt = {
            synth_tilt_frame(spec, kTiltAnglesDeg[0], tact_run, obs_rng),
            synth_tilt_frame(spec, kTiltAnglesDeg[1], tact_run, obs_rng)};
        const auto shake = synth_shake_sequence(spec, tact_run, obs_rng);
        const double goal = opts.goals[gi];
        const ControlChoice c = planner(spec, tilt, shake, goal);
        Rng swing_rng(derive_seed({s, 2}));
        const double achieved = simulate_swing(spec, c.w_star, sim_run, swing_rng).final_angle_deg;
        ClosedLoopTrial t{spec.id, goal, c.w_star, c.predicted_deg, achieved,
                          std::abs(achieved - goal)};
        report.trials.push_back(t);
        obj_total += t.error_deg;
        ++obj_count;
      }
    }
    report.per_object_mean.emplace_back(spec.id, obj_count ? obj_total / obj_count : 0.0);
    total += obj_total;
  }
  report.grand_mean = report.trials.empty() ? 0.0 : total / static_cast<double>(report.trials.size());
  return report;
}

void write_closed_loop_csv(std::ostream& out, const ClosedLoopReport& report,
                           const std::string& fingerprint) {
  out << "# fingerprint=" << fingerprint << '\n';
  out << "object_id,goal_deg,w_star,predicted_deg,achieved_deg,error_deg\n";
  for (const auto& t : report.trials) {
    out << t.object_id << ',' << format_exact(t.goal_deg) << ',' << format_exact(t.w_star) << ','
        << format_exact(t.predicted_deg) << ',' << format_exact(t.achieved_deg) << ','
        << format_exact(t.error_deg) << '\n';
  }
  for (const auto& [id, m] : report.per_object_mean) {
    out << "# object " << id << " mean_error_deg=" << format_exact(m) << '\n';
  }
  out << "# grand_mean_error_deg=" << format_exact(report.grand_mean) << '\n';
}

}  // namespace swingup
