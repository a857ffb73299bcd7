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
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "swingup/models.hpp"
#include "swingup/simdyn.hpp"
#include "swingup/tactsim.hpp"

namespace swingup {

inline constexpr int kDefaultControlSamples = 201;

struct ControlChoice {
  double w_star = 0.0;
  double predicted_deg = 0.0;
};

/// Grid search over w in {0, 1/(n-1), ..., 1} for the prediction closest to
/// `goal_deg`. Ties go to the smaller w.
ControlChoice select_control(const std::function<double(double)>& predictor, double goal_deg,
                             int n_samples = kDefaultControlSamples);

/// Same search with a trained predictor and a precomputed embedding.
ControlChoice select_control(TrainedModel& model, const std::vector<double>& embedding,
                             double goal_deg, int n_samples = kDefaultControlSamples);

/// Picks w for a held object from its exploration observations.
using Planner = std::function<ControlChoice(const ObjectSpec& spec,
                                            const std::array<TactileFrame, 2>& tilt,
                                            const std::vector<TactileFrame>& shake,
                                            double goal_deg)>;

/// Embeds the observations once and searches with the model's predictor.
Planner model_planner(TrainedModel& model, int n_samples = kDefaultControlSamples);
/// Uses the noise-free simulator as the predictor.
Planner simulator_planner(const SwingConfig& sim, int n_samples = kDefaultControlSamples);

struct ClosedLoopOptions {
  std::vector<double> goals = {45.0, 90.0, 135.0, 180.0};
  int trials = 5;
  /// When false, tactile and launch noise are disabled.
  bool noise = true;
};

struct ClosedLoopTrial {
  int object_id = 0;
  double goal_deg = 0.0;
  double w_star = 0.0;
  double predicted_deg = 0.0;
  double achieved_deg = 0.0;
  double error_deg = 0.0;
};

struct ClosedLoopReport {
  std::vector<ClosedLoopTrial> trials;
  std::vector<std::pair<int, double>> per_object_mean;
  double grand_mean = 0.0;
};

/// For each object, goal and trial: fresh observations, plan, then swing at
/// w_star with launch noise and record |achieved - goal|.
ClosedLoopReport closed_loop_eval(const Planner& planner, const std::vector<ObjectSpec>& specs,
                                  const SwingConfig& sim, const TactileConfig& tact,
                                  std::uint64_t seed, const ClosedLoopOptions& opts = {});

/// One row per trial: object_id,goal_deg,w_star,predicted_deg,achieved_deg,error_deg.
void write_closed_loop_csv(std::ostream& out, const ClosedLoopReport& report,
                           const std::string& fingerprint);

}  // namespace swingup
