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

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "swingup/dataset.hpp"
#include "swingup/models.hpp"

namespace swingup {

struct TrainHyper {
  double lr = 1e-3;
  int batch = 16;
  int epochs = 30;
  std::uint64_t seed = 0;
  EncoderConfig encoder;
  /// Called after every epoch with (epoch, mean train loss, test MAE deg).
  std::function<void(int, double, double)> on_epoch;

  void validate() const;
  KeyValueConfig to_config() const;
  static TrainHyper from_config(const KeyValueConfig& cfg);
};

struct ObjectError {
  int object_id = 0;
  int count = 0;
  double mae_deg = 0.0;
};

struct TrainReport {
  Variant variant = Variant::kNone;
  SplitMode split = SplitMode::kSeen;
  int epochs = 0;
  int best_epoch = 0;
  std::vector<double> train_loss;
  double test_mae_deg = 0.0;
  std::vector<ObjectError> per_object;
};

struct TrainResult {
  TrainedModel model;
  TrainReport report;
};

/// Input scales (1 / RMS displacement) and PP ranges from the training part.
Normalization fit_normalization(const Dataset& data, const std::vector<std::size_t>& train);

/// Per-sample forward/backward, gradients averaged over each minibatch,
/// Adam updates. Returns the parameters of the epoch with the lowest test
/// MAE. Throws NumericError if the loss becomes non-finite.
TrainResult train(const Dataset& data, const SplitSpec& split, Variant variant,
                  const TrainHyper& hyper);

/// Mean absolute error (degrees) over the split's test episodes.
TrainReport evaluate(TrainedModel& model, const Dataset& data, const SplitSpec& split);

/// Conditional-mean baseline: mean training angle per w bin, scored on the
/// test episodes. Returns the test MAE in degrees.
double binned_mean_oracle_mae(const Dataset& data, const SplitSpec& split, int bins = 20);

enum class ProbeMode { kFrozen, kEnd2End };
std::string_view probe_mode_name(ProbeMode mode);
ProbeMode parse_probe_mode(std::string_view name);

struct ProbeHyper {
  double lr = 1e-3;
  int batch = 16;
  int epochs = 60;
  int hidden = 64;
  std::uint64_t seed = 0;
};

struct ProbeMetrics {
  double friction_accuracy = 0.0;
  double mass_error = 0.0;
  double com_error = 0.0;
  double moi_error = 0.0;
  int count = 0;
};

struct ProbeResult {
  DisentangleProbe probe;
  ProbeMetrics metrics;
  std::vector<double> train_loss;
};

/// Normalized (mass, com, moi) regression targets and friction label.
std::array<double, 3> property_targets(const ObjectSpec& spec, const PropertyRanges& ranges);

/// Trains the disentangle probe on the model's embeddings. kFrozen leaves
/// the model untouched; kEnd2End also updates the encoders (not the angle
/// predictor). Loss: MSE on the three properties plus friction cross-entropy.
/// Metrics are measured on the split's test episodes after the last epoch.
ProbeResult train_disentangle(TrainedModel& model, const Dataset& data, const SplitSpec& split,
                              ProbeMode mode, const ProbeHyper& hyper);

/// Rows: variant,split,test_mae_deg,best_epoch,epochs.
void write_train_report_csv(std::ostream& out, const std::vector<TrainReport>& reports,
                            const std::string& fingerprint);
void write_per_object_csv(std::ostream& out, const TrainReport& report,
                          const std::string& fingerprint);
/// Rows: method,friction_acc,mass_err,com_err,moi_err.
void write_probe_csv(std::ostream& out, const std::vector<std::pair<std::string, ProbeMetrics>>& rows,
                     const std::string& fingerprint);

}  // namespace swingup
