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

#include <span>
#include <vector>

#include "swingup/tensor.hpp"

namespace swingup::nn {

struct AdamOptions {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// First and second moment estimates for one parameter tensor.
struct AdamMoments {
  std::vector<double> m;
  std::vector<double> v;
  long step = 0;
};

/// In-place bias-corrected Adam update of `param` given `grad`.
void adam_step(std::span<double> param, std::span<const double> grad, AdamMoments& state,
               const AdamOptions& opts);

/// Adam over a fixed set of parameter tensors.
class Adam {
 public:
  Adam(std::vector<Tensor*> params, AdamOptions opts);

  /// Applies one update from the accumulated gradients, scaled by
  /// `grad_scale` (e.g. 1/batch for averaging).
  void step(double grad_scale = 1.0);
  void zero_grad();
  const AdamOptions& options() const { return opts_; }

 private:
  std::vector<Tensor*> params_;
  std::vector<AdamMoments> state_;
  AdamOptions opts_;
  std::vector<double> scratch_;
};

}  // namespace swingup::nn
