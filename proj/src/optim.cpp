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

#include "swingup/optim.hpp"

#include <cmath>

#include "swingup/error.hpp"

namespace swingup::nn {

void adam_step(std::span<double> param, std::span<const double> grad, AdamMoments& state,
               const AdamOptions& opts) {
  if (param.size() != grad.size()) throw InvalidArgument("adam_step: param/grad size mismatch");
  if (state.m.size() != param.size()) {
    state.m.assign(param.size(), 0.0);
    state.v.assign(param.size(), 0.0);
    state.step = 0;
  }
  ++state.step;
  const double bc1 = 1.0 - std::pow(opts.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(opts.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < param.size(); ++i) {
    state.m[i] = opts.beta1 * state.m[i] + (1.0 - opts.beta1) * grad[i];
    state.v[i] = opts.beta2 * state.v[i] + (1.0 - opts.beta2) * grad[i] * grad[i];
    const double m_hat = state.m[i] / bc1;
    const double v_hat = state.v[i] / bc2;
    param[i] -= opts.lr * m_hat / (std::sqrt(v_hat) + opts.eps);
  }
}

Adam::Adam(std::vector<Tensor*> params, AdamOptions opts)
    : params_(std::move(params)), state_(params_.size()), opts_(opts) {
  for (Tensor* p : params_) {
    if (p == nullptr || !p->requires_grad()) {
      throw InvalidArgument("Adam: every parameter must require grad");
    }
  }
}

void Adam::step(double grad_scale) {
  for (std::size_t k = 0; k < params_.size(); ++k) {
    Tensor& p = *params_[k];
    scratch_.assign(p.grad().begin(), p.grad().end());
    for (double& g : scratch_) g *= grad_scale;
    adam_step(p.data(), scratch_, state_[k], opts_);
  }
}

void Adam::zero_grad() {
  for (Tensor* p : params_) p->zero_grad();
}

}  // namespace swingup::nn
