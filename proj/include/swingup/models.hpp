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
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "swingup/config.hpp"
#include "swingup/core.hpp"
#include "swingup/tensor.hpp"

namespace swingup {

enum class Variant { kNone, kPP, kTilting, kShaking, kCombined };

std::string_view variant_name(Variant v);
Variant parse_variant(std::string_view name);
bool uses_tilt(Variant v);
bool uses_shake(Variant v);

struct EncoderConfig {
  std::array<int, 3> conv_kernels = {5, 3, 2};
  std::array<int, 3> conv_channels = {16, 32, 32};
  int tilt_in_channels = 4;
  int shake_in_channels = 2;
  int tilt_embed_dim = 40;
  int shake_frame_dim = 40;
  int lstm_hidden = 40;
  int fused_dim = 40;
  int fuse_hidden = 80;
  int predictor_hidden = 64;

  int shake_embed_dim() const { return 2 * lstm_hidden; }
  /// Spatial size after the valid conv stack, {rows, cols}.
  std::array<int, 2> conv_output_hw() const;
  void validate() const;
};

/// Fixed scalings applied around the networks.
struct Normalization {
  double angle_scale = 200.0;
  double control_scale = 1.0;
  PropertyRanges pp_ranges{0, 1, 0, 1, 0, 1};
  /// Multipliers bringing marker displacements to unit RMS.
  double tilt_input_scale = 1.0;
  double shake_input_scale = 1.0;
};

/// Width of the physical embedding the predictor consumes for a variant.
int embedding_dim(Variant v, const EncoderConfig& cfg);

/// PP input: (friction index / 2, mass, com, moi normalized to [0,1]).
std::array<double, 4> pp_features(const ObjectSpec& spec, const PropertyRanges& ranges);

/// Encoders, fusion and angle predictor for one variant, with named
/// parameters. Forward functions append to a caller-owned Graph; all
/// embeddings are [1, d] row vectors.
class TrainedModel {
 public:
  TrainedModel() = default;
  static TrainedModel create(Variant variant, const EncoderConfig& cfg, const Normalization& norm,
                             std::uint64_t seed);

  Variant variant() const { return variant_; }
  const EncoderConfig& encoder_config() const { return cfg_; }
  const Normalization& normalization() const { return norm_; }
  Normalization& normalization() { return norm_; }

  nn::Var tilt_encode(nn::Graph& g, const std::array<TactileFrame, 2>& frames);
  nn::Var shake_encode(nn::Graph& g, const std::vector<TactileFrame>& frames);
  nn::Var fuse(nn::Graph& g, nn::Var tilt_vec, nn::Var shake_vec);
  /// Variant-specific physical embedding; invalid Var for kNone.
  nn::Var embed(nn::Graph& g, const std::array<TactileFrame, 2>& tilt,
                const std::vector<TactileFrame>& shake, const ObjectSpec& spec);
  /// sigmoid output in (0,1); multiply by angle_scale for degrees.
  nn::Var predict_normalized(nn::Graph& g, nn::Var embedding, double w);

  /// Degrees for a precomputed embedding (empty for kNone).
  double predict_angle(const std::vector<double>& embedding, double w);
  /// Embedding values without gradient tracking.
  std::vector<double> embedding_values(const std::array<TactileFrame, 2>& tilt,
                                       const std::vector<TactileFrame>& shake,
                                       const ObjectSpec& spec);

  std::map<std::string, nn::Tensor>& parameters() { return params_; }
  const std::map<std::string, nn::Tensor>& parameters() const { return params_; }
  std::vector<nn::Tensor*> trainable();
  /// Restricts trainable() to names with one of the prefixes.
  std::vector<nn::Tensor*> trainable(const std::vector<std::string>& prefixes);

  /// Rounds every parameter to float32 (checkpoint precision).
  void round_to_float();

  /// Writes `path` (SBNT) and `path`.meta (key=value sidecar).
  void save(const std::filesystem::path& path, const KeyValueConfig& extra = {}) const;
  static TrainedModel load(const std::filesystem::path& path);
  KeyValueConfig metadata() const;

 private:
  nn::Var conv_stack(nn::Graph& g, const std::string& prefix, nn::Var x);
  nn::Var linear(nn::Graph& g, const std::string& name, nn::Var x);
  nn::Tensor& p(const std::string& name);

  Variant variant_ = Variant::kNone;
  EncoderConfig cfg_;
  Normalization norm_;
  std::map<std::string, nn::Tensor> params_;
};

/// Disentangle probe: shared trunk (in->64->64) with a 3-way sigmoid
/// regression head (mass, com, moi) and a 3-class friction head.
class DisentangleProbe {
 public:
  DisentangleProbe() = default;
  DisentangleProbe(int input_dim, int hidden, std::uint64_t seed);

  struct Outputs {
    nn::Var regression;  // [1,3] in (0,1)
    nn::Var logits;      // [1,3]
  };
  Outputs forward(nn::Graph& g, nn::Var embedding);
  int input_dim() const { return input_dim_; }
  std::vector<nn::Tensor*> trainable();

 private:
  int input_dim_ = 0;
  std::map<std::string, nn::Tensor> params_;
};

}  // namespace swingup
