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

#include "swingup/models.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "swingup/checkpoint.hpp"
#include "swingup/error.hpp"
#include "swingup/rng.hpp"

namespace swingup {

using nn::Graph;
using nn::Shape;
using nn::Tensor;
using nn::Var;

std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::kNone: return "none";
    case Variant::kPP: return "pp";
    case Variant::kTilting: return "tilting";
    case Variant::kShaking: return "shaking";
    case Variant::kCombined: return "combined";
  }
  return "?";
}

Variant parse_variant(std::string_view name) {
  for (Variant v : {Variant::kNone, Variant::kPP, Variant::kTilting, Variant::kShaking,
                    Variant::kCombined}) {
    if (variant_name(v) == name) return v;
  }
  throw InvalidArgument("unknown variant '" + std::string(name) +
                        "' (expected none|pp|tilting|shaking|combined)");
}

bool uses_tilt(Variant v) { return v == Variant::kTilting || v == Variant::kCombined; }
bool uses_shake(Variant v) { return v == Variant::kShaking || v == Variant::kCombined; }

std::array<int, 2> EncoderConfig::conv_output_hw() const {
  int h = kGridH, w = kGridW;
  for (int k : conv_kernels) {
    h -= k - 1;
    w -= k - 1;
  }
  return {h, w};
}

void EncoderConfig::validate() const {
  const auto hw = conv_output_hw();
  if (hw[0] <= 0 || hw[1] <= 0) throw InvalidArgument("EncoderConfig: kernels too large for grid");
  for (int c : conv_channels) {
    if (c <= 0) throw InvalidArgument("EncoderConfig: channel widths must be positive");
  }
  if (tilt_in_channels != 4 || shake_in_channels != 2) {
    throw InvalidArgument("EncoderConfig: input channels are fixed at 4 (tilt) and 2 (shake)");
  }
  if (tilt_embed_dim <= 0 || shake_frame_dim <= 0 || lstm_hidden <= 0 || fused_dim <= 0 ||
      fuse_hidden <= 0 || predictor_hidden <= 0) {
    throw InvalidArgument("EncoderConfig: dimensions must be positive");
  }
}

int embedding_dim(Variant v, const EncoderConfig& cfg) {
  switch (v) {
    case Variant::kNone: return 0;
    case Variant::kPP: return 4;
    case Variant::kTilting: return cfg.tilt_embed_dim;
    case Variant::kShaking: return cfg.shake_embed_dim();
    case Variant::kCombined: return cfg.fused_dim;
  }
  return 0;
}

std::array<double, 4> pp_features(const ObjectSpec& spec, const PropertyRanges& ranges) {
  const auto props = normalized_properties(spec, ranges);
  return {static_cast<int>(spec.friction.label) / 2.0, props[0], props[1], props[2]};
}

namespace {

// Glorot-uniform weights, zero bias.
Tensor init_weight(Shape shape, int fan_in, int fan_out, Rng& rng) {
  Tensor t(std::move(shape), true);
  const double bound = std::sqrt(6.0 / (fan_in + fan_out));
  for (double& v : t.data()) v = rng.uniform(-bound, bound);
  return t;
}

void add_linear(std::map<std::string, Tensor>& params, const std::string& name, int in, int out,
                Rng& rng) {
  params.emplace(name + ".w", init_weight({in, out}, in, out, rng));
  params.emplace(name + ".b", Tensor({out}, true));
}

void add_conv_stack(std::map<std::string, Tensor>& params, const std::string& prefix,
                    const EncoderConfig& cfg, int in_channels, int out_dim, Rng& rng) {
  int c = in_channels;
  for (int i = 0; i < 3; ++i) {
    const int k = cfg.conv_kernels[i];
    const int o = cfg.conv_channels[i];
    const std::string name = prefix + ".conv" + std::to_string(i);
    params.emplace(name + ".w", init_weight({o, k, k, c}, k * k * c, k * k * o, rng));
    params.emplace(name + ".b", Tensor({o}, true));
    c = o;
  }
  const auto hw = cfg.conv_output_hw();
  add_linear(params, prefix + ".fc", hw[0] * hw[1] * c, out_dim, rng);
}

std::vector<double> frames_to_nhwc(const TactileFrame* const* frames, int count, int channels_per,
                                   int group, double scale) {
  // `group` frames are stacked along channels; `count` is the batch size.
  std::vector<double> out(static_cast<std::size_t>(count) * kGridH * kGridW * channels_per * group);
  std::size_t k = 0;
  for (int n = 0; n < count; ++n) {
    for (int r = 0; r < kGridH; ++r) {
      for (int c = 0; c < kGridW; ++c) {
        for (int f = 0; f < group; ++f) {
          const TactileFrame& fr = *frames[n * group + f];
          for (int comp = 0; comp < channels_per; ++comp) out[k++] = scale * fr.at(r, c, comp);
        }
      }
    }
  }
  return out;
}

std::string join_ints(const std::array<int, 3>& v) {
  return std::to_string(v[0]) + "," + std::to_string(v[1]) + "," + std::to_string(v[2]);
}

std::array<int, 3> split_ints(const std::string& s) {
  std::array<int, 3> out{};
  std::istringstream in(s);
  std::string tok;
  for (int i = 0; i < 3; ++i) {
    if (!std::getline(in, tok, ',')) throw FormatError("malformed integer triple '" + s + "'");
    out[i] = std::stoi(tok);
  }
  return out;
}

}  // namespace

TrainedModel TrainedModel::create(Variant variant, const EncoderConfig& cfg,
                                  const Normalization& norm, std::uint64_t seed) {
  cfg.validate();
  TrainedModel m;
  m.variant_ = variant;
  m.cfg_ = cfg;
  m.norm_ = norm;
  Rng rng(derive_seed({seed, 0x4D4F44454CULL}));
  if (uses_tilt(variant)) add_conv_stack(m.params_, "tilt", cfg, cfg.tilt_in_channels, cfg.tilt_embed_dim, rng);
  if (uses_shake(variant)) {
    add_conv_stack(m.params_, "shake", cfg, cfg.shake_in_channels, cfg.shake_frame_dim, rng);
    const int h = cfg.lstm_hidden;
    m.params_.emplace("shake.lstm.w_ih", init_weight({cfg.shake_frame_dim, 4 * h}, cfg.shake_frame_dim, 4 * h, rng));
    m.params_.emplace("shake.lstm.w_hh", init_weight({h, 4 * h}, h, 4 * h, rng));
    Tensor b({4 * h}, true);
    for (int j = h; j < 2 * h; ++j) b[j] = 1.0;  // forget gate bias
    m.params_.emplace("shake.lstm.b", std::move(b));
  }
  if (variant == Variant::kCombined) {
    add_linear(m.params_, "fuse.fc0", cfg.tilt_embed_dim + cfg.shake_embed_dim(), cfg.fuse_hidden, rng);
    add_linear(m.params_, "fuse.fc1", cfg.fuse_hidden, cfg.fused_dim, rng);
  }
  const int in = embedding_dim(variant, cfg) + 1;
  add_linear(m.params_, "pred.fc0", in, cfg.predictor_hidden, rng);
  add_linear(m.params_, "pred.fc1", cfg.predictor_hidden, cfg.predictor_hidden, rng);
  add_linear(m.params_, "pred.fc2", cfg.predictor_hidden, 1, rng);
  return m;
}

Tensor& TrainedModel::p(const std::string& name) {
  const auto it = params_.find(name);
  if (it == params_.end()) {
    throw InvalidArgument("model variant '" + std::string(variant_name(variant_)) +
                          "' has no parameter " + name);
  }
  return it->second;
}

Var TrainedModel::linear(Graph& g, const std::string& name, Var x) {
  return g.add_bias(g.matmul(x, g.param(p(name + ".w"))), g.param(p(name + ".b")));
}

Var TrainedModel::conv_stack(Graph& g, const std::string& prefix, Var x) {
  for (int i = 0; i < 3; ++i) {
    const std::string name = prefix + ".conv" + std::to_string(i);
    x = g.relu(g.conv2d(x, g.param(p(name + ".w")), g.param(p(name + ".b"))));
  }
  const auto& s = g.shape(x);
  x = g.reshape(x, {s[0], s[1] * s[2] * s[3]});
  return linear(g, prefix + ".fc", x);
}

Var TrainedModel::tilt_encode(Graph& g, const std::array<TactileFrame, 2>& frames) {
  const TactileFrame* ptrs[2] = {&frames[0], &frames[1]};
  Var x = g.input({1, kGridH, kGridW, 4}, frames_to_nhwc(ptrs, 1, 2, 2, norm_.tilt_input_scale));
  return conv_stack(g, "tilt", x);
}

Var TrainedModel::shake_encode(Graph& g, const std::vector<TactileFrame>& frames) {
  if (frames.empty()) throw InvalidArgument("shake_encode: empty frame sequence");
  const int t = static_cast<int>(frames.size());
  std::vector<const TactileFrame*> ptrs;
  for (const auto& f : frames) ptrs.push_back(&f);
  Var x = g.input({t, kGridH, kGridW, 2}, frames_to_nhwc(ptrs.data(), t, 2, 1, norm_.shake_input_scale));
  Var per_frame = conv_stack(g, "shake", x);  // [T, frame_dim]
  Var w_ih = g.param(p("shake.lstm.w_ih"));
  Var w_hh = g.param(p("shake.lstm.w_hh"));
  Var b = g.param(p("shake.lstm.b"));
  Var state = g.zeros({1, 2 * cfg_.lstm_hidden});
  for (int k = 0; k < t; ++k) state = g.lstm_cell(g.slice(per_frame, 0, k, k + 1), state, w_ih, w_hh, b);
  return state;  // concat(h_T, c_T)
}

Var TrainedModel::fuse(Graph& g, Var tilt_vec, Var shake_vec) {
  if (nn::shape_size(g.shape(tilt_vec)) != static_cast<std::size_t>(cfg_.tilt_embed_dim) ||
      nn::shape_size(g.shape(shake_vec)) != static_cast<std::size_t>(cfg_.shake_embed_dim())) {
    throw InvalidArgument("fuse: expected embeddings of length " +
                          std::to_string(cfg_.tilt_embed_dim) + " and " +
                          std::to_string(cfg_.shake_embed_dim()));
  }
  Var x = g.concat({tilt_vec, shake_vec}, 1);
  return linear(g, "fuse.fc1", g.relu(linear(g, "fuse.fc0", x)));
}

Var TrainedModel::embed(Graph& g, const std::array<TactileFrame, 2>& tilt,
                        const std::vector<TactileFrame>& shake, const ObjectSpec& spec) {
  switch (variant_) {
    case Variant::kNone: return Var{};
    case Variant::kPP: {
      const auto f = pp_features(spec, norm_.pp_ranges);
      return g.input({1, 4}, {f.begin(), f.end()});
    }
    case Variant::kTilting: return tilt_encode(g, tilt);
    case Variant::kShaking: return shake_encode(g, shake);
    case Variant::kCombined: return fuse(g, tilt_encode(g, tilt), shake_encode(g, shake));
  }
  return Var{};
}

Var TrainedModel::predict_normalized(Graph& g, Var embedding, double w) {
  if (!(w >= 0.0 && w <= 1.0)) throw InvalidArgument("predict_angle: w must lie in [0,1]");
  const int d = embedding_dim(variant_, cfg_);
  Var control = g.input({1, 1}, {w / norm_.control_scale});
  Var x = control;
  if (d > 0) {
    if (!embedding.valid() || nn::shape_size(g.shape(embedding)) != static_cast<std::size_t>(d)) {
      throw InvalidArgument("predict_angle: expected an embedding of length " + std::to_string(d));
    }
    x = g.concat({embedding, control}, 1);
  }
  Var h = g.relu(linear(g, "pred.fc0", x));
  h = g.relu(linear(g, "pred.fc1", h));
  return g.sigmoid(linear(g, "pred.fc2", h));
}

double TrainedModel::predict_angle(const std::vector<double>& embedding, double w) {
  Graph g;
  Var e;
  if (!embedding.empty()) e = g.input({1, static_cast<int>(embedding.size())}, embedding);
  return norm_.angle_scale * g.scalar(predict_normalized(g, e, w));
}

std::vector<double> TrainedModel::embedding_values(const std::array<TactileFrame, 2>& tilt,
                                                   const std::vector<TactileFrame>& shake,
                                                   const ObjectSpec& spec) {
  Graph g;
  const Var e = embed(g, tilt, shake, spec);
  if (!e.valid()) return {};
  const auto v = g.value(e);
  return {v.begin(), v.end()};
}

std::vector<Tensor*> TrainedModel::trainable() {
  std::vector<Tensor*> out;
  for (auto& [name, t] : params_) out.push_back(&t);
  return out;
}

std::vector<Tensor*> TrainedModel::trainable(const std::vector<std::string>& prefixes) {
  std::vector<Tensor*> out;
  for (auto& [name, t] : params_) {
    for (const auto& pre : prefixes) {
      if (name.rfind(pre, 0) == 0) {
        out.push_back(&t);
        break;
      }
    }
  }
  return out;
}

void TrainedModel::round_to_float() {
  for (auto& [name, t] : params_) {
    for (double& v : t.data()) v = static_cast<float>(v);
  }
}

KeyValueConfig TrainedModel::metadata() const {
  KeyValueConfig c;
  c.set("model.variant", std::string(variant_name(variant_)));
  c.set("enc.conv_kernels", join_ints(cfg_.conv_kernels));
  c.set("enc.conv_channels", join_ints(cfg_.conv_channels));
  c.set("enc.tilt_embed_dim", std::int64_t{cfg_.tilt_embed_dim});
  c.set("enc.shake_frame_dim", std::int64_t{cfg_.shake_frame_dim});
  c.set("enc.lstm_hidden", std::int64_t{cfg_.lstm_hidden});
  c.set("enc.fused_dim", std::int64_t{cfg_.fused_dim});
  c.set("enc.fuse_hidden", std::int64_t{cfg_.fuse_hidden});
  c.set("enc.predictor_hidden", std::int64_t{cfg_.predictor_hidden});
  c.set("norm.angle_scale", norm_.angle_scale);
  c.set("norm.control_scale", norm_.control_scale);
  c.set("norm.tilt_input_scale", norm_.tilt_input_scale);
  c.set("norm.shake_input_scale", norm_.shake_input_scale);
  c.set("norm.mass_min", norm_.pp_ranges.mass_min);
  c.set("norm.mass_max", norm_.pp_ranges.mass_max);
  c.set("norm.com_min", norm_.pp_ranges.com_min);
  c.set("norm.com_max", norm_.pp_ranges.com_max);
  c.set("norm.moi_min", norm_.pp_ranges.moi_min);
  c.set("norm.moi_max", norm_.pp_ranges.moi_max);
  return c;
}

void TrainedModel::save(const std::filesystem::path& path, const KeyValueConfig& extra) const {
  std::vector<std::pair<std::string, const Tensor*>> named;
  for (const auto& [name, t] : params_) named.emplace_back(name, &t);
  nn::save_checkpoint(path, named);
  KeyValueConfig meta = metadata();
  meta.merge(extra);
  meta.save(path.string() + ".meta", "model sidecar");
}

TrainedModel TrainedModel::load(const std::filesystem::path& path) {
  const std::filesystem::path meta_path = path.string() + ".meta";
  if (!std::filesystem::exists(meta_path)) throw IoError("missing model sidecar " + meta_path.string());
  const KeyValueConfig meta = KeyValueConfig::load(meta_path);
  EncoderConfig cfg;
  Normalization norm;
  Variant variant;
  try {
    variant = parse_variant(meta.get("model.variant"));
    cfg.conv_kernels = split_ints(meta.get("enc.conv_kernels"));
    cfg.conv_channels = split_ints(meta.get("enc.conv_channels"));
    cfg.tilt_embed_dim = static_cast<int>(meta.get_int("enc.tilt_embed_dim"));
    cfg.shake_frame_dim = static_cast<int>(meta.get_int("enc.shake_frame_dim"));
    cfg.lstm_hidden = static_cast<int>(meta.get_int("enc.lstm_hidden"));
    cfg.fused_dim = static_cast<int>(meta.get_int("enc.fused_dim"));
    cfg.fuse_hidden = static_cast<int>(meta.get_int("enc.fuse_hidden"));
    cfg.predictor_hidden = static_cast<int>(meta.get_int("enc.predictor_hidden"));
    norm.angle_scale = meta.get_double("norm.angle_scale");
    norm.control_scale = meta.get_double("norm.control_scale");
    norm.tilt_input_scale = meta.get_double("norm.tilt_input_scale");
    norm.shake_input_scale = meta.get_double("norm.shake_input_scale");
    norm.pp_ranges = {meta.get_double("norm.mass_min"), meta.get_double("norm.mass_max"),
                      meta.get_double("norm.com_min"),  meta.get_double("norm.com_max"),
                      meta.get_double("norm.moi_min"),  meta.get_double("norm.moi_max")};
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("model sidecar: ") + e.what());
  }
  TrainedModel m = create(variant, cfg, norm, 0);
  nn::NamedTensors loaded = nn::load_checkpoint(path);
  if (loaded.size() != m.params_.size()) {
    throw FormatError("checkpoint has " + std::to_string(loaded.size()) + " tensors, variant " +
                      std::string(variant_name(variant)) + " needs " +
                      std::to_string(m.params_.size()));
  }
  for (auto& [name, t] : loaded) {
    const auto it = m.params_.find(name);
    if (it == m.params_.end() || it->second.shape() != t.shape()) {
      throw FormatError("checkpoint tensor " + name + " does not match the variant layout");
    }
    std::copy(t.data().begin(), t.data().end(), it->second.data().begin());
  }
  return m;
}

// ---------------------------------------------------------------------------

DisentangleProbe::DisentangleProbe(int input_dim, int hidden, std::uint64_t seed)
    : input_dim_(input_dim) {
  if (input_dim <= 0) throw InvalidArgument("DisentangleProbe: input dimension must be positive");
  Rng rng(derive_seed({seed, 0x50524F4245ULL}));
  add_linear(params_, "probe.fc0", input_dim, hidden, rng);
  add_linear(params_, "probe.fc1", hidden, hidden, rng);
  add_linear(params_, "probe.reg", hidden, 3, rng);
  add_linear(params_, "probe.cls", hidden, 3, rng);
}

DisentangleProbe::Outputs DisentangleProbe::forward(Graph& g, Var embedding) {
  if (nn::shape_size(g.shape(embedding)) != static_cast<std::size_t>(input_dim_)) {
    throw InvalidArgument("disentangle_forward: expected embedding of length " +
                          std::to_string(input_dim_) + ", got " + nn::shape_str(g.shape(embedding)));
  }
  auto lin = [&](const std::string& name, Var x) {
    return g.add_bias(g.matmul(x, g.param(params_.at(name + ".w"))), g.param(params_.at(name + ".b")));
  };
  Var x = g.reshape(embedding, {1, input_dim_});
  Var h = g.relu(lin("probe.fc0", x));
  h = g.relu(lin("probe.fc1", h));
  return {g.sigmoid(lin("probe.reg", h)), lin("probe.cls", h)};
}

std::vector<Tensor*> DisentangleProbe::trainable() {
  std::vector<Tensor*> out;
  for (auto& [name, t] : params_) out.push_back(&t);
  return out;
}

}  // namespace swingup
