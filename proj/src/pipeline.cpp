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

#include "swingup/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include "swingup/error.hpp"
#include "swingup/optim.hpp"
#include "swingup/rng.hpp"

namespace swingup {
namespace {

using nn::Graph;
using nn::Var;

constexpr std::uint64_t kShuffleStream = 0x5348554646ULL;

double frame_sum_sq(const TactileFrame& f) {
  double s = 0.0;
  for (float v : f.values) s += static_cast<double>(v) * v;
  return s;
}

Var angle_loss(Graph& g, TrainedModel& model, const Dataset& data, const Episode& ep) {
  const Var e = model.embed(g, ep.tilt_frames, ep.shake_frames, data.spec(ep.object_id));
  const Var y = model.predict_normalized(g, e, ep.control_w);
  const Var t = g.input({1, 1}, {ep.final_angle_deg / model.normalization().angle_scale});
  return g.mse_loss(y, t);
}

double predict_episode(TrainedModel& model, const Dataset& data, const Episode& ep) {
  const auto e = model.embedding_values(ep.tilt_frames, ep.shake_frames, data.spec(ep.object_id));
  return model.predict_angle(e, ep.control_w);
}

using ParamSnapshot = std::map<std::string, std::vector<double>>;

ParamSnapshot snapshot(TrainedModel& model) {
  ParamSnapshot s;
  for (auto& [name, t] : model.parameters()) s[name].assign(t.data().begin(), t.data().end());
  return s;
}

void restore(TrainedModel& model, const ParamSnapshot& s) {
  for (auto& [name, t] : model.parameters()) {
    const auto& v = s.at(name);
    std::copy(v.begin(), v.end(), t.data().begin());
  }
}

template <typename Fn>
void for_each_batch(std::vector<std::size_t>& order, int batch, Rng& rng, Fn&& fn) {
  std::shuffle(order.begin(), order.end(), rng.engine());
  for (std::size_t b = 0; b < order.size(); b += static_cast<std::size_t>(batch)) {
    const std::size_t e = std::min(order.size(), b + static_cast<std::size_t>(batch));
    fn(std::span<const std::size_t>(order.data() + b, e - b));
  }
}

}  // namespace

void TrainHyper::validate() const {
  if (!(lr > 0.0) || batch <= 0 || epochs <= 0) {
    throw InvalidArgument("training hyperparameters: lr, batch and epochs must be positive");
  }
  encoder.validate();
}

KeyValueConfig TrainHyper::to_config() const {
  KeyValueConfig c;
  c.set("train.lr", lr);
  c.set("train.batch", std::int64_t{batch});
  c.set("train.epochs", std::int64_t{epochs});
  c.set("train.seed", std::to_string(seed));
  c.set("train.conv_channels", std::to_string(encoder.conv_channels[0]) + "," +
                                   std::to_string(encoder.conv_channels[1]) + "," +
                                   std::to_string(encoder.conv_channels[2]));
  return c;
}

TrainHyper TrainHyper::from_config(const KeyValueConfig& c) {
  TrainHyper h;
  h.lr = c.get_double("train.lr", h.lr);
  if (c.contains("train.batch")) h.batch = static_cast<int>(c.get_int("train.batch"));
  if (c.contains("train.epochs")) h.epochs = static_cast<int>(c.get_int("train.epochs"));
  if (c.contains("train.seed")) h.seed = std::stoull(c.get("train.seed"));
  if (c.contains("train.conv_channels")) {
    const std::string& s = c.get("train.conv_channels");
    std::size_t pos = 0;
    for (int i = 0; i < 3; ++i) {
      const std::size_t next = s.find(',', pos);
      h.encoder.conv_channels[i] = std::stoi(s.substr(pos, next - pos));
      pos = next == std::string::npos ? s.size() : next + 1;
    }
  }
  h.validate();
  return h;
}

Normalization fit_normalization(const Dataset& data, const std::vector<std::size_t>& train) {
  Normalization norm;
  norm.pp_ranges = property_ranges(data.catalog);
  double tilt = 0.0, shake = 0.0;
  std::size_t tilt_n = 0, shake_n = 0;
  for (std::size_t i : train) {
    const Episode& ep = data.episodes[i];
    for (const auto& f : ep.tilt_frames) tilt += frame_sum_sq(f);
    tilt_n += 2 * kFrameValues;
    for (const auto& f : ep.shake_frames) shake += frame_sum_sq(f);
    shake_n += ep.shake_frames.size() * kFrameValues;
  }
  if (tilt > 0.0) norm.tilt_input_scale = 1.0 / std::sqrt(tilt / static_cast<double>(tilt_n));
  if (shake > 0.0) norm.shake_input_scale = 1.0 / std::sqrt(shake / static_cast<double>(shake_n));
  return norm;
}

TrainReport evaluate(TrainedModel& model, const Dataset& data, const SplitSpec& split) {
  const SplitIndices idx = partition(data.episodes, split);
  TrainReport r;
  r.variant = model.variant();
  r.split = split.mode;
  std::map<int, ObjectError> per;
  double total = 0.0;
  for (std::size_t i : idx.test) {
    const Episode& ep = data.episodes[i];
    const double err = std::abs(predict_episode(model, data, ep) - ep.final_angle_deg);
    total += err;
    ObjectError& o = per[ep.object_id];
    o.object_id = ep.object_id;
    o.count += 1;
    o.mae_deg += err;
  }
  r.test_mae_deg = idx.test.empty() ? 0.0 : total / static_cast<double>(idx.test.size());
  for (auto& [id, o] : per) {
    o.mae_deg /= o.count;
    r.per_object.push_back(o);
  }
  return r;
}

TrainResult train(const Dataset& data, const SplitSpec& split, Variant variant,
                  const TrainHyper& hyper) {
  hyper.validate();
  const SplitIndices idx = partition(data.episodes, split);
  if (idx.train.empty() || idx.test.empty()) throw InvalidArgument("train: empty split");
  TrainResult out;
  out.model = TrainedModel::create(variant, hyper.encoder, fit_normalization(data, idx.train),
                                   hyper.seed);
  TrainedModel& model = out.model;
  nn::Adam opt(model.trainable(), {.lr = hyper.lr});
  Rng rng(derive_seed({hyper.seed, kShuffleStream}));
  std::vector<std::size_t> order = idx.train;
  double best = std::numeric_limits<double>::infinity();
  ParamSnapshot best_params = snapshot(model);

  for (int epoch = 1; epoch <= hyper.epochs; ++epoch) {
    double loss_sum = 0.0;
    for_each_batch(order, hyper.batch, rng, [&](std::span<const std::size_t> batch) {
      opt.zero_grad();
      for (std::size_t i : batch) {
        Graph g;
        const Var loss = angle_loss(g, model, data, data.episodes[i]);
        const double l = g.scalar(loss);
        if (!std::isfinite(l)) {
          throw NumericError("training diverged at epoch " + std::to_string(epoch) +
                             " (non-finite loss)");
        }
        loss_sum += l;
        g.backward(loss);
      }
      opt.step(1.0 / static_cast<double>(batch.size()));
    });
    out.report.train_loss.push_back(loss_sum / static_cast<double>(order.size()));
    const double test = evaluate(model, data, split).test_mae_deg;
    if (!std::isfinite(test)) {
      throw NumericError("training diverged at epoch " + std::to_string(epoch) +
                         " (non-finite prediction)");
    }
    if (test < best) {
      best = test;
      best_params = snapshot(model);
      out.report.best_epoch = epoch;
    }
    if (hyper.on_epoch) hyper.on_epoch(epoch, out.report.train_loss.back(), test);
  }
  restore(model, best_params);
  const TrainReport final_report = evaluate(model, data, split);
  out.report.variant = variant;
  out.report.split = split.mode;
  out.report.epochs = hyper.epochs;
  out.report.test_mae_deg = final_report.test_mae_deg;
  out.report.per_object = final_report.per_object;
  return out;
}

double binned_mean_oracle_mae(const Dataset& data, const SplitSpec& split, int bins) {
  if (bins <= 0) throw InvalidArgument("binned_mean_oracle_mae: bins must be positive");
  const SplitIndices idx = partition(data.episodes, split);
  auto bin_of = [bins](double w) { return std::min(bins - 1, static_cast<int>(w * bins)); };
  std::vector<double> sum(bins, 0.0);
  std::vector<int> count(bins, 0);
  for (std::size_t i : idx.train) {
    const Episode& ep = data.episodes[i];
    sum[bin_of(ep.control_w)] += ep.final_angle_deg;
    count[bin_of(ep.control_w)] += 1;
  }
  std::vector<double> mean(bins, 0.0);
  for (int b = 0; b < bins; ++b) {
    // Empty bins borrow the nearest populated neighbour.
    int src = -1;
    for (int d = 0; d < bins && src < 0; ++d) {
      if (b - d >= 0 && count[b - d] > 0) src = b - d;
      else if (b + d < bins && count[b + d] > 0) src = b + d;
    }
    if (src < 0) throw InvalidArgument("binned_mean_oracle_mae: empty training split");
    mean[b] = sum[src] / count[src];
  }
  double err = 0.0;
  for (std::size_t i : idx.test) {
    const Episode& ep = data.episodes[i];
    err += std::abs(mean[bin_of(ep.control_w)] - ep.final_angle_deg);
  }
  return idx.test.empty() ? 0.0 : err / static_cast<double>(idx.test.size());
}

std::string_view probe_mode_name(ProbeMode mode) {
  return mode == ProbeMode::kFrozen ? "frozen" : "end2end";
}

ProbeMode parse_probe_mode(std::string_view name) {
  if (name == "frozen") return ProbeMode::kFrozen;
  if (name == "end2end") return ProbeMode::kEnd2End;
  throw InvalidArgument("unknown probe mode '" + std::string(name) + "' (expected frozen|end2end)");
}

std::array<double, 3> property_targets(const ObjectSpec& spec, const PropertyRanges& ranges) {
  return normalized_properties(spec, ranges);
}

ProbeResult train_disentangle(TrainedModel& model, const Dataset& data, const SplitSpec& split,
                              ProbeMode mode, const ProbeHyper& hyper) {
  const int dim = embedding_dim(model.variant(), model.encoder_config());
  if (dim == 0 || model.variant() == Variant::kPP) {
    throw InvalidArgument("train_disentangle: variant '" +
                          std::string(variant_name(model.variant())) +
                          "' has no learned embedding");
  }
  if (hyper.epochs <= 0 || hyper.batch <= 0 || hyper.hidden <= 0 || !(hyper.lr > 0.0)) {
    throw InvalidArgument("probe hyperparameters must be positive");
  }
  const SplitIndices idx = partition(data.episodes, split);
  const PropertyRanges ranges = model.normalization().pp_ranges;
  ProbeResult out;
  out.probe = DisentangleProbe(dim, hyper.hidden, hyper.seed);

  // Frozen embeddings are computed once per episode.
  std::vector<std::vector<double>> cache(data.episodes.size());
  auto cached = [&](std::size_t i) -> const std::vector<double>& {
    if (cache[i].empty()) {
      const Episode& ep = data.episodes[i];
      cache[i] = model.embedding_values(ep.tilt_frames, ep.shake_frames, data.spec(ep.object_id));
    }
    return cache[i];
  };

  auto build = [&](Graph& g, std::size_t i, bool track) -> DisentangleProbe::Outputs {
    const Episode& ep = data.episodes[i];
    Var e;
    if (mode == ProbeMode::kEnd2End && track) {
      e = model.embed(g, ep.tilt_frames, ep.shake_frames, data.spec(ep.object_id));
    } else {
      const auto& v = cached(i);
      e = g.input({1, dim}, v);
    }
    return out.probe.forward(g, e);
  };

  std::vector<nn::Tensor*> params = out.probe.trainable();
  if (mode == ProbeMode::kEnd2End) {
    for (nn::Tensor* t : model.trainable({"tilt.", "shake.", "fuse."})) params.push_back(t);
  }
  nn::Adam opt(params, {.lr = hyper.lr});
  Rng rng(derive_seed({hyper.seed, kShuffleStream, 1}));
  std::vector<std::size_t> order = idx.train;
  for (int epoch = 1; epoch <= hyper.epochs; ++epoch) {
    double loss_sum = 0.0;
    for_each_batch(order, hyper.batch, rng, [&](std::span<const std::size_t> batch) {
      opt.zero_grad();
      for (std::size_t i : batch) {
        const ObjectSpec& spec = data.spec(data.episodes[i].object_id);
        const auto target = property_targets(spec, ranges);
        Graph g;
        const auto o = build(g, i, true);
        const Var reg = g.mse_loss(o.regression, g.input({1, 3}, {target.begin(), target.end()}));
        const Var cls = g.cross_entropy_loss(o.logits, {static_cast<int>(spec.friction.label)});
        const Var loss = g.add(reg, cls);
        const double l = g.scalar(loss);
        if (!std::isfinite(l)) {
          throw NumericError("probe training diverged at epoch " + std::to_string(epoch));
        }
        loss_sum += l;
        g.backward(loss);
      }
      opt.step(1.0 / static_cast<double>(batch.size()));
    });
    out.train_loss.push_back(loss_sum / static_cast<double>(order.size()));
    if (mode == ProbeMode::kEnd2End) {
      for (auto& c : cache) c.clear();
    }
  }

  ProbeMetrics& m = out.metrics;
  for (std::size_t i : idx.test) {
    const ObjectSpec& spec = data.spec(data.episodes[i].object_id);
    const auto target = property_targets(spec, ranges);
    Graph g;
    const auto o = build(g, i, false);
    const auto reg = g.value(o.regression);
    const auto logits = g.value(o.logits);
    const int pred = static_cast<int>(std::max_element(logits.begin(), logits.end()) - logits.begin());
    m.friction_accuracy += pred == static_cast<int>(spec.friction.label) ? 1.0 : 0.0;
    m.mass_error += std::abs(reg[0] - target[0]);
    m.com_error += std::abs(reg[1] - target[1]);
    m.moi_error += std::abs(reg[2] - target[2]);
    m.count += 1;
  }
  if (m.count > 0) {
    m.friction_accuracy /= m.count;
    m.mass_error /= m.count;
    m.com_error /= m.count;
    m.moi_error /= m.count;
  }
  return out;
}

void write_train_report_csv(std::ostream& out, const std::vector<TrainReport>& reports,
                            const std::string& fingerprint) {
  out << "# fingerprint=" << fingerprint << '\n';
  out << "variant,split,test_mae_deg,best_epoch,epochs\n";
  for (const auto& r : reports) {
    out << variant_name(r.variant) << ',' << split_name(r.split) << ','
        << format_exact(r.test_mae_deg) << ',' << r.best_epoch << ',' << r.epochs << '\n';
  }
}

void write_per_object_csv(std::ostream& out, const TrainReport& report,
                          const std::string& fingerprint) {
  out << "# fingerprint=" << fingerprint << '\n';
  out << "object_id,episodes,mae_deg\n";
  for (const auto& o : report.per_object) {
    out << o.object_id << ',' << o.count << ',' << format_exact(o.mae_deg) << '\n';
  }
}

void write_probe_csv(std::ostream& out,
                     const std::vector<std::pair<std::string, ProbeMetrics>>& rows,
                     const std::string& fingerprint) {
  out << "# fingerprint=" << fingerprint << '\n';
  out << "method,friction_acc,mass_err,com_err,moi_err\n";
  for (const auto& [name, m] : rows) {
    out << name << ',' << format_exact(m.friction_accuracy) << ',' << format_exact(m.mass_error)
        << ',' << format_exact(m.com_error) << ',' << format_exact(m.moi_error) << '\n';
  }
}

}  // namespace swingup
