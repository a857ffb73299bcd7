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

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "swingup/error.hpp"

namespace swingup {
namespace {

class PipelineTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    SwingConfig sim;
    sim.l_imp = calibrate_impulse(build_catalog().specs, sim);
    data_ = new Dataset(generate_dataset(build_catalog().specs, sim, TactileConfig{}, 21, 2));
  }
  static void TearDownTestSuite() { delete data_; }

  static SplitSpec split(SplitMode mode) { return make_split(data_->catalog, mode); }

  static Dataset* data_;
};
Dataset* PipelineTest::data_ = nullptr;

TrainHyper quick(int epochs, std::uint64_t seed = 1) {
  TrainHyper h;
  h.epochs = epochs;
  h.seed = seed;
  return h;
}

TEST_F(PipelineTest, NormalizationGivesUnitRms) {
  const auto idx = partition(data_->episodes, split(SplitMode::kUnseen));
  const Normalization n = fit_normalization(*data_, idx.train);
  double tilt = 0.0, shake = 0.0;
  std::size_t nt = 0, ns = 0;
  for (std::size_t i : idx.train) {
    const Episode& e = data_->episodes[i];
    for (const auto& f : e.tilt_frames) {
      for (float v : f.values) tilt += std::pow(v * n.tilt_input_scale, 2), ++nt;
    }
    for (const auto& f : e.shake_frames) {
      for (float v : f.values) shake += std::pow(v * n.shake_input_scale, 2), ++ns;
    }
  }
  EXPECT_NEAR(std::sqrt(tilt / nt), 1.0, 1e-9);
  EXPECT_NEAR(std::sqrt(shake / ns), 1.0, 1e-9);
}

TEST_F(PipelineTest, ControlOnlyModelMatchesConditionalMean) {
  const SplitSpec s = split(SplitMode::kUnseen);
  const TrainResult r = train(*data_, s, Variant::kNone, quick(12));
  const double oracle = binned_mean_oracle_mae(*data_, s);
  EXPECT_NEAR(r.report.test_mae_deg, oracle, 0.1 * oracle);
  EXPECT_EQ(r.report.train_loss.size(), 12u);
  EXPECT_GE(r.report.best_epoch, 1);
  EXPECT_LE(r.report.best_epoch, 12);
}

TEST_F(PipelineTest, PrivilegedPropertiesBeatControlOnly) {
  const SplitSpec s = split(SplitMode::kSeen);
  const double none = train(*data_, s, Variant::kNone, quick(8)).report.test_mae_deg;
  const double pp = train(*data_, s, Variant::kPP, quick(8)).report.test_mae_deg;
  EXPECT_LT(pp, none / 1.5);
}

TEST_F(PipelineTest, TrainingIsDeterministic) {
  const SplitSpec s = split(SplitMode::kSeen);
  const TrainResult a = train(*data_, s, Variant::kPP, quick(2, 4));
  const TrainResult b = train(*data_, s, Variant::kPP, quick(2, 4));
  EXPECT_EQ(a.report.train_loss, b.report.train_loss);
  EXPECT_EQ(a.report.test_mae_deg, b.report.test_mae_deg);
  const TrainResult c = train(*data_, s, Variant::kPP, quick(2, 5));
  EXPECT_NE(a.report.train_loss, c.report.train_loss);
}

TEST_F(PipelineTest, EvaluateMatchesDirectMae) {
  const SplitSpec s = split(SplitMode::kUnseen);
  auto model = TrainedModel::create(Variant::kNone, EncoderConfig{}, Normalization{}, 1);
  for (auto& [name, t] : model.parameters()) {
    for (double& v : t.data()) v = 0.0;  // sigmoid(0) * 200 = 100 degrees everywhere
  }
  const auto idx = partition(data_->episodes, s);
  double sum = 0.0;
  for (std::size_t i : idx.test) sum += std::abs(100.0 - data_->episodes[i].final_angle_deg);
  const TrainReport r = evaluate(model, *data_, s);
  EXPECT_NEAR(r.test_mae_deg, sum / idx.test.size(), 1e-9);
  ASSERT_EQ(r.per_object.size(), 6u);
  for (const auto& o : r.per_object) EXPECT_EQ(o.count, kTrialsPerObject);
}

TEST_F(PipelineTest, OracleBinsAreExactOnStepData) {
  // Replace every angle by a function of the w bin: the oracle must be exact.
  Dataset d = *data_;
  for (Episode& e : d.episodes) {
    e.final_angle_deg = static_cast<float>(10.0 * std::min(19, static_cast<int>(e.control_w * 20)));
  }
  EXPECT_NEAR(binned_mean_oracle_mae(d, split(SplitMode::kUnseen)), 0.0, 1e-9);
}

TEST_F(PipelineTest, UninformativeEmbeddingProbeIsAtChance) {
  const SplitSpec s = split(SplitMode::kSeen);
  auto model = TrainedModel::create(Variant::kTilting, EncoderConfig{}, Normalization{}, 1);
  for (auto& [name, t] : model.parameters()) {
    for (double& v : t.data()) v = 0.0;
  }
  ProbeHyper h;
  h.epochs = 5;
  const ProbeResult r = train_disentangle(model, *data_, s, ProbeMode::kFrozen, h);
  EXPECT_EQ(r.metrics.count, 33 * 5);
  EXPECT_NEAR(r.metrics.friction_accuracy, 1.0 / 3.0, 0.02);
}

TEST_F(PipelineTest, ProbeNeedsALearnedEmbedding) {
  const SplitSpec s = split(SplitMode::kSeen);
  for (Variant v : {Variant::kNone, Variant::kPP}) {
    auto model = TrainedModel::create(v, EncoderConfig{}, Normalization{}, 1);
    EXPECT_THROW(train_disentangle(model, *data_, s, ProbeMode::kFrozen, ProbeHyper{}),
                 InvalidArgument);
  }
}

TEST_F(PipelineTest, FrozenProbeLeavesModelUntouched) {
  const SplitSpec s = split(SplitMode::kSeen);
  auto model = TrainedModel::create(Variant::kTilting, EncoderConfig{}, Normalization{}, 1);
  const auto before = model.parameters();
  ProbeHyper h;
  h.epochs = 1;
  train_disentangle(model, *data_, s, ProbeMode::kFrozen, h);
  for (const auto& [name, t] : before) {
    const auto& now = model.parameters().at(name);
    EXPECT_TRUE(std::equal(t.data().begin(), t.data().end(), now.data().begin())) << name;
  }
}

TEST(PipelineUnitTest, PropertyTargets) {
  const auto cat = build_catalog();
  const auto ranges = property_ranges(cat.specs);
  for (const auto& spec : cat.specs) {
    for (double v : property_targets(spec, ranges)) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(PipelineUnitTest, HyperConfigRoundTrip) {
  TrainHyper h;
  h.lr = 5e-4;
  h.batch = 8;
  h.epochs = 3;
  h.seed = 77;
  const TrainHyper back = TrainHyper::from_config(h.to_config());
  EXPECT_EQ(back.lr, h.lr);
  EXPECT_EQ(back.batch, h.batch);
  EXPECT_EQ(back.epochs, h.epochs);
  EXPECT_EQ(back.seed, h.seed);
  h.batch = 0;
  EXPECT_THROW(h.validate(), InvalidArgument);
  EXPECT_EQ(parse_probe_mode(probe_mode_name(ProbeMode::kEnd2End)), ProbeMode::kEnd2End);
  EXPECT_THROW(parse_probe_mode("both"), InvalidArgument);
}

TEST(PipelineUnitTest, CsvWritersCarryFingerprint) {
  TrainReport r;
  r.variant = Variant::kCombined;
  r.split = SplitMode::kUnseen;
  r.test_mae_deg = 5.5;
  r.epochs = 30;
  r.best_epoch = 20;
  std::ostringstream out;
  write_train_report_csv(out, {r}, "abc123");
  EXPECT_NE(out.str().find("# fingerprint=abc123"), std::string::npos);
  EXPECT_NE(out.str().find("combined,unseen"), std::string::npos);
}

}  // namespace
}  // namespace swingup
