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

#include "swingup/analysis.hpp"

#include <gtest/gtest.h>

#include <Eigen/Geometry>

#include <cmath>
#include <numbers>
#include <sstream>

#include "pca_oracle.hpp"
#include "swingup/error.hpp"

namespace swingup {
namespace {

using testing::cubic_eigenvalues;

Eigen::MatrixXd random_symmetric(int n, Rng& rng) {
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) m(i, j) = m(j, i) = rng.uniform(-2.0, 2.0);
  }
  return m;
}

Eigen::MatrixXd random_cloud(int rows, int cols, Rng& rng) {
  Eigen::MatrixXd x(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) x(i, j) = rng.normal(0.0, 1.0 + j);
  }
  return x;
}

TEST(AnalysisTest, JacobiMatchesCharacteristicPolynomial) {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::MatrixXd a = random_symmetric(3, rng);
    const SymmetricEigen e = jacobi_eigen(a);
    const auto ref = cubic_eigenvalues(a);
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(e.values(k), ref[k], 1e-10);
  }
}

TEST(AnalysisTest, TinyPcaMatchesClosedFormOracle) {
  const Eigen::MatrixXd x = testing::toy_points();
  const PcaResult pca = pca_project(x, 2);
  const Eigen::MatrixXd ref = testing::pca_coords_3d(x, 2);
  EXPECT_LT((pca.coords - ref).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(AnalysisTest, JacobiEigenpairsAreOrthonormal) {
  Rng rng(4);
  for (int n : {2, 5, 12, 40}) {
    const Eigen::MatrixXd a = random_symmetric(n, rng);
    const SymmetricEigen e = jacobi_eigen(a);
    EXPECT_LT((a * e.vectors - e.vectors * e.values.asDiagonal()).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT((e.vectors.transpose() * e.vectors - Eigen::MatrixXd::Identity(n, n))
                  .cwiseAbs()
                  .maxCoeff(),
              1e-12);
    for (int k = 1; k < n; ++k) EXPECT_GE(e.values(k - 1), e.values(k));
  }
}

TEST(AnalysisTest, JacobiRejectsAsymmetricInput) {
  Eigen::MatrixXd a(2, 2);
  a << 1, 2, 3, 4;
  EXPECT_THROW(jacobi_eigen(a), InvalidArgument);
  EXPECT_THROW(jacobi_eigen(Eigen::MatrixXd(2, 3)), InvalidArgument);
}

TEST(AnalysisTest, FullRankPcaReconstructs) {
  Rng rng(5);
  const Eigen::MatrixXd x = random_cloud(60, 6, rng);
  const PcaResult pca = pca_project(x, 6);
  EXPECT_LT((pca_reconstruct(pca) - x).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_NEAR(pca.explained.sum(), 1.0, 1e-12);
  for (int k = 1; k < 6; ++k) EXPECT_GE(pca.explained(k - 1), pca.explained(k));
}

TEST(AnalysisTest, PcaVarianceMatchesCovariance) {
  Rng rng(6);
  const Eigen::MatrixXd x = random_cloud(200, 5, rng);
  const PcaResult pca = pca_project(x, 2);
  const Eigen::MatrixXd c = x.rowwise() - x.colwise().mean();
  const Eigen::MatrixXd cov = c.transpose() * c / x.rows();
  const double total = cov.trace();
  for (int k = 0; k < 2; ++k) {
    const double var = pca.coords.col(k).squaredNorm() / x.rows();
    EXPECT_NEAR(var / total, pca.explained(k), 1e-10);
  }
  // Coordinates are uncorrelated.
  EXPECT_NEAR(pca.coords.col(0).dot(pca.coords.col(1)), 0.0, 1e-8);
}

TEST(AnalysisTest, CollinearPointsUseOneAxis) {
  Eigen::MatrixXd x(20, 3);
  for (int i = 0; i < 20; ++i) x.row(i) = Eigen::RowVector3d(1.0, -2.0, 0.5) * (i - 7.0) +
                                          Eigen::RowVector3d(3.0, 3.0, 3.0);
  const PcaResult pca = pca_project(x, 2);
  EXPECT_NEAR(pca.explained(0), 1.0, 1e-12);
  EXPECT_NEAR(pca.explained(1), 0.0, 1e-12);
  // Largest loading is positive.
  EXPECT_GT(pca.components(1, 0), 0.0);
}

TEST(AnalysisTest, PcaIsRotationInvariantUpToSign) {
  Rng rng(7);
  const Eigen::MatrixXd x = random_cloud(50, 3, rng);
  const Eigen::Matrix3d rot =
      Eigen::AngleAxisd(0.7, Eigen::Vector3d(1, 2, 3).normalized()).toRotationMatrix();
  const PcaResult a = pca_project(x, 2);
  const PcaResult b = pca_project(x * rot.transpose(), 2);
  EXPECT_LT((a.coords.cwiseAbs() - b.coords.cwiseAbs()).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_LT((a.explained - b.explained).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(AnalysisTest, ConstantDataIsDegenerate) {
  const Eigen::MatrixXd x = Eigen::MatrixXd::Constant(10, 4, 2.5);
  const PcaResult pca = pca_project(x, 2);
  EXPECT_TRUE(pca.degenerate);
  EXPECT_EQ(pca.coords.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_THROW(pca_project(x, 5), InvalidArgument);
}

TEST(AnalysisTest, SpearmanCases) {
  EXPECT_DOUBLE_EQ(spearman({1, 2, 3, 4}, {10, 20, 30, 1000}), 1.0);
  EXPECT_DOUBLE_EQ(spearman({1, 2, 3, 4}, {4, 3, 2, 1}), -1.0);
  // Average ranks (1, 2.5, 2.5, 4) against (1, 2, 3, 4).
  EXPECT_NEAR(spearman({1, 2, 2, 3}, {1, 2, 3, 4}), std::sqrt(4.5 / 5.0), 1e-12);
  EXPECT_THROW(spearman({1, 2}, {1, 2, 3}), InvalidArgument);
  EXPECT_THROW(spearman({1}, {1}), InvalidArgument);
}

class AnalysisDataTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    SwingConfig sim;
    sim.l_imp = calibrate_impulse(build_catalog().specs, sim);
    data_ = new Dataset(generate_dataset(build_catalog().specs, sim, TactileConfig{}, 5, 2));
  }
  static void TearDownTestSuite() { delete data_; }
  static Dataset* data_;
};
Dataset* AnalysisDataTest::data_ = nullptr;

TEST_F(AnalysisDataTest, BinnedCurveMatchesDirectAverage) {
  for (int id : {0, 17, 32}) {
    const auto curve = binned_angle_curve(*data_, id);
    std::array<double, 10> sum{};
    std::array<int, 10> count{};
    for (const Episode& e : data_->episodes) {
      if (e.object_id != id) continue;
      const int b = std::min(9, static_cast<int>(e.control_w * 10));
      sum[b] += e.final_angle_deg;
      ++count[b];
    }
    for (int b = 0; b < 10; ++b) {
      if (count[b] > 0) EXPECT_NEAR(curve[b], sum[b] / count[b], 1e-9);
    }
  }
}

TEST_F(AnalysisDataTest, DynamicsDistanceIsAMetricLikeRms) {
  EXPECT_EQ(dynamics_distance(*data_, 3, 3), 0.0);
  EXPECT_DOUBLE_EQ(dynamics_distance(*data_, 3, 20), dynamics_distance(*data_, 20, 3));
  const auto a = binned_angle_curve(*data_, 3);
  const auto b = binned_angle_curve(*data_, 20);
  double ss = 0.0;
  for (int k = 0; k < 10; ++k) ss += (a[k] - b[k]) * (a[k] - b[k]);
  EXPECT_NEAR(dynamics_distance(*data_, 3, 20), std::sqrt(ss / 10.0), 1e-12);
}

TEST_F(AnalysisDataTest, CorrelationReportShape) {
  Normalization n;
  n.tilt_input_scale = 300.0;
  n.shake_input_scale = 300.0;
  auto model = TrainedModel::create(Variant::kTilting, EncoderConfig{}, n, 2);
  const std::vector<int> ids = {0, 5, 11, 16, 22, 27};
  const CorrelationReport r = embedding_dynamics_correlation(model, *data_, ids);
  EXPECT_EQ(r.pairs.size(), 15u);
  EXPECT_EQ(r.mean_embeddings.size(), 6u);
  EXPECT_GE(r.spearman, -1.0);
  EXPECT_LE(r.spearman, 1.0);
  std::vector<double> e, d;
  for (const auto& p : r.pairs) {
    e.push_back(p.embedding);
    d.push_back(p.dynamics);
    EXPECT_DOUBLE_EQ(p.dynamics, dynamics_distance(*data_, p.obj_a, p.obj_b));
  }
  EXPECT_DOUBLE_EQ(r.spearman, spearman(e, d));

  const auto pts = collect_embeddings(model, *data_, {0, 5});
  EXPECT_EQ(pts.size(), 2u * kTrialsPerObject);
  Eigen::MatrixXd x(pts.size(), 40);
  std::vector<int> owners;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    x.row(i) = Eigen::Map<const Eigen::RowVectorXd>(pts[i].embedding.data(), 40);
    owners.push_back(pts[i].object_id);
  }
  const PcaResult pca = pca_project(x, 2);
  std::ostringstream csv, svg;
  write_projection_csv(csv, owners, pca, "fp");
  write_projection_svg(svg, owners, pca, "fp");
  EXPECT_NE(csv.str().find("# fingerprint=fp"), std::string::npos);
  EXPECT_NE(svg.str().find("<svg"), std::string::npos);
}

}  // namespace
}  // namespace swingup
