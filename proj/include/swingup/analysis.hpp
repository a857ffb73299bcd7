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

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "swingup/dataset.hpp"
#include "swingup/models.hpp"

namespace swingup {

struct SymmetricEigen {
  Eigen::VectorXd values;   // descending
  Eigen::MatrixXd vectors;  // columns, unit length
  int sweeps = 0;
};

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
SymmetricEigen jacobi_eigen(const Eigen::MatrixXd& a, double tol = 1e-14, int max_sweeps = 100);

struct PcaResult {
  Eigen::MatrixXd coords;      // N x k
  Eigen::MatrixXd components;  // d x k, columns are principal axes
  Eigen::VectorXd mean;        // d
  Eigen::VectorXd explained;   // k fractions of total variance
  bool degenerate = false;     // zero total variance
};

/// Mean-centres the rows of `x` and projects onto the top-k covariance
/// eigenvectors. Each axis is signed so its largest-magnitude loading is
/// positive.
PcaResult pca_project(const Eigen::MatrixXd& x, int k = 2);

/// coords * components^T + mean.
Eigen::MatrixXd pca_reconstruct(const PcaResult& pca);

/// Mean final angle in `bins` equal-width w bins; empty bins copy the
/// nearest populated bin (the lower one on ties).
std::vector<double> binned_angle_curve(const Dataset& data, int object_id, int bins = 10);

/// RMS difference between two objects' binned angle-vs-w curves.
double dynamics_distance(const Dataset& data, int obj_a, int obj_b, int bins = 10);

/// Spearman rank correlation with average ranks for ties.
double spearman(const std::vector<double>& a, const std::vector<double>& b);

struct PairDistance {
  int obj_a = 0;
  int obj_b = 0;
  double embedding = 0.0;
  double dynamics = 0.0;
};

struct CorrelationReport {
  std::vector<int> object_ids;
  std::vector<std::vector<double>> mean_embeddings;
  std::vector<PairDistance> pairs;
  double spearman = 0.0;
};

/// Mean embedding per object over all its episodes; Euclidean distances
/// between the means are ranked against dynamics distances.
CorrelationReport embedding_dynamics_correlation(TrainedModel& model, const Dataset& data,
                                                 const std::vector<int>& object_ids);

struct EmbeddingPoint {
  int object_id = 0;
  std::vector<double> embedding;
};

/// Embeddings of every episode of the listed objects.
std::vector<EmbeddingPoint> collect_embeddings(TrainedModel& model, const Dataset& data,
                                               const std::vector<int>& object_ids);

/// Rows: object_id,pc1,pc2 (per sample), then the per-object means.
void write_projection_csv(std::ostream& out, const std::vector<int>& ids, const PcaResult& pca,
                          const std::string& fingerprint);
void write_projection_svg(std::ostream& out, const std::vector<int>& ids, const PcaResult& pca,
                          const std::string& fingerprint);
void write_distance_csv(std::ostream& out, const CorrelationReport& report,
                        const std::string& fingerprint);

}  // namespace swingup
