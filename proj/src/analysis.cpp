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

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <numeric>
#include <ostream>
#include <set>

#include "swingup/error.hpp"

namespace swingup {

SymmetricEigen jacobi_eigen(const Eigen::MatrixXd& input, double tol, int max_sweeps) {
  const Eigen::Index n = input.rows();
  if (n != input.cols()) throw InvalidArgument("jacobi_eigen: matrix must be square");
  if ((input - input.transpose()).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + input.cwiseAbs().maxCoeff())) {
    throw InvalidArgument("jacobi_eigen: matrix must be symmetric");
  }
  Eigen::MatrixXd a = 0.5 * (input + input.transpose());
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
  const double scale = std::max(a.norm(), std::numeric_limits<double>::min());
  SymmetricEigen out;
  for (; out.sweeps < max_sweeps; ++out.sweeps) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    }
    if (std::sqrt(off) <= tol * scale) break;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return a(i, i) > a(j, j); });
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values(i) = a(order[i], order[i]);
    out.vectors.col(i) = v.col(order[i]);
  }
  return out;
}

PcaResult pca_project(const Eigen::MatrixXd& x, int k) {
  const Eigen::Index n = x.rows(), d = x.cols();
  if (k <= 0 || k > d || n < k) {
    throw InvalidArgument("pca_project: need 0 < k <= dims and at least k rows");
  }
  if (!x.allFinite()) throw InvalidArgument("pca_project: non-finite input");
  PcaResult r;
  r.mean = x.colwise().mean().transpose();
  const Eigen::MatrixXd xc = x.rowwise() - r.mean.transpose();
  const Eigen::MatrixXd cov = (xc.transpose() * xc) / static_cast<double>(n);
  const double total = cov.trace();
  if (!(total > 0.0)) {
    r.degenerate = true;
    r.coords = Eigen::MatrixXd::Zero(n, k);
    r.components = Eigen::MatrixXd::Identity(d, k);
    r.explained = Eigen::VectorXd::Zero(k);
    return r;
  }
  const SymmetricEigen eig = jacobi_eigen(cov);
  r.components = eig.vectors.leftCols(k);
  for (int j = 0; j < k; ++j) {
    Eigen::Index arg = 0;
    r.components.col(j).cwiseAbs().maxCoeff(&arg);
    if (r.components(arg, j) < 0.0) r.components.col(j) *= -1.0;
  }
  r.coords = xc * r.components;
  r.explained = eig.values.head(k).cwiseMax(0.0) / total;
  return r;
}

Eigen::MatrixXd pca_reconstruct(const PcaResult& pca) {
  return (pca.coords * pca.components.transpose()).rowwise() + pca.mean.transpose();
}

std::vector<double> binned_angle_curve(const Dataset& data, int object_id, int bins) {
  if (bins <= 0) throw InvalidArgument("binned_angle_curve: bins must be positive");
  std::vector<double> sum(bins, 0.0);
  std::vector<int> count(bins, 0);
  int seen = 0;
  for (const Episode& ep : data.episodes) {
    if (ep.object_id != object_id) continue;
    const int b = std::min(bins - 1, static_cast<int>(ep.control_w * bins));
    sum[b] += ep.final_angle_deg;
    count[b] += 1;
    ++seen;
  }
  if (seen == 0) {
    throw InvalidArgument("dynamics_distance: object " + std::to_string(object_id) +
                          " has no episodes");
  }
  std::vector<double> curve(bins);
  for (int b = 0; b < bins; ++b) {
    for (int dist = 0; dist < bins; ++dist) {
      if (b - dist >= 0 && count[b - dist] > 0) {
        curve[b] = sum[b - dist] / count[b - dist];
        break;
      }
      if (b + dist < bins && count[b + dist] > 0) {
        curve[b] = sum[b + dist] / count[b + dist];
        break;
      }
    }
  }
  return curve;
}

double dynamics_distance(const Dataset& data, int obj_a, int obj_b, int bins) {
  const auto a = binned_angle_curve(data, obj_a, bins);
  const auto b = binned_angle_curve(data, obj_b, bins);
  double acc = 0.0;
  for (int i = 0; i < bins; ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(acc / bins);
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
  std::vector<double> rank(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[idx[k]] = r;
    i = j + 1;
  }
  return rank;
}

}  // namespace

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw InvalidArgument("spearman: need two equal-length samples of size >= 2");
  }
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

std::vector<EmbeddingPoint> collect_embeddings(TrainedModel& model, const Dataset& data,
                                               const std::vector<int>& object_ids) {
  const std::set<int> wanted(object_ids.begin(), object_ids.end());
  std::vector<EmbeddingPoint> out;
  for (const Episode& ep : data.episodes) {
    if (!wanted.count(ep.object_id)) continue;
    out.push_back({ep.object_id, model.embedding_values(ep.tilt_frames, ep.shake_frames,
                                                        data.spec(ep.object_id))});
  }
  return out;
}

CorrelationReport embedding_dynamics_correlation(TrainedModel& model, const Dataset& data,
                                                 const std::vector<int>& object_ids) {
  if (embedding_dim(model.variant(), model.encoder_config()) == 0) {
    throw InvalidArgument("embedding_dynamics_correlation: variant has no embedding");
  }
  CorrelationReport r;
  r.object_ids = object_ids;
  for (int id : object_ids) {
    const auto points = collect_embeddings(model, data, {id});
    if (points.empty()) throw InvalidArgument("object " + std::to_string(id) + " has no episodes");
    std::vector<double> mean(points.front().embedding.size(), 0.0);
    for (const auto& p : points) {
      for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += p.embedding[j];
    }
    for (double& m : mean) m /= static_cast<double>(points.size());
    r.mean_embeddings.push_back(std::move(mean));
  }
  std::vector<double> emb, dyn;
  for (std::size_t i = 0; i < object_ids.size(); ++i) {
    for (std::size_t j = i + 1; j < object_ids.size(); ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < r.mean_embeddings[i].size(); ++k) {
        const double d = r.mean_embeddings[i][k] - r.mean_embeddings[j][k];
        acc += d * d;
      }
      PairDistance p{object_ids[i], object_ids[j], std::sqrt(acc),
                     dynamics_distance(data, object_ids[i], object_ids[j])};
      emb.push_back(p.embedding);
      dyn.push_back(p.dynamics);
      r.pairs.push_back(p);
    }
  }
  r.spearman = spearman(emb, dyn);
  return r;
}

void write_projection_csv(std::ostream& out, const std::vector<int>& ids, const PcaResult& pca,
                          const std::string& fingerprint) {
  out << "# fingerprint=" << fingerprint << '\n';
  out << "# explained=";
  for (Eigen::Index j = 0; j < pca.explained.size(); ++j) {
    out << (j ? "," : "") << format_exact(pca.explained(j));
  }
  out << (pca.degenerate ? " degenerate" : "") << '\n';
  out << "kind,object_id,pc1,pc2\n";
  std::map<int, std::pair<Eigen::Vector2d, int>> means;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const Eigen::Vector2d c(pca.coords(static_cast<Eigen::Index>(i), 0),
                            pca.coords.cols() > 1 ? pca.coords(static_cast<Eigen::Index>(i), 1) : 0.0);
    out << "sample," << ids[i] << ',' << format_exact(c(0)) << ',' << format_exact(c(1)) << '\n';
    auto& m = means.try_emplace(ids[i], Eigen::Vector2d::Zero(), 0).first->second;
    m.first += c;
    m.second += 1;
  }
  for (const auto& [id, m] : means) {
    const Eigen::Vector2d c = m.first / m.second;
    out << "mean," << id << ',' << format_exact(c(0)) << ',' << format_exact(c(1)) << '\n';
  }
}

void write_projection_svg(std::ostream& out, const std::vector<int>& ids, const PcaResult& pca,
                          const std::string& fingerprint) {
  constexpr double kSize = 480.0, kPad = 40.0;
  static const char* kPalette[] = {"#1b9e77", "#d95f02", "#7570b3", "#e7298a",
                                   "#66a61e", "#e6ab02", "#a6761d", "#666666"};
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (pca.coords.rows() > 0) {
    x0 = pca.coords.col(0).minCoeff();
    x1 = pca.coords.col(0).maxCoeff();
    y0 = pca.coords.cols() > 1 ? pca.coords.col(1).minCoeff() : 0.0;
    y1 = pca.coords.cols() > 1 ? pca.coords.col(1).maxCoeff() : 1.0;
  }
  const double sx = (kSize - 2 * kPad) / std::max(x1 - x0, 1e-12);
  const double sy = (kSize - 2 * kPad) / std::max(y1 - y0, 1e-12);
  std::map<int, int> colour;
  for (int id : ids) colour.try_emplace(id, static_cast<int>(colour.size()));
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kSize << "\" height=\"" << kSize
      << "\">\n<!-- fingerprint=" << fingerprint << " -->\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << std::fixed << std::setprecision(2);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    const double px = kPad + (pca.coords(r, 0) - x0) * sx;
    const double py = kSize - kPad - ((pca.coords.cols() > 1 ? pca.coords(r, 1) : 0.0) - y0) * sy;
    out << "<circle cx=\"" << px << "\" cy=\"" << py << "\" r=\"3\" fill=\""
        << kPalette[colour[ids[i]] % 8] << "\" fill-opacity=\"0.7\"/>\n";
  }
  double ly = 16.0;
  for (const auto& [id, c] : colour) {
    out << "<text x=\"8\" y=\"" << ly << "\" font-size=\"12\" fill=\"" << kPalette[c % 8]
        << "\">object " << id << "</text>\n";
    ly += 14.0;
  }
  out << "<text x=\"" << kSize / 2 << "\" y=\"" << kSize - 8 << "\" font-size=\"12\">PC1</text>\n";
  out << "<text x=\"8\" y=\"" << kSize / 2 << "\" font-size=\"12\">PC2</text>\n</svg>\n";
}

void write_distance_csv(std::ostream& out, const CorrelationReport& report,
                        const std::string& fingerprint) {
  out << "# fingerprint=" << fingerprint << '\n';
  out << "# spearman=" << format_exact(report.spearman) << '\n';
  out << "obj_a,obj_b,embedding_distance,dynamics_distance\n";
  for (const auto& p : report.pairs) {
    out << p.obj_a << ',' << p.obj_b << ',' << format_exact(p.embedding) << ','
        << format_exact(p.dynamics) << '\n';
  }
}

}  // namespace swingup
