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

#include "swingup/tensor.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "swingup/error.hpp"

namespace swingup::nn {
namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat = Eigen::Map<RowMat>;
using ConstMapMat = Eigen::Map<const RowMat>;

MapMat as_mat(std::vector<double>& v, int rows, int cols) { return {v.data(), rows, cols}; }
ConstMapMat as_mat(const std::vector<double>& v, int rows, int cols) {
  return {v.data(), rows, cols};
}

[[noreturn]] void shape_error(std::string_view op, const std::string& detail) {
  throw InvalidArgument(std::string(op) + ": " + detail);
}

int normalize_axis(int axis, int rank, std::string_view op) {
  if (axis < 0) axis += rank;
  if (axis < 0 || axis >= rank) shape_error(op, "axis out of range");
  return axis;
}

std::size_t prod(const Shape& s, std::size_t from, std::size_t to) {
  std::size_t p = 1;
  for (std::size_t i = from; i < to; ++i) p *= static_cast<std::size_t>(s[i]);
  return p;
}

inline double sigmoid_scalar(double x) {
  return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

}  // namespace

std::size_t shape_size(const Shape& shape) { return prod(shape, 0, shape.size()); }

std::string shape_str(const Shape& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

// ---------------------------------------------------------------------------
// Tensor

Tensor::Tensor(Shape shape, bool requires_grad)
    : Tensor(shape, std::vector<double>(shape_size(shape), 0.0), requires_grad) {}

Tensor::Tensor(Shape shape, std::vector<double> data, bool requires_grad)
    : shape_(std::move(shape)), data_(std::move(data)) {
  for (int d : shape_) {
    if (d <= 0) throw InvalidArgument("Tensor: dimensions must be positive, got " + shape_str(shape_));
  }
  if (shape_size(shape_) != data_.size()) {
    throw InvalidArgument("Tensor: shape " + shape_str(shape_) + " does not match " +
                          std::to_string(data_.size()) + " values");
  }
  set_requires_grad(requires_grad);
}

void Tensor::set_requires_grad(bool on) {
  requires_grad_ = on;
  if (on) {
    grad_.assign(data_.size(), 0.0);
  } else {
    grad_.clear();
  }
}

void Tensor::zero_grad() { std::fill(grad_.begin(), grad_.end(), 0.0); }

bool Tensor::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

// ---------------------------------------------------------------------------
// Graph plumbing

const Graph::Node& Graph::node(Var v) const {
  if (v.id < 0 || static_cast<std::size_t>(v.id) >= nodes_.size()) {
    throw InvalidArgument("Graph: invalid variable handle");
  }
  return nodes_[static_cast<std::size_t>(v.id)];
}

Graph::Node& Graph::node(Var v) {
  return const_cast<Node&>(static_cast<const Graph&>(*this).node(v));
}

Var Graph::push(std::string_view op, Shape shape, std::vector<double> value,
                std::vector<int> inputs, BackwardFn backward, std::vector<double> saved) {
#ifndef NDEBUG
  for (double x : value) {
    if (!std::isfinite(x)) throw NumericError(std::string(op) + ": non-finite forward value");
  }
#endif
  Node n;
  n.op = op;
  n.shape = std::move(shape);
  n.value = std::move(value);
  n.inputs = std::move(inputs);
  n.saved = std::move(saved);
  n.needs_grad = std::any_of(n.inputs.begin(), n.inputs.end(), [&](int i) { return needs(i); });
  if (n.needs_grad) n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

Var Graph::input(Shape shape, std::vector<double> values) {
  if (shape_size(shape) != values.size()) {
    shape_error("input", "shape " + shape_str(shape) + " vs " + std::to_string(values.size()) +
                             " values");
  }
  return push("input", std::move(shape), std::move(values), {}, nullptr);
}

Var Graph::input(const Tensor& t) {
  return input(t.shape(), std::vector<double>(t.data().begin(), t.data().end()));
}

Var Graph::zeros(Shape shape) {
  const std::size_t n = shape_size(shape);
  return input(std::move(shape), std::vector<double>(n, 0.0));
}

Var Graph::param(Tensor& t) {
  Var v = push("param", t.shape(), std::vector<double>(t.data().begin(), t.data().end()), {},
               nullptr);
  Node& n = node(v);
  n.param = &t;
  n.needs_grad = t.requires_grad();
  return v;
}

double Graph::scalar(Var v) const {
  const Node& n = node(v);
  if (n.value.size() != 1) shape_error("scalar", "node is not scalar " + shape_str(n.shape));
  return n.value[0];
}

void Graph::backward(Var loss) {
  const Node& l = node(loss);
  if (l.value.size() != 1) {
    shape_error("backward", "loss must be scalar, got shape " + shape_str(l.shape));
  }
  for (Node& n : nodes_) {
    if (n.needs_grad) {
      n.grad.assign(n.value.size(), 0.0);
    } else {
      n.grad.clear();
    }
  }
  if (!l.needs_grad) return;
  grad_of(loss.id)[0] = 1.0;
  for (int id = loss.id; id >= 0; --id) {
    Node& n = nodes_[static_cast<std::size_t>(id)];
    if (!n.needs_grad) continue;
    if (n.backward) n.backward(*this, id);
    if (n.param != nullptr) {
      auto g = n.param->grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += n.grad[i];
    }
#ifndef NDEBUG
    for (double x : n.grad) {
      if (!std::isfinite(x)) throw NumericError(std::string(n.op) + ": non-finite gradient");
    }
#endif
  }
}

// ---------------------------------------------------------------------------
// Primitives

Var Graph::matmul(Var a, Var b) {
  const Shape& sa = shape(a);
  const Shape& sb = shape(b);
  if (sa.size() != 2 || sb.size() != 2 || sa[1] != sb[0]) {
    shape_error("matmul", "incompatible shapes " + shape_str(sa) + " x " + shape_str(sb));
  }
  const int m = sa[0], k = sa[1], n = sb[1];
  std::vector<double> out(static_cast<std::size_t>(m) * n);
  as_mat(out, m, n).noalias() = as_mat(node(a).value, m, k) * as_mat(node(b).value, k, n);
  return push("matmul", {m, n}, std::move(out), {a.id, b.id}, [m, k, n](Graph& g, int self) {
    const Node& s = g.nodes_[self];
    const int ia = s.inputs[0], ib = s.inputs[1];
    const auto dc = as_mat(s.grad, m, n);
    if (g.needs(ia)) as_mat(g.grad_of(ia), m, k).noalias() += dc * as_mat(g.nodes_[ib].value, k, n).transpose();
    if (g.needs(ib)) as_mat(g.grad_of(ib), k, n).noalias() += as_mat(g.nodes_[ia].value, m, k).transpose() * dc;
  });
}

Var Graph::conv2d(Var x, Var w, Var b) {
  const Shape& sx = shape(x);
  const Shape& sw = shape(w);
  const Shape& sb = shape(b);
  if (sx.size() != 4 || sw.size() != 4 || sw[1] != sw[2] || sw[3] != sx[3] || sb.size() != 1 ||
      sb[0] != sw[0] || sw[1] > sx[1] || sw[2] > sx[2]) {
    shape_error("conv2d", "incompatible shapes x=" + shape_str(sx) + " w=" + shape_str(sw) +
                              " b=" + shape_str(sb));
  }
  const int batch = sx[0], h = sx[1], wd = sx[2], c = sx[3];
  const int o = sw[0], k = sw[1];
  const int ho = h - k + 1, wo = wd - k + 1;
  const int rows = batch * ho * wo;
  const int kkc = k * k * c;

  std::vector<double> cols(static_cast<std::size_t>(rows) * kkc);
  const std::vector<double>& xv = node(x).value;
  for (int n = 0; n < batch; ++n) {
    for (int i = 0; i < ho; ++i) {
      for (int j = 0; j < wo; ++j) {
        double* dst = &cols[static_cast<std::size_t>((n * ho + i) * wo + j) * kkc];
        for (int ki = 0; ki < k; ++ki) {
          const double* src = &xv[static_cast<std::size_t>(((n * h + i + ki) * wd + j) * c)];
          std::copy(src, src + static_cast<std::ptrdiff_t>(k) * c, dst + ki * k * c);
        }
      }
    }
  }
  std::vector<double> out(static_cast<std::size_t>(rows) * o);
  auto y = as_mat(out, rows, o);
  y.noalias() = as_mat(cols, rows, kkc) * as_mat(node(w).value, o, kkc).transpose();
  y.rowwise() += Eigen::Map<const Eigen::RowVectorXd>(node(b).value.data(), o);

  return push(
      "conv2d", {batch, ho, wo, o}, std::move(out), {x.id, w.id, b.id},
      [=](Graph& g, int self) {
        const Node& s = g.nodes_[self];
        const int ix = s.inputs[0], iw = s.inputs[1], ib = s.inputs[2];
        const auto dy = as_mat(s.grad, rows, o);
        const auto colm = as_mat(s.saved, rows, kkc);
        if (g.needs(iw)) as_mat(g.grad_of(iw), o, kkc).noalias() += dy.transpose() * colm;
        if (g.needs(ib)) {
          Eigen::Map<Eigen::RowVectorXd>(g.grad_of(ib).data(), o) += dy.colwise().sum();
        }
        if (g.needs(ix)) {
          RowMat dcols = dy * as_mat(g.nodes_[iw].value, o, kkc);
          std::vector<double>& dx = g.grad_of(ix);
          for (int n = 0; n < batch; ++n) {
            for (int i = 0; i < ho; ++i) {
              for (int j = 0; j < wo; ++j) {
                const double* src = dcols.data() + static_cast<std::size_t>((n * ho + i) * wo + j) * kkc;
                for (int ki = 0; ki < k; ++ki) {
                  double* dst = &dx[static_cast<std::size_t>(((n * h + i + ki) * wd + j) * c)];
                  const double* row = src + ki * k * c;
                  for (int t = 0; t < k * c; ++t) dst[t] += row[t];
                }
              }
            }
          }
        }
      },
      std::move(cols));
}

Var Graph::add_bias(Var x, Var b) {
  const Shape& sx = shape(x);
  const Shape& sb = shape(b);
  if (sx.empty() || sb.size() != 1 || sb[0] != sx.back()) {
    shape_error("add_bias", "incompatible shapes " + shape_str(sx) + " + " + shape_str(sb));
  }
  const int n = sb[0];
  const int rows = static_cast<int>(shape_size(sx) / n);
  std::vector<double> out = node(x).value;
  as_mat(out, rows, n).rowwise() += Eigen::Map<const Eigen::RowVectorXd>(node(b).value.data(), n);
  return push("add_bias", sx, std::move(out), {x.id, b.id}, [rows, n](Graph& g, int self) {
    const Node& s = g.nodes_[self];
    const int ix = s.inputs[0], ib = s.inputs[1];
    if (g.needs(ix)) {
      auto& dx = g.grad_of(ix);
      for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += s.grad[i];
    }
    if (g.needs(ib)) {
      Eigen::Map<Eigen::RowVectorXd>(g.grad_of(ib).data(), n) += as_mat(s.grad, rows, n).colwise().sum();
    }
  });
}

Var Graph::add(Var a, Var b) {
  if (shape(a) != shape(b)) {
    shape_error("add", "shapes " + shape_str(shape(a)) + " vs " + shape_str(shape(b)));
  }
  std::vector<double> out = node(a).value;
  const auto& bv = node(b).value;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += bv[i];
  return push("add", shape(a), std::move(out), {a.id, b.id}, [](Graph& g, int self) {
    const Node& s = g.nodes_[self];
    for (int in : s.inputs) {
      if (!g.needs(in)) continue;
      auto& d = g.grad_of(in);
      for (std::size_t i = 0; i < d.size(); ++i) d[i] += s.grad[i];
    }
  });
}

Var Graph::relu(Var x) {
  std::vector<double> out = node(x).value;
  for (double& v : out) v = v > 0.0 ? v : 0.0;
  return push("relu", shape(x), std::move(out), {x.id}, [](Graph& g, int self) {
    const Node& s = g.nodes_[self];
    auto& dx = g.grad_of(s.inputs[0]);
    for (std::size_t i = 0; i < dx.size(); ++i) {
      if (s.value[i] > 0.0) dx[i] += s.grad[i];
    }
  });
}

Var Graph::tanh(Var x) {
  std::vector<double> out = node(x).value;
  for (double& v : out) v = std::tanh(v);
  return push("tanh", shape(x), std::move(out), {x.id}, [](Graph& g, int self) {
    const Node& s = g.nodes_[self];
    auto& dx = g.grad_of(s.inputs[0]);
    for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += s.grad[i] * (1.0 - s.value[i] * s.value[i]);
  });
}

Var Graph::sigmoid(Var x) {
  std::vector<double> out = node(x).value;
  for (double& v : out) v = sigmoid_scalar(v);
  return push("sigmoid", shape(x), std::move(out), {x.id}, [](Graph& g, int self) {
    const Node& s = g.nodes_[self];
    auto& dx = g.grad_of(s.inputs[0]);
    for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += s.grad[i] * s.value[i] * (1.0 - s.value[i]);
  });
}

Var Graph::softmax(Var x) {
  const Shape& sx = shape(x);
  if (sx.empty()) shape_error("softmax", "rank-0 input");
  const int n = sx.back();
  const int rows = static_cast<int>(shape_size(sx) / n);
  std::vector<double> out = node(x).value;
  for (int r = 0; r < rows; ++r) {
    double* row = &out[static_cast<std::size_t>(r) * n];
    const double mx = *std::max_element(row, row + n);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += (row[i] = std::exp(row[i] - mx));
    for (int i = 0; i < n; ++i) row[i] /= sum;
  }
  return push("softmax", sx, std::move(out), {x.id}, [rows, n](Graph& g, int self) {
    const Node& s = g.nodes_[self];
    auto& dx = g.grad_of(s.inputs[0]);
    for (int r = 0; r < rows; ++r) {
      const std::size_t off = static_cast<std::size_t>(r) * n;
      double dot = 0.0;
      for (int i = 0; i < n; ++i) dot += s.grad[off + i] * s.value[off + i];
      for (int i = 0; i < n; ++i) dx[off + i] += s.value[off + i] * (s.grad[off + i] - dot);
    }
  });
}

Var Graph::concat(const std::vector<Var>& parts, int axis) {
  if (parts.empty()) shape_error("concat", "no inputs");
  const Shape first = shape(parts[0]);
  axis = normalize_axis(axis, static_cast<int>(first.size()), "concat");
  Shape out_shape = first;
  out_shape[axis] = 0;
  std::vector<int> ids;
  std::vector<std::size_t> chunk;  // contiguous inner block per part
  for (Var p : parts) {
    const Shape& sp = shape(p);
    bool ok = sp.size() == first.size();
    for (std::size_t d = 0; ok && d < sp.size(); ++d) {
      if (static_cast<int>(d) != axis && sp[d] != first[d]) ok = false;
    }
    if (!ok) shape_error("concat", "incompatible shapes " + shape_str(first) + " and " + shape_str(sp));
    out_shape[axis] += sp[axis];
    ids.push_back(p.id);
    chunk.push_back(prod(sp, static_cast<std::size_t>(axis), sp.size()));
  }
  const std::size_t outer = prod(first, 0, static_cast<std::size_t>(axis));
  const std::size_t total = std::accumulate(chunk.begin(), chunk.end(), std::size_t{0});
  std::vector<double> out(outer * total);
  std::size_t offset = 0;
  for (std::size_t p = 0; p < parts.size(); ++p) {
    const auto& v = node(parts[p]).value;
    for (std::size_t o = 0; o < outer; ++o) {
      std::copy_n(v.begin() + static_cast<std::ptrdiff_t>(o * chunk[p]), chunk[p],
                  out.begin() + static_cast<std::ptrdiff_t>(o * total + offset));
    }
    offset += chunk[p];
  }
  return push("concat", std::move(out_shape), std::move(out), ids,
              [outer, total, chunk](Graph& g, int self) {
                const Node& s = g.nodes_[self];
                std::size_t off = 0;
                for (std::size_t p = 0; p < s.inputs.size(); ++p) {
                  if (g.needs(s.inputs[p])) {
                    auto& dx = g.grad_of(s.inputs[p]);
                    for (std::size_t o = 0; o < outer; ++o) {
                      for (std::size_t i = 0; i < chunk[p]; ++i) {
                        dx[o * chunk[p] + i] += s.grad[o * total + off + i];
                      }
                    }
                  }
                  off += chunk[p];
                }
              });
}

Var Graph::slice(Var x, int axis, int begin, int end) {
  const Shape sx = shape(x);
  axis = normalize_axis(axis, static_cast<int>(sx.size()), "slice");
  if (begin < 0 || end > sx[axis] || begin >= end) {
    shape_error("slice", "range [" + std::to_string(begin) + "," + std::to_string(end) +
                             ") invalid for shape " + shape_str(sx));
  }
  const std::size_t outer = prod(sx, 0, static_cast<std::size_t>(axis));
  const std::size_t inner = prod(sx, static_cast<std::size_t>(axis) + 1, sx.size());
  const std::size_t full = static_cast<std::size_t>(sx[axis]) * inner;
  const std::size_t off = static_cast<std::size_t>(begin) * inner;
  const std::size_t len = static_cast<std::size_t>(end - begin) * inner;
  Shape out_shape = sx;
  out_shape[axis] = end - begin;
  std::vector<double> out(outer * len);
  const auto& v = node(x).value;
  for (std::size_t o = 0; o < outer; ++o) {
    std::copy_n(v.begin() + static_cast<std::ptrdiff_t>(o * full + off), len,
                out.begin() + static_cast<std::ptrdiff_t>(o * len));
  }
  return push("slice", std::move(out_shape), std::move(out), {x.id},
              [outer, full, off, len](Graph& g, int self) {
                const Node& s = g.nodes_[self];
                auto& dx = g.grad_of(s.inputs[0]);
                for (std::size_t o = 0; o < outer; ++o) {
                  for (std::size_t i = 0; i < len; ++i) dx[o * full + off + i] += s.grad[o * len + i];
                }
              });
}

Var Graph::reshape(Var x, Shape new_shape) {
  if (shape_size(new_shape) != shape_size(shape(x))) {
    shape_error("reshape", "cannot reshape " + shape_str(shape(x)) + " to " + shape_str(new_shape));
  }
  return push("reshape", std::move(new_shape), node(x).value, {x.id}, [](Graph& g, int self) {
    const Node& s = g.nodes_[self];
    auto& dx = g.grad_of(s.inputs[0]);
    for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += s.grad[i];
  });
}

Var Graph::mean(Var x) {
  const auto& v = node(x).value;
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  return push("mean", {1}, {m}, {x.id}, [](Graph& g, int self) {
    const Node& s = g.nodes_[self];
    auto& dx = g.grad_of(s.inputs[0]);
    const double d = s.grad[0] / static_cast<double>(dx.size());
    for (double& e : dx) e += d;
  });
}

Var Graph::mse_loss(Var pred, Var target) {
  if (shape_size(shape(pred)) != shape_size(shape(target))) {
    shape_error("mse_loss", "shapes " + shape_str(shape(pred)) + " vs " + shape_str(shape(target)));
  }
  const auto& p = node(pred).value;
  const auto& t = node(target).value;
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) acc += (p[i] - t[i]) * (p[i] - t[i]);
  return push("mse_loss", {1}, {acc / static_cast<double>(p.size())}, {pred.id, target.id},
              [](Graph& g, int self) {
                const Node& s = g.nodes_[self];
                const int ip = s.inputs[0], it = s.inputs[1];
                const auto& p = g.nodes_[ip].value;
                const auto& t = g.nodes_[it].value;
                const double scale = 2.0 * s.grad[0] / static_cast<double>(p.size());
                for (std::size_t i = 0; i < p.size(); ++i) {
                  const double d = scale * (p[i] - t[i]);
                  if (g.needs(ip)) g.grad_of(ip)[i] += d;
                  if (g.needs(it)) g.grad_of(it)[i] -= d;
                }
              });
}

Var Graph::cross_entropy_loss(Var logits, const std::vector<int>& labels) {
  const Shape& sl = shape(logits);
  if (sl.size() != 2 || static_cast<std::size_t>(sl[0]) != labels.size()) {
    shape_error("cross_entropy_loss", "logits " + shape_str(sl) + " vs " +
                                          std::to_string(labels.size()) + " labels");
  }
  const int rows = sl[0], n = sl[1];
  std::vector<double> probs = node(logits).value;
  double loss = 0.0;
  for (int r = 0; r < rows; ++r) {
    if (labels[r] < 0 || labels[r] >= n) shape_error("cross_entropy_loss", "label out of range");
    double* row = &probs[static_cast<std::size_t>(r) * n];
    const double mx = *std::max_element(row, row + n);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += std::exp(row[i] - mx);
    const double log_z = mx + std::log(sum);
    loss -= row[labels[r]] - log_z;
    for (int i = 0; i < n; ++i) row[i] = std::exp(row[i] - log_z);
  }
  return push(
      "cross_entropy_loss", {1}, {loss / rows}, {logits.id},
      [rows, n, labels](Graph& g, int self) {
        const Node& s = g.nodes_[self];
        auto& dx = g.grad_of(s.inputs[0]);
        const double scale = s.grad[0] / rows;
        for (int r = 0; r < rows; ++r) {
          for (int i = 0; i < n; ++i) {
            const std::size_t k = static_cast<std::size_t>(r) * n + i;
            dx[k] += scale * (s.saved[k] - (i == labels[r] ? 1.0 : 0.0));
          }
        }
      },
      std::move(probs));
}

Var Graph::lstm_cell(Var x, Var state, Var w_ih, Var w_hh, Var b) {
  const Shape& sx = shape(x);
  const Shape& ss = shape(state);
  const Shape& si = shape(w_ih);
  const Shape& sh = shape(w_hh);
  const Shape& sb = shape(b);
  if (sx.size() != 2 || ss.size() != 2 || si.size() != 2 || sh.size() != 2 || sb.size() != 1 ||
      ss[0] != sx[0] || ss[1] % 2 != 0 || si[0] != sx[1] || sh[0] != ss[1] / 2 ||
      si[1] != 4 * sh[0] || sh[1] != si[1] || sb[0] != si[1]) {
    shape_error("lstm_cell", "incompatible shapes x=" + shape_str(sx) + " state=" + shape_str(ss) +
                                 " w_ih=" + shape_str(si) + " w_hh=" + shape_str(sh) +
                                 " b=" + shape_str(sb));
  }
  const int batch = sx[0], in = sx[1], hid = sh[0];
  const int g4 = 4 * hid;
  const auto& sv = node(state).value;

  // saved: activated gates [B,4H] then tanh(c') [B,H]
  std::vector<double> saved(static_cast<std::size_t>(batch) * (g4 + hid));
  RowMat h_prev(batch, hid);
  for (int r = 0; r < batch; ++r) {
    for (int j = 0; j < hid; ++j) h_prev(r, j) = sv[static_cast<std::size_t>(r) * 2 * hid + j];
  }
  RowMat gates = as_mat(node(x).value, batch, in) * as_mat(node(w_ih).value, in, g4) +
                 h_prev * as_mat(node(w_hh).value, hid, g4);
  gates.rowwise() += Eigen::Map<const Eigen::RowVectorXd>(node(b).value.data(), g4);

  std::vector<double> out(static_cast<std::size_t>(batch) * 2 * hid);
  for (int r = 0; r < batch; ++r) {
    double* act = &saved[static_cast<std::size_t>(r) * g4];
    double* tc = &saved[static_cast<std::size_t>(batch) * g4 + static_cast<std::size_t>(r) * hid];
    for (int j = 0; j < hid; ++j) {
      const double ig = sigmoid_scalar(gates(r, j));
      const double fg = sigmoid_scalar(gates(r, hid + j));
      const double gg = std::tanh(gates(r, 2 * hid + j));
      const double og = sigmoid_scalar(gates(r, 3 * hid + j));
      act[j] = ig;
      act[hid + j] = fg;
      act[2 * hid + j] = gg;
      act[3 * hid + j] = og;
      const double c_prev = sv[static_cast<std::size_t>(r) * 2 * hid + hid + j];
      const double c_new = fg * c_prev + ig * gg;
      tc[j] = std::tanh(c_new);
      out[static_cast<std::size_t>(r) * 2 * hid + j] = og * tc[j];
      out[static_cast<std::size_t>(r) * 2 * hid + hid + j] = c_new;
    }
  }

  return push(
      "lstm_cell", {batch, 2 * hid}, std::move(out), {x.id, state.id, w_ih.id, w_hh.id, b.id},
      [batch, in, hid, g4](Graph& g, int self) {
        const Node& s = g.nodes_[self];
        const int ix = s.inputs[0], is = s.inputs[1], iwi = s.inputs[2], iwh = s.inputs[3],
                  ib = s.inputs[4];
        const auto& sv = g.nodes_[is].value;
        RowMat dgates(batch, g4);
        for (int r = 0; r < batch; ++r) {
          const double* act = &s.saved[static_cast<std::size_t>(r) * g4];
          const double* tc = &s.saved[static_cast<std::size_t>(batch) * g4 + static_cast<std::size_t>(r) * hid];
          for (int j = 0; j < hid; ++j) {
            const double ig = act[j], fg = act[hid + j], gg = act[2 * hid + j], og = act[3 * hid + j];
            const double dh = s.grad[static_cast<std::size_t>(r) * 2 * hid + j];
            const double dc_out = s.grad[static_cast<std::size_t>(r) * 2 * hid + hid + j];
            const double dc = dc_out + dh * og * (1.0 - tc[j] * tc[j]);
            const double c_prev = sv[static_cast<std::size_t>(r) * 2 * hid + hid + j];
            dgates(r, j) = dc * gg * ig * (1.0 - ig);
            dgates(r, hid + j) = dc * c_prev * fg * (1.0 - fg);
            dgates(r, 2 * hid + j) = dc * ig * (1.0 - gg * gg);
            dgates(r, 3 * hid + j) = dh * tc[j] * og * (1.0 - og);
            if (g.needs(is)) g.grad_of(is)[static_cast<std::size_t>(r) * 2 * hid + hid + j] += dc * fg;
          }
        }
        if (g.needs(ib)) {
          Eigen::Map<Eigen::RowVectorXd>(g.grad_of(ib).data(), g4) += dgates.colwise().sum();
        }
        if (g.needs(iwi)) {
          as_mat(g.grad_of(iwi), in, g4).noalias() +=
              as_mat(g.nodes_[ix].value, batch, in).transpose() * dgates;
        }
        if (g.needs(ix)) {
          as_mat(g.grad_of(ix), batch, in).noalias() +=
              dgates * as_mat(g.nodes_[iwi].value, in, g4).transpose();
        }
        if (g.needs(iwh) || g.needs(is)) {
          RowMat h_prev(batch, hid);
          for (int r = 0; r < batch; ++r) {
            for (int j = 0; j < hid; ++j) h_prev(r, j) = sv[static_cast<std::size_t>(r) * 2 * hid + j];
          }
          if (g.needs(iwh)) as_mat(g.grad_of(iwh), hid, g4).noalias() += h_prev.transpose() * dgates;
          if (g.needs(is)) {
            const RowMat dh_prev = dgates * as_mat(g.nodes_[iwh].value, hid, g4).transpose();
            auto& ds = g.grad_of(is);
            for (int r = 0; r < batch; ++r) {
              for (int j = 0; j < hid; ++j) ds[static_cast<std::size_t>(r) * 2 * hid + j] += dh_prev(r, j);
            }
          }
        }
      },
      std::move(saved));
}

}  // namespace swingup::nn
