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

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace swingup::nn {

using Shape = std::vector<int>;

std::size_t shape_size(const Shape& shape);
std::string shape_str(const Shape& shape);

/// Dense row-major array of doubles with an optional gradient buffer. Model
/// parameters live in Tensors; a Graph references them as leaves.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, bool requires_grad = false);
  Tensor(Shape shape, std::vector<double> data, bool requires_grad = false);

  const Shape& shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }
  int rank() const { return static_cast<int>(shape_.size()); }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  bool requires_grad() const { return requires_grad_; }
  void set_requires_grad(bool on);
  /// Empty unless requires_grad.
  std::span<double> grad() { return grad_; }
  std::span<const double> grad() const { return grad_; }
  void zero_grad();

  bool all_finite() const;

 private:
  Shape shape_;
  std::vector<double> data_;
  std::vector<double> grad_;
  bool requires_grad_ = false;
};

/// Handle to a node of a Graph.
struct Var {
  int id = -1;
  bool valid() const { return id >= 0; }
};

/// Define-by-run tape. Nodes are appended in creation order; backward visits
/// them in exact reverse order. A Graph and its nodes belong to one thread.
///
/// Layout conventions: images are NHWC, convolution weights are [O,K,K,C],
/// linear weights are [in,out].
class Graph {
 public:
  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  /// Constant leaf holding a copy of the values.
  Var input(Shape shape, std::vector<double> values);
  Var input(const Tensor& t);
  Var zeros(Shape shape);
  /// Parameter leaf. Gradients are accumulated into `t.grad()` on backward
  /// when `t.requires_grad()`. `t` must outlive the graph.
  Var param(Tensor& t);

  /// [m,k] x [k,n] -> [m,n].
  Var matmul(Var a, Var b);
  /// Valid-padding, stride-1 convolution. x [N,H,W,C], w [O,K,K,C], b [O].
  Var conv2d(Var x, Var w, Var b);
  /// x [..., n] + b [n].
  Var add_bias(Var x, Var b);
  /// Elementwise sum of equal-shaped operands.
  Var add(Var a, Var b);
  Var relu(Var x);
  Var tanh(Var x);
  Var sigmoid(Var x);
  /// Softmax over the last axis.
  Var softmax(Var x);
  /// Concatenation along `axis`; all other dimensions must agree.
  Var concat(const std::vector<Var>& parts, int axis);
  /// Half-open range [begin, end) along `axis`.
  Var slice(Var x, int axis, int begin, int end);
  /// Same data, new shape of equal size.
  Var reshape(Var x, Shape shape);
  /// Mean of all elements -> [1].
  Var mean(Var x);
  /// mean((pred - target)^2) -> [1].
  Var mse_loss(Var pred, Var target);
  /// Mean negative log-likelihood of softmax(logits [B,C]) at `labels`.
  Var cross_entropy_loss(Var logits, const std::vector<int>& labels);
  /// One LSTM step. x [B,in], state [B,2H] = (h, c), w_ih [in,4H],
  /// w_hh [H,4H], b [4H] with gate order (i, f, g, o). Returns [B,2H] = (h', c').
  Var lstm_cell(Var x, Var state, Var w_ih, Var w_hh, Var b);

  /// Reverse-mode sweep from a scalar node.
  void backward(Var loss);

  const Shape& shape(Var v) const { return node(v).shape; }
  std::span<const double> value(Var v) const { return node(v).value; }
  /// Gradient of the last backward() with respect to this node.
  std::span<const double> grad(Var v) const { return node(v).grad; }
  double scalar(Var v) const;
  std::size_t size() const { return nodes_.size(); }
  std::string_view op(Var v) const { return node(v).op; }

 private:
  using BackwardFn = std::function<void(Graph&, int)>;

  struct Node {
    std::string_view op;
    Shape shape;
    std::vector<double> value;
    std::vector<double> grad;
    std::vector<int> inputs;
    std::vector<double> saved;
    Tensor* param = nullptr;
    bool needs_grad = false;
    BackwardFn backward;
  };

  const Node& node(Var v) const;
  Node& node(Var v);
  Var push(std::string_view op, Shape shape, std::vector<double> value, std::vector<int> inputs,
           BackwardFn backward, std::vector<double> saved = {});
  bool needs(int id) const { return nodes_[static_cast<std::size_t>(id)].needs_grad; }
  std::vector<double>& grad_of(int id) { return nodes_[static_cast<std::size_t>(id)].grad; }

  std::vector<Node> nodes_;
};

}  // namespace swingup::nn
