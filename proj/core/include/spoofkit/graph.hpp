// Copyright 2026 Spoofkit Authors
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

#include <deque>
#include <functional>
#include <vector>

#include "spoofkit/errors.hpp"
#include "spoofkit/tensor.hpp"

namespace spoofkit {

// Reverse-mode autodiff tape. Values are computed eagerly as ops are
// recorded; backward() walks the tape in reverse creation order. One graph
// per forward pass, discarded afterwards.
class Graph {
 public:
  using NodeId = int;

  NodeId leaf(Tensor value, bool requires_grad = false);

  const Tensor& val(NodeId id) const { return nodes_[static_cast<size_t>(id)].value; }
  const Tensor& grad(NodeId id) const { return grads_[static_cast<size_t>(id)]; }
  bool requires_grad(NodeId id) const { return nodes_[static_cast<size_t>(id)].requires_grad; }
  size_t num_nodes() const { return nodes_.size(); }

  // root must be a single-element tensor; seeds d(root) = seed.
  void backward(NodeId root, double seed = 1.0);

  // ---- elementwise ----
  NodeId add(NodeId a, NodeId b);
  NodeId sub(NodeId a, NodeId b);
  NodeId mul(NodeId a, NodeId b);
  NodeId scale(NodeId a, double s);
  NodeId add_const(NodeId a, double c);
  NodeId sub_from_const(double c, NodeId a);
  NodeId pow_const(NodeId a, double p);
  NodeId log_op(NodeId a);
  NodeId exp_op(NodeId a);
  NodeId gelu(NodeId a);
  NodeId tanh_op(NodeId a);
  NodeId sigmoid(NodeId a);
  NodeId max_elem(NodeId a, NodeId b);  // ties resolve to a
  NodeId dropout(NodeId a, double p, Rng& rng);

  // ---- shape ----
  NodeId reshape(NodeId a, std::vector<int> shape);
  NodeId transpose(NodeId a);                       // rank-2
  NodeId concat_rows(const std::vector<NodeId>& parts);
  NodeId slice_rows(NodeId a, int begin, int count);
  NodeId gather_rows(NodeId a, std::vector<int> idx);
  NodeId concat_vec(const std::vector<NodeId>& parts);  // rank-1 pieces
  NodeId slice_cols(NodeId a, int begin, int count);
  NodeId concat_cols(const std::vector<NodeId>& parts);
  NodeId gather_vec(NodeId a, std::vector<int> idx);    // rank-1 gather

  // ---- linear algebra ----
  NodeId matmul(NodeId a, NodeId b);                // (n,k)x(k,m)
  NodeId add_row_broadcast(NodeId a, NodeId bias);  // (n,d) + (d,)
  NodeId matvec(NodeId a, NodeId x);                // (n,d)x(d,) -> (n,)
  NodeId mul_row_broadcast(NodeId a, NodeId v);     // (n,d) * (d,)
  NodeId mul_col_broadcast(NodeId a, NodeId v);     // (n,d) * (n,)
  NodeId add_scalar_broadcast(NodeId a, NodeId s);  // (n,) + (1,)

  // ---- reductions ----
  NodeId col_max(NodeId a);    // (n,d) -> (d,), ties to lowest row
  NodeId col_mean(NodeId a);   // (n,d) -> (d,)
  NodeId weighted_sum(NodeId a, Tensor w);  // scalar objective, w constant
  NodeId mean_all(NodeId a);

  // ---- softmax family ----
  NodeId softmax_rows(NodeId a);     // (n,m), max-subtracted exponentials
  NodeId log_softmax_vec(NodeId a);  // (d,)
  NodeId gather_elem(NodeId a, int idx);  // (d,) -> scalar

  // ---- conv stack (rank-3 feature maps C x F x T) ----
  NodeId conv2d_3x3(NodeId x, NodeId w, NodeId b);   // same padding, stride 1
  NodeId maxpool2d(NodeId x, int pool_f, int pool_t);
  NodeId instance_norm(NodeId x, NodeId gamma, NodeId beta, double eps = 1e-5);
  NodeId layer_norm_rows(NodeId x, NodeId gamma, NodeId beta, double eps = 1e-5);
  NodeId max_over_time(NodeId x);  // (C,F,T) -> (F,C)
  NodeId max_over_freq(NodeId x);  // (C,F,T) -> (T,C)

 private:
  struct Node {
    Tensor value;
    bool requires_grad = false;
    std::function<void(Graph&)> backprop;  // null for leaves
  };

  NodeId push(Tensor value, bool requires_grad, std::function<void(Graph&)> backprop);
  Tensor& g(NodeId id) { return grads_[static_cast<size_t>(id)]; }
  void accum(NodeId id, int64_t flat_index, double v) {
    if (nodes_[static_cast<size_t>(id)].requires_grad) grads_[static_cast<size_t>(id)][flat_index] += v;
  }

  // deque: ids and value references stay valid while new ops are recorded
  std::deque<Node> nodes_;
  std::deque<Tensor> grads_;
};

double gelu_scalar(double x);

}  // namespace spoofkit
