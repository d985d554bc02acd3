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

#include "spoofkit/graph.hpp"

#include <algorithm>
#include <cmath>

namespace spoofkit {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
}  // namespace

double gelu_scalar(double x) { return 0.5 * x * (1.0 + std::erf(x * kInvSqrt2)); }

Graph::NodeId Graph::push(Tensor value, bool requires_grad, std::function<void(Graph&)> backprop) {
  nodes_.push_back(Node{std::move(value), requires_grad, std::move(backprop)});
  return static_cast<NodeId>(nodes_.size() - 1);
}

Graph::NodeId Graph::leaf(Tensor value, bool requires_grad) {
  return push(std::move(value), requires_grad, nullptr);
}

void Graph::backward(NodeId root, double seed) {
  if (val(root).size() != 1) throw UsageError("backward root must be a scalar");
  grads_.clear();
  for (auto& n : nodes_) grads_.push_back(Tensor::zeros(n.value.shape()));
  grads_[static_cast<size_t>(root)][0] = seed;
  for (NodeId i = root; i >= 0; --i) {
    Node& n = nodes_[static_cast<size_t>(i)];
    if (n.requires_grad && n.backprop) n.backprop(*this);
  }
}

// ---------------------------------------------------------------------------
// elementwise
// ---------------------------------------------------------------------------

Graph::NodeId Graph::add(NodeId a, NodeId b) {
  const Tensor& A = val(a);
  const Tensor& B = val(b);
  if (!A.same_shape(B)) throw UsageError("add: shape mismatch");
  Tensor out(A.shape());
  for (int64_t i = 0; i < A.size(); ++i) out[i] = A[i] + B[i];
  bool rg = requires_grad(a) || requires_grad(b);
  NodeId self = push(std::move(out), rg, nullptr);
  if (rg)
    nodes_[static_cast<size_t>(self)].backprop = [self, a, b](Graph& gr) {
      const Tensor& go = gr.g(self);
      if (gr.requires_grad(a)) {
        Tensor& ga = gr.g(a);
        for (int64_t i = 0; i < go.size(); ++i) ga[i] += go[i];
      }
      if (gr.requires_grad(b)) {
        Tensor& gb = gr.g(b);
        for (int64_t i = 0; i < go.size(); ++i) gb[i] += go[i];
      }
    };
  return self;
}

Graph::NodeId Graph::sub(NodeId a, NodeId b) {
  const Tensor& A = val(a);
  const Tensor& B = val(b);
  if (!A.same_shape(B)) throw UsageError("sub: shape mismatch");
  Tensor out(A.shape());
  for (int64_t i = 0; i < A.size(); ++i) out[i] = A[i] - B[i];
  bool rg = requires_grad(a) || requires_grad(b);
  NodeId self = push(std::move(out), rg, nullptr);
  if (rg)
    nodes_[static_cast<size_t>(self)].backprop = [self, a, b](Graph& gr) {
      const Tensor& go = gr.g(self);
      if (gr.requires_grad(a)) {
        Tensor& ga = gr.g(a);
        for (int64_t i = 0; i < go.size(); ++i) ga[i] += go[i];
      }
      if (gr.requires_grad(b)) {
        Tensor& gb = gr.g(b);
        for (int64_t i = 0; i < go.size(); ++i) gb[i] -= go[i];
      }
    };
  return self;
}

Graph::NodeId Graph::mul(NodeId a, NodeId b) {
  const Tensor& A = val(a);
  const Tensor& B = val(b);
  if (!A.same_shape(B)) throw UsageError("mul: shape mismatch");
  Tensor out(A.shape());
  for (int64_t i = 0; i < A.size(); ++i) out[i] = A[i] * B[i];
  bool rg = requires_grad(a) || requires_grad(b);
  NodeId self = push(std::move(out), rg, nullptr);
  if (rg)
    nodes_[static_cast<size_t>(self)].backprop = [self, a, b](Graph& gr) {
      const Tensor& go = gr.g(self);
      const Tensor& A2 = gr.val(a);
      const Tensor& B2 = gr.val(b);
      if (gr.requires_grad(a)) {
        Tensor& ga = gr.g(a);
        for (int64_t i = 0; i < go.size(); ++i) ga[i] += go[i] * B2[i];
      }
      if (gr.requires_grad(b)) {
        Tensor& gb = gr.g(b);
        for (int64_t i = 0; i < go.size(); ++i) gb[i] += go[i] * A2[i];
      }
    };
  return self;
}

Graph::NodeId Graph::scale(NodeId a, double s) {
  const Tensor& A = val(a);
  Tensor out(A.shape());
  for (int64_t i = 0; i < A.size(); ++i) out[i] = A[i] * s;
  bool rg = requires_grad(a);
  NodeId self = push(std::move(out), rg, nullptr);
  if (rg)
    nodes_[static_cast<size_t>(self)].backprop = [self, a, s](Graph& gr) {
      const Tensor& go = gr.g(self);
      Tensor& ga = gr.g(a);
      for (int64_t i = 0; i < go.size(); ++i) ga[i] += go[i] * s;
    };
  return self;
}

Graph::NodeId Graph::add_const(NodeId a, double c) {
  const Tensor& A = val(a);
  Tensor out(A.shape());
  for (int64_t i = 0; i < A.size(); ++i) out[i] = A[i] + c;
  bool rg = requires_grad(a);
  NodeId self = push(std::move(out), rg, nullptr);
  if (rg)
    nodes_[static_cast<size_t>(self)].backprop = [self, a](Graph& gr) {
      const Tensor& go = gr.g(self);
      Tensor& ga = gr.g(a);
      for (int64_t i = 0; i < go.size(); ++i) ga[i] += go[i];
    };
  return self;
}

Graph::NodeId Graph::sub_from_const(double c, NodeId a) {
  const Tensor& A = val(a);
  Tensor out(A.shape());
  for (int64_t i = 0; i < A.size(); ++i) out[i] = c - A[i];
  bool rg = requires_grad(a);
  NodeId self = push(std::move(out), rg, nullptr);
  if (rg)
    nodes_[static_cast<size_t>(self)].backprop = [self, a](Graph& gr) {
      const Tensor& go = gr.g(self);
      Tensor& ga = gr.g(a);
      for (int64_t i = 0; i < go.size(); ++i) ga[i] -= go[i];
    };
  return self;
}

Graph::NodeId Graph::pow_const(NodeId a, double p) {
  const Tensor& A = val(a);
  Tensor out(A.shape());
  for (int64_t i = 0; i < A.size(); ++i) out[i] = std::pow(A[i], p);
  bool rg = requires_grad(a);
  NodeId self = push(std::move(out), rg, nullptr);
  if (rg)
    nodes_[static_cast<size_t>(self)].backprop = [self, a, p](Graph& gr) {
      const Tensor& go = gr.g(self);
      const Tensor& A2 = gr.val(a);
      Tensor& ga = gr.g(a);
      for (int64_t i = 0; i < go.size(); ++i) {
        double d = (p == 0.0) ? 0.0 : p * std::pow(A2[i], p - 1.0);
        ga[i] += go[i] * d;
      }
    };
  return self;
}

Graph::NodeId Graph::log_op(NodeId a) {
  const Tensor& A = val(a);
  Tensor out(A.shape());
  for (int64_t i = 0; i < A.size(); ++i) out[i] = std::log(A[i]);
  bool rg = requires_grad(a);
  NodeId self = push(std::move(out), rg, nullptr);
  if (rg)
    nodes_[static_cast<size_t>(self)].backprop = [self, a](Graph& gr) {
      const Tensor& go = gr.g(self);
      const Tensor& A2 = gr.val(a);
      Tensor& ga = gr.g(a);
      for (int64_t i = 0; i < go.size(); ++i) ga[i] += go[i] / A2[i];
    };
  return self;
}

Graph::NodeId Graph::exp_op(NodeId a) {
  const Tensor& A = val(a);
  Tensor out(A.shape());
  for (int64_t i = 0; i < A.size(); ++i) out[i] = std::exp(A[i]);
  bool rg = requires_grad(a);
  NodeId self = push(std::move(out), rg, nullptr);
  if (rg)
    nodes_[static_cast<size_t>(self)].backprop = [self, a](Graph& gr) {
      const Tensor& go = gr.g(self);
      const Tensor& Y = gr.val(self);
      Tensor& ga = gr.g(a);
      for (int64_t i = 0; i < go.size(); ++i) ga[i] += go[i] * Y[i];
    };
  return self;
}

Graph::NodeId Graph::gelu(NodeId a) {
  const Tensor& A = val(a);
  Tensor out(A.shape());
  for (int64_t i = 0; i < A.size(); ++i) out[i] = gelu_scalar(A[i]);
  bool rg = requires_grad(a);
  NodeId self = push(std::move(out), rg, nullptr);
  if (rg)
    nodes_[static_cast<size_t>(self)].backprop = [self, a](Graph& gr) {
      const Tensor& go = gr.g(self);
      const Tensor& A2 = gr.val(a);
      Tensor& ga = gr.g(a);
      for (int64_t i = 0; i < go.size(); ++i) {
        double x = A2[i];
        double phi_cdf = 0.5 * (1.0 + std::erf(x * kInvSqrt2));
        double phi_pdf = kInvSqrt2Pi * std::exp(-0.5 * x * x);
        ga[i] += go[i] * (phi_cdf + x * phi_pdf);
      }
    };
  return self;
}

Graph::NodeId Graph::tanh_op(NodeId a) {
  const Tensor& A = val(a);
  Tensor out(A.shape());
  for (int64_t i = 0; i < A.size(); ++i) out[i] = std::tanh(A[i]);
  bool rg = requires_grad(a);
  NodeId self = push(std::move(out), rg, nullptr);
  if (rg)
    nodes_[static_cast<size_t>(self)].backprop = [self, a](Graph& gr) {
      const Tensor& go = gr.g(self);
      const Tensor& Y = gr.val(self);
      Tensor& ga = gr.g(a);
      for (int64_t i = 0; i < go.size(); ++i) ga[i] += go[i] * (1.0 - Y[i] * Y[i]);
    };
  return self;
}

Graph::NodeId Graph::sigmoid(NodeId a) {
  const Tensor& A = val(a);
  Tensor out(A.shape());
  for (int64_t i = 0; i < A.size(); ++i) out[i] = 1.0 / (1.0 + std::exp(-A[i]));
  bool rg = requires_grad(a);
  NodeId self = push(std::move(out), rg, nullptr);
  if (rg)
    nodes_[static_cast<size_t>(self)].backprop = [self, a](Graph& gr) {
      const Tensor& go = gr.g(self);
      const Tensor& Y = gr.val(self);
      Tensor& ga = gr.g(a);
      for (int64_t i = 0; i < go.size(); ++i) ga[i] += go[i] * Y[i] * (1.0 - Y[i]);
    };
  return self;
}

Graph::NodeId Graph::max_elem(NodeId a, NodeId b) {
  const Tensor& A = val(a);
  const Tensor& B = val(b);
  if (!A.same_shape(B)) throw UsageError("max_elem: shape mismatch");
  Tensor out(A.shape());
  std::vector<uint8_t> a_wins(static_cast<size_t>(A.size()));
  for (int64_t i = 0; i < A.size(); ++i) {
    a_wins[static_cast<size_t>(i)] = A[i] >= B[i];
    out[i] = a_wins[static_cast<size_t>(i)] ? A[i] : B[i];
  }
  bool rg = requires_grad(a) || requires_grad(b);
  NodeId self = push(std::move(out), rg, nullptr);
  if (rg)
    nodes_[static_cast<size_t>(self)].backprop = [self, a, b, a_wins = std::move(a_wins)](Graph& gr) {
      const Tensor& go = gr.g(self);
      bool ra = gr.requires_grad(a), rb = gr.requires_grad(b);
      for (int64_t i = 0; i < go.size(); ++i) {
        if (a_wins[static_cast<size_t>(i)]) {
          if (ra) gr.g(a)[i] += go[i];
        } else {
          if (rb) gr.g(b)[i] += go[i];
        }
      }
    };
  return self;
}

Graph::NodeId Graph::dropout(NodeId a, double p, Rng& rng) {
  const Tensor& A = val(a);
  if (p <= 0.0) return a;
  double keep = 1.0 - p;
  Tensor out(A.shape());
  std::vector<double> mask(static_cast<size_t>(A.size()));
  for (int64_t i = 0; i < A.size(); ++i) {
    mask[static_cast<size_t>(i)] = rng.uniform() < p ? 0.0 : 1.0 / keep;
    out[i] = A[i] * mask[static_cast<size_t>(i)];
  }
  bool rg = requires_grad(a);
  NodeId self = push(std::move(out), rg, nullptr);
  if (rg)
    nodes_[static_cast<size_t>(self)].backprop = [self, a, mask = std::move(mask)](Graph& gr) {
      const Tensor& go = gr.g(self);
      Tensor& ga = gr.g(a);
      for (int64_t i = 0; i < go.size(); ++i) ga[i] += go[i] * mask[static_cast<size_t>(i)];
    };
  return self;
}

// ---------------------------------------------------------------------------
// shape
// ---------------------------------------------------------------------------

Graph::NodeId Graph::reshape(NodeId a, std::vector<int> shape) {
  const Tensor& A = val(a);
  if (shape_size(shape) != A.size()) throw UsageError("reshape: element count mismatch");
  Tensor out(std::move(shape), A.vec());
  bool rg = requires_grad(a);
  NodeId self = push(std::move(out), rg, nullptr);
  if (rg)
    nodes_[static_cast<size_t>(self)].backprop = [self, a](Graph& gr) {
      const Tensor& go = gr.g(self);
      Tensor& ga = gr.g(a);
      for (int64_t i = 0; i < go.size(); ++i) ga[i] += go[i];
    };
  return self;
}

Graph::NodeId Graph::transpose(NodeId a) {
  const Tensor& A = val(a);
  if (A.rank() != 2) throw UsageError("transpose: rank-2 only");
  int n = A.dim(0), m = A.dim(1);
  Tensor out({m, n});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) out.at(j, i) = A.at(i, j);
  bool rg = requires_grad(a);
  NodeId self = push(std::move(out), rg, nullptr);
  if (rg)
    nodes_[static_cast<size_t>(self)].backprop = [self, a, n, m](Graph& gr) {
      const Tensor& go = gr.g(self);
      Tensor& ga = gr.g(a);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) ga.at(i, j) += go.at(j, i);
    };
  return self;
}

Graph::NodeId Graph::concat_rows(const std::vector<NodeId>& parts) {
  if (parts.empty()) throw UsageError("concat_rows: empty");
  int d = val(parts[0]).dim(1);
  int total = 0;
  bool rg = false;
  for (NodeId p : parts) {
    const Tensor& P = val(p);
    if (P.rank() != 2 || P.dim(1) != d) throw UsageError("concat_rows: column mismatch");
    total += P.dim(0);
    rg = rg || requires_grad(p);
  }
  Tensor out({total, d});
  int row = 0;
  for (NodeId p : parts) {
    const Tensor& P = val(p);
    std::copy(P.data(), P.data() + P.size(), out.data() + static_cast<int64_t>(row) * d);
    row += P.dim(0);
  }
  NodeId self = push(std::move(out), rg, nullptr);
  if (rg)
    nodes_[static_cast<size_t>(self)].backprop = [self, parts, d](Graph& gr) {
      const Tensor& go = gr.g(self);
      int row = 0;
      for (NodeId p : parts) {
        int n = gr.val(p).dim(0);
        if (gr.requires_grad(p)) {
          Tensor& gp = gr.g(p);
          for (int64_t i = 0; i < static_cast<int64_t>(n) * d; ++i)
            gp[i] += go[static_cast<int64_t>(row) * d + i];
        }
        row += n;
      }
    };
  return self;
}

Graph::NodeId Graph::slice_rows(NodeId a, int begin, int count) {
  const Tensor& A = val(a);
  if (A.rank() != 2) throw UsageError("slice_rows: rank-2 only");
  if (begin < 0 || count < 0 || begin + count > A.dim(0)) throw UsageError("slice_rows: out of range");
  int d = A.dim(1);
  Tensor out({count, d});
  std::copy(A.data() + static_cast<int64_t>(begin) * d, A.data() + static_cast<int64_t>(begin + count) * d, out.data());
  bool rg = requires_grad(a);
  NodeId self = push(std::move(out), rg, nullptr);
  if (rg)
    nodes_[static_cast<size_t>(self)].backprop = [self, a, begin, d, count](Graph& gr) {
      const Tensor& go = gr.g(self);
      Tensor& ga = gr.g(a);
      for (int64_t i = 0; i < static_cast<int64_t>(count) * d; ++i)
        ga[static_cast<int64_t>(begin) * d + i] += go[i];
    };
  return self;
}

Graph::NodeId Graph::gather_rows(NodeId a, std::vector<int> idx) {
  const Tensor& A = val(a);
  if (A.rank() != 2) throw UsageError("gather_rows: rank-2 only");
  int d = A.dim(1);
  Tensor out({static_cast<int>(idx.size()), d});
  for (size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] < 0 || idx[i] >= A.dim(0)) throw UsageError("gather_rows: index out of range");
    std::copy(A.data() + static_cast<int64_t>(idx[i]) * d, A.data() + static_cast<int64_t>(idx[i] + 1) * d,
              out.data() + static_cast<int64_t>(i) * d);
  }
  bool rg = requires_grad(a);
  NodeId self = push(std::move(out), rg, nullptr);
  if (rg)
    nodes_[static_cast<size_t>(self)].backprop = [self, a, d, idx = std::move(idx)](Graph& gr) {
      const Tensor& go = gr.g(self);
      Tensor& ga = gr.g(a);
      for (size_t i = 0; i < idx.size(); ++i)
        for (int j = 0; j < d; ++j) ga.at(idx[i], j) += go.at(static_cast<int>(i), j);
    };
  return self;
}

Graph::NodeId Graph::concat_vec(const std::vector<NodeId>& parts) {
  if (parts.empty()) throw UsageError("concat_vec: empty");
  int total = 0;
  bool rg = false;
  for (NodeId p : parts) {
    if (val(p).rank() != 1) throw UsageError("concat_vec: rank-1 only");
    total += val(p).dim(0);
    rg = rg || requires_grad(p);
  }
  Tensor out({total});
  int pos = 0;
  for (NodeId p : parts) {
    const Tensor& P = val(p);
    std::copy(P.data(), P.data() + P.size(), out.data() + pos);
    pos += P.dim(0);
  }
  NodeId self = push(std::move(out), rg, nullptr);
  if (rg)
    nodes_[static_cast<size_t>(self)].backprop = [self, parts](Graph& gr) {
      const Tensor& go = gr.g(self);
      int pos = 0;
      for (NodeId p : parts) {
        int n = gr.val(p).dim(0);
        if (gr.requires_grad(p)) {
          Tensor& gp = gr.g(p);
          for (int i = 0; i < n; ++i) gp[i] += go[pos + i];
        }
        pos += n;
      }
    };
  return self;
}

Graph::NodeId Graph::slice_cols(NodeId a, int begin, int count) {
  const Tensor& A = val(a);
  if (A.rank() != 2) throw UsageError("slice_cols: rank-2 only");
  if (begin < 0 || count < 0 || begin + count > A.dim(1)) throw UsageError("slice_cols: out of range");
  int n = A.dim(0);
  Tensor out({n, count});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < count; ++j) out.at(i, j) = A.at(i, begin + j);
  bool rg = requires_grad(a);
  NodeId self = push(std::move(out), rg, nullptr);
  if (rg)
    nodes_[static_cast<size_t>(self)].backprop = [self, a, begin, n, count](Graph& gr) {
      const Tensor& go = gr.g(self);
      Tensor& ga = gr.g(a);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < count; ++j) ga.at(i, begin + j) += go.at(i, j);
    };
  return self;
}

Graph::NodeId Graph::concat_cols(const std::vector<NodeId>& parts) {
  if (parts.empty()) throw UsageError("concat_cols: empty");
  int n = val(parts[0]).dim(0);
  int total = 0;
  bool rg = false;
  for (NodeId p : parts) {
    const Tensor& P = val(p);
    if (P.rank() != 2 || P.dim(0) != n) throw UsageError("concat_cols: row mismatch");
    total += P.dim(1);
    rg = rg || requires_grad(p);
  }
  Tensor out({n, total});
  int col = 0;
  for (NodeId p : parts) {
    const Tensor& P = val(p);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < P.dim(1); ++j) out.at(i, col + j) = P.at(i, j);
    col += P.dim(1);
  }
  NodeId self = push(std::move(out), rg, nullptr);
  if (rg)
    nodes_[static_cast<size_t>(self)].backprop = [self, parts, n](Graph& gr) {
      const Tensor& go = gr.g(self);
      int col = 0;
      for (NodeId p : parts) {
        int w = gr.val(p).dim(1);
        if (gr.requires_grad(p)) {
          Tensor& gp = gr.g(p);
          for (int i = 0; i < n; ++i)
            for (int j = 0; j < w; ++j) gp.at(i, j) += go.at(i, col + j);
        }
        col += w;
      }
    };
  return self;
}

Graph::NodeId Graph::gather_vec(NodeId a, std::vector<int> idx) {
  const Tensor& A = val(a);
  if (A.rank() != 1) throw UsageError("gather_vec: rank-1 only");
  Tensor out({static_cast<int>(idx.size())});
  for (size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] < 0 || idx[i] >= A.dim(0)) throw UsageError("gather_vec: index out of range");
    out[static_cast<int64_t>(i)] = A[idx[i]];
  }
  bool rg = requires_grad(a);
  NodeId self = push(std::move(out), rg, nullptr);
  if (rg)
    nodes_[static_cast<size_t>(self)].backprop = [self, a, idx = std::move(idx)](Graph& gr) {
      const Tensor& go = gr.g(self);
      Tensor& ga = gr.g(a);
      for (size_t i = 0; i < idx.size(); ++i) ga[idx[i]] += go[static_cast<int64_t>(i)];
    };
  return self;
}

// ---------------------------------------------------------------------------
// linear algebra
// ---------------------------------------------------------------------------

Graph::NodeId Graph::matmul(NodeId a, NodeId b) {
  const Tensor& A = val(a);
  const Tensor& B = val(b);
  if (A.rank() != 2 || B.rank() != 2 || A.dim(1) != B.dim(0)) throw UsageError("matmul: shape mismatch");
  int n = A.dim(0), k = A.dim(1), m = B.dim(1);
  Tensor out({n, m});
  for (int i = 0; i < n; ++i)
    for (int kk = 0; kk < k; ++kk) {
      double av = A.at(i, kk);
      if (av == 0.0) continue;
      const double* brow = B.data() + static_cast<int64_t>(kk) * m;
      double* orow = out.data() + static_cast<int64_t>(i) * m;
      for (int j = 0; j < m; ++j) orow[j] += av * brow[j];
    }
  bool rg = requires_grad(a) || requires_grad(b);
  NodeId self = push(std::move(out), rg, nullptr);
  if (rg)
    nodes_[static_cast<size_t>(self)].backprop = [self, a, b, n, k, m](Graph& gr) {
      const Tensor& go = gr.g(self);
      const Tensor& A2 = gr.val(a);
      const Tensor& B2 = gr.val(b);
      if (gr.requires_grad(a)) {
        Tensor& ga = gr.g(a);
        for (int i = 0; i < n; ++i)
          for (int kk = 0; kk < k; ++kk) {
            const double* grow = go.data() + static_cast<int64_t>(i) * m;
            const double* brow = B2.data() + static_cast<int64_t>(kk) * m;
            double s = 0;
            for (int j = 0; j < m; ++j) s += grow[j] * brow[j];
            ga.at(i, kk) += s;
          }
      }
      if (gr.requires_grad(b)) {
        Tensor& gb = gr.g(b);
        for (int i = 0; i < n; ++i)
          for (int kk = 0; kk < k; ++kk) {
            double av = A2.at(i, kk);
            if (av == 0.0) continue;
            const double* grow = go.data() + static_cast<int64_t>(i) * m;
            double* brow = gb.data() + static_cast<int64_t>(kk) * m;
            for (int j = 0; j < m; ++j) brow[j] += av * grow[j];
          }
      }
    };
  return self;
}

Graph::NodeId Graph::add_row_broadcast(NodeId a, NodeId bias) {
  const Tensor& A = val(a);
  const Tensor& B = val(bias);
  if (A.rank() != 2 || B.rank() != 1 || B.dim(0) != A.dim(1)) throw UsageError("add_row_broadcast: shape mismatch");
  int n = A.dim(0), d = A.dim(1);
  Tensor out({n, d});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) out.at(i, j) = A.at(i, j) + B[j];
  bool rg = requires_grad(a) || requires_grad(bias);
  NodeId self = push(std::move(out), rg, nullptr);
  if (rg)
    nodes_[static_cast<size_t>(self)].backprop = [self, a, bias, n, d](Graph& gr) {
      const Tensor& go = gr.g(self);
      if (gr.requires_grad(a)) {
        Tensor& ga = gr.g(a);
        for (int64_t i = 0; i < go.size(); ++i) ga[i] += go[i];
      }
      if (gr.requires_grad(bias)) {
        Tensor& gb = gr.g(bias);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < d; ++j) gb[j] += go.at(i, j);
      }
    };
  return self;
}

Graph::NodeId Graph::matvec(NodeId a, NodeId x) {
  const Tensor& A = val(a);
  const Tensor& X = val(x);
  if (A.rank() != 2 || X.rank() != 1 || A.dim(1) != X.dim(0)) throw UsageError("matvec: shape mismatch");
  int n = A.dim(0), d = A.dim(1);
  Tensor out({n});
  for (int i = 0; i < n; ++i) {
    double s = 0;
    for (int j = 0; j < d; ++j) s += A.at(i, j) * X[j];
    out[i] = s;
  }
  bool rg = requires_grad(a) || requires_grad(x);
  NodeId self = push(std::move(out), rg, nullptr);
  if (rg)
    nodes_[static_cast<size_t>(self)].backprop = [self, a, x, n, d](Graph& gr) {
      const Tensor& go = gr.g(self);
      const Tensor& A2 = gr.val(a);
      const Tensor& X2 = gr.val(x);
      if (gr.requires_grad(a)) {
        Tensor& ga = gr.g(a);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < d; ++j) ga.at(i, j) += go[i] * X2[j];
      }
      if (gr.requires_grad(x)) {
        Tensor& gx = gr.g(x);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < d; ++j) gx[j] += go[i] * A2.at(i, j);
      }
    };
  return self;
}

Graph::NodeId Graph::mul_row_broadcast(NodeId a, NodeId v) {
  const Tensor& A = val(a);
  const Tensor& V = val(v);
  if (A.rank() != 2 || V.rank() != 1 || V.dim(0) != A.dim(1)) throw UsageError("mul_row_broadcast: shape mismatch");
  int n = A.dim(0), d = A.dim(1);
  Tensor out({n, d});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) out.at(i, j) = A.at(i, j) * V[j];
  bool rg = requires_grad(a) || requires_grad(v);
  NodeId self = push(std::move(out), rg, nullptr);
  if (rg)
    nodes_[static_cast<size_t>(self)].backprop = [self, a, v, n, d](Graph& gr) {
      const Tensor& go = gr.g(self);
      const Tensor& A2 = gr.val(a);
      const Tensor& V2 = gr.val(v);
      if (gr.requires_grad(a)) {
        Tensor& ga = gr.g(a);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < d; ++j) ga.at(i, j) += go.at(i, j) * V2[j];
      }
      if (gr.requires_grad(v)) {
        Tensor& gv = gr.g(v);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < d; ++j) gv[j] += go.at(i, j) * A2.at(i, j);
      }
    };
  return self;
}

Graph::NodeId Graph::mul_col_broadcast(NodeId a, NodeId v) {
  const Tensor& A = val(a);
  const Tensor& V = val(v);
  if (A.rank() != 2 || V.rank() != 1 || V.dim(0) != A.dim(0)) throw UsageError("mul_col_broadcast: shape mismatch");
  int n = A.dim(0), d = A.dim(1);
  Tensor out({n, d});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) out.at(i, j) = A.at(i, j) * V[i];
  bool rg = requires_grad(a) || requires_grad(v);
  NodeId self = push(std::move(out), rg, nullptr);
  if (rg)
    nodes_[static_cast<size_t>(self)].backprop = [self, a, v, n, d](Graph& gr) {
      const Tensor& go = gr.g(self);
      const Tensor& A2 = gr.val(a);
      const Tensor& V2 = gr.val(v);
      if (gr.requires_grad(a)) {
        Tensor& ga = gr.g(a);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < d; ++j) ga.at(i, j) += go.at(i, j) * V2[i];
      }
      if (gr.requires_grad(v)) {
        Tensor& gv = gr.g(v);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < d; ++j) gv[i] += go.at(i, j) * A2.at(i, j);
      }
    };
  return self;
}

Graph::NodeId Graph::add_scalar_broadcast(NodeId a, NodeId s) {
  const Tensor& A = val(a);
  const Tensor& S = val(s);
  if (A.rank() != 1 || S.size() != 1) throw UsageError("add_scalar_broadcast: expects (n,) + (1,)");
  int n = A.dim(0);
  Tensor out({n});
  for (int i = 0; i < n; ++i) out[i] = A[i] + S[0];
  bool rg = requires_grad(a) || requires_grad(s);
  NodeId self = push(std::move(out), rg, nullptr);
  if (rg)
    nodes_[static_cast<size_t>(self)].backprop = [self, a, s, n](Graph& gr) {
      const Tensor& go = gr.g(self);
      if (gr.requires_grad(a)) {
        Tensor& ga = gr.g(a);
        for (int i = 0; i < n; ++i) ga[i] += go[i];
      }
      if (gr.requires_grad(s)) {
        Tensor& gs = gr.g(s);
        for (int i = 0; i < n; ++i) gs[0] += go[i];
      }
    };
  return self;
}

// ---------------------------------------------------------------------------
// reductions
// ---------------------------------------------------------------------------

Graph::NodeId Graph::col_max(NodeId a) {
  const Tensor& A = val(a);
  if (A.rank() != 2) throw UsageError("col_max: rank-2 only");
  int n = A.dim(0), d = A.dim(1);
  if (n < 1) throw UsageError("col_max: empty input");
  Tensor out({d});
  std::vector<int> arg(static_cast<size_t>(d), 0);
  for (int j = 0; j < d; ++j) {
    double best = A.at(0, j);
    int bi = 0;
    for (int i = 1; i < n; ++i)
      if (A.at(i, j) > best) {
        best = A.at(i, j);
        bi = i;
      }
    out[j] = best;
    arg[static_cast<size_t>(j)] = bi;
  }
  bool rg = requires_grad(a);
  NodeId self = push(std::move(out), rg, nullptr);
  if (rg)
    nodes_[static_cast<size_t>(self)].backprop = [self, a, d, arg = std::move(arg)](Graph& gr) {
      const Tensor& go = gr.g(self);
      Tensor& ga = gr.g(a);
      for (int j = 0; j < d; ++j) ga.at(arg[static_cast<size_t>(j)], j) += go[j];
    };
  return self;
}

Graph::NodeId Graph::col_mean(NodeId a) {
  const Tensor& A = val(a);
  if (A.rank() != 2) throw UsageError("col_mean: rank-2 only");
  int n = A.dim(0), d = A.dim(1);
  if (n < 1) throw UsageError("col_mean: empty input");
  Tensor out({d});
  for (int j = 0; j < d; ++j) {
    double s = 0;
    for (int i = 0; i < n; ++i) s += A.at(i, j);
    out[j] = s / n;
  }
  bool rg = requires_grad(a);
  NodeId self = push(std::move(out), rg, nullptr);
  if (rg)
    nodes_[static_cast<size_t>(self)].backprop = [self, a, n, d](Graph& gr) {
      const Tensor& go = gr.g(self);
      Tensor& ga = gr.g(a);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) ga.at(i, j) += go[j] / n;
    };
  return self;
}

Graph::NodeId Graph::weighted_sum(NodeId a, Tensor w) {
  const Tensor& A = val(a);
  if (!A.same_shape(w)) throw UsageError("weighted_sum: shape mismatch");
  double s = 0;
  for (int64_t i = 0; i < A.size(); ++i) s += A[i] * w[i];
  Tensor out({1});
  out[0] = s;
  bool rg = requires_grad(a);
  NodeId self = push(std::move(out), rg, nullptr);
  if (rg)
    nodes_[static_cast<size_t>(self)].backprop = [self, a, w = std::move(w)](Graph& gr) {
      double go = gr.g(self)[0];
      Tensor& ga = gr.g(a);
      for (int64_t i = 0; i < ga.size(); ++i) ga[i] += go * w[i];
    };
  return self;
}

Graph::NodeId Graph::mean_all(NodeId a) {
  const Tensor& A = val(a);
  double s = 0;
  for (int64_t i = 0; i < A.size(); ++i) s += A[i];
  Tensor out({1});
  out[0] = s / static_cast<double>(A.size());
  bool rg = requires_grad(a);
  NodeId self = push(std::move(out), rg, nullptr);
  if (rg)
    nodes_[static_cast<size_t>(self)].backprop = [self, a](Graph& gr) {
      double go = gr.g(self)[0];
      Tensor& ga = gr.g(a);
      double inv = 1.0 / static_cast<double>(ga.size());
      for (int64_t i = 0; i < ga.size(); ++i) ga[i] += go * inv;
    };
  return self;
}

// ---------------------------------------------------------------------------
// softmax family
// ---------------------------------------------------------------------------

Graph::NodeId Graph::softmax_rows(NodeId a) {
  const Tensor& A = val(a);
  if (A.rank() != 2) throw UsageError("softmax_rows: rank-2 only");
  int n = A.dim(0), m = A.dim(1);
  Tensor out({n, m});
  for (int i = 0; i < n; ++i) {
    double mx = A.at(i, 0);
    for (int j = 1; j < m; ++j) mx = std::max(mx, A.at(i, j));
    double s = 0;
    for (int j = 0; j < m; ++j) {
      double e = std::exp(A.at(i, j) - mx);
      out.at(i, j) = e;
      s += e;
    }
    for (int j = 0; j < m; ++j) out.at(i, j) /= s;
  }
  bool rg = requires_grad(a);
  NodeId self = push(std::move(out), rg, nullptr);
  if (rg)
    nodes_[static_cast<size_t>(self)].backprop = [self, a, n, m](Graph& gr) {
      const Tensor& go = gr.g(self);
      const Tensor& Y = gr.val(self);
      Tensor& ga = gr.g(a);
      for (int i = 0; i < n; ++i) {
        double dot = 0;
        for (int j = 0; j < m; ++j) dot += go.at(i, j) * Y.at(i, j);
        for (int j = 0; j < m; ++j) ga.at(i, j) += Y.at(i, j) * (go.at(i, j) - dot);
      }
    };
  return self;
}

Graph::NodeId Graph::log_softmax_vec(NodeId a) {
  const Tensor& A = val(a);
  if (A.rank() != 1) throw UsageError("log_softmax_vec: rank-1 only");
  int d = A.dim(0);
  double mx = A[0];
  for (int j = 1; j < d; ++j) mx = std::max(mx, A[j]);
  double s = 0;
  for (int j = 0; j < d; ++j) s += std::exp(A[j] - mx);
  double lse = mx + std::log(s);
  Tensor out({d});
  for (int j = 0; j < d; ++j) out[j] = A[j] - lse;
  bool rg = requires_grad(a);
  NodeId self = push(std::move(out), rg, nullptr);
  if (rg)
    nodes_[static_cast<size_t>(self)].backprop = [self, a, d](Graph& gr) {
      const Tensor& go = gr.g(self);
      const Tensor& Y = gr.val(self);
      Tensor& ga = gr.g(a);
      double gsum = 0;
      for (int j = 0; j < d; ++j) gsum += go[j];
      for (int j = 0; j < d; ++j) ga[j] += go[j] - std::exp(Y[j]) * gsum;
    };
  return self;
}

Graph::NodeId Graph::gather_elem(NodeId a, int idx) {
  const Tensor& A = val(a);
  if (A.rank() != 1 || idx < 0 || idx >= A.dim(0)) throw UsageError("gather_elem: bad index");
  Tensor out({1});
  out[0] = A[idx];
  bool rg = requires_grad(a);
  NodeId self = push(std::move(out), rg, nullptr);
  if (rg)
    nodes_[static_cast<size_t>(self)].backprop = [self, a, idx](Graph& gr) {
      gr.g(a)[idx] += gr.g(self)[0];
    };
  return self;
}

// ---------------------------------------------------------------------------
// feature-map ops
// ---------------------------------------------------------------------------

Graph::NodeId Graph::conv2d_3x3(NodeId x, NodeId w, NodeId b) {
  const Tensor& X = val(x);
  const Tensor& W = val(w);
  const Tensor& B = val(b);
  if (X.rank() != 3 || W.rank() != 4 || W.dim(2) != 3 || W.dim(3) != 3)
    throw UsageError("conv2d_3x3: expects (C,F,T) input and (Co,Ci,3,3) weight");
  if (W.dim(1) != X.dim(0) || B.rank() != 1 || B.dim(0) != W.dim(0))
    throw UsageError("conv2d_3x3: channel mismatch");
  int ci_n = X.dim(0), F = X.dim(1), T = X.dim(2), co_n = W.dim(0);
  Tensor out({co_n, F, T});
  for (int co = 0; co < co_n; ++co) {
    double bias = B[co];
    double* oc = out.data() + static_cast<int64_t>(co) * F * T;
    for (int64_t i = 0; i < static_cast<int64_t>(F) * T; ++i) oc[i] = bias;
  }
  auto widx = [ci_n](int co, int ci, int kf, int kt) {
    return ((static_cast<int64_t>(co) * ci_n + ci) * 3 + kf) * 3 + kt;
  };
  for (int co = 0; co < co_n; ++co)
    for (int ci = 0; ci < ci_n; ++ci)
      for (int kf = 0; kf < 3; ++kf)
        for (int kt = 0; kt < 3; ++kt) {
          double wv = W[widx(co, ci, kf, kt)];
          if (wv == 0.0) continue;
          int f_lo = std::max(0, 1 - kf), f_hi = std::min(F, F + 1 - kf);
          int t_lo = std::max(0, 1 - kt), t_hi = std::min(T, T + 1 - kt);
          for (int f = f_lo; f < f_hi; ++f) {
            double* orow = out.data() + (static_cast<int64_t>(co) * F + f) * T;
            const double* xrow = X.data() + (static_cast<int64_t>(ci) * F + (f + kf - 1)) * T + (kt - 1);
            for (int t = t_lo; t < t_hi; ++t) orow[t] += wv * xrow[t];
          }
        }
  bool rg = requires_grad(x) || requires_grad(w) || requires_grad(b);
  NodeId self = push(std::move(out), rg, nullptr);
  if (rg)
    nodes_[static_cast<size_t>(self)].backprop = [self, x, w, b, ci_n, F, T, co_n, widx](Graph& gr) {
      const Tensor& go = gr.g(self);
      const Tensor& X2 = gr.val(x);
      const Tensor& W2 = gr.val(w);
      if (gr.requires_grad(b)) {
        Tensor& gb = gr.g(b);
        for (int co = 0; co < co_n; ++co) {
          const double* oc = go.data() + static_cast<int64_t>(co) * F * T;
          double s = 0;
          for (int64_t i = 0; i < static_cast<int64_t>(F) * T; ++i) s += oc[i];
          gb[co] += s;
        }
      }
      bool rx = gr.requires_grad(x), rw = gr.requires_grad(w);
      for (int co = 0; co < co_n; ++co)
        for (int ci = 0; ci < ci_n; ++ci)
          for (int kf = 0; kf < 3; ++kf)
            for (int kt = 0; kt < 3; ++kt) {
              double wv = W2[widx(co, ci, kf, kt)];
              int f_lo = std::max(0, 1 - kf), f_hi = std::min(F, F + 1 - kf);
              int t_lo = std::max(0, 1 - kt), t_hi = std::min(T, T + 1 - kt);
              double wacc = 0;
              for (int f = f_lo; f < f_hi; ++f) {
                const double* grow = go.data() + (static_cast<int64_t>(co) * F + f) * T;
                const double* xrow = X2.data() + (static_cast<int64_t>(ci) * F + (f + kf - 1)) * T + (kt - 1);
                if (rw) {
                  for (int t = t_lo; t < t_hi; ++t) wacc += grow[t] * xrow[t];
                }
                if (rx && wv != 0.0) {
                  double* gxrow = gr.g(x).data() + (static_cast<int64_t>(ci) * F + (f + kf - 1)) * T + (kt - 1);
                  for (int t = t_lo; t < t_hi; ++t) gxrow[t] += wv * grow[t];
                }
              }
              if (rw) gr.g(w)[widx(co, ci, kf, kt)] += wacc;
            }
    };
  return self;
}

Graph::NodeId Graph::maxpool2d(NodeId x, int pool_f, int pool_t) {
  const Tensor& X = val(x);
  if (X.rank() != 3) throw UsageError("maxpool2d: rank-3 only");
  if (pool_f < 1 || pool_t < 1) throw UsageError("maxpool2d: pool factors must be >= 1");
  if (pool_f == 1 && pool_t == 1) return x;
  int C = X.dim(0), F = X.dim(1), T = X.dim(2);
  int Fo = F / pool_f, To = T / pool_t;
  if (Fo < 1 || To < 1) throw UsageError("maxpool2d: spatial dims collapse to 0");
  Tensor out({C, Fo, To});
  std::vector<int64_t> arg(static_cast<size_t>(out.size()));
  int64_t oi = 0;
  for (int c = 0; c < C; ++c)
    for (int fo = 0; fo < Fo; ++fo)
      for (int to = 0; to < To; ++to, ++oi) {
        double best = -1e308;
        int64_t bidx = -1;
        for (int df = 0; df < pool_f; ++df)
          for (int dt = 0; dt < pool_t; ++dt) {
            int f = fo * pool_f + df, t = to * pool_t + dt;
            int64_t xi = (static_cast<int64_t>(c) * F + f) * T + t;
            if (X[xi] > best) {
              best = X[xi];
              bidx = xi;
            }
          }
        out[oi] = best;
        arg[static_cast<size_t>(oi)] = bidx;
      }
  bool rg = requires_grad(x);
  NodeId self = push(std::move(out), rg, nullptr);
  if (rg)
    nodes_[static_cast<size_t>(self)].backprop = [self, x, arg = std::move(arg)](Graph& gr) {
      const Tensor& go = gr.g(self);
      Tensor& gx = gr.g(x);
      for (int64_t i = 0; i < go.size(); ++i) gx[arg[static_cast<size_t>(i)]] += go[i];
    };
  return self;
}

Graph::NodeId Graph::instance_norm(NodeId x, NodeId gamma, NodeId beta, double eps) {
  const Tensor& X = val(x);
  const Tensor& G = val(gamma);
  const Tensor& B = val(beta);
  if (X.rank() != 3) throw UsageError("instance_norm: rank-3 only");
  int C = X.dim(0), F = X.dim(1), T = X.dim(2);
  if (G.rank() != 1 || G.dim(0) != C || B.rank() != 1 || B.dim(0) != C)
    throw UsageError("instance_norm: affine params must be (C,)");
  int64_t M = static_cast<int64_t>(F) * T;
  Tensor out({C, F, T});
  std::vector<double> mean(static_cast<size_t>(C)), inv_std(static_cast<size_t>(C));
  for (int c = 0; c < C; ++c) {
    const double* xc = X.data() + c * M;
    double mu = 0;
    for (int64_t i = 0; i < M; ++i) mu += xc[i];
    mu /= static_cast<double>(M);
    double var = 0;
    for (int64_t i = 0; i < M; ++i) {
      double d = xc[i] - mu;
      var += d * d;
    }
    var /= static_cast<double>(M);
    double is = 1.0 / std::sqrt(var + eps);
    mean[static_cast<size_t>(c)] = mu;
    inv_std[static_cast<size_t>(c)] = is;
    double* oc = out.data() + c * M;
    for (int64_t i = 0; i < M; ++i) oc[i] = G[c] * (xc[i] - mu) * is + B[c];
  }
  bool rg = requires_grad(x) || requires_grad(gamma) || requires_grad(beta);
  NodeId self = push(std::move(out), rg, nullptr);
  if (rg)
    nodes_[static_cast<size_t>(self)].backprop = [self, x, gamma, beta, C, M, mean = std::move(mean),
                                                  inv_std = std::move(inv_std)](Graph& gr) {
      const Tensor& go = gr.g(self);
      const Tensor& X2 = gr.val(x);
      const Tensor& G2 = gr.val(gamma);
      for (int c = 0; c < C; ++c) {
        const double* xc = X2.data() + c * M;
        const double* gc = go.data() + c * M;
        double mu = mean[static_cast<size_t>(c)], is = inv_std[static_cast<size_t>(c)];
        double sum_g = 0, sum_gx = 0;
        for (int64_t i = 0; i < M; ++i) {
          double xh = (xc[i] - mu) * is;
          sum_g += gc[i];
          sum_gx += gc[i] * xh;
        }
        if (gr.requires_grad(gamma)) gr.g(gamma)[c] += sum_gx;
        if (gr.requires_grad(beta)) gr.g(beta)[c] += sum_g;
        if (gr.requires_grad(x)) {
          double* gx = gr.g(x).data() + c * M;
          double gscale = G2[c] * is;
          double mg = sum_g / static_cast<double>(M);
          double mgx = sum_gx / static_cast<double>(M);
          for (int64_t i = 0; i < M; ++i) {
            double xh = (xc[i] - mu) * is;
            gx[i] += gscale * (gc[i] - mg - xh * mgx);
          }
        }
      }
    };
  return self;
}

Graph::NodeId Graph::layer_norm_rows(NodeId x, NodeId gamma, NodeId beta, double eps) {
  const Tensor& X = val(x);
  const Tensor& G = val(gamma);
  const Tensor& B = val(beta);
  if (X.rank() != 2) throw UsageError("layer_norm_rows: rank-2 only");
  int n = X.dim(0), d = X.dim(1);
  if (G.rank() != 1 || G.dim(0) != d || B.rank() != 1 || B.dim(0) != d)
    throw UsageError("layer_norm_rows: affine params must be (d,)");
  Tensor out({n, d});
  std::vector<double> mean(static_cast<size_t>(n)), inv_std(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double* xi = X.data() + static_cast<int64_t>(i) * d;
    double mu = 0;
    for (int j = 0; j < d; ++j) mu += xi[j];
    mu /= d;
    double var = 0;
    for (int j = 0; j < d; ++j) {
      double dv = xi[j] - mu;
      var += dv * dv;
    }
    var /= d;
    double is = 1.0 / std::sqrt(var + eps);
    mean[static_cast<size_t>(i)] = mu;
    inv_std[static_cast<size_t>(i)] = is;
    double* oi = out.data() + static_cast<int64_t>(i) * d;
    for (int j = 0; j < d; ++j) oi[j] = G[j] * (xi[j] - mu) * is + B[j];
  }
  bool rg = requires_grad(x) || requires_grad(gamma) || requires_grad(beta);
  NodeId self = push(std::move(out), rg, nullptr);
  if (rg)
    nodes_[static_cast<size_t>(self)].backprop = [self, x, gamma, beta, n, d, mean = std::move(mean),
                                                  inv_std = std::move(inv_std)](Graph& gr) {
      const Tensor& go = gr.g(self);
      const Tensor& X2 = gr.val(x);
      const Tensor& G2 = gr.val(gamma);
      for (int i = 0; i < n; ++i) {
        const double* xi = X2.data() + static_cast<int64_t>(i) * d;
        const double* gi = go.data() + static_cast<int64_t>(i) * d;
        double mu = mean[static_cast<size_t>(i)], is = inv_std[static_cast<size_t>(i)];
        double sum_gg = 0, sum_ggx = 0;
        for (int j = 0; j < d; ++j) {
          double xh = (xi[j] - mu) * is;
          double gg = gi[j] * G2[j];
          sum_gg += gg;
          sum_ggx += gg * xh;
          if (gr.requires_grad(gamma)) gr.g(gamma)[j] += gi[j] * xh;
          if (gr.requires_grad(beta)) gr.g(beta)[j] += gi[j];
        }
        if (gr.requires_grad(x)) {
          double* gx = gr.g(x).data() + static_cast<int64_t>(i) * d;
          double mg = sum_gg / d, mgx = sum_ggx / d;
          for (int j = 0; j < d; ++j) {
            double xh = (xi[j] - mu) * is;
            gx[j] += is * (gi[j] * G2[j] - mg - xh * mgx);
          }
        }
      }
    };
  return self;
}

Graph::NodeId Graph::max_over_time(NodeId x) {
  const Tensor& X = val(x);
  if (X.rank() != 3) throw UsageError("max_over_time: rank-3 only");
  int C = X.dim(0), F = X.dim(1), T = X.dim(2);
  Tensor out({F, C});
  std::vector<int> arg(static_cast<size_t>(F) * C);
  for (int f = 0; f < F; ++f)
    for (int c = 0; c < C; ++c) {
      double best = X.at(c, f, 0);
      int bt = 0;
      for (int t = 1; t < T; ++t)
        if (X.at(c, f, t) > best) {
          best = X.at(c, f, t);
          bt = t;
        }
      out.at(f, c) = best;
      arg[static_cast<size_t>(f) * C + c] = bt;
    }
  bool rg = requires_grad(x);
  NodeId self = push(std::move(out), rg, nullptr);
  if (rg)
    nodes_[static_cast<size_t>(self)].backprop = [self, x, C, F, arg = std::move(arg)](Graph& gr) {
      const Tensor& go = gr.g(self);
      Tensor& gx = gr.g(x);
      for (int f = 0; f < F; ++f)
        for (int c = 0; c < C; ++c) gx.at(c, f, arg[static_cast<size_t>(f) * C + c]) += go.at(f, c);
    };
  return self;
}

Graph::NodeId Graph::max_over_freq(NodeId x) {
  const Tensor& X = val(x);
  if (X.rank() != 3) throw UsageError("max_over_freq: rank-3 only");
  int C = X.dim(0), F = X.dim(1), T = X.dim(2);
  Tensor out({T, C});
  std::vector<int> arg(static_cast<size_t>(T) * C);
  for (int t = 0; t < T; ++t)
    for (int c = 0; c < C; ++c) {
      double best = X.at(c, 0, t);
      int bf = 0;
      for (int f = 1; f < F; ++f)
        if (X.at(c, f, t) > best) {
          best = X.at(c, f, t);
          bf = f;
        }
      out.at(t, c) = best;
      arg[static_cast<size_t>(t) * C + c] = bf;
    }
  bool rg = requires_grad(x);
  NodeId self = push(std::move(out), rg, nullptr);
  if (rg)
    nodes_[static_cast<size_t>(self)].backprop = [self, x, C, T, arg = std::move(arg)](Graph& gr) {
      const Tensor& go = gr.g(self);
      Tensor& gx = gr.g(x);
      for (int t = 0; t < T; ++t)
        for (int c = 0; c < C; ++c) gx.at(c, arg[static_cast<size_t>(t) * C + c], t) += go.at(t, c);
    };
  return self;
}

}  // namespace spoofkit
