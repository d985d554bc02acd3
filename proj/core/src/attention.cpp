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

#include "spoofkit/attention.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace spoofkit {

void AttentionConfig::validate(int node_dim) const {
  if (num_heads < 1) throw ConfigError("attention.num_heads must be >= 1");
  if (node_dim % num_heads != 0)
    throw ConfigError("node_dim " + std::to_string(node_dim) + " not divisible by num_heads " +
                      std::to_string(num_heads));
  if (dropout < 0.0 || dropout >= 1.0) throw ConfigError("attention.dropout must be in [0,1)");
}

// ---------------------------------------------------------------------------
// pairwise graph attention
// ---------------------------------------------------------------------------

void PairwiseGat::init(Parameters& P, Rng& rng, const std::string& prefix, int d) {
  dim = d;
  att_vec = prefix + ".att.vector";
  v_w = prefix + ".value.weight";
  v_b = prefix + ".value.bias";
  P.declare(att_vec, Tensor::randn({d}, rng, 1.0 / std::sqrt(static_cast<double>(d))));
  P.declare(v_w, Tensor::xavier({d, d}, rng));
  P.declare(v_b, Tensor::zeros({d}));
}

Graph::NodeId PairwiseGat::forward(FwdCtx& ctx, Graph::NodeId x, AttentionTrace* trace) const {
  Graph& g = ctx.g;
  Graph::NodeId xa = g.mul_row_broadcast(x, ctx.use(att_vec));
  Graph::NodeId scores = g.matmul(xa, g.transpose(x));
  Graph::NodeId attn = g.softmax_rows(scores);
  if (trace) trace->head_attention.push_back(g.val(attn));
  attn = ctx.maybe_dropout(attn);
  Graph::NodeId values = g.add_row_broadcast(g.matmul(x, ctx.use(v_w)), ctx.use(v_b));
  return g.add(x, g.gelu(g.matmul(attn, values)));
}

// ---------------------------------------------------------------------------
// multi-head self-attention
// ---------------------------------------------------------------------------

namespace {

// scaled dot-product over pre-projected Q,K,V; shared by the homogeneous and
// type-aware blocks
Graph::NodeId multi_head_attend(FwdCtx& ctx, Graph::NodeId q, Graph::NodeId k, Graph::NodeId v,
                                int heads, AttentionTrace* trace) {
  Graph& g = ctx.g;
  int d = g.val(q).dim(1);
  int head_dim = d / heads;
  double scale = 1.0 / std::sqrt(static_cast<double>(head_dim));
  std::vector<Graph::NodeId> head_outs;
  head_outs.reserve(static_cast<size_t>(heads));
  for (int h = 0; h < heads; ++h) {
    Graph::NodeId qh = g.slice_cols(q, h * head_dim, head_dim);
    Graph::NodeId kh = g.slice_cols(k, h * head_dim, head_dim);
    Graph::NodeId vh = g.slice_cols(v, h * head_dim, head_dim);
    Graph::NodeId attn = g.softmax_rows(g.scale(g.matmul(qh, g.transpose(kh)), scale));
    if (trace) trace->head_attention.push_back(g.val(attn));
    attn = ctx.maybe_dropout(attn);
    head_outs.push_back(g.matmul(attn, vh));
  }
  return heads == 1 ? head_outs[0] : g.concat_cols(head_outs);
}

}  // namespace

void MhaBlock::init(Parameters& P, Rng& rng, const std::string& prefix, int d, int num_heads, int ff_dim) {
  dim = d;
  heads = num_heads;
  if (ff_dim <= 0) ff_dim = 2 * d;
  ln1.init(P, prefix + ".ln1", d);
  q.init(P, rng, prefix + ".q", d, d);
  k.init(P, rng, prefix + ".k", d, d);
  v.init(P, rng, prefix + ".v", d, d);
  out.init(P, rng, prefix + ".out", d, d);
  ln2.init(P, prefix + ".ln2", d);
  ff1.init(P, rng, prefix + ".ff1", d, ff_dim);
  ff2.init(P, rng, prefix + ".ff2", ff_dim, d);
}

Graph::NodeId MhaBlock::forward(FwdCtx& ctx, Graph::NodeId x, AttentionTrace* trace) const {
  Graph& g = ctx.g;
  if (g.val(x).dim(1) != dim) throw UsageError("mha block: node dim mismatch");
  Graph::NodeId xn = ln1.forward(ctx, x);
  Graph::NodeId attended = multi_head_attend(ctx, q.forward(ctx, xn), k.forward(ctx, xn),
                                             v.forward(ctx, xn), heads, trace);
  Graph::NodeId h = g.add(x, ctx.maybe_dropout(out.forward(ctx, attended)));
  Graph::NodeId hn = ln2.forward(ctx, h);
  Graph::NodeId ff = ff2.forward(ctx, g.gelu(ff1.forward(ctx, hn)));
  return g.add(h, ctx.maybe_dropout(ff));
}

// ---------------------------------------------------------------------------
// type-aware multi-head attention
// ---------------------------------------------------------------------------

void HeteroMha::init(Parameters& P, Rng& rng, const std::string& prefix, int d, int num_heads,
                     bool stack_node, int ff_dim) {
  dim = d;
  heads = num_heads;
  has_stack = stack_node;
  if (ff_dim <= 0) ff_dim = 2 * d;
  ln1.init(P, prefix + ".ln1", d);
  q_temporal.init(P, rng, prefix + ".q_temporal", d, d);
  q_spectral.init(P, rng, prefix + ".q_spectral", d, d);
  k_temporal.init(P, rng, prefix + ".k_temporal", d, d);
  k_spectral.init(P, rng, prefix + ".k_spectral", d, d);
  if (stack_node) {
    q_stack.init(P, rng, prefix + ".q_stack", d, d);
    k_stack.init(P, rng, prefix + ".k_stack", d, d);
  }
  v_shared.init(P, rng, prefix + ".v_shared", d, d);
  out.init(P, rng, prefix + ".out", d, d);
  ln2.init(P, prefix + ".ln2", d);
  ff1.init(P, rng, prefix + ".ff1", d, ff_dim);
  ff2.init(P, rng, prefix + ".ff2", ff_dim, d);
}

HeteroMha::Result HeteroMha::forward(FwdCtx& ctx, const NodeSetVar& temporal, const NodeSetVar& spectral,
                                     Graph::NodeId stack_in, AttentionTrace* trace) const {
  Graph& g = ctx.g;
  if (temporal.modality == spectral.modality)
    throw UsageError("hetero attention requires distinct modalities on its two inputs");
  if (g.val(temporal.id).dim(1) != dim || g.val(spectral.id).dim(1) != dim)
    throw UsageError("hetero attention: node dim mismatch");
  if (has_stack && stack_in < 0) throw UsageError("hetero attention: missing stack node input");

  int nt = g.val(temporal.id).dim(0);
  int ns = g.val(spectral.id).dim(0);
  std::vector<Graph::NodeId> parts{temporal.id, spectral.id};
  if (has_stack) parts.push_back(stack_in);
  Graph::NodeId x = g.concat_rows(parts);

  Graph::NodeId xn = ln1.forward(ctx, x);
  Graph::NodeId xt = g.slice_rows(xn, 0, nt);
  Graph::NodeId xs = g.slice_rows(xn, nt, ns);

  std::vector<Graph::NodeId> q_parts{q_temporal.forward(ctx, xt), q_spectral.forward(ctx, xs)};
  std::vector<Graph::NodeId> k_parts{k_temporal.forward(ctx, xt), k_spectral.forward(ctx, xs)};
  if (has_stack) {
    Graph::NodeId xm = g.slice_rows(xn, nt + ns, 1);
    q_parts.push_back(q_stack.forward(ctx, xm));
    k_parts.push_back(k_stack.forward(ctx, xm));
  }
  Graph::NodeId qcat = g.concat_rows(q_parts);
  Graph::NodeId kcat = g.concat_rows(k_parts);
  Graph::NodeId vcat = v_shared.forward(ctx, xn);

  Graph::NodeId attended = multi_head_attend(ctx, qcat, kcat, vcat, heads, trace);
  Graph::NodeId h = g.add(x, ctx.maybe_dropout(out.forward(ctx, attended)));
  Graph::NodeId hn = ln2.forward(ctx, h);
  Graph::NodeId ff = ff2.forward(ctx, g.gelu(ff1.forward(ctx, hn)));
  Graph::NodeId y = g.add(h, ctx.maybe_dropout(ff));

  Result r;
  r.temporal = NodeSetVar{g.slice_rows(y, 0, nt), temporal.modality};
  r.spectral = NodeSetVar{g.slice_rows(y, nt, ns), spectral.modality};
  if (has_stack) r.stack = g.slice_rows(y, nt + ns, 1);
  return r;
}

// ---------------------------------------------------------------------------
// graph pooling
// ---------------------------------------------------------------------------

std::vector<int> top_k_stable(const Tensor& scores, int k) {
  int n = scores.dim(0);
  std::vector<int> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return scores[a] > scores[b]; });
  order.resize(static_cast<size_t>(std::min(k, n)));
  std::sort(order.begin(), order.end());
  return order;
}

void GraphPool::init(Parameters& P, Rng& rng, const std::string& prefix, int d) {
  dim = d;
  gate_w = prefix + ".gate.weight";
  gate_b = prefix + ".gate.bias";
  P.declare(gate_w, Tensor::randn({d}, rng, 1.0 / std::sqrt(static_cast<double>(d))));
  P.declare(gate_b, Tensor::zeros({1}));
}

NodeSetVar GraphPool::forward(FwdCtx& ctx, const NodeSetVar& nodes, double keep_ratio, int keep_count) const {
  Graph& g = ctx.g;
  int n = g.val(nodes.id).dim(0);
  int k;
  if (keep_count > 0) {
    k = std::min(keep_count, n);
  } else {
    if (!(keep_ratio > 0.0 && keep_ratio <= 1.0))
      throw ConfigError("graph pool keep_ratio must be in (0,1]");
    k = static_cast<int>(std::ceil(keep_ratio * n));
  }
  Graph::NodeId score = g.add_scalar_broadcast(g.matvec(nodes.id, ctx.use(gate_w)), ctx.use(gate_b));
  std::vector<int> idx = top_k_stable(g.val(score), k);
  Graph::NodeId kept = g.gather_rows(nodes.id, idx);
  Graph::NodeId gates = g.sigmoid(g.gather_vec(score, idx));
  return NodeSetVar{g.mul_col_broadcast(kept, gates), nodes.modality};
}

}  // namespace spoofkit
