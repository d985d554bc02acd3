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

#include "spoofkit/nn.hpp"

namespace spoofkit {

Tensor& Parameters::declare(const std::string& name, Tensor init, bool trainable) {
  auto [it, inserted] = map_.emplace(name, Entry{std::move(init), trainable});
  if (!inserted) throw UsageError("parameter declared twice: " + name);
  return it->second.value;
}

Parameters::Entry& Parameters::entry(const std::string& name) {
  auto it = map_.find(name);
  if (it == map_.end()) throw UsageError("unknown parameter: " + name);
  return it->second;
}

const Parameters::Entry& Parameters::entry(const std::string& name) const {
  auto it = map_.find(name);
  if (it == map_.end()) throw UsageError("unknown parameter: " + name);
  return it->second;
}

std::vector<std::string> Parameters::names() const {
  std::vector<std::string> out;
  out.reserve(map_.size());
  for (const auto& [k, v] : map_) out.push_back(k);
  return out;
}

std::vector<std::string> Parameters::trainable_names() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : map_)
    if (v.trainable) out.push_back(k);
  return out;
}

int64_t Parameters::count(bool trainable_only) const {
  int64_t n = 0;
  for (const auto& [k, v] : map_)
    if (!trainable_only || v.trainable) n += v.value.size();
  return n;
}

void Parameters::set_trainable_by_prefix(const std::string& prefix, bool trainable) {
  for (auto& [k, v] : map_)
    if (k.rfind(prefix, 0) == 0) v.trainable = trainable;
}

Graph::NodeId FwdCtx::use(const std::string& name) {
  auto it = bound_.find(name);
  if (it != bound_.end()) return it->second;
  const auto& e = params.entry(name);
  Graph::NodeId id = g.leaf(e.value, e.trainable && training);
  bound_.emplace(name, id);
  return id;
}

Graph::NodeId FwdCtx::maybe_dropout(Graph::NodeId x) {
  if (!training || dropout <= 0.0 || dropout_rng == nullptr) return x;
  return g.dropout(x, dropout, *dropout_rng);
}

void accumulate_grads(const FwdCtx& ctx, std::map<std::string, Tensor>& sink) {
  for (const auto& [name, id] : ctx.bindings()) {
    if (!ctx.params.entry(name).trainable) continue;
    const Tensor& grad = ctx.g.grad(id);
    auto it = sink.find(name);
    if (it == sink.end()) {
      sink.emplace(name, grad);
    } else {
      Tensor& acc = it->second;
      for (int64_t i = 0; i < acc.size(); ++i) acc[i] += grad[i];
    }
  }
}

void Linear::init(Parameters& P, Rng& rng, const std::string& prefix, int in_dim, int out_dim) {
  in = in_dim;
  out = out_dim;
  w_name = prefix + ".weight";
  b_name = prefix + ".bias";
  P.declare(w_name, Tensor::xavier({in_dim, out_dim}, rng));
  P.declare(b_name, Tensor::zeros({out_dim}));
}

Graph::NodeId Linear::forward(FwdCtx& ctx, Graph::NodeId x) const {
  return ctx.g.add_row_broadcast(ctx.g.matmul(x, ctx.use(w_name)), ctx.use(b_name));
}

void LayerNorm::init(Parameters& P, const std::string& prefix, int d) {
  dim = d;
  gamma_name = prefix + ".gamma";
  beta_name = prefix + ".beta";
  P.declare(gamma_name, Tensor::full({d}, 1.0));
  P.declare(beta_name, Tensor::zeros({d}));
}

Graph::NodeId LayerNorm::forward(FwdCtx& ctx, Graph::NodeId x) const {
  return ctx.g.layer_norm_rows(x, ctx.use(gamma_name), ctx.use(beta_name));
}

}  // namespace spoofkit
