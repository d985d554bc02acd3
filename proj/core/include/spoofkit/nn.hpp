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

#include <map>
#include <string>
#include <vector>

#include "spoofkit/graph.hpp"

namespace spoofkit {

// Named model parameters. Ordered map so initialization, checkpointing and
// optimizer walks are all deterministic.
class Parameters {
 public:
  struct Entry {
    Tensor value;
    bool trainable = true;
  };

  Tensor& declare(const std::string& name, Tensor init, bool trainable = true);
  bool has(const std::string& name) const { return map_.count(name) > 0; }
  Entry& entry(const std::string& name);
  const Entry& entry(const std::string& name) const;
  Tensor& value(const std::string& name) { return entry(name).value; }
  const Tensor& value(const std::string& name) const { return entry(name).value; }

  std::vector<std::string> names() const;
  std::vector<std::string> trainable_names() const;
  int64_t count(bool trainable_only = false) const;
  void set_trainable_by_prefix(const std::string& prefix, bool trainable);

  auto begin() { return map_.begin(); }
  auto end() { return map_.end(); }
  auto begin() const { return map_.begin(); }
  auto end() const { return map_.end(); }
  size_t size() const { return map_.size(); }

 private:
  std::map<std::string, Entry> map_;
};

// One forward pass worth of state: the tape, the parameter bindings and the
// stochastic bits (dropout) that only exist in training mode.
struct FwdCtx {
  Graph& g;
  Parameters& params;
  bool training = false;
  double dropout = 0.0;
  Rng* dropout_rng = nullptr;

  FwdCtx(Graph& graph, Parameters& parameters, bool train = false, double drop = 0.0,
         Rng* rng = nullptr)
      : g(graph), params(parameters), training(train), dropout(drop), dropout_rng(rng) {}

  Graph::NodeId use(const std::string& name);
  Graph::NodeId maybe_dropout(Graph::NodeId x);
  const std::map<std::string, Graph::NodeId>& bindings() const { return bound_; }

 private:
  std::map<std::string, Graph::NodeId> bound_;
};

// name -> accumulated gradient for every trainable parameter bound in ctx
void accumulate_grads(const FwdCtx& ctx, std::map<std::string, Tensor>& sink);

struct Linear {
  std::string w_name, b_name;
  int in = 0, out = 0;

  void init(Parameters& P, Rng& rng, const std::string& prefix, int in_dim, int out_dim);
  Graph::NodeId forward(FwdCtx& ctx, Graph::NodeId x) const;  // (n,in) -> (n,out)
};

struct LayerNorm {
  std::string gamma_name, beta_name;
  int dim = 0;

  void init(Parameters& P, const std::string& prefix, int d);
  Graph::NodeId forward(FwdCtx& ctx, Graph::NodeId x) const;  // (n,d) rows
};

}  // namespace spoofkit
