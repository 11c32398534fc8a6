// Copyright 2026 The FESS Authors. All Rights Reserved.
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

#include "fess/tape.hpp"

#include "fess/error.hpp"

namespace fess {

Var Tape::leaf(Volume value) {
  entries_.push_back(Entry{"leaf", {}, std::move(value), false, {}, {}});
  return Var{this, entries_.size() - 1};
}

Var Tape::constant(Volume value) {
  entries_.push_back(Entry{"constant", {}, std::move(value), true, {}, {}});
  return Var{this, entries_.size() - 1};
}

Var Tape::record(std::string_view kind, std::span<const Var> inputs,
                 Volume value, BackwardFn backward) {
  Entry e{std::string(kind), {}, std::move(value), true, std::move(backward),
          {}};
  e.inputs.reserve(inputs.size());
  for (const Var& in : inputs) {
    if (in.tape != this || in.id >= entries_.size()) {
      throw ValidationError("operation '" + e.kind +
                            "' mixes nodes from different tapes");
    }
    e.inputs.push_back(in.id);
    if (!entries_[in.id].detached) e.detached = false;
  }
  entries_.push_back(std::move(e));
  return Var{this, entries_.size() - 1};
}

const Tape::Entry& Tape::entry(Var v) const {
  if (v.tape != this || v.id >= entries_.size()) {
    throw ValidationError("node does not belong to this tape");
  }
  return entries_[v.id];
}

const Volume& Tape::value(Var v) const { return entry(v).value; }

Volume Tape::grad(Var v) const {
  const Entry& e = entry(v);
  if (e.grad.empty()) return Volume::zeros(e.value.shape());
  return Volume(e.value.shape(), e.grad);
}

bool Tape::detached(Var v) const { return entry(v).detached; }

std::string_view Tape::kind(Var v) const { return entry(v).kind; }

void Tape::backward(Var loss) {
  const Entry& root = entry(loss);
  if (root.value.size() != 1) {
    throw ValidationError("backward requires a scalar loss, got shape " +
                          shape_to_string(root.value.shape()));
  }
  if (root.detached) return;

  // Gradients of this pass are collected separately and folded into the
  // persistent accumulators at the end.
  std::vector<std::vector<double>> pass(loss.id + 1);
  pass[loss.id].assign(1, 1.0);

  std::vector<const Volume*> in_values;
  std::vector<std::vector<double>*> in_grads;
  for (std::size_t id = loss.id + 1; id-- > 0;) {
    Entry& e = entries_[id];
    if (pass[id].empty() || e.detached || !e.backward) continue;
    in_values.clear();
    in_grads.clear();
    for (std::size_t in : e.inputs) {
      in_values.push_back(&entries_[in].value);
      if (entries_[in].detached) {
        in_grads.push_back(nullptr);
      } else {
        if (pass[in].empty()) pass[in].assign(entries_[in].value.size(), 0.0);
        in_grads.push_back(&pass[in]);
      }
    }
    e.backward(BackwardContext{e.value, pass[id], in_values, in_grads});
  }

  for (std::size_t id = 0; id <= loss.id; ++id) {
    if (pass[id].empty() || entries_[id].detached) continue;
    std::vector<double>& acc = entries_[id].grad;
    if (acc.empty()) {
      acc = std::move(pass[id]);
    } else {
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += pass[id][i];
    }
  }
}

void Tape::zero_grad() {
  for (Entry& e : entries_) e.grad.clear();
}

}  // namespace fess
