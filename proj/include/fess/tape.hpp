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

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <deque>
#include <vector>

#include "fess/volume.hpp"

namespace fess {

class Tape;

/// Handle to a value recorded on a Tape.
struct Var {
  Tape* tape = nullptr;
  std::size_t id = 0;
};

/// What a backward function sees for one record.
struct BackwardContext {
  const Volume& output;
  std::span<const double> output_grad;
  std::span<const Volume* const> inputs;
  /// Gradient accumulators for the inputs; null where the input is detached.
  std::span<std::vector<double>* const> input_grads;
};

using BackwardFn = std::function<void(const BackwardContext&)>;

/// Reverse-mode recording. Records are appended in evaluation order, which is
/// a topological order by construction, so backward is a single reverse scan.
///
/// Gradients accumulate: calling backward twice without zero_grad() doubles
/// every gradient. A tape is not thread-safe; use one tape per thread.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// Differentiable input.
  Var leaf(Volume value);
  /// Input that takes part in the forward pass but never receives gradient.
  Var constant(Volume value);

  /// Appends a record. The output is detached when every input is detached.
  Var record(std::string_view kind, std::span<const Var> inputs, Volume value,
             BackwardFn backward);

  const Volume& value(Var v) const;
  /// Accumulated gradient, zeros when nothing has flowed into v.
  Volume grad(Var v) const;
  bool detached(Var v) const;
  std::string_view kind(Var v) const;
  std::size_t size() const noexcept { return entries_.size(); }

  void backward(Var loss);
  void zero_grad();

 private:
  struct Entry {
    std::string kind;
    std::vector<std::size_t> inputs;
    Volume value;
    bool detached = false;
    BackwardFn backward;
    std::vector<double> grad;  // empty until first accumulation
  };

  const Entry& entry(Var v) const;

  // deque keeps value references stable while records are appended.
  std::deque<Entry> entries_;
};

}  // namespace fess
