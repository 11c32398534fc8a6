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

#include "fess/tape.hpp"

/// Differentiable operation registry.
///
/// Feature maps are channel-last: (n, i, j, k, c). Convolution kernels have
/// shape (c_out, 3, 3, 3, c_in) and biases (c_out).
namespace fess::ops {

Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var a, double factor);

/// Sum over all elements; returns a scalar.
Var sum(Var a);
Var mean(Var a);

Var sqrt(Var a);
Var exp(Var a);
/// log(max(x, 1e-12)); zero gradient where the guard is active.
Var log(Var a);
Var reciprocal(Var a);
Var relu(Var a);
Var sigmoid(Var a);

/// 3x3x3 convolution, stride 1, zero padding 1.
Var conv3d(Var input, Var kernel, Var bias);
/// 2x2x2 max pooling over the spatial axes; extents must be even.
Var maxpool3d(Var input);
/// Nearest-neighbour upsampling by 2 along each spatial axis.
Var upsample3d(Var input);
/// Concatenation along the last (channel) axis.
Var concat_channels(Var a, Var b);

/// Scales each slice along axis 0 by 1 / max(||slice||_2, epsilon).
Var l2_normalize(Var a, double epsilon);

/// Metadata-only shape change.
Var reshape(Var a, Shape shape);

inline constexpr double kLogFloor = 1e-12;

}  // namespace fess::ops
