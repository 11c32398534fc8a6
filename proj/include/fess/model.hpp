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

#include <array>
#include <cstdint>
#include <filesystem>
#include <string_view>

#include "fess/tape.hpp"
#include "fess/volume.hpp"

namespace fess {

/// Two-level 3D U-Net: enc1 (C_in->8), enc2 (8->16), bottleneck (16->32),
/// dec2 (32+16->16), dec1 (16+8->8), head (8->1). Every layer is a 3x3x3
/// convolution with stride 1 and zero padding 1.
struct UNet3DParams {
  static constexpr std::size_t kLayers = 6;
  static constexpr std::size_t kTensors = 2 * kLayers;

  /// "enc1.kernel", "enc1.bias", ... in checkpoint order.
  static std::string_view tensor_name(std::size_t index);

  std::size_t input_channels = 1;
  /// Kernel (c_out,3,3,3,c_in) and bias (c_out) per layer, interleaved.
  std::array<Volume, kTensors> tensors;

  std::size_t parameter_count() const;
  bool operator==(const UNet3DParams&) const = default;
};

/// He initialization: kernel entries ~ N(0, 2 / fan_in) with
/// fan_in = 27 * c_in, biases zero. Deterministic per seed.
UNet3DParams init_params(std::uint64_t seed, std::size_t input_channels = 1);

/// Same architecture with every parameter set to zero.
UNet3DParams zero_params(std::size_t input_channels = 1);

/// Parameters recorded on a tape, in tensor order.
struct BoundParams {
  std::array<Var, UNet3DParams::kTensors> tensors;
};

/// Binds parameters as differentiable leaves, or as constants when frozen.
BoundParams bind_params(Tape& tape, const UNet3DParams& params,
                        bool frozen = false);

struct ForwardOutput {
  Var probs;      // (n, i, j, k), sigmoid outputs
  Var embedding;  // (n, i/4, j/4, k/4, 32), bottleneck activations
};

/// input: (n,i,j,k) single channel or (n,i,j,k,c). Spatial extents must be
/// divisible by 4.
ForwardOutput forward(const BoundParams& params, Var input);

/// Gradients for every tensor after tape.backward().
std::array<Volume, UNet3DParams::kTensors> collect_grads(
    const Tape& tape, const BoundParams& bound);

/// p <- p - lr * g for every parameter.
void sgd_step(UNet3DParams& params,
              const std::array<Volume, UNet3DParams::kTensors>& grads,
              double lr);

/// All parameters concatenated in tensor order, as a rank-1 volume.
Volume flatten(const UNet3DParams& params);
UNet3DParams unflatten(const Volume& flat, std::size_t input_channels);

/// Checkpoint format: magic "FESSCKPT", u32 version, then for each tensor in
/// order: u32 name length, name bytes, u32 rank, u32 extents, little-endian
/// f64 values.
inline constexpr std::uint32_t kCheckpointVersion = 1;
void save_checkpoint(const std::filesystem::path& path,
                     const UNet3DParams& params);
UNet3DParams load_checkpoint(const std::filesystem::path& path);

}  // namespace fess
