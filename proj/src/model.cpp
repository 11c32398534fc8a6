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

#include "fess/model.hpp"

#include <cmath>
#include <fstream>

#include "binary_io.hpp"
#include "fess/error.hpp"
#include "fess/ops.hpp"
#include "fess/rng.hpp"

namespace fess {

namespace {

constexpr const char* kNames[UNet3DParams::kTensors] = {
    "enc1.kernel",       "enc1.bias",       "enc2.kernel", "enc2.bias",
    "bottleneck.kernel", "bottleneck.bias", "dec2.kernel", "dec2.bias",
    "dec1.kernel",       "dec1.bias",       "head.kernel", "head.bias",
};

struct LayerShape {
  std::size_t in;
  std::size_t out;
};

std::array<LayerShape, UNet3DParams::kLayers> layer_shapes(std::size_t c_in) {
  return {{{c_in, 8}, {8, 16}, {16, 32}, {32 + 16, 16}, {16 + 8, 8}, {8, 1}}};
}

constexpr char kMagic[8] = {'F', 'E', 'S', 'S', 'C', 'K', 'P', 'T'};

}  // namespace

std::string_view UNet3DParams::tensor_name(std::size_t index) {
  if (index >= kTensors) throw ValidationError("tensor index out of range");
  return kNames[index];
}

std::size_t UNet3DParams::parameter_count() const {
  std::size_t n = 0;
  for (const Volume& t : tensors) n += t.size();
  return n;
}

UNet3DParams init_params(std::uint64_t seed, std::size_t input_channels) {
  if (input_channels < 1) throw ValidationError("input_channels must be >= 1");
  UNet3DParams p;
  p.input_channels = input_channels;
  Rng rng = Rng::stream(seed, "init_params");
  const auto shapes = layer_shapes(input_channels);
  for (std::size_t l = 0; l < shapes.size(); ++l) {
    const auto [in, out] = shapes[l];
    const double stddev = std::sqrt(2.0 / (27.0 * static_cast<double>(in)));
    std::vector<double> kernel(out * 27 * in);
    for (double& w : kernel) w = rng.normal(0.0, stddev);
    p.tensors[2 * l] = Volume({out, 3, 3, 3, in}, std::move(kernel));
    p.tensors[2 * l + 1] = Volume::zeros({out});
  }
  return p;
}

UNet3DParams zero_params(std::size_t input_channels) {
  if (input_channels < 1) throw ValidationError("input_channels must be >= 1");
  UNet3DParams p;
  p.input_channels = input_channels;
  const auto shapes = layer_shapes(input_channels);
  for (std::size_t l = 0; l < shapes.size(); ++l) {
    p.tensors[2 * l] = Volume::zeros({shapes[l].out, 3, 3, 3, shapes[l].in});
    p.tensors[2 * l + 1] = Volume::zeros({shapes[l].out});
  }
  return p;
}

BoundParams bind_params(Tape& tape, const UNet3DParams& params, bool frozen) {
  BoundParams b;
  for (std::size_t t = 0; t < UNet3DParams::kTensors; ++t) {
    b.tensors[t] = frozen ? tape.constant(params.tensors[t])
                          : tape.leaf(params.tensors[t]);
  }
  return b;
}

ForwardOutput forward(const BoundParams& params, Var input) {
  Tape& tape = *input.tape;
  const Volume& x = tape.value(input);
  const std::size_t c_in = tape.value(params.tensors[0]).extent(4);
  Var features = input;
  if (x.rank() == 4) {
    if (c_in != 1) {
      throw ValidationError("rank-4 input requires a single-channel model");
    }
    Shape s = x.shape();
    s.push_back(1);
    features = ops::reshape(input, std::move(s));
  } else if (x.rank() != 5 || x.extent(4) != c_in) {
    throw ValidationError("forward: input shape " + shape_to_string(x.shape()) +
                          " does not match a " + std::to_string(c_in) +
                          "-channel model");
  }
  const Shape& s = x.shape();
  for (std::size_t axis = 1; axis <= 3; ++axis) {
    if (s[axis] % 4 != 0) {
      throw ValidationError("forward: spatial extents must be divisible by 4, got " +
                            shape_to_string(s));
    }
  }

  auto conv = [&](Var in, std::size_t layer) {
    return ops::conv3d(in, params.tensors[2 * layer],
                       params.tensors[2 * layer + 1]);
  };
  Var enc1 = ops::relu(conv(features, 0));
  Var enc2 = ops::relu(conv(ops::maxpool3d(enc1), 1));
  Var bottleneck = ops::relu(conv(ops::maxpool3d(enc2), 2));
  Var dec2 = ops::relu(
      conv(ops::concat_channels(ops::upsample3d(bottleneck), enc2), 3));
  Var dec1 =
      ops::relu(conv(ops::concat_channels(ops::upsample3d(dec2), enc1), 4));
  Var logits = conv(dec1, 5);
  Var probs = ops::sigmoid(ops::reshape(logits, {s[0], s[1], s[2], s[3]}));
  return {probs, bottleneck};
}

std::array<Volume, UNet3DParams::kTensors> collect_grads(
    const Tape& tape, const BoundParams& bound) {
  std::array<Volume, UNet3DParams::kTensors> grads;
  for (std::size_t t = 0; t < grads.size(); ++t) {
    grads[t] = tape.grad(bound.tensors[t]);
  }
  return grads;
}

void sgd_step(UNet3DParams& params,
              const std::array<Volume, UNet3DParams::kTensors>& grads,
              double lr) {
  for (std::size_t t = 0; t < grads.size(); ++t) {
    if (grads[t].shape() != params.tensors[t].shape()) {
      throw ValidationError(std::string("sgd_step: gradient shape ") +
                            shape_to_string(grads[t].shape()) + " for " +
                            kNames[t] + " " +
                            shape_to_string(params.tensors[t].shape()));
    }
  }
  for (std::size_t t = 0; t < grads.size(); ++t) {
    const auto p = params.tensors[t].data();
    const auto g = grads[t].data();
    std::vector<double> next(p.size());
    for (std::size_t i = 0; i < next.size(); ++i) next[i] = p[i] - lr * g[i];
    params.tensors[t] = Volume(params.tensors[t].shape(), std::move(next));
  }
}

Volume flatten(const UNet3DParams& params) {
  std::vector<double> flat;
  flat.reserve(params.parameter_count());
  for (const Volume& t : params.tensors) {
    flat.insert(flat.end(), t.data().begin(), t.data().end());
  }
  const std::size_t n = flat.size();
  return Volume({n}, std::move(flat));
}

UNet3DParams unflatten(const Volume& flat, std::size_t input_channels) {
  UNet3DParams p = zero_params(input_channels);
  if (flat.size() != p.parameter_count()) {
    throw ValidationError("unflatten: expected " +
                          std::to_string(p.parameter_count()) +
                          " values, got " + std::to_string(flat.size()));
  }
  std::size_t off = 0;
  for (Volume& t : p.tensors) {
    std::vector<double> part(flat.data().begin() + off,
                             flat.data().begin() + off + t.size());
    off += t.size();
    t = Volume(t.shape(), std::move(part));
  }
  return p;
}

void save_checkpoint(const std::filesystem::path& path,
                     const UNet3DParams& params) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(kMagic, sizeof kMagic);
  detail::write_u32(out, kCheckpointVersion);
  for (std::size_t t = 0; t < UNet3DParams::kTensors; ++t) {
    const std::string_view name = kNames[t];
    detail::write_u32(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    const Volume& v = params.tensors[t];
    detail::write_u32(out, static_cast<std::uint32_t>(v.rank()));
    for (std::size_t e : v.shape()) {
      detail::write_u32(out, static_cast<std::uint32_t>(e));
    }
    detail::write_f64(out, v.data());
  }
  if (!out) throw IoError("write failed for " + path.string());
}

UNet3DParams load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  std::error_code ec;
  const auto file_size = std::filesystem::file_size(path, ec);
  detail::Reader r(in, path.string());

  char magic[8];
  r.bytes(magic, sizeof magic, "magic");
  if (!std::equal(magic, magic + 8, kMagic)) {
    throw IoError(path.string() + ": bad magic, expected FESSCKPT");
  }
  const std::uint32_t version = r.u32("version");
  if (version != kCheckpointVersion) {
    throw IoError(path.string() + ": unsupported checkpoint version " +
                  std::to_string(version));
  }

  UNet3DParams p;
  for (std::size_t t = 0; t < UNet3DParams::kTensors; ++t) {
    const std::uint32_t name_len = r.u32("tensor name length");
    if (name_len > 64) throw IoError(path.string() + ": corrupt tensor name");
    std::string name(name_len, '\0');
    r.bytes(name.data(), name_len, "tensor name");
    if (name != kNames[t]) {
      throw IoError(path.string() + ": expected tensor " + kNames[t] +
                    ", found '" + name + "'");
    }
    const std::uint32_t rank = r.u32("rank");
    const std::uint32_t want_rank = t % 2 == 0 ? 5 : 1;
    if (rank != want_rank) {
      throw IoError(path.string() + ": tensor " + name + " has rank " +
                    std::to_string(rank));
    }
    Shape shape(rank);
    std::uint64_t count = 1;
    for (auto& e : shape) {
      e = r.u32("extent");
      if (e == 0) throw IoError(path.string() + ": zero extent in " + name);
      count *= e;
      if (!ec && count * 8 > file_size) {
        throw IoError(path.string() + ": extents of " + name +
                      " exceed the file size");
      }
    }
    std::vector<double> data(count);
    r.f64(data, "tensor data");
    try {
      p.tensors[t] = Volume(std::move(shape), std::move(data));
    } catch (const Error& e) {
      throw IoError(path.string() + ": " + name + ": " + e.what());
    }
  }
  r.expect_end();

  p.input_channels = p.tensors[0].extent(4);
  const UNet3DParams ref = zero_params(p.input_channels);
  for (std::size_t t = 0; t < UNet3DParams::kTensors; ++t) {
    if (p.tensors[t].shape() != ref.tensors[t].shape()) {
      throw IoError(path.string() + ": tensor " + kNames[t] + " has shape " +
                    shape_to_string(p.tensors[t].shape()) + ", expected " +
                    shape_to_string(ref.tensors[t].shape()));
    }
  }
  return p;
}

}  // namespace fess
