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

#include "fess/gradcheck_suite.hpp"

#include <cmath>
#include <numeric>

#include "fess/error.hpp"
#include "fess/losses.hpp"
#include "fess/model.hpp"
#include "fess/ops.hpp"
#include "fess/rng.hpp"

namespace fess {

void GradcheckSettings::validate() const {
  if (seeds < 1) throw ValidationError("gradcheck.seeds must be >= 1");
  if (!(step > 0.0)) throw ValidationError("gradcheck.step must be positive");
  if (!(op_tolerance > 0.0) || !(network_tolerance > 0.0)) {
    throw ValidationError("gradcheck tolerances must be positive");
  }
  if (network_coords < 1) {
    throw ValidationError("gradcheck.network_coords must be >= 1");
  }
}

namespace {

const Shape kBatch{2, 4, 4, 4};
const Shape kFeatures{2, 4, 4, 4, 2};
const Shape kEmbedding{2, 4, 4, 4, 3};

Volume uniform(Rng& rng, const Shape& shape, double lo, double hi) {
  std::vector<double> v(shape_size(shape));
  for (double& x : v) x = rng.uniform(lo, hi);
  return Volume(shape, std::move(v));
}

// Magnitudes in [0.1, 1] with random sign.
Volume signed_away_from_zero(Rng& rng, const Shape& shape) {
  std::vector<double> v(shape_size(shape));
  for (double& x : v) {
    x = rng.uniform(0.1, 1.0) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
  }
  return Volume(shape, std::move(v));
}

// Distinct values spaced 0.01 apart, shuffled.
Volume distinct(Rng& rng, const Shape& shape) {
  std::vector<double> v(shape_size(shape));
  std::iota(v.begin(), v.end(), 0.0);
  for (std::size_t i = v.size(); i-- > 1;) std::swap(v[i], v[rng.below(i + 1)]);
  for (double& x : v) x = 0.01 * x - 0.5;
  return Volume(shape, std::move(v));
}

BinaryMask random_mask(Rng& rng, const Shape& shape) {
  std::vector<double> v(shape_size(shape));
  for (double& x : v) x = rng.uniform() < 0.3 ? 1.0 : 0.0;
  return BinaryMask(Volume(shape, std::move(v)));
}

// sum(y * weights) with constant weights.
Var project(Tape& tape, Var y, const Volume& weights) {
  return ops::sum(ops::mul(y, tape.constant(weights)));
}

struct Case {
  std::string name;
  Volume x;
  ScalarFn f;
};

std::vector<Case> op_cases(Rng& rng) {
  std::vector<Case> cases;
  const Volume w = uniform(rng, kBatch, -1.0, 1.0);
  const Volume c = uniform(rng, kBatch, -1.0, 1.0);
  const Volume pos = uniform(rng, kBatch, 0.5, 1.5);

  auto unary = [&](std::string name, Volume x, Var (*op)(Var)) {
    cases.push_back({std::move(name), std::move(x),
                     [w, op](Tape& t, Var v) { return project(t, op(v), w); }});
  };
  cases.push_back({"add", uniform(rng, kBatch, -1, 1), [w, c](Tape& t, Var v) {
                     return project(t, ops::add(v, t.constant(c)), w);
                   }});
  cases.push_back({"sub", uniform(rng, kBatch, -1, 1), [w, c](Tape& t, Var v) {
                     return project(t, ops::sub(t.constant(c), v), w);
                   }});
  cases.push_back({"mul", uniform(rng, kBatch, -1, 1), [w, c](Tape& t, Var v) {
                     return project(t, ops::mul(ops::mul(v, t.constant(c)), v), w);
                   }});
  cases.push_back({"scale", uniform(rng, kBatch, -1, 1), [w](Tape& t, Var v) {
                     return project(t, ops::scale(v, -2.5), w);
                   }});
  cases.push_back({"sum", uniform(rng, kBatch, -1, 1), [](Tape&, Var v) {
                     return ops::scale(ops::sum(v), 0.5);
                   }});
  cases.push_back({"mean", uniform(rng, kBatch, -1, 1), [](Tape&, Var v) {
                     return ops::scale(ops::mean(v), 3.0);
                   }});
  unary("sqrt", pos, ops::sqrt);
  unary("exp", uniform(rng, kBatch, -1, 1), ops::exp);
  unary("log", pos, ops::log);
  unary("reciprocal", pos, ops::reciprocal);
  unary("relu", signed_away_from_zero(rng, kBatch), ops::relu);
  unary("sigmoid", uniform(rng, kBatch, -2, 2), ops::sigmoid);

  const Volume conv_in = uniform(rng, kFeatures, -1, 1);
  const Volume kernel = uniform(rng, {3, 3, 3, 3, 2}, -0.5, 0.5);
  const Volume bias = uniform(rng, {3}, -0.5, 0.5);
  const Volume conv_w = uniform(rng, {2, 4, 4, 4, 3}, -1, 1);
  cases.push_back({"conv3d.input", conv_in,
                   [=](Tape& t, Var v) {
                     return project(t, ops::conv3d(v, t.constant(kernel),
                                                   t.constant(bias)),
                                    conv_w);
                   }});
  cases.push_back({"conv3d.kernel", kernel,
                   [=](Tape& t, Var v) {
                     return project(t, ops::conv3d(t.constant(conv_in), v,
                                                   t.constant(bias)),
                                    conv_w);
                   }});
  cases.push_back({"conv3d.bias", bias,
                   [=](Tape& t, Var v) {
                     return project(t, ops::conv3d(t.constant(conv_in),
                                                   t.constant(kernel), v),
                                    conv_w);
                   }});

  const Volume pool_w = uniform(rng, {2, 2, 2, 2, 2}, -1, 1);
  cases.push_back({"maxpool3d", distinct(rng, kFeatures), [pool_w](Tape& t, Var v) {
                     return project(t, ops::maxpool3d(v), pool_w);
                   }});
  const Volume up_w = uniform(rng, {2, 8, 8, 8, 2}, -1, 1);
  cases.push_back({"upsample3d", uniform(rng, kFeatures, -1, 1),
                   [up_w](Tape& t, Var v) {
                     return project(t, ops::upsample3d(v), up_w);
                   }});
  const Volume other = uniform(rng, {2, 4, 4, 4, 1}, -1, 1);
  const Volume cat_w = uniform(rng, {2, 4, 4, 4, 3}, -1, 1);
  cases.push_back({"concat_channels", uniform(rng, kFeatures, -1, 1),
                   [=](Tape& t, Var v) {
                     return project(
                         t, ops::concat_channels(v, t.constant(other)), cat_w);
                   }});
  const Volume norm_w = uniform(rng, kFeatures, -1, 1);
  cases.push_back({"l2_normalize", uniform(rng, kFeatures, -1, 1),
                   [norm_w](Tape& t, Var v) {
                     return project(t, ops::l2_normalize(v, 1e-5), norm_w);
                   }});
  const Volume reshape_w = uniform(rng, {8, 32}, -1, 1);
  cases.push_back({"reshape", uniform(rng, kFeatures, -1, 1),
                   [reshape_w](Tape& t, Var v) {
                     return project(t, ops::reshape(v, {8, 32}), reshape_w);
                   }});
  return cases;
}

std::vector<Case> loss_cases(Rng& rng) {
  std::vector<Case> cases;
  const LossConfig cfg;
  const BinaryMask mask = random_mask(rng, kBatch);
  const Volume pred = uniform(rng, kBatch, 0.05, 0.95);
  const Volume current = uniform(rng, kEmbedding, -1, 1);
  const Volume previous = uniform(rng, kEmbedding, -1, 1);

  cases.push_back({"loss_dice", pred, [=](Tape&, Var v) {
                     return loss_dice(v, mask, cfg.epsilon);
                   }});
  cases.push_back({"loss_contrastive_fess", current, [=](Tape& t, Var v) {
                     return loss_contrastive_fess({v, t.constant(previous)}, cfg);
                   }});
  cases.push_back({"loss_ntxent", current, [=](Tape& t, Var v) {
                     return loss_ntxent({v, t.constant(previous)}, cfg.delta);
                   }});
  cases.push_back({"loss_infonce", current, [=](Tape& t, Var v) {
                     return loss_infonce({v, t.constant(previous)}, cfg.delta);
                   }});
  for (LossVariant variant : {LossVariant::kFess, LossVariant::kNtXent,
                              LossVariant::kInfoNce}) {
    LossConfig vc = cfg;
    vc.variant = variant;
    const std::string name = "loss_total." + std::string(to_string(variant));
    cases.push_back({name + ".pred", pred, [=](Tape& t, Var v) {
                       const EmbeddingPair pair{t.constant(current),
                                                t.constant(previous)};
                       return loss_fess(v, mask, pair, vc).total;
                     }});
    // Embedding path checked at lambda = 0.5, eta = 1.
    LossConfig ec = vc;
    ec.lambda = 0.5;
    ec.eta = 1.0;
    cases.push_back({name + ".embedding", current, [=](Tape& t, Var v) {
                       const EmbeddingPair pair{v, t.constant(previous)};
                       return loss_fess(t.constant(pred), mask, pair, ec).total;
                     }});
  }
  return cases;
}

std::vector<GradcheckCase> network_cases(const GradcheckSettings& settings,
                                         std::uint64_t seed, Rng& rng) {
  const UNet3DParams params = init_params(seed, 1);
  const Shape in_shape{1, 4, 4, 4};
  const Volume input = uniform(rng, in_shape, 0.0, 1.0);
  const BinaryMask mask = random_mask(rng, in_shape);
  const Volume previous = uniform(rng, {1, 1, 1, 1, 32}, -1, 1);
  const LossConfig cfg;

  std::vector<GradcheckCase> out;
  for (std::size_t t = 0; t < UNet3DParams::kTensors; ++t) {
    ScalarFn f = [&, t](Tape& tape, Var v) {
      BoundParams bound = bind_params(tape, params, /*frozen=*/true);
      bound.tensors[t] = v;
      const ForwardOutput fw = forward(bound, tape.constant(input));
      const EmbeddingPair pair{fw.embedding, tape.constant(previous)};
      return loss_fess(fw.probs, mask, pair, cfg).total;
    };
    const Volume& x = params.tensors[t];
    const std::vector<std::size_t> coords =
        sample_coordinates(x.size(), settings.network_coords, rng);
    GradcheckCase c;
    c.name = "network." + std::string(UNet3DParams::tensor_name(t));
    c.seed = seed;
    c.tolerance = settings.network_tolerance;
    c.report = finite_diff_check(f, x, settings.step, c.tolerance, coords);
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace

std::vector<GradcheckCase> run_gradcheck_suite(const GradcheckSettings& settings,
                                               std::uint64_t seed,
                                               const GradcheckCallback& on_case) {
  settings.validate();
  std::vector<GradcheckCase> results;
  auto emit = [&](GradcheckCase c) {
    if (on_case) on_case(c);
    results.push_back(std::move(c));
  };
  for (std::size_t s = 0; s < settings.seeds; ++s) {
    const std::uint64_t case_seed = Rng::stream(seed, "gradcheck", s).next_u64();
    Rng rng(case_seed);
    std::vector<Case> cases = op_cases(rng);
    std::vector<Case> losses = loss_cases(rng);
    cases.insert(cases.end(), std::make_move_iterator(losses.begin()),
                 std::make_move_iterator(losses.end()));
    for (Case& k : cases) {
      GradcheckCase c;
      c.name = std::move(k.name);
      c.seed = case_seed;
      c.tolerance = settings.op_tolerance;
      c.report = finite_diff_check(k.f, k.x, settings.step, c.tolerance);
      emit(std::move(c));
    }
    for (GradcheckCase& c : network_cases(settings, case_seed, rng)) {
      emit(std::move(c));
    }
  }
  return results;
}

}  // namespace fess
