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

#include "fess/losses.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "fess/error.hpp"
#include "fess/ops.hpp"

namespace fess {

std::string_view to_string(LossVariant variant) {
  switch (variant) {
    case LossVariant::kFess: return "fess";
    case LossVariant::kDiceOnly: return "dice_only";
    case LossVariant::kNtXent: return "ntxent";
    case LossVariant::kInfoNce: return "infonce";
  }
  return "unknown";
}

std::optional<LossVariant> parse_loss_variant(std::string_view name) {
  for (auto v : {LossVariant::kFess, LossVariant::kDiceOnly,
                 LossVariant::kNtXent, LossVariant::kInfoNce}) {
    if (to_string(v) == name) return v;
  }
  return std::nullopt;
}

namespace {

void require_finite(std::string_view op, double value) {
  if (!std::isfinite(value)) {
    throw NumericalError(std::string(op) + ": non-finite intermediate value");
  }
}

}  // namespace

void LossConfig::validate() const {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw ValidationError("lambda must lie in [0,1]");
  }
  if (!(epsilon > 0.0)) throw ValidationError("epsilon must be positive");
  if (!(delta > 0.0)) throw ValidationError("delta must be positive");
  if (!(eta > 0.0)) throw ValidationError("eta must be positive");
}

Var loss_dice(Var pred, const BinaryMask& truth, double epsilon) {
  if (!(epsilon > 0.0)) throw ValidationError("epsilon must be positive");
  const Volume& p = pred.tape->value(pred);
  if (p.shape() != truth.shape()) {
    throw ValidationError("loss_dice: prediction shape " +
                          shape_to_string(p.shape()) + " vs truth shape " +
                          shape_to_string(truth.shape()));
  }
  const auto y = truth.data();
  double sum_y = 0.0, sum_p = 0.0, sum_yp = 0.0;
  for (std::size_t v = 0; v < y.size(); ++v) {
    sum_y += y[v];
    sum_p += p[v];
    sum_yp += y[v] * p[v];
  }
  const double num = 2.0 * sum_yp + epsilon;
  const double den = sum_y + sum_p + epsilon;
  const double loss = 1.0 - num / den;
  require_finite("loss_dice", loss);
  Volume out = Volume::scalar(loss);

  const Var inputs[] = {pred};
  return pred.tape->record(
      "loss_dice", inputs, std::move(out),
      [mask = truth, num, den](const BackwardContext& ctx) {
        auto* g = ctx.input_grads[0];
        if (!g) return;
        const auto y = mask.data();
        const double upstream = ctx.output_grad[0];
        const double den2 = den * den;
        for (std::size_t v = 0; v < g->size(); ++v) {
          (*g)[v] -= upstream * (2.0 * y[v] * den - num) / den2;
        }
      });
}

Var normalize_embedding(Var embedding, double epsilon) {
  const Volume& e = embedding.tape->value(embedding);
  if (e.rank() != 5) {
    throw ValidationError("normalize_embedding: expected rank-5 embedding, got " +
                          shape_to_string(e.shape()));
  }
  return ops::l2_normalize(embedding, epsilon);
}

double similarity(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    throw ValidationError("similarity: block lengths " +
                          std::to_string(u.size()) + " and " +
                          std::to_string(v.size()) + " differ");
  }
  double s = 0.0;
  for (std::size_t d = 0; d < u.size(); ++d) s += u[d] * v[d];
  return s;
}

namespace {

struct Blocks {
  std::size_t samples;
  std::size_t length;
};

Blocks check_pair(std::string_view op, const EmbeddingPair& pair) {
  if (pair.current.tape == nullptr || pair.current.tape != pair.previous.tape) {
    throw ValidationError(std::string(op) +
                          ": embeddings must live on the same tape");
  }
  const Volume& cur = pair.current.tape->value(pair.current);
  const Volume& prev = pair.previous.tape->value(pair.previous);
  if (cur.shape() != prev.shape()) {
    throw ValidationError(std::string(op) + ": embedding shapes " +
                          shape_to_string(cur.shape()) + " and " +
                          shape_to_string(prev.shape()) + " differ");
  }
  if (cur.rank() != 5) {
    throw ValidationError(std::string(op) + ": expected rank-5 embeddings, got " +
                          shape_to_string(cur.shape()));
  }
  return {cur.extent(0), cur.size() / cur.extent(0)};
}

double log_sum_exp(std::span<const double> a) {
  const double m = *std::max_element(a.begin(), a.end());
  double s = 0.0;
  for (double x : a) s += std::exp(x - m);
  return m + std::log(s);
}

// Unit blocks of the previous batch, computed off-tape.
Volume normalized_previous(const EmbeddingPair& pair, double epsilon) {
  Tape scratch;
  Var v = ops::l2_normalize(
      scratch.constant(pair.previous.tape->value(pair.previous)), epsilon);
  return scratch.value(v);
}

}  // namespace

Var loss_contrastive_fess(const EmbeddingPair& pair, const LossConfig& cfg) {
  cfg.validate();
  const Blocks b = check_pair("loss_contrastive_fess", pair);
  Var u_var = normalize_embedding(pair.current, cfg.epsilon);
  const Volume& u = u_var.tape->value(u_var);
  const Volume v = normalized_previous(pair, cfg.epsilon);
  const double delta = cfg.delta;

  // Softmax over the per-coordinate terms of each sample, kept for backward.
  std::vector<double> softmax(u.size());
  std::vector<bool> floored(b.samples, false);
  std::vector<double> logits(b.length);
  double total = 0.0;
  const double log_floor = std::log(ops::kLogFloor);
  for (std::size_t n = 0; n < b.samples; ++n) {
    const std::size_t off = n * b.length;
    double s = 0.0;
    for (std::size_t d = 0; d < b.length; ++d) {
      const double prod = u[off + d] * v[off + d];
      s += prod;
      logits[d] = prod / delta;
    }
    const double lse = log_sum_exp(logits);
    require_finite("loss_contrastive_fess", lse);
    for (std::size_t d = 0; d < b.length; ++d) {
      softmax[off + d] = std::exp(logits[d] - lse);
    }
    // -log(max(numerator / denominator, floor))
    double log_ratio = s / delta - lse;
    if (log_ratio < log_floor) {
      log_ratio = log_floor;
      floored[n] = true;
    }
    total += -log_ratio;
  }
  const double scale = cfg.eta / static_cast<double>(b.samples);
  total *= scale;
  require_finite("loss_contrastive_fess", total);

  const Var inputs[] = {u_var, pair.previous};
  return u_var.tape->record(
      "loss_contrastive_fess", inputs, Volume::scalar(total),
      [b, v, softmax = std::move(softmax), floored = std::move(floored), scale,
       delta](const BackwardContext& ctx) {
        auto* g = ctx.input_grads[0];
        if (!g) return;
        const double upstream = ctx.output_grad[0] * scale / delta;
        for (std::size_t n = 0; n < b.samples; ++n) {
          if (floored[n]) continue;
          const std::size_t off = n * b.length;
          for (std::size_t d = 0; d < b.length; ++d) {
            const double vd = v[off + d];
            (*g)[off + d] += upstream * (softmax[off + d] * vd - vd);
          }
        }
      });
}

namespace {

// Shared InfoNCE-family core. Candidates for anchor n are the previous-batch
// blocks (positive at index n) and, when include_current, the current-batch
// blocks other than n.
Var contrastive_softmax(std::string_view kind, const EmbeddingPair& pair,
                        double temperature, bool include_current) {
  if (!(temperature > 0.0)) {
    throw ValidationError(std::string(kind) + ": temperature must be positive");
  }
  const Blocks b = check_pair(kind, pair);
  if (b.samples < 2) {
    throw ValidationError(std::string(kind) +
                          ": batch size must be at least 2 to form negatives");
  }
  constexpr double kNormFloor = 1e-12;
  Var u_var = ops::l2_normalize(pair.current, kNormFloor);
  const Volume& u = u_var.tape->value(u_var);
  const Volume v = normalized_previous(pair, kNormFloor);
  const std::size_t N = b.samples;
  const std::size_t D = b.length;

  auto dot = [&](const Volume& a, std::size_t i, const Volume& c,
                 std::size_t j) {
    return similarity(a.data().subspan(i * D, D), c.data().subspan(j * D, D));
  };

  // probs[n] holds softmax weights: first N over previous blocks, then N over
  // current blocks (zero for the anchor itself and when unused).
  std::vector<double> probs(N * 2 * N, 0.0);
  std::vector<double> logits;
  double total = 0.0;
  for (std::size_t n = 0; n < N; ++n) {
    logits.clear();
    for (std::size_t m = 0; m < N; ++m) logits.push_back(dot(u, n, v, m) / temperature);
    if (include_current) {
      for (std::size_t m = 0; m < N; ++m) {
        if (m != n) logits.push_back(dot(u, n, u, m) / temperature);
      }
    }
    const double lse = log_sum_exp(logits);
    require_finite(kind, lse);
    total += lse - logits[n];
    double* p = probs.data() + n * 2 * N;
    for (std::size_t m = 0; m < N; ++m) p[m] = std::exp(logits[m] - lse);
    if (include_current) {
      std::size_t c = N;
      for (std::size_t m = 0; m < N; ++m) {
        if (m != n) p[N + m] = std::exp(logits[c++] - lse);
      }
    }
  }
  total /= static_cast<double>(N);
  require_finite(kind, total);

  const Var inputs[] = {u_var, pair.previous};
  return u_var.tape->record(
      kind, inputs, Volume::scalar(total),
      [N, D, v, probs = std::move(probs), temperature](
          const BackwardContext& ctx) {
        auto* g = ctx.input_grads[0];
        if (!g) return;
        const Volume& u = *ctx.inputs[0];
        const double upstream =
            ctx.output_grad[0] / (temperature * static_cast<double>(N));
        for (std::size_t n = 0; n < N; ++n) {
          const double* p = probs.data() + n * 2 * N;
          double* gn = g->data() + n * D;
          for (std::size_t d = 0; d < D; ++d) gn[d] -= upstream * v[n * D + d];
          for (std::size_t m = 0; m < N; ++m) {
            for (std::size_t d = 0; d < D; ++d) {
              gn[d] += upstream * p[m] * v[m * D + d];
            }
            const double pc = p[N + m];
            if (pc == 0.0) continue;
            // Current-batch negative m: d(u_n . u_m) reaches both blocks.
            double* gm = g->data() + m * D;
            for (std::size_t d = 0; d < D; ++d) {
              gn[d] += upstream * pc * u[m * D + d];
              gm[d] += upstream * pc * u[n * D + d];
            }
          }
        }
      });
}

}  // namespace

Var loss_ntxent(const EmbeddingPair& pair, double temperature) {
  return contrastive_softmax("loss_ntxent", pair, temperature, false);
}

Var loss_infonce(const EmbeddingPair& pair, double temperature) {
  return contrastive_softmax("loss_infonce", pair, temperature, true);
}

FessTerms loss_fess(Var pred, const BinaryMask& truth,
                    const std::optional<EmbeddingPair>& pair,
                    const LossConfig& cfg) {
  cfg.validate();
  FessTerms terms;
  terms.dice = loss_dice(pred, truth, cfg.epsilon);
  if (cfg.variant == LossVariant::kDiceOnly) {
    terms.total = terms.dice;
    terms.lambda = 1.0;
    return terms;
  }
  terms.lambda = cfg.lambda;
  Var weighted_dice = ops::scale(terms.dice, cfg.lambda);
  if (!pair) {
    terms.total = weighted_dice;
    return terms;
  }
  switch (cfg.variant) {
    case LossVariant::kFess:
      terms.contrastive = loss_contrastive_fess(*pair, cfg);
      break;
    case LossVariant::kNtXent:
      terms.contrastive = loss_ntxent(*pair, cfg.delta);
      break;
    case LossVariant::kInfoNce:
      terms.contrastive = loss_infonce(*pair, cfg.delta);
      break;
    case LossVariant::kDiceOnly:
      break;
  }
  terms.total =
      ops::add(weighted_dice, ops::scale(*terms.contrastive, 1.0 - cfg.lambda));
  return terms;
}

}  // namespace fess
