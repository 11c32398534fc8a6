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

#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "fess/tape.hpp"
#include "fess/volume.hpp"

namespace fess {

enum class LossVariant { kFess, kDiceOnly, kNtXent, kInfoNce };

std::string_view to_string(LossVariant variant);
/// Accepts "fess", "dice_only", "ntxent" and "infonce".
std::optional<LossVariant> parse_loss_variant(std::string_view name);

/// Scalar hyperparameters of the composite loss.
struct LossConfig {
  double lambda = 0.9;    // weight of the Dice term
  double epsilon = 1e-5;  // Dice smoothing, also the normalization floor
  double delta = 0.5;     // temperature
  double eta = 1e-5;      // scale applied to the previous-batch contrastive term
  LossVariant variant = LossVariant::kFess;

  /// Throws ValidationError naming the offending field.
  void validate() const;
};

/// Current-batch embedding (on the tape) and the previous batch's embedding.
/// Both are (n, i, j, k, l). No gradient ever flows into `previous`.
struct EmbeddingPair {
  Var current;
  Var previous;
};

/// Soft Dice loss 1 - (2 sum(p*y) + eps) / (sum(y) + sum(p) + eps) with all
/// sums taken over every axis, batch included.
Var loss_dice(Var pred, const BinaryMask& truth, double epsilon);

/// Per-sample projection of the flattened (i,j,k,l) block onto the unit
/// sphere; blocks with norm below epsilon are divided by epsilon instead.
Var normalize_embedding(Var embedding, double epsilon);

/// Dot product of two equal-length unit blocks.
double similarity(std::span<const double> u, std::span<const double> v);

/// Previous-batch contrastive term. For each sample with unit blocks u and v
/// of length D:
///
///   loss_n = -log( exp(u.v / delta) / sum_d exp(u_d v_d / delta) )
///
/// and the result is eta * mean_n(loss_n).
Var loss_contrastive_fess(const EmbeddingPair& pair, const LossConfig& cfg);

/// NT-Xent (simCLR-style): anchor u_n, positive v_n, negatives v_m (m != n).
Var loss_ntxent(const EmbeddingPair& pair, double temperature);

/// InfoNCE: like NT-Xent but negatives also include u_m (m != n).
Var loss_infonce(const EmbeddingPair& pair, double temperature);

struct FessTerms {
  Var total;
  Var dice;
  /// Absent when no comparison batch exists or the variant has none.
  std::optional<Var> contrastive;
  /// Weight actually applied to the Dice term (1 for dice_only).
  double lambda = 1.0;
};

/// lambda * dice + (1 - lambda) * contrastive, where the contrastive term is
/// chosen by cfg.variant and counts as zero when `pair` is absent.
/// dice_only returns the bare Dice term.
FessTerms loss_fess(Var pred, const BinaryMask& truth,
                    const std::optional<EmbeddingPair>& pair,
                    const LossConfig& cfg);

}  // namespace fess
