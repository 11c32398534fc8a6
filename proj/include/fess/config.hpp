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

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "fess/data.hpp"
#include "fess/experiments.hpp"
#include "fess/gradcheck_suite.hpp"
#include "fess/trainer.hpp"

namespace fess {

/// Everything a command needs. The file format is one `key = value` pair per
/// line; `#` starts a comment. Keys:
///
///   seed, jobs
///   loss.variant, loss.lambda, loss.epsilon, loss.delta, loss.eta
///   trainer.batch_size, trainer.learning_rate, trainer.steps,
///   trainer.eval_every, trainer.threshold
///   data.count, data.extent, data.min_ellipsoids, data.max_ellipsoids,
///   data.min_radius, data.max_radius, data.foreground_mean,
///   data.background_mean, data.noise_sigma
///   experiment.variants, experiment.train_sizes (comma-separated lists),
///   experiment.repeats, experiment.pool_size, experiment.train_fraction
///   gradcheck.seeds, gradcheck.step, gradcheck.op_tolerance,
///   gradcheck.network_tolerance, gradcheck.network_coords
///
/// `seed` is the single source of randomness: it becomes the trainer seed,
/// the data seed and the experiment seed.
struct RunConfig {
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  std::size_t data_count = 50;
  TrainerConfig trainer;
  SyntheticSpec data;
  ExperimentSpec experiment;  // trainer, data and seed are filled on use
  GradcheckSettings gradcheck;

  void validate() const;

  TrainerConfig trainer_config() const;
  SyntheticSpec synthetic_spec() const;
  ExperimentSpec experiment_spec() const;
};

/// Parses config text. Syntax errors, unknown or repeated keys and malformed
/// values throw ValidationError naming the key and line. Does not validate
/// value ranges; call validate() for that.
RunConfig parse_config(std::string_view text);

/// Reads and parses a file; a missing or unreadable file is an IoError.
RunConfig load_config(const std::filesystem::path& path);

/// Every key in sorted order, one `key = value` line each. Parsing the result
/// gives back an identical config.
std::string canonical_text(const RunConfig& cfg);

/// FNV-1a of canonical_text() without the `jobs` line, which never affects
/// results.
std::uint64_t config_hash(const RunConfig& cfg);

/// "config_hash=<16 hex digits> seed=<seed>", the header of every output.
std::string provenance(const RunConfig& cfg);

}  // namespace fess
