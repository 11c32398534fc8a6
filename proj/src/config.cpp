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

#include "fess/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "fess/error.hpp"
#include "fess/rng.hpp"

namespace fess {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

struct Location {
  std::string_view key;
  std::size_t line;
};

[[noreturn]] void fail(const Location& at, const std::string& what) {
  throw ValidationError("line " + std::to_string(at.line) + ": key '" +
                        std::string(at.key) + "': " + what);
}

std::uint64_t parse_u64(std::string_view v, const Location& at) {
  std::uint64_t out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    fail(at, "expected a non-negative integer, got '" + std::string(v) + "'");
  }
  return out;
}

std::size_t parse_size(std::string_view v, const Location& at) {
  return static_cast<std::size_t>(parse_u64(v, at));
}

double parse_real(std::string_view v, const Location& at) {
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || res.ec != std::errc() || res.ptr != v.data() + v.size() ||
      !std::isfinite(out)) {
    fail(at, "expected a finite number, got '" + std::string(v) + "'");
  }
  return out;
}

std::vector<std::string_view> split_list(std::string_view v,
                                         const Location& at) {
  std::vector<std::string_view> items;
  while (true) {
    const auto comma = v.find(',');
    const std::string_view item = trim(v.substr(0, comma));
    if (item.empty()) fail(at, "empty list element");
    items.push_back(item);
    if (comma == std::string_view::npos) break;
    v.remove_prefix(comma + 1);
  }
  return items;
}

LossVariant parse_variant(std::string_view v, const Location& at) {
  const auto parsed = parse_loss_variant(v);
  if (!parsed) {
    fail(at, "unknown loss variant '" + std::string(v) +
                 "' (expected fess, dice_only, ntxent or infonce)");
  }
  return *parsed;
}

using Setter = std::function<void(RunConfig&, std::string_view, const Location&)>;
using Getter = std::function<std::string(const RunConfig&)>;

struct Field {
  Setter set;
  Getter get;
};

std::string show(double v) { return format_double(v); }
std::string show(std::uint64_t v) { return std::to_string(v); }

template <typename Member>
Field real_field(Member member) {
  return {[member](RunConfig& c, std::string_view v, const Location& at) {
            member(c) = parse_real(v, at);
          },
          [member](const RunConfig& c) {
            return show(member(c));
          }};
}

template <typename Member>
Field size_field(Member member) {
  return {[member](RunConfig& c, std::string_view v, const Location& at) {
            member(c) = parse_size(v, at);
          },
          [member](const RunConfig& c) {
            return show(static_cast<std::uint64_t>(member(c)));
          }};
}

const std::map<std::string, Field, std::less<>>& fields() {
  static const std::map<std::string, Field, std::less<>> table = [] {
    std::map<std::string, Field, std::less<>> t;
    t["seed"] = {[](RunConfig& c, std::string_view v, const Location& at) {
                   c.seed = parse_u64(v, at);
                 },
                 [](const RunConfig& c) { return show(c.seed); }};
    t["jobs"] = size_field([](auto& c) -> auto& { return c.jobs; });

    t["loss.variant"] = {
        [](RunConfig& c, std::string_view v, const Location& at) {
          c.trainer.loss.variant = parse_variant(v, at);
        },
        [](const RunConfig& c) {
          return std::string(to_string(c.trainer.loss.variant));
        }};
    t["loss.lambda"] =
        real_field([](auto& c) -> auto& { return c.trainer.loss.lambda; });
    t["loss.epsilon"] =
        real_field([](auto& c) -> auto& { return c.trainer.loss.epsilon; });
    t["loss.delta"] =
        real_field([](auto& c) -> auto& { return c.trainer.loss.delta; });
    t["loss.eta"] =
        real_field([](auto& c) -> auto& { return c.trainer.loss.eta; });

    t["trainer.batch_size"] = size_field(
        [](auto& c) -> auto& { return c.trainer.batch_size; });
    t["trainer.learning_rate"] = real_field(
        [](auto& c) -> auto& { return c.trainer.learning_rate; });
    t["trainer.steps"] =
        size_field([](auto& c) -> auto& { return c.trainer.steps; });
    t["trainer.eval_every"] = size_field(
        [](auto& c) -> auto& { return c.trainer.eval_every; });
    t["trainer.threshold"] =
        real_field([](auto& c) -> auto& { return c.trainer.threshold; });

    t["data.count"] =
        size_field([](auto& c) -> auto& { return c.data_count; });
    t["data.extent"] =
        size_field([](auto& c) -> auto& { return c.data.extent; });
    t["data.min_ellipsoids"] = size_field(
        [](auto& c) -> auto& { return c.data.min_ellipsoids; });
    t["data.max_ellipsoids"] = size_field(
        [](auto& c) -> auto& { return c.data.max_ellipsoids; });
    t["data.min_radius"] =
        real_field([](auto& c) -> auto& { return c.data.min_radius; });
    t["data.max_radius"] =
        real_field([](auto& c) -> auto& { return c.data.max_radius; });
    t["data.foreground_mean"] = real_field(
        [](auto& c) -> auto& { return c.data.foreground_mean; });
    t["data.background_mean"] = real_field(
        [](auto& c) -> auto& { return c.data.background_mean; });
    t["data.noise_sigma"] =
        real_field([](auto& c) -> auto& { return c.data.noise_sigma; });

    t["experiment.variants"] = {
        [](RunConfig& c, std::string_view v, const Location& at) {
          std::vector<LossVariant> out;
          for (std::string_view item : split_list(v, at)) {
            out.push_back(parse_variant(item, at));
          }
          c.experiment.variants = std::move(out);
        },
        [](const RunConfig& c) {
          std::string s;
          for (LossVariant v : c.experiment.variants) {
            if (!s.empty()) s += ',';
            s += to_string(v);
          }
          return s;
        }};
    t["experiment.train_sizes"] = {
        [](RunConfig& c, std::string_view v, const Location& at) {
          std::vector<std::size_t> out;
          for (std::string_view item : split_list(v, at)) {
            out.push_back(parse_size(item, at));
          }
          c.experiment.train_sizes = std::move(out);
        },
        [](const RunConfig& c) {
          std::string s;
          for (std::size_t v : c.experiment.train_sizes) {
            if (!s.empty()) s += ',';
            s += std::to_string(v);
          }
          return s;
        }};
    t["experiment.repeats"] = size_field(
        [](auto& c) -> auto& { return c.experiment.repeats; });
    t["experiment.pool_size"] = size_field(
        [](auto& c) -> auto& { return c.experiment.pool_size; });
    t["experiment.train_fraction"] = real_field(
        [](auto& c) -> auto& { return c.experiment.train_fraction; });

    t["gradcheck.seeds"] = size_field(
        [](auto& c) -> auto& { return c.gradcheck.seeds; });
    t["gradcheck.step"] =
        real_field([](auto& c) -> auto& { return c.gradcheck.step; });
    t["gradcheck.op_tolerance"] = real_field(
        [](auto& c) -> auto& { return c.gradcheck.op_tolerance; });
    t["gradcheck.network_tolerance"] = real_field(
        [](auto& c) -> auto& { return c.gradcheck.network_tolerance; });
    t["gradcheck.network_coords"] = size_field(
        [](auto& c) -> auto& { return c.gradcheck.network_coords; });
    return t;
  }();
  return table;
}

}  // namespace

void RunConfig::validate() const {
  if (jobs < 1) throw ValidationError("jobs must be >= 1");
  if (data_count < 1) throw ValidationError("data.count must be >= 1");
  trainer_config().validate();
  synthetic_spec().validate();
  experiment_spec().validate();
  gradcheck.validate();
}

TrainerConfig RunConfig::trainer_config() const {
  TrainerConfig t = trainer;
  t.seed = seed;
  return t;
}

SyntheticSpec RunConfig::synthetic_spec() const {
  SyntheticSpec d = data;
  d.seed = seed;
  return d;
}

ExperimentSpec RunConfig::experiment_spec() const {
  ExperimentSpec e = experiment;
  e.trainer = trainer_config();
  e.data = synthetic_spec();
  e.seed = seed;
  e.jobs = jobs;
  return e;
}

RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ValidationError("line " + std::to_string(line_no) +
                            ": expected 'key = value', got '" +
                            std::string(line) + "'");
    }
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    const Location at{key, line_no};
    if (key.empty()) {
      throw ValidationError("line " + std::to_string(line_no) + ": missing key");
    }
    const auto it = fields().find(key);
    if (it == fields().end()) fail(at, "unknown key");
    if (!seen.emplace(key).second) fail(at, "key given more than once");
    it->second.set(cfg, value, at);
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config(buf.str());
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

std::string canonical_text(const RunConfig& cfg) {
  std::string out;
  for (const auto& [key, field] : fields()) {
    out += key + " = " + field.get(cfg) + "\n";
  }
  return out;
}

std::uint64_t config_hash(const RunConfig& cfg) {
  std::string text;
  for (const auto& [key, field] : fields()) {
    if (key == "jobs") continue;
    text += key + " = " + field.get(cfg) + "\n";
  }
  return fnv1a64(text);
}

std::string provenance(const RunConfig& cfg) {
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx",
                static_cast<unsigned long long>(config_hash(cfg)));
  return std::string("config_hash=") + hex + " seed=" + std::to_string(cfg.seed);
}

}  // namespace fess
